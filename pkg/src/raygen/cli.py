"""Command-line front end.

    raygen bound {ray|zm|isogeny|cyclotomic} ...
    raygen constants check
    raygen verify {zm|quad} ...

Data goes to stdout (or --out); progress and the summary go to stderr.
Exit codes: 0 ok, 1 verification failure, 2 usage error, 3 resource limit.
"""
from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

from . import __version__, bounds, quadforms, specfun, zmstar
from .abelian import DEFAULT_SUBGROUP_CAP
from .errors import DomainError, ResourceLimitError
from .report import Report

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    subcommand: str
    params: dict[str, Any] = field(default_factory=dict)
    out: str | None = None
    format: str = "csv"
    jobs: int = 1
    sieve_limit: int = specfun.DEFAULT_SIEVE_LIMIT
    subgroup_cap: int = DEFAULT_SUBGROUP_CAP
    verbose: bool = False

    def __post_init__(self):
        if self.format not in ("csv", "json"):
            raise UsageError(f"format must be csv or json, got {self.format!r}")
        for name in ("jobs", "sieve_limit", "subgroup_cap"):
            if getattr(self, name) < 1:
                raise UsageError(f"--{name.replace('_', '-')} must be positive")

    def echo(self) -> dict[str, Any]:
        # jobs is left out so that reports do not depend on parallelism
        return {
            "command": f"{self.command} {self.subcommand}",
            **self.params,
            "sieve_limit": self.sieve_limit,
            "subgroup_cap": self.subgroup_cap,
        }


def _positive(name: str) -> Callable[[str], int]:
    def parse(text: str) -> int:
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be an integer, got {text!r}") from None
        if v < 1:
            raise argparse.ArgumentTypeError(f"{name} must be >= 1, got {v}")
        return v

    return parse


def _nonneg(name: str) -> Callable[[str], int]:
    def parse(text: str) -> int:
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be an integer, got {text!r}") from None
        if v < 0:
            raise argparse.ArgumentTypeError(f"{name} must be >= 0, got {v}")
        return v

    return parse


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default=argparse.SUPPRESS)
    common.add_argument("--out", default=argparse.SUPPRESS, help="write the report here instead of stdout")
    common.add_argument("--jobs", type=_positive("--jobs"), default=argparse.SUPPRESS)
    common.add_argument("--sieve-limit", type=_positive("--sieve-limit"), default=argparse.SUPPRESS)
    common.add_argument("--subgroup-cap", type=_positive("--subgroup-cap"), default=argparse.SUPPRESS)
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)

    p = _Parser(prog="raygen", description="Explicit prime-generator bounds and their verification.",
                parents=[common])
    p.add_argument("--version", action="version", version=f"raygen {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    pb = sub.add_parser("bound", help="evaluate a bound")
    bsub = pb.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    r = bsub.add_parser("ray", parents=[common], help="main bound for a ray class group subgroup")
    r.add_argument("--delta", type=_positive("--delta"), required=True, help="|disc K|")
    r.add_argument("--norm-m0", type=_positive("--norm-m0"), default=1)
    r.add_argument("--minf", type=_nonneg("--minf"), default=0, help="number of real places in the modulus")
    r.add_argument("--omega", type=_nonneg("--omega"), default=0, help="distinct primes dividing m0")
    r.add_argument("--index", type=_positive("--index"), default=1)
    z = bsub.add_parser("zm", parents=[common], help="16 (index log m)^2")
    z.add_argument("--m", type=_positive("--m"), required=True)
    z.add_argument("--index", type=_positive("--index"), default=1)
    i = bsub.add_parser("isogeny", parents=[common], help="26 (h+ log(Delta N(f)))^2")
    i.add_argument("--delta", type=_positive("--delta"), required=True)
    i.add_argument("--conductor-norm", type=_positive("--conductor-norm"), default=1)
    i.add_argument("--hplus", type=_positive("--hplus"), default=1)
    c = bsub.add_parser("cyclotomic", parents=[common], help="(2.71 h(K0) log Delta + 4.13)^2")
    c.add_argument("--hk0", type=_positive("--hk0"), required=True)
    g = c.add_mutually_exclusive_group(required=True)
    g.add_argument("--delta", type=_positive("--delta"))
    g.add_argument("--log-delta", type=float)

    pc = sub.add_parser("constants", help="re-derive and certify the published constants")
    csub = pc.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    csub.add_parser("check", parents=[common])

    pv = sub.add_parser("verify", help="exhaustive verification scans")
    vsub = pv.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    vz = vsub.add_parser("zm", parents=[common], help="every subgroup of (Z/mZ)^*")
    vz.add_argument("--min-m", type=_positive("--min-m"), default=2)
    vz.add_argument("--max-m", type=_positive("--max-m"), required=True)
    vq = vsub.add_parser("quad", parents=[common], help="prime-form generation of imaginary quadratic class groups")
    vq.add_argument("--min-absdisc", type=_positive("--min-absdisc"), default=3)
    vq.add_argument("--max-absdisc", type=_positive("--max-absdisc"), required=True,
                    help="largest |disc K| of the maximal order")
    vq.add_argument("--conductor", type=_positive("--conductor"), nargs="+", default=[1])
    return p


_GLOBAL_DEFAULTS = {
    "format": "csv",
    "out": None,
    "jobs": 1,
    "sieve_limit": specfun.DEFAULT_SIEVE_LIMIT,
    "subgroup_cap": DEFAULT_SUBGROUP_CAP,
    "verbose": False,
}


def parse_config(argv: Sequence[str]) -> RunConfig:
    ns = vars(build_parser().parse_args(argv))
    opts = {k: ns.pop(k, v) for k, v in _GLOBAL_DEFAULTS.items()}
    command, subcommand = ns.pop("command"), ns.pop("subcommand")
    return RunConfig(command, subcommand, ns, **opts)


# -- commands --------------------------------------------------------------


def _print_kv(lines: list[tuple[str, float]], out):
    for k, v in lines:
        print(f"{k} = {v!r}", file=out)


def cmd_bound(cfg: RunConfig, out) -> int:
    p = cfg.params
    detail: list[tuple[str, float]] = []
    if cfg.subcommand == "ray":
        inp = bounds.BoundInput(p["delta"], p["norm_m0"], p["minf"], p["omega"], p["index"])
        value = bounds.main_bound(inp)
        L = inp.log_delta_norm
        C = bounds.CONSTANTS
        detail += [("log_delta_norm", L), ("c_log", C["c_log"]), ("c_inf", C["c_inf"]),
                   ("c_omega", C["c_omega"]), ("c_add", C["c_add"])]
        dn = p["delta"] * p["norm_m0"]
        if dn >= 12:
            minf_max, omega_max = bounds.remark_estimates(dn)
            detail += [("minf_upper", minf_max), ("omega_upper", omega_max),
                       ("simplified_intermediate", bounds.simplified_intermediate(dn)),
                       ("simplified_62", bounds.simplified_bound_62(dn))]
    elif cfg.subcommand == "zm":
        if p["m"] < 2:
            raise DomainError("--m must be >= 2")
        value = bounds.zm_bound(p["m"], p["index"])
        detail += [("log_m", math.log(p["m"])), ("omega_m", float(specfun.omega(p["m"]))),
                   ("main_bound", bounds.zm_main_bound(p["m"], p["index"]))]
    elif cfg.subcommand == "isogeny":
        value = bounds.isogeny_bound(p["delta"], p["conductor_norm"], p["hplus"])
        detail += [("log_delta_norm", math.log(p["delta"]) + math.log(p["conductor_norm"]))]
    else:
        log_delta = p["log_delta"] if p["log_delta"] is not None else math.log(p["delta"])
        value = bounds.cyclotomic_relative_bound(p["hk0"], log_delta)
        detail += [("log_delta", log_delta)]
    if cfg.verbose:
        _print_kv(detail, out)
        _print_kv([("bound", value)], out)
    else:
        print(f"{value:.17g}", file=out)
    return EXIT_OK


def _progress(label: str, enabled: bool):
    if not enabled:
        return None
    step = [0]

    def report(done: int, total: int):
        pct = done * 100 // total
        if pct >= step[0] or done == total:
            print(f"\r{label}: {done}/{total}", end="\n" if done == total else "", file=sys.stderr, flush=True)
            step[0] = pct + 5

    return report


def cmd_constants_check(cfg: RunConfig) -> Report:
    return Report.from_results("constants", cfg.echo(), bounds.certify_all())


def cmd_verify_zm(cfg: RunConfig) -> Report:
    p = cfg.params
    if p["max_m"] > zmstar.DEFAULT_MODULUS_LIMIT:
        raise ResourceLimitError(f"--max-m {p['max_m']} exceeds the modulus limit {zmstar.DEFAULT_MODULUS_LIMIT}")
    zcfg = zmstar.ZmScanConfig(cfg.subgroup_cap, cfg.sieve_limit, cfg.jobs)
    results = zmstar.scan(p["min_m"], p["max_m"], zcfg, _progress("verify zm", cfg.verbose or sys.stderr.isatty()))
    return Report.from_results("zm", cfg.echo(), results)


def cmd_verify_quad(cfg: RunConfig) -> Report:
    p = cfg.params
    worst = p["max_absdisc"] * max(p["conductor"]) ** 2
    if worst > quadforms.DEFAULT_DISC_LIMIT:
        raise ResourceLimitError(f"|D| up to {worst} exceeds the discriminant limit {quadforms.DEFAULT_DISC_LIMIT}")
    results = quadforms.scan_discriminants(
        p["max_absdisc"], p["conductor"], p["min_absdisc"], cfg.jobs,
        _progress("verify quad", cfg.verbose or sys.stderr.isatty()), cfg.sieve_limit,
    )
    return Report.from_results("quad", cfg.echo(), results)


def _emit(report: Report, cfg: RunConfig, out) -> int:
    text = report.dump(cfg.format)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        out.write(text)
    print(report.summary_line(), file=sys.stderr)
    return EXIT_OK if report.ok else EXIT_FAIL


def run(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        cfg = parse_config(argv)
        if cfg.command == "bound":
            return cmd_bound(cfg, out)
        handlers = {
            ("constants", "check"): cmd_constants_check,
            ("verify", "zm"): cmd_verify_zm,
            ("verify", "quad"): cmd_verify_quad,
        }
        report = handlers[(cfg.command, cfg.subcommand)](cfg)
        return _emit(report, cfg, out)
    except UsageError as exc:
        print(f"raygen: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"raygen: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceLimitError as exc:
        print(f"raygen: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except OSError as exc:
        print(f"raygen: {exc}", file=sys.stderr)
        return EXIT_FAIL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
