"""Closed-form generator bounds and the derivation of their constants.

The four coefficients of the main bound are 4*s_i(95) for the smoothing
functions ``s_functions`` at a -> 1.  ``derive_main_constants`` recomputes
them in extended precision and checks each against the rounded literal used
by :func:`main_bound`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from types import SimpleNamespace
from typing import Callable

import mpmath

from . import specfun
from .errors import CertificationError, DomainError

# Published constants.  One table so every literal used below is greppable.
CONSTANTS: dict[str, float] = {
    "c_log": 2.71,  # coefficient of log(Delta*N(m0))
    "c_inf": 1.29,  # coefficient of |m_infty|
    "c_omega": 1.38,  # coefficient of omega(m0)
    "c_add": 4.13,  # additive constant inside the square
    "zm": 16.0,  # p <= 16 (index * log m)^2 over (Z/mZ)^*
    "isogeny": 26.0,  # 26 (h+ log(Delta N(f)))^2
    "simplified": 62.0,  # 62 (log Delta N(m0))^2 for the full group
    "bach": 72.0,  # Bach's full-group bound rewritten in the same shape
    "bach_raw": 18.0,  # Bach: 18 (log(Delta^2 N(m0)))^2
    "degree_slope": 0.71,  # |m_infty| <= n <= 0.71 log(Delta N) + 1.07
    "degree_offset": 1.07,
    "simplified_slope": 5.62,  # (5.62 log(Delta N) + 5.52)^2
    "simplified_offset": 5.52,
    "log12": 2.48,  # log 12 >= 2.48
    "omega_density": 0.67,  # omega(m)/log m for m > 11000
    "omega_ratio": 1.06,  # omega(f)/log(Delta N(f)) in the isogeny case
    "odlyzko": 4.73,  # log(Delta N(f)) lower bound for quartic CM fields
    "odlyzko_root": 3.263,  # root-discriminant lower bound, degree 4
    "degree6_log": 6.99,  # n(log 2pi - psi(2)) - 3/2 at n = 6
    "degree3_log": 2.74,  # same expression at n = 3
    "chebyshev": 1.03883,  # psi(x) <= C x for all x > 0
    "li_correction": 0.12,  # omega(m) <= li(log m) + 0.12 sqrt(log m)
    "exhaustive_cutoff": 11000.0,
    "small_x": 95.0,
}

CERT_SLACK = 1e-9

_C = CONSTANTS


@dataclass(frozen=True)
class BoundInput:
    delta: int
    norm_m0: int
    m_infty: int = 0
    omega: int = 0
    index: int = 1

    def __post_init__(self):
        if self.delta < 1 or self.norm_m0 < 1:
            raise DomainError("delta and norm_m0 must be >= 1")
        if self.index < 1:
            raise DomainError("index must be >= 1")
        if self.m_infty < 0 or self.omega < 0:
            raise DomainError("m_infty and omega must be >= 0")
        log_dn = math.log(self.delta) + math.log(self.norm_m0)
        if self.omega > log_dn / math.log(2) + 1e-12:
            raise DomainError(
                f"omega={self.omega} exceeds log2(delta*norm_m0)={log_dn / math.log(2):.3f}"
            )

    @property
    def log_delta_norm(self) -> float:
        return math.log(self.delta) + math.log(self.norm_m0)


@dataclass(frozen=True)
class SmoothingParams:
    a: float = 1.0
    x: float = 95.0

    def __post_init__(self):
        if not 0 < self.a <= 1:
            raise DomainError(f"smoothing parameter a must lie in (0, 1], got {self.a}")
        if not self.x >= 1:
            raise DomainError(f"x must be >= 1, got {self.x}")


def main_bound_from_log(
    log_delta_norm: float, m_infty: int = 0, omega: int = 0, index: int = 1
) -> float:
    inner = _C["c_log"] * log_delta_norm + _C["c_inf"] * m_infty + _C["c_omega"] * omega
    return (index * inner + _C["c_add"]) ** 2


def main_bound(inp: BoundInput) -> float:
    """(index*(2.71 log(delta*N) + 1.29 m_infty + 1.38 omega) + 4.13)^2."""
    return main_bound_from_log(inp.log_delta_norm, inp.m_infty, inp.omega, inp.index)


def simplified_bound_62(delta_times_norm: float) -> float:
    if not delta_times_norm >= 12:
        raise DomainError("the simplified bound needs delta*N(m0) >= 12")
    return _C["simplified"] * math.log(delta_times_norm) ** 2


def simplified_intermediate(delta_times_norm: float) -> float:
    """(5.62 log(delta*N) + 5.52)^2, the form before dividing through by log 12."""
    if not delta_times_norm >= 12:
        raise DomainError("the simplified bound needs delta*N(m0) >= 12")
    return (_C["simplified_slope"] * math.log(delta_times_norm) + _C["simplified_offset"]) ** 2


def zm_bound(m: int, index: int = 1) -> float:
    if m < 2:
        raise DomainError(f"zm_bound requires m >= 2, got {m}")
    if index < 1:
        raise DomainError("index must be >= 1")
    return _C["zm"] * (index * math.log(m)) ** 2


def zm_main_bound(m: int, index: int = 1) -> float:
    """The main bound specialised to K = Q, modulus m * infinity."""
    if m < 2:
        raise DomainError(f"zm_main_bound requires m >= 2, got {m}")
    return main_bound_from_log(math.log(m), 1, specfun.omega(m), index)


def isogeny_bound(delta: int, conductor_norm: int, h_plus: int = 1) -> float:
    if delta * conductor_norm < 3:
        raise DomainError("isogeny_bound requires delta*N(f) >= 3")
    if h_plus < 1:
        raise DomainError("h_plus must be >= 1")
    return _C["isogeny"] * (h_plus * (math.log(delta) + math.log(conductor_norm))) ** 2


def cyclotomic_relative_bound(h_k0: int, log_delta: float) -> float:
    if h_k0 < 1:
        raise DomainError("h_k0 must be >= 1")
    if not log_delta > 0:
        raise DomainError("log_delta must be positive")
    return (_C["c_log"] * h_k0 * log_delta + _C["c_add"]) ** 2


def isogeny_constant_factor(log_delta_norm: float, omega_f: int) -> float:
    """(2.71 + 1.38 omega(f)/L + 4.13/L)^2 with L = log(Delta N(f))."""
    L = log_delta_norm
    return (_C["c_log"] + _C["c_omega"] * omega_f / L + _C["c_add"] / L) ** 2


# --- smoothing functions ------------------------------------------------------

_FLOAT = SimpleNamespace(
    log=math.log, sqrt=math.sqrt, exp=math.exp, expm1=math.expm1,
    e=math.e, pi=math.pi, digamma=specfun.digamma, num=float,
)
_MP = SimpleNamespace(
    log=mpmath.log, sqrt=mpmath.sqrt, exp=mpmath.exp, expm1=mpmath.expm1,
    e=mpmath.e, pi=mpmath.pi, digamma=specfun.digamma_mp, num=mpmath.mpf,
)


def _expm1_minus_linear(t, lib):
    # e^t - 1 - t without cancellation for small t
    if abs(t) < 0.05:
        term = t * t / 2
        total = term
        k = 2
        while abs(term) > abs(total) * 1e-40:
            k += 1
            term = term * t / k
            total += term
        return total
    return lib.expm1(t) - t


def limit_term(x: float, b: float, lib=_FLOAT):
    """(x^b - b log x - 1) / (b^2 x^b), which tends to (log x)^2 / 2 as b -> 0."""
    if not x > 0:
        raise DomainError("limit_term requires x > 0")
    if b == 0 or abs(b) > 0.1:
        raise DomainError("limit_term requires 0 < |b| <= 0.1")
    x, b = lib.num(x), lib.num(b)
    t = b * lib.log(x)
    return _expm1_minus_linear(t, lib) / (b * b * lib.exp(t))


def s_functions(params: SmoothingParams, lib=_FLOAT):
    """The five smoothing functions (s1, ..., s5) at (a, x).

    At a = 1 the bracketed a-singular term of s4 is replaced by its limit
    (log x)^2 / 2.
    """
    a, x = lib.num(params.a), lib.num(params.x)
    L = lib.log(x)
    xa = x ** (a + lib.num(1) / 2)
    sx = lib.sqrt(x)
    s1 = 2 / (2 * a + 1) * (1 + ((2 + a) * L + 1) / xa)
    s2 = (
        s1 * (1 / a + 1 / (a + 1))
        + L / xa * (lib.num(3) / 2 + 1 / a + 1 / (a + 1))
        + 1 / xa * (1 / a**2 + 1 / (a + 1) ** 2)
    )
    s3 = 2 * L / (lib.e * a * sx)
    if a == 1:
        bracket = L * L / 2
    else:
        b = a - 1
        if abs(b) <= 0.1:
            bracket = limit_term(x, b, lib)
        else:
            xb = x**b
            bracket = 1 / b**2 - L / (b * xb) - 1 / (b * b * xb)
    s4 = (
        1 / ((a - 2) ** 2 * x ** lib.num(2.5))
        - s1 / 2 * (lib.digamma((a + 1) / 2) - lib.digamma((a + 2) / 2))
        + 1 / (a**2 * sx)
        + bracket / x ** lib.num(1.5)
    )
    s5 = s1 * (lib.digamma(a + 1) - lib.log(2 * lib.pi))
    return s1, s2, s3, s4, s5


# --- certification ---------------------------------------------------------------


@dataclass(frozen=True)
class Certification:
    name: str
    computed: float
    constant: float
    relation: str  # "<=", "<", ">="
    slack: float
    passed: bool
    note: str = ""


def certify(name: str, computed, constant, relation: str = "<=", note: str = "") -> Certification:
    """Check ``computed <relation> constant`` with CERT_SLACK headroom.

    ``<=`` requires computed <= constant - 1e-9, so a value that merely rounds
    to the constant does not pass.
    """
    c, k = mpmath.mpf(computed), mpmath.mpf(constant)
    if relation == "<=":
        slack = k - c
        ok = slack >= CERT_SLACK
    elif relation == "<":
        slack = k - c
        ok = slack > CERT_SLACK
    elif relation == ">=":
        slack = c - k
        ok = slack >= CERT_SLACK
    else:
        raise ValueError(f"unknown relation {relation!r}")
    return Certification(name, float(c), float(k), relation, float(slack), bool(ok), note)


@dataclass
class ConstantDerivation:
    c_log: float
    c_inf: float
    c_omega: float
    c_add: float
    certifications: list[Certification] = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.certifications)


MP_DPS = 40


def _decreasing_on_grid(fn: Callable[[float], float], lo: float, hi: float, points: int = 400) -> bool:
    grid = [lo * (hi / lo) ** (i / (points - 1)) for i in range(points)]
    vals = [fn(x) for x in grid]
    return all(b < a for a, b in zip(vals, vals[1:]))


def derive_main_constants(strict: bool = True) -> ConstantDerivation:
    """Recompute 4*s_i(95) at a -> 1 and certify them against the literals.

    Also checks s5(x) + 2C/e < 0 for x >= 95 and that s1..s4 decrease on
    [95, 1e6].  With ``strict`` a failed check raises CertificationError.
    """
    x0 = _C["small_x"]
    with mpmath.workdps(MP_DPS):
        s1, s2, s3, s4, s5 = s_functions(SmoothingParams(1.0, x0), _MP)
        vals = {"c_log": 4 * s1, "c_inf": 4 * s4, "c_omega": 4 * s3, "c_add": 4 * s2}
        certs = [
            certify("4*s1(95) <= 2.71", vals["c_log"], _C["c_log"]),
            certify("4*s4(95) <= 1.29", vals["c_inf"], _C["c_inf"]),
            certify("4*s3(95) <= 1.38", vals["c_omega"], _C["c_omega"]),
            certify("4*s2(95) <= 4.13", vals["c_add"], _C["c_add"]),
        ]
        two_c_over_e = 2 * mpmath.mpf(_C["chebyshev"]) / mpmath.e
        certs.append(certify("s5(95) + 2C/e < 0", s5 + two_c_over_e, 0, "<"))
        # s1 decreases to 2/3 and psi(2) - log 2pi < 0, so s5 increases to
        # its limit; the limit bounds s5 + 2C/e on all of [95, inf).
        s5_limit = mpmath.mpf(2) / 3 * (specfun.digamma_mp(2) - mpmath.log(2 * mpmath.pi))
        certs.append(
            certify("sup_{x>=95} s5(x) + 2C/e < 0", s5_limit + two_c_over_e, 0, "<",
                    note="supremum is the x -> infinity limit")
        )

    def s5_shifted(x):
        return s_functions(SmoothingParams(1.0, x))[4] + 2 * _C["chebyshev"] / math.e

    grid_max = max(s5_shifted(x0 * (1e8 / x0) ** (i / 599)) for i in range(600))
    certs.append(certify("max s5 + 2C/e on grid [95, 1e8] < 0", grid_max, 0, "<"))
    for idx, label in enumerate(("s1", "s2", "s3", "s4")):
        dec = _decreasing_on_grid(lambda x: s_functions(SmoothingParams(1.0, x))[idx], x0, 1e6)
        certs.append(
            Certification(f"{label} decreasing on [95, 1e6]", float(dec), 1.0, "==", 0.0, dec,
                          note="log-spaced grid, 400 points")
        )
    result = ConstantDerivation(
        c_log=float(vals["c_log"]),
        c_inf=float(vals["c_inf"]),
        c_omega=float(vals["c_omega"]),
        c_add=float(vals["c_add"]),
        certifications=certs,
    )
    if strict and not result.all_passed:
        failed = [c.name for c in certs if not c.passed]
        raise CertificationError(f"constant derivation failed: {failed}")
    return result


def _degree_slope_denominator():
    # log(2 pi) - psi(2)
    return mpmath.log(2 * mpmath.pi) - specfun.digamma_mp(2)


def remark_estimates(delta_times_norm: float) -> tuple[float, float]:
    """Upper bounds (|m_infty| bound, omega bound) in terms of Delta*N(m0)."""
    if not delta_times_norm >= 12:
        raise DomainError("remark_estimates needs delta*N(m0) >= 12")
    L = math.log(delta_times_norm)
    return _C["degree_slope"] * L + _C["degree_offset"], L / math.log(2)


def degree_lower_log(n: int):
    """n (log 2pi - psi(2)) - 3/2, a lower bound for log(Delta N) in degree n."""
    with mpmath.workdps(MP_DPS):
        return n * _degree_slope_denominator() - mpmath.mpf(3) / 2


def certify_secondary_constants() -> list[Certification]:
    certs = []
    with mpmath.workdps(MP_DPS):
        den = _degree_slope_denominator()
        certs.append(certify("1/(log 2pi - psi(2)) <= 0.71", 1 / den, _C["degree_slope"]))
        certs.append(certify("1.5/(log 2pi - psi(2)) <= 1.07", mpmath.mpf(3) / 2 / den,
                             _C["degree_offset"]))
        slope = _C["c_log"] + _C["c_inf"] * mpmath.mpf(_C["degree_slope"]) + _C["c_omega"] / mpmath.log(2)
        certs.append(certify("2.71 + 1.29*0.71 + 1.38/log 2 <= 5.62", slope, _C["simplified_slope"]))
        offset = _C["c_inf"] * mpmath.mpf(_C["degree_offset"]) + _C["c_add"]
        certs.append(certify("1.29*1.07 + 4.13 <= 5.52", offset, _C["simplified_offset"]))
        certs.append(certify("log 12 >= 2.48", mpmath.log(12), _C["log12"], ">="))
        full = (mpmath.mpf(_C["simplified_slope"]) + mpmath.mpf(_C["simplified_offset"]) / mpmath.mpf(_C["log12"])) ** 2
        certs.append(certify("(5.62 + 5.52/2.48)^2 <= 62", full, _C["simplified"]))
        bach = _C["bach_raw"] * 2**2
        certs.append(Certification("18 (2 log)^2 = 72 (log)^2", bach, _C["bach"], "==", 0.0,
                                   bach == _C["bach"], note="Delta^2 N <= (Delta N)^2"))

        lx = mpmath.log(_C["exhaustive_cutoff"])
        li_est = (specfun.log_integral_mp(lx) + mpmath.mpf(_C["li_correction"]) * mpmath.sqrt(lx)) / lx
        certs.append(certify("(li(log 11000) + 0.12 sqrt(log 11000))/log 11000 <= 0.67", li_est,
                             _C["omega_density"]))
        zm_const = (_C["c_log"] + (_C["c_inf"] + mpmath.mpf(_C["c_add"]) / 2) / lx
                    + _C["c_omega"] * mpmath.mpf(_C["omega_density"])) ** 2
        certs.append(certify("(2.71 + (1.29 + 4.13/2)/log 11000 + 1.38*0.67)^2 <= 16", zm_const, _C["zm"]))

        certs.append(certify("4 log 3.263 >= 4.73", 4 * mpmath.log(mpmath.mpf(_C["odlyzko_root"])),
                             _C["odlyzko"], ">="))
        certs.append(certify("6(log 2pi - psi(2)) - 3/2 >= 6.99", 6 * den - mpmath.mpf(3) / 2,
                             _C["degree6_log"], ">="))
        certs.append(certify("3(log 2pi - psi(2)) - 3/2 >= 2.74", 3 * den - mpmath.mpf(3) / 2,
                             _C["degree3_log"], ">="))
        certs.append(certify("5/4.73 <= 1.06", mpmath.mpf(5) / mpmath.mpf(_C["odlyzko"]), _C["omega_ratio"]))
        tail = 5 / mpmath.log(2 * 3 * 5 * 7 * 11) + 1 / mpmath.log(13)
        certs.append(certify("5/log(2310) + 1/log 13 <= 1.06", tail, _C["omega_ratio"]))
        iso = (_C["c_log"] + _C["c_omega"] * mpmath.mpf(_C["omega_ratio"])
               + mpmath.mpf(_C["c_add"]) / mpmath.mpf(_C["odlyzko"])) ** 2
        certs.append(certify("(2.71 + 1.38*1.06 + 4.13/4.73)^2 <= 26", iso, _C["isogeny"]))
    return certs


SMALL_CASES = (
    ("n=1, |m_inf|=1, N(m0)=3", lambda: main_bound(BoundInput(1, 3, 1, 1, 1)), 95.59),
    ("n=1, |m_inf|=0, N(m0)=5", lambda: main_bound(BoundInput(1, 5, 0, 1, 1)), 97.44),
    ("n=2, Delta*N(m0)=8", lambda: main_bound(BoundInput(8, 1, 0, 0, 1)), 95.36),
    ("n>2, log(Delta*N) >= 2.74", lambda: main_bound_from_log(_C["degree3_log"]), 133.52),
)


def certify_small_cases() -> list[Certification]:
    """Every small-x branch bound must reach x = 95."""
    out = []
    for label, fn, shown in SMALL_CASES:
        value = fn()
        out.append(certify(f"small case {label}: B >= 95", value, _C["small_x"], ">=",
                           note=f"B = {value:.4f}, displayed {shown}"))
    return out


def certify_all() -> list[Certification]:
    return (
        derive_main_constants(strict=False).certifications
        + certify_secondary_constants()
        + certify_small_cases()
    )
