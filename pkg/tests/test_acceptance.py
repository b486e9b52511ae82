"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``ACCEPTANCE <id> PASS|FAIL`` line with its
measurements, then asserts.
"""
import io
import math
import time

import numpy as np

import oracles
from raygen import abelian, arith, bounds, cli, quadforms as qf, report, specfun


def announce(capsys, ident, ok, detail):
    with capsys.disabled():
        print(f"\nACCEPTANCE {ident} {'PASS' if ok else 'FAIL'}: {detail}")


def run_cli(argv):
    out = io.StringIO()
    code = cli.run(argv, out=out)
    return code, out.getvalue()


def test_constant_rederivation(capsys):
    t0 = time.perf_counter()
    code, text = run_cli(["constants", "check", "--format", "json"])
    elapsed = time.perf_counter() - t0
    rows = {r["name"]: r for r in report.read_json(text)["rows"]}
    main = ["4*s1(95) <= 2.71", "4*s4(95) <= 1.29", "4*s3(95) <= 1.38", "4*s2(95) <= 4.13"]
    main_ok = all(rows[n]["status"] == "PASS" and 0 < rows[n]["slack"] < 0.01 for n in main)
    s5_ok = rows["s5(95) + 2C/e < 0"]["status"] == "PASS" and rows["s5(95) + 2C/e < 0"]["computed"] < 0
    secondary = ["<= 0.71", "<= 1.07", "<= 0.67", "<= 1.06", ">= 4.73"]
    secondary_ok = all(
        any(n.endswith(suffix) and r["status"] == "PASS" for n, r in rows.items()) for suffix in secondary
    )
    ok = code == 0 and main_ok and s5_ok and secondary_ok and elapsed < 1.0
    slacks = ", ".join(f"{rows[n]['computed']:.6f}" for n in main)
    announce(capsys, "constants", ok,
             f"4*s_i(95) = {slacks}; s5 term {rows['s5(95) + 2C/e < 0']['computed']:.4f}; {elapsed:.3f}s")
    assert ok


def test_small_case_values(capsys):
    expected = [95.59, 97.44, 95.36, 133.52]
    got = [fn() for _, fn, _ in bounds.SMALL_CASES]
    truncated = [math.floor(v * 100) / 100 for v in got]
    ok = truncated == expected
    announce(capsys, "case-values", ok, ", ".join(f"{v:.4f}" for v in got))
    assert ok


def test_zm_exhaustive_to_3000(capsys):
    t0 = time.perf_counter()
    code, text = run_cli(["verify", "zm", "--max-m", "3000"])
    elapsed = time.perf_counter() - t0
    rows = report.read_csv(text, "zm")
    moduli = {r["modulus"] for r in rows}
    ok = (code == 0 and moduli == set(range(3, 3001))
          and all(r["status"] == "PASS" for r in rows) and elapsed < 600)
    worst = max(rows, key=lambda r: r["largest_needed_prime"] / r["bound"])
    announce(capsys, "zm-3000", ok,
             f"{len(rows)} subgroups over {len(moduli)} moduli; tightest m={worst['modulus']} "
             f"index={worst['subgroup_index']} p={worst['largest_needed_prime']} "
             f"bound={worst['bound']:.1f}; {elapsed:.1f}s")
    assert ok


def test_quadratic_connectivity(capsys):
    t0 = time.perf_counter()
    code1, text1 = run_cli(["verify", "quad", "--max-absdisc", "5000", "--conductor", "1"])
    code2, text2 = run_cli(["verify", "quad", "--max-absdisc", "1000", "--conductor", "2"])
    elapsed = time.perf_counter() - t0
    rows1 = report.read_csv(text1, "quad")
    rows2 = report.read_csv(text2, "quad")
    expected1 = set(arith.fundamental_discriminants(5000))
    expected2 = set(arith.fundamental_discriminants(1000))
    flagged = {(r["fundamental_disc"], r["conductor_norm"]) for r in rows1 + rows2 if r["exceptional"]}
    ok = (
        code1 == 0 and code2 == 0
        and {r["fundamental_disc"] for r in rows1} == expected1
        and {r["fundamental_disc"] for r in rows2} == expected2
        and all(r["status"] in ("PASS", "VACUOUS") for r in rows1 + rows2)
        and all(r["conductor_norm"] == 4 for r in rows2)
        and flagged == {(-4, 1), (-3, 1)}
        and {(d, n) for d, n, _, _ in qf.isogeny_exceptions()} == {(-4, 1), (-4, 2), (-3, 1), (-3, 3), (5, 1)}
        and elapsed < 300
    )
    worst = max(rows1 + rows2, key=lambda r: r["threshold_prime"] / r["bound"])
    announce(capsys, "quad-connectivity", ok,
             f"{len(rows1)} + {len(rows2)} class groups; tightest D={worst['discriminant']} "
             f"p={worst['threshold_prime']} bound={worst['bound']:.1f}; exceptions flagged {sorted(flagged)}; "
             f"{elapsed:.1f}s")
    assert ok


def _specfun_identities():
    worst = 0.0
    xs = np.geomspace(1e-3, 1e6, 20001)
    for x in xs:
        x = float(x)
        worst = max(
            worst,
            abs(specfun.digamma(x + 1) - specfun.digamma(x) - 1 / x),
            abs(specfun.digamma(2 * x) - 0.5 * (specfun.digamma(x) + specfun.digamma(x + 0.5)) - math.log(2)),
        )
        if x >= 0.05:
            worst = max(
                worst,
                abs(specfun.trigamma(x + 1) - specfun.trigamma(x) + 1 / (x * x)),
                abs(specfun.trigamma(2 * x) - 0.25 * (specfun.trigamma(x) + specfun.trigamma(x + 0.5))),
            )
    return worst


def _subgroup_count_reference(group):
    inv = group.invariant_factors
    if abelian.subgroup_count(group) <= 20000:
        return len(abelian.enumerate_subgroups(group, cap=20000)), "enumeration"
    if len(set(inv)) == 1 and arith.is_prime(inv[0]):
        return oracles.galois_number(len(inv), inv[0]), "galois"
    return oracles.goursat_count(group), "goursat"


def _form_table_axioms(D):
    forms = qf.reduced_forms(D)
    index = {f: i for i, f in enumerate(forms)}
    h = len(forms)
    table = np.empty((h, h), dtype=np.int64)
    for i, f in enumerate(forms):
        for j, g in enumerate(forms):
            k = index.get(qf.compose(f, g))
            if k is None:
                return False, h
            table[i, j] = k
    e = index[qf.principal_form(D)]
    ids = np.arange(h)
    ok = np.array_equal(table[e], ids) and np.array_equal(table[:, e], ids)
    ok &= np.array_equal(table, table.T)
    ok &= all(table[i, index[f.inverse()]] == e for i, f in enumerate(forms))
    # (ab)c == a(bc) for every triple
    left = table[table[:, :, None], ids[None, None, :]]
    right = table[ids[:, None, None], table[None, :, :]]
    ok &= np.array_equal(left, right)
    # Latin square: every row is a permutation
    ok &= all(len(set(row)) == h for row in table.tolist())
    return bool(ok), h


def test_property_suites(capsys):
    t0 = time.perf_counter()
    failures = []

    worst = _specfun_identities()
    if worst > 1e-11:
        failures.append(f"specfun identity residual {worst:.2e}")

    groups = oracles.all_abelian_groups(512)
    methods = {}
    for g in groups:
        ref, how = _subgroup_count_reference(g)
        methods[how] = methods.get(how, 0) + 1
        if abelian.subgroup_count(g) != ref:
            failures.append(f"subgroup count {g.invariant_factors}")
        if not oracles.character_orthogonality_exact(g):
            failures.append(f"orthogonality {g.invariant_factors}")

    discs = [D for D in range(-3, -2001, -1) if D % 4 in (0, 1)]
    largest_h = 0
    for D in discs:
        ok, h = _form_table_axioms(D)
        largest_h = max(largest_h, h)
        if not ok:
            failures.append(f"form axioms D={D}")

    ratio, at = specfun.chebyshev_ratio_max(10**6)
    if ratio > 1.03883:
        failures.append(f"psi(x)/x = {ratio} at {at}")

    elapsed = time.perf_counter() - t0
    ok = not failures
    announce(capsys, "property-suites", ok,
             f"identity residual {worst:.1e}; {len(groups)} groups (methods {methods}); "
             f"{len(discs)} discriminants, h <= {largest_h}; max psi(x)/x = {ratio:.5f} at {at}; "
             f"{elapsed:.1f}s" + (f"; failures {failures[:5]}" if failures else ""))
    assert ok, failures
