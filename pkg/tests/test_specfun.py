import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from raygen import specfun
from raygen.errors import DomainError, ResourceLimitError

TOL = 1e-11

pos = st.floats(min_value=1e-3, max_value=1e6, allow_nan=False, allow_infinity=False)
pos_tri = st.floats(min_value=0.05, max_value=1e6, allow_nan=False, allow_infinity=False)
tiny = st.floats(min_value=1e-8, max_value=1e-3)


@given(pos)
def test_digamma_recurrence(x):
    assert abs(specfun.digamma(x + 1) - specfun.digamma(x) - 1 / x) <= TOL


@given(pos)
def test_digamma_duplication(x):
    lhs = specfun.digamma(2 * x)
    rhs = 0.5 * specfun.digamma(x) + 0.5 * specfun.digamma(x + 0.5) + math.log(2)
    assert abs(lhs - rhs) <= TOL


@given(pos_tri)
def test_trigamma_recurrence(x):
    assert abs(specfun.trigamma(x + 1) - specfun.trigamma(x) + 1 / (x * x)) <= TOL


@given(pos_tri)
def test_trigamma_duplication(x):
    lhs = specfun.trigamma(2 * x)
    rhs = 0.25 * (specfun.trigamma(x) + specfun.trigamma(x + 0.5))
    assert abs(lhs - rhs) <= TOL


@given(tiny)
def test_identities_near_zero_relative(x):
    # near 0 the terms are of size 1/x and 1/x^2, so the check is relative
    d = specfun.digamma(x + 1) - specfun.digamma(x) - 1 / x
    assert abs(d) <= TOL * (1 / x)
    t = specfun.trigamma(x + 1) - specfun.trigamma(x) + 1 / (x * x)
    assert abs(t) <= TOL * (1 / (x * x))


@settings(max_examples=300)
@given(st.floats(min_value=1e-6, max_value=1e8))
def test_digamma_matches_mpmath(x):
    ref = float(mpmath.digamma(mpmath.mpf(x)))
    assert specfun.digamma(x) == pytest.approx(ref, rel=1e-13, abs=1e-14)


@settings(max_examples=300)
@given(st.floats(min_value=1e-6, max_value=1e8))
def test_trigamma_matches_scipy(x):
    ref = float(special.polygamma(1, x))
    assert specfun.trigamma(x) == pytest.approx(ref, rel=1e-13)


def test_known_values():
    assert specfun.digamma(1.0) == pytest.approx(-specfun.EULER_GAMMA, abs=1e-15)
    assert specfun.digamma(2.0) == pytest.approx(1 - specfun.EULER_GAMMA, abs=1e-15)
    assert specfun.trigamma(1.0) == pytest.approx(math.pi**2 / 6, rel=1e-15)
    assert specfun.digamma(0.5) == pytest.approx(-specfun.EULER_GAMMA - 2 * math.log(2), abs=1e-15)


def test_mp_twins_high_precision():
    with mpmath.workdps(40):
        for x in ("0.3", "2", "95", "12345.678"):
            v = mpmath.mpf(x)
            assert abs(specfun.digamma_mp(v) - mpmath.digamma(v)) < mpmath.mpf(10) ** -30
            assert abs(specfun.trigamma_mp(v) - mpmath.psi(1, v)) < mpmath.mpf(10) ** -30
            if v > 1:
                assert abs(specfun.log_integral_mp(v) - mpmath.li(v)) < mpmath.mpf(10) ** -30


@pytest.mark.parametrize("x", [0.0, -1.0, -2.5])
def test_digamma_domain(x):
    with pytest.raises(DomainError):
        specfun.digamma(x)
    with pytest.raises(DomainError):
        specfun.trigamma(x)


def test_log_integral_values():
    assert specfun.log_integral(10) == pytest.approx(6.1655995047872979, rel=1e-14)
    assert specfun.log_integral(math.log(11000)) == pytest.approx(float(mpmath.li(math.log(11000))), rel=1e-13)


@settings(max_examples=200)
@given(st.floats(min_value=1.5, max_value=1e12))
def test_log_integral_matches_scipy(x):
    ref = float(special.expi(math.log(x)))
    assert specfun.log_integral(x) == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("x", [1.0, 0.5, 0.0])
def test_log_integral_domain(x):
    with pytest.raises(DomainError):
        specfun.log_integral(x)


def test_sieve_small():
    s = specfun.Sieve(1000)
    assert list(s.primes_below(30)) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert list(s.primes_below(2)) == []
    assert len(s.primes_below(1001)) == 168
    with pytest.raises(ResourceLimitError):
        s.primes_below(1003)


def test_sieve_iter_matches_table():
    s = specfun.Sieve(50000)
    assert np.array_equal(np.fromiter(s.primes_iter(start_chunk=100), dtype=np.int64), s.primes_below(50001))


def test_sieve_matches_sympy():
    import sympy

    s = specfun.Sieve(10**5)
    assert list(s.primes_below(10**5)) == list(sympy.primerange(2, 10**5))


@given(st.integers(min_value=1, max_value=10**6))
def test_von_mangoldt(m):
    f = specfun.factorize(m)
    expected = math.log(next(iter(f))) if len(f) == 1 else 0.0
    assert specfun.von_mangoldt(m) == expected


def test_mangoldt_table_matches_pointwise():
    t = specfun.mangoldt_table(2000)
    assert all(t[k] == specfun.von_mangoldt(k) for k in range(1, 2000))


def test_chebyshev_psi_values():
    # psi is the strict sum over m < x
    assert specfun.chebyshev_psi(10.5) == pytest.approx(math.log(2**3 * 3**2 * 5 * 7), rel=1e-15)
    assert specfun.chebyshev_psi(2) == 0.0
    assert specfun.chebyshev_psi(2.0001) == pytest.approx(math.log(2))
    assert specfun.chebyshev_psi(0) == 0.0


def test_chebyshev_psi_matches_lcm():
    # psi(x) = log lcm(1..floor(x)) for non-integer x
    for n in (50, 200, 1000):
        assert specfun.chebyshev_psi(n + 0.5) == pytest.approx(math.log(math.lcm(*range(1, n + 1))), rel=1e-12)


def test_chebyshev_ratio_bound_to_1e6():
    ratio, at = specfun.chebyshev_ratio_max(10**6)
    assert ratio <= 1.03883
    assert at == 113
    assert ratio == pytest.approx(1.03882057760913, rel=1e-12)


@given(st.integers(min_value=1, max_value=10**9))
def test_factorize_roundtrip(m):
    f = specfun.factorize(m)
    assert math.prod(p**e for p, e in f.items()) == m
    assert specfun.omega(m) == len(f)


def test_factorize_domain():
    with pytest.raises(DomainError):
        specfun.factorize(0)
