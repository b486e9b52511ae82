import math

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from raygen import bounds, specfun
from raygen.bounds import BoundInput, SmoothingParams
from raygen.errors import DomainError


def oracle_s(a, x, dps=80, shift=0):
    """The five smoothing functions straight from their closed forms, using
    mpmath's own digamma; ``shift`` moves a to a - 10^-shift."""
    with mpmath.workdps(dps):
        a, x = mpmath.mpf(a), mpmath.mpf(x)
        if shift:
            a -= mpmath.mpf(10) ** -shift
        L = mpmath.log(x)
        xa = x ** (a + mpmath.mpf(1) / 2)
        s1 = 2 / (2 * a + 1) * (1 + ((2 + a) * L + 1) / xa)
        s2 = (s1 * (1 / a + 1 / (a + 1)) + L / xa * (mpmath.mpf(3) / 2 + 1 / a + 1 / (a + 1))
              + 1 / xa * (1 / a**2 + 1 / (a + 1) ** 2))
        s3 = 2 * L / (mpmath.e * a * mpmath.sqrt(x))
        s4 = (1 / ((a - 2) ** 2 * x ** mpmath.mpf(2.5))
              - s1 / 2 * (mpmath.digamma((a + 1) / 2) - mpmath.digamma((a + 2) / 2))
              + 1 / (a**2 * mpmath.sqrt(x))
              + (1 / (1 - a) ** 2 - L / ((a - 1) * x ** (a - 1)) - 1 / ((a - 1) ** 2 * x ** (a - 1)))
              / x ** mpmath.mpf(1.5))
        s5 = s1 * (mpmath.digamma(a + 1) - mpmath.log(2 * mpmath.pi))
        return s1, s2, s3, s4, s5


def test_constants_match_independent_oracle():
    d = bounds.derive_main_constants()
    s1, s2, s3, s4, _ = oracle_s(1, 95, shift=30)
    assert d.c_log == pytest.approx(float(4 * s1), rel=1e-12)
    assert d.c_add == pytest.approx(float(4 * s2), rel=1e-12)
    assert d.c_omega == pytest.approx(float(4 * s3), rel=1e-12)
    assert d.c_inf == pytest.approx(float(4 * s4), rel=1e-12)


def test_constant_values():
    d = bounds.derive_main_constants()
    assert d.c_log == pytest.approx(2.708891, abs=1e-6)
    assert d.c_inf == pytest.approx(1.286460, abs=1e-6)
    assert d.c_omega == pytest.approx(1.375039, abs=1e-6)
    assert d.c_add == pytest.approx(4.127754, abs=1e-6)
    for name in ("c_log", "c_inf", "c_omega", "c_add"):
        slack = bounds.CONSTANTS[name] - getattr(d, name)
        assert 0 < slack < 0.01


@pytest.mark.parametrize("a", [0.3, 0.7, 0.95, 0.999])
@pytest.mark.parametrize("x", [95.0, 1000.0, 1e5])
def test_s_functions_away_from_one(a, x):
    got = bounds.s_functions(SmoothingParams(a, x))
    ref = oracle_s(a, x)
    for g, r in zip(got, ref):
        assert g == pytest.approx(float(r), rel=1e-11)


@given(st.floats(min_value=1e-9, max_value=0.1), st.floats(min_value=1.5, max_value=1e8))
def test_limit_term_continuity(b, x):
    # (x^b - b log x - 1)/(b^2 x^b) against mpmath at high precision
    with mpmath.workdps(60):
        xb = mpmath.mpf(x) ** b
        ref = (xb - b * mpmath.log(x) - 1) / (b * b * xb)
    assert bounds.limit_term(x, b) == pytest.approx(float(ref), rel=1e-9)


def test_limit_term_tends_to_half_log_squared():
    for x in (95.0, 1e4):
        assert bounds.limit_term(x, 1e-8) == pytest.approx(math.log(x) ** 2 / 2, rel=1e-6)


@pytest.mark.parametrize("b", [0.0, 0.2, -0.5])
def test_limit_term_domain(b):
    with pytest.raises(DomainError):
        bounds.limit_term(95.0, b)


def test_s5_negative_beyond_95():
    for x in (95.0, 1e3, 1e6, 1e12):
        s5 = bounds.s_functions(SmoothingParams(1.0, x))[4]
        assert s5 + 2 * 1.03883 / math.e < 0


@pytest.mark.parametrize(
    "inp,expected",
    [
        (BoundInput(1, 3, 1, 1, 1), 95.59),
        (BoundInput(1, 5, 0, 1, 1), 97.44),
        (BoundInput(8, 1, 0, 0, 1), 95.36),
    ],
)
def test_small_case_values(inp, expected):
    v = bounds.main_bound(inp)
    assert math.floor(v * 100) / 100 == expected


def test_degree3_small_case():
    assert math.floor(bounds.main_bound_from_log(2.74) * 100) / 100 == 133.52


def test_main_bound_formula():
    inp = BoundInput(delta=23, norm_m0=7, m_infty=0, omega=1, index=3)
    L = math.log(23 * 7)
    assert bounds.main_bound(inp) == pytest.approx((3 * (2.71 * L + 1.38) + 4.13) ** 2, rel=1e-15)


@given(
    st.integers(min_value=1, max_value=10**6),
    st.integers(min_value=1, max_value=10**6),
    st.integers(min_value=0, max_value=6),
    st.integers(min_value=1, max_value=50),
)
def test_main_bound_monotone_in_index(delta, norm, minf, index):
    inp = BoundInput(delta, norm, minf, 0, index)
    nxt = BoundInput(delta, norm, minf, 0, index + 1)
    if delta * norm > 1 or minf:
        assert bounds.main_bound(nxt) > bounds.main_bound(inp)
    else:
        assert bounds.main_bound(nxt) == bounds.main_bound(inp)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(delta=0, norm_m0=1),
        dict(delta=1, norm_m0=0),
        dict(delta=5, norm_m0=1, index=0),
        dict(delta=5, norm_m0=1, m_infty=-1),
        dict(delta=2, norm_m0=2, omega=3),
    ],
)
def test_bound_input_validation(kwargs):
    with pytest.raises(DomainError):
        BoundInput(**kwargs)


def test_zm_bound_values():
    assert bounds.zm_bound(11000) == pytest.approx(16 * math.log(11000) ** 2, rel=1e-15)
    assert bounds.zm_bound(11000) == pytest.approx(1385.52, abs=0.01)
    assert bounds.zm_bound(100, 2) == pytest.approx(64 * math.log(100) ** 2)
    with pytest.raises(DomainError):
        bounds.zm_bound(1)


def test_zm_main_bound_below_16_form_beyond_cutoff():
    # proper subgroups beyond the exhaustive range: 16 (i log m)^2 dominates
    for m in (11001, 30030, 510510, 9699690, 10**6 + 3):
        for i in (2, 3, 5, 40):
            assert bounds.zm_main_bound(m, i) <= bounds.zm_bound(m, i)


def test_isogeny_and_cyclotomic():
    assert bounds.isogeny_bound(23, 1) == pytest.approx(255.61, abs=0.01)
    assert bounds.isogeny_bound(23, 1, 2) == pytest.approx(4 * 26 * math.log(23) ** 2)
    assert bounds.cyclotomic_relative_bound(1, math.log(1e6)) == pytest.approx(
        (2.71 * math.log(1e6) + 4.13) ** 2, rel=1e-15
    )
    with pytest.raises(DomainError):
        bounds.isogeny_bound(1, 2)
    with pytest.raises(DomainError):
        bounds.cyclotomic_relative_bound(0, 1.0)


@given(st.floats(min_value=12, max_value=1e30))
def test_simplified_bound_dominates(dn):
    # (5.62 L + 5.52)^2 <= 62 L^2 once L >= log 12
    assert bounds.simplified_intermediate(dn) <= bounds.simplified_bound_62(dn) * (1 + 1e-12)


def test_simplified_bound_domain():
    with pytest.raises(DomainError):
        bounds.simplified_bound_62(11.9)


@given(
    st.integers(min_value=1, max_value=10**5),
    st.integers(min_value=1, max_value=10**5),
)
def test_main_bound_below_simplified(delta, norm):
    # full group: |m_inf| <= 0.71 L + 1.07, omega <= L / log 2
    dn = delta * norm
    if dn < 12:
        return
    minf_max, omega_max = bounds.remark_estimates(dn)
    L = math.log(dn)
    b = (2.71 * L + 1.29 * minf_max + 1.38 * omega_max + 4.13) ** 2
    assert b <= bounds.simplified_bound_62(dn) * (1 + 1e-12)


def test_degree_lower_bound():
    assert float(bounds.degree_lower_log(6)) == pytest.approx(6.99056, abs=1e-5)
    assert float(bounds.degree_lower_log(3)) == pytest.approx(2.74528, abs=1e-5)
    den = math.log(2 * math.pi) - specfun.digamma(2)
    assert 1 / den == pytest.approx(0.70667, abs=1e-5)


def test_isogeny_constant_factor_exceptions():
    # above log(Delta N) = 4.73 with omega/L <= 1.06 the factor stays below 26
    assert bounds.isogeny_constant_factor(4.73, 5) <= 26
    assert bounds.isogeny_constant_factor(math.log(3), 0) > 26


def test_certify_all_passes():
    certs = bounds.certify_all()
    assert certs and all(c.passed for c in certs)
    names = " ".join(c.name for c in certs)
    for needle in ("0.71", "1.07", "0.67", "1.06", "4.73", "s5(95)"):
        assert needle in names


def test_certify_rejects_equality_and_wrong_side():
    assert not bounds.certify("x", 2.71, 2.71).passed
    assert not bounds.certify("x", 2.72, 2.71).passed
    assert bounds.certify("x", 2.70, 2.71).passed
    assert not bounds.certify("x", 0.0, 0.0, "<").passed
    assert bounds.certify("x", 3.0, 2.0, ">=").passed
    with pytest.raises(ValueError):
        bounds.certify("x", 1, 2, "!=")


def test_smoothing_params_validation():
    with pytest.raises(DomainError):
        SmoothingParams(0.0, 95.0)
    with pytest.raises(DomainError):
        SmoothingParams(1.5, 95.0)
    with pytest.raises(DomainError):
        SmoothingParams(1.0, 0.5)
