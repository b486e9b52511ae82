"""Real special functions and prime sums.

Everything here works on binary64 floats.  ``digamma``, ``trigamma`` and
``log_integral`` also have ``*_mp`` twins evaluated with the same algorithm in
mpmath arithmetic; the bound certifications use those.
"""
from __future__ import annotations

import math
import threading
from fractions import Fraction

import mpmath
import numpy as np

from .errors import DomainError, ResourceLimitError

EULER_GAMMA = 0.57721566490153286060651209

# B_2, B_4, ..., B_22
_BERNOULLI = (
    Fraction(1, 6),
    Fraction(-1, 30),
    Fraction(1, 42),
    Fraction(-1, 30),
    Fraction(5, 66),
    Fraction(-691, 2730),
    Fraction(7, 6),
    Fraction(-3617, 510),
    Fraction(43867, 798),
    Fraction(-174611, 330),
    Fraction(854513, 138),
)

# asymptotic-series coefficients: B_2k / 2k for digamma, B_2k for trigamma
_DIGAMMA_COEF = tuple(float(b / (2 * k)) for k, b in enumerate(_BERNOULLI, 1))
_TRIGAMMA_COEF = tuple(float(b) for b in _BERNOULLI)

_SHIFT_FLOAT = 8.0
_SHIFT_MP = 40


def digamma(x: float) -> float:
    """Logarithmic derivative of the gamma function for real ``x > 0``.

    Shifts the argument above 8 with psi(x) = psi(x + 1) - 1/x, then sums the
    Bernoulli asymptotic series.  Absolute error is below 1e-12 on (0, 100].
    """
    x = float(x)
    if not x > 0 or math.isinf(x):
        raise DomainError(f"digamma requires x > 0, got {x!r}")
    acc = 0.0
    while x < _SHIFT_FLOAT:
        acc -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    series = 0.0
    for c in reversed(_DIGAMMA_COEF[:8]):
        series = series * inv2 + c
    return acc + math.log(x) - 0.5 / x - series * inv2


def trigamma(x: float) -> float:
    """Derivative of :func:`digamma`, same shifting scheme."""
    x = float(x)
    if not x > 0 or math.isinf(x):
        raise DomainError(f"trigamma requires x > 0, got {x!r}")
    acc = 0.0
    while x < _SHIFT_FLOAT:
        acc += 1.0 / (x * x)
        x += 1.0
    inv = 1.0 / x
    inv2 = inv * inv
    series = 0.0
    for c in reversed(_TRIGAMMA_COEF[:8]):
        series = series * inv2 + c
    return acc + inv + 0.5 * inv2 + series * inv2 * inv


def digamma_mp(x) -> mpmath.mpf:
    """:func:`digamma` in the current mpmath working precision.

    Good to roughly 1e-32 absolute; callers wanting more should not use this.
    """
    x = mpmath.mpf(x)
    if x <= 0:
        raise DomainError(f"digamma requires x > 0, got {x}")
    acc = mpmath.mpf(0)
    while x < _SHIFT_MP:
        acc -= 1 / x
        x += 1
    inv2 = 1 / (x * x)
    series = mpmath.mpf(0)
    for k in range(len(_BERNOULLI), 0, -1):
        b = _BERNOULLI[k - 1]
        series = series * inv2 + mpmath.mpf(b.numerator) / (2 * k * b.denominator)
    return acc + mpmath.log(x) - 1 / (2 * x) - series * inv2


def trigamma_mp(x) -> mpmath.mpf:
    x = mpmath.mpf(x)
    if x <= 0:
        raise DomainError(f"trigamma requires x > 0, got {x}")
    acc = mpmath.mpf(0)
    while x < _SHIFT_MP:
        acc += 1 / (x * x)
        x += 1
    inv = 1 / x
    inv2 = inv * inv
    series = mpmath.mpf(0)
    for b in reversed(_BERNOULLI):
        series = series * inv2 + mpmath.mpf(b.numerator) / b.denominator
    return acc + inv + inv2 / 2 + series * inv2 * inv


def _li_series(lx, sqrt_x, euler, one):
    # Ramanujan's series for li(x) = Ei(log x); converges for every x > 1.
    total = 0 * one
    term = -one  # (-1)^(n-1) lx^n / (n! 2^(n-1)), built incrementally
    inner = 0 * one
    n = 0
    eps = one * 2.0 ** -60 if isinstance(one, float) else mpmath.eps / 16
    while True:
        n += 1
        term = -term * lx / (n * (2 if n > 1 else 1))
        if n % 2 == 1:
            inner += one / n
        contrib = term * inner
        total += contrib
        if n > 2 * abs(lx) and abs(contrib) < eps * abs(total):
            break
    return euler + _log(lx) + sqrt_x * total


def _log(v):
    return math.log(v) if isinstance(v, float) else mpmath.log(v)


def log_integral(x: float) -> float:
    """Principal-value logarithmic integral li(x) for real ``x > 1``."""
    x = float(x)
    if not x > 1 or math.isinf(x):
        raise DomainError(f"log_integral requires x > 1, got {x!r}")
    return _li_series(math.log(x), math.sqrt(x), EULER_GAMMA, 1.0)


def log_integral_mp(x) -> mpmath.mpf:
    x = mpmath.mpf(x)
    if x <= 1:
        raise DomainError(f"log_integral requires x > 1, got {x}")
    return _li_series(mpmath.log(x), mpmath.sqrt(x), +mpmath.euler, mpmath.mpf(1))


# --- primes --------------------------------------------------------------

DEFAULT_SIEVE_LIMIT = 10**8


def _sieve_primes(n: int) -> np.ndarray:
    """All primes strictly below ``n`` as an int64 array."""
    if n <= 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(n, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, math.isqrt(n - 1) + 1, 2):
        if flags[p]:
            flags[p * p :: 2 * p] = False
    return np.flatnonzero(flags).astype(np.int64)


class Sieve:
    """Lazily grown table of primes, capped at ``limit``.

    Growth happens under a lock; the published arrays are never mutated, so
    readers holding an earlier array stay valid.
    """

    def __init__(self, limit: int = DEFAULT_SIEVE_LIMIT):
        if limit < 2:
            raise ValueError("sieve limit must be at least 2")
        self.limit = int(limit)
        self._lock = threading.Lock()
        self._covered = 2
        self._primes = np.zeros(0, dtype=np.int64)

    def primes_below(self, n: int) -> np.ndarray:
        n = int(math.ceil(n))
        if n > self.limit + 1:
            raise ResourceLimitError(
                f"primes below {n} requested but sieve limit is {self.limit}"
            )
        if n > self._covered:
            with self._lock:
                if n > self._covered:
                    target = min(max(n, 2 * self._covered), self.limit + 1)
                    self._primes = _sieve_primes(target)
                    self._covered = target
        primes = self._primes
        return primes[: np.searchsorted(primes, n)]

    def primes_iter(self, start_chunk: int = 1 << 12):
        """Yield primes in increasing order until the limit is reached."""
        upto = 2
        chunk = start_chunk
        while upto <= self.limit:
            nxt = min(upto + chunk, self.limit + 1)
            primes = self.primes_below(nxt)
            lo = np.searchsorted(primes, upto)
            for p in primes[lo:]:
                yield int(p)
            upto = nxt
            chunk *= 2


_default_sieve = Sieve()


def default_sieve() -> Sieve:
    return _default_sieve


def set_default_sieve_limit(limit: int) -> None:
    global _default_sieve
    _default_sieve = Sieve(limit)


def von_mangoldt(m: int) -> float:
    """log p if m is a power of the prime p, else 0."""
    m = int(m)
    if m < 1:
        raise DomainError(f"von_mangoldt requires m >= 1, got {m}")
    if m == 1:
        return 0.0
    p = _smallest_prime_factor(m)
    while m % p == 0:
        m //= p
    return math.log(p) if m == 1 else 0.0


def _smallest_prime_factor(m: int) -> int:
    if m % 2 == 0:
        return 2
    f = 3
    while f * f <= m:
        if m % f == 0:
            return f
        f += 2
    return m


def mangoldt_table(n: int, sieve: Sieve | None = None) -> np.ndarray:
    """Array ``t`` with ``t[k] = Lambda(k)`` for ``0 <= k < n`` (``t[0] = 0``)."""
    sieve = sieve or _default_sieve
    table = np.zeros(max(n, 1), dtype=np.float64)
    for p in sieve.primes_below(n):
        p = int(p)
        lp = math.log(p)
        q = p
        while q < n:
            table[q] = lp
            q *= p
    return table


def chebyshev_psi(x: float, sieve: Sieve | None = None) -> float:
    """Sum of Lambda(m) over integers 1 <= m < x (strict)."""
    if x < 0:
        raise DomainError(f"chebyshev_psi requires x >= 0, got {x!r}")
    sieve = sieve or _default_sieve
    n = math.ceil(x)
    total = 0.0
    for p in sieve.primes_below(n):
        p = int(p)
        k = 0
        q = p
        while q < x:
            k += 1
            q *= p
        total += k * math.log(p)
    return total


def chebyshev_ratio_max(n: int, sieve: Sieve | None = None) -> tuple[float, int]:
    """Supremum of chebyshev_psi(x)/x over 2 <= x <= n, and where it occurs.

    psi is a right-continuous step function in x for the strict sum, so the
    supremum on (k, k+1] is the right-limit at k: (sum of Lambda(j), j <= k)/k.
    """
    table = mangoldt_table(n + 1, sieve)
    cum = np.cumsum(table)
    ks = np.arange(2, n + 1)
    ratios = cum[2:] / ks
    i = int(np.argmax(ratios))
    return float(ratios[i]), int(ks[i])


def omega(m: int) -> int:
    """Number of distinct prime factors."""
    return len(factorize(m))


def factorize(m: int) -> dict[int, int]:
    m = int(m)
    if m < 1:
        raise DomainError(f"factorize requires m >= 1, got {m}")
    out: dict[int, int] = {}
    while m > 1:
        p = _smallest_prime_factor(m)
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        out[p] = e
    return out
