"""Positive definite binary quadratic forms and class groups of imaginary
quadratic orders, plus the prime-form connectivity check.

The Cayley graph of Cl(O) on the classes of prime-norm ideals is connected
exactly when those classes generate the group, so connectivity is checked by
subgroup closure.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable

from . import arith, kernels, specfun
from .abelian import FiniteAbelianGroup, GroupElement, generated_subgroup, structure_from_elements
from .bounds import isogeny_bound
from .errors import DomainError, ResourceLimitError

DEFAULT_DISC_LIMIT = 10**7

# (fundamental discriminant, N(f)) pairs where the isogeny constant exceeds 26
# and the proof argues separately; Q(sqrt 5) is real and never reached here.
EXCEPTIONAL_PAIRS = frozenset({(-4, 1), (-4, 2), (-3, 1), (-3, 3), (5, 1)})


@dataclass(frozen=True, order=True)
class QuadForm:
    a: int
    b: int
    c: int

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        if not (abs(b) <= a <= c):
            return False
        return b >= 0 or (abs(b) != a and a != c)

    def is_primitive(self) -> bool:
        return math.gcd(math.gcd(self.a, self.b), self.c) == 1

    def inverse(self) -> "QuadForm":
        return reduce(QuadForm(self.a, -self.b, self.c))

    def __str__(self):
        return f"({self.a},{self.b},{self.c})"


def principal_form(D: int) -> QuadForm:
    k = D % 2
    return QuadForm(1, k, (k - D) // 4)


def reduce(f: QuadForm) -> QuadForm:
    if f.a <= 0 or f.discriminant >= 0:
        raise DomainError(f"{f} is not positive definite")
    return QuadForm(*kernels.reduce_form(f.a, f.b, f.c))


def compose(f: QuadForm, g: QuadForm) -> QuadForm:
    """Dirichlet composition followed by reduction."""
    D = f.discriminant
    if g.discriminant != D:
        raise DomainError(f"discriminants differ: {D} vs {g.discriminant}")
    a1, b1, c1 = f.a, f.b, f.c
    a2, b2, c2 = g.a, g.b, g.c
    if a1 > a2:
        a1, b1, c1, a2, b2, c2 = a2, b2, c2, a1, b1, c1
    s = (b1 + b2) // 2
    n = b2 - s
    if a2 % a1 == 0:
        y1, d = 0, a1
    else:
        d, u, _ = _xgcd(a2, a1)
        y1 = u
    if s % d == 0:
        y2, x2, d1 = -1, 0, d
    else:
        d1, x2, y2 = _xgcd(s, d)
        y2 = -y2
    v1 = a1 // d1
    v2 = a2 // d1
    r = (y1 * y2 * n - x2 * c2) % v1
    b3 = b2 + 2 * v2 * r
    a3 = v1 * v2
    c3 = (c2 * d1 + r * (b2 + v2 * r)) // v1
    return reduce(QuadForm(a3, b3, c3))


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, x, y) with x*a + y*b = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def power(f: QuadForm, e: int) -> QuadForm:
    result = principal_form(f.discriminant)
    base = f
    while e:
        if e & 1:
            result = compose(result, base)
        base = compose(base, base)
        e >>= 1
    return result


def reduced_forms(D: int) -> list[QuadForm]:
    """Primitive reduced forms of discriminant D < 0, sorted."""
    if D >= 0 or D % 4 not in (0, 1):
        raise DomainError(f"{D} is not a negative discriminant")
    out = []
    amax = math.isqrt(-D // 3)
    for a in range(1, amax + 1):
        for b in range(-a + 1, a + 1):
            if (b * b - D) % (4 * a):
                continue
            c = (b * b - D) // (4 * a)
            if c < a or (b < 0 and (a == c)):
                continue
            f = QuadForm(a, b, c)
            if f.is_primitive():
                out.append(f)
    return sorted(out)


@dataclass
class FormClassGroup:
    fundamental_disc: int
    conductor: int
    discriminant: int
    reduced_forms: list[QuadForm]
    group: FiniteAbelianGroup
    generators: list[QuadForm]
    coords: dict[QuadForm, tuple[int, ...]] = field(repr=False)
    _by_coords: dict[tuple[int, ...], QuadForm] = field(repr=False, default_factory=dict)

    def __post_init__(self):
        self._by_coords = {v: k for k, v in self.coords.items()}

    @property
    def class_number(self) -> int:
        return len(self.reduced_forms)

    def element(self, f: QuadForm) -> GroupElement:
        return GroupElement(self.group, self.coords[f])

    def form(self, g: GroupElement) -> QuadForm:
        return self._by_coords[g.exponents]

    @property
    def identity(self) -> QuadForm:
        return principal_form(self.discriminant)


def class_group(fundamental_disc: int, conductor: int = 1, limit: int = DEFAULT_DISC_LIMIT) -> FormClassGroup:
    if fundamental_disc >= 0 or not arith.is_fundamental_discriminant(fundamental_disc):
        raise DomainError(f"{fundamental_disc} is not a negative fundamental discriminant")
    if conductor < 1:
        raise DomainError("conductor must be >= 1")
    D = fundamental_disc * conductor * conductor
    if -D > limit:
        raise ResourceLimitError(f"|D| = {-D} exceeds limit {limit}")
    forms = reduced_forms(D)
    identity = principal_form(D)
    group, gens, coords = structure_from_elements(forms, compose, identity)
    return FormClassGroup(fundamental_disc, conductor, D, forms, group, gens, coords)


def prime_form(group: FormClassGroup, p: int) -> QuadForm | None:
    """Reduced class of the ideal of norm p, or None when p is inert.

    Uses (p, b, (b^2 - D)/4p) with b the smallest non-negative root of
    b^2 = D (mod 4p).
    """
    if group.conductor % p == 0:
        raise DomainError(f"{p} divides the conductor {group.conductor}")
    D = group.discriminant
    if arith.kronecker_prime(D, p) == -1:
        return None
    if p == 2:
        b = {0: 0, 4: 2, 1: 1}[D % 8]
    else:
        r = arith.sqrt_mod_prime(D, p)
        cands = [x for x in (r, p - r, r + p, 2 * p - r) if 0 <= x < 2 * p and (x - D) % 2 == 0]
        b = min(cands)
    c = (b * b - D) // (4 * p)
    return reduce(QuadForm(p, b, c))


@dataclass
class ConnectivityResult:
    fundamental_disc: int
    conductor: int
    discriminant: int
    conductor_norm: int
    class_number: int
    invariant_factors: str
    bound: float
    primes_used: list[int]
    threshold_prime: int
    exceptional: bool
    status: str  # PASS, FAIL, SKIPPED
    reason: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "PASS"

    @property
    def skipped(self) -> bool:
        return self.status == "SKIPPED"


def verify_connectivity(
    fundamental_disc: int,
    conductor: int = 1,
    h_plus: int = 1,
    sieve: specfun.Sieve | None = None,
) -> ConnectivityResult:
    """Do the prime forms of norm below 26 (h+ log(Delta N(f)))^2 generate Cl(O)?"""
    if h_plus != 1:
        raise DomainError("h_plus is 1 for imaginary quadratic orders (O_0 = Z)")
    sieve = sieve or specfun.default_sieve()
    cg = class_group(fundamental_disc, conductor)
    delta = -fundamental_disc
    norm_f = conductor * conductor
    bound = isogeny_bound(delta, norm_f, h_plus)
    exceptional = (fundamental_disc, norm_f) in EXCEPTIONAL_PAIRS
    factors = "x".join(str(d) for d in cg.group.invariant_factors) or "1"
    h = cg.class_number
    used: list[int] = []
    threshold = 1
    closure_order = 1
    if h > 1:
        span: list[GroupElement] = []
        sub = generated_subgroup([], cg.group)
        for p in sieve.primes_below(math.ceil(bound)):
            p = int(p)
            if p >= bound:
                break
            if conductor % p == 0:
                continue
            f = prime_form(cg, p)
            if f is None:
                continue
            g = cg.element(f)
            if sub.contains_vector(g.exponents):
                continue
            span.append(g)
            used.append(p)
            sub = generated_subgroup(span)
            if sub.order == h:
                threshold = p
                break
        closure_order = sub.order
    status = "PASS" if closure_order == h else "FAIL"
    reason = "exceptional pair; class group trivial" if exceptional and h == 1 else ""
    return ConnectivityResult(fundamental_disc, conductor, cg.discriminant, norm_f, h, factors, bound,
                              used, threshold, exceptional, status, reason)


_worker_sieve: specfun.Sieve | None = None


def _conn_worker(args):
    global _worker_sieve
    d, f, limit = args
    if _worker_sieve is None or _worker_sieve.limit != limit:
        _worker_sieve = specfun.Sieve(limit)
    try:
        return verify_connectivity(d, f, sieve=_worker_sieve)
    except (ResourceLimitError, DomainError) as exc:
        return ConnectivityResult(d, f, d * f * f, f * f, 0, "", math.nan, [], 0, False, "SKIPPED", str(exc))


def scan_discriminants(
    max_absdisc: int,
    conductors: Iterable[int] = (1,),
    min_absdisc: int = 3,
    jobs: int = 1,
    progress: Callable[[int, int], None] | None = None,
    sieve_limit: int = specfun.DEFAULT_SIEVE_LIMIT,
) -> list[ConnectivityResult]:
    """Verify every negative fundamental discriminant with min <= |D_K| <= max,
    for each conductor; ordered by (conductor, |D_K|)."""
    discs = [d for d in arith.fundamental_discriminants(max_absdisc) if -d >= min_absdisc]
    tasks = [(d, f, sieve_limit) for f in sorted(set(conductors)) for d in discs]
    if not tasks:
        return []
    out = []
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for i, r in enumerate(pool.map(_conn_worker, tasks, chunksize=32), 1):
                out.append(r)
                if progress:
                    progress(i, len(tasks))
    else:
        for i, t in enumerate(tasks, 1):
            out.append(_conn_worker(t))
            if progress:
                progress(i, len(tasks))
    return out


def isogeny_exceptions(log_cutoff: float = 4.73, max_abs: int = 200) -> list[tuple[int, int, int, float]]:
    """Quadratic (Delta, N(f)) with log(Delta N(f)) < cutoff where the isogeny
    constant factor exceeds 26.

    Scans real and imaginary fundamental discriminants and every norm N
    carried by an ideal of O_K, using the largest omega such an ideal can
    have.  Returns (disc, N, omega, factor) tuples.
    """
    from .bounds import CONSTANTS, isogeny_constant_factor

    out = []
    cutoff = math.exp(log_cutoff)
    for sign in (-1, 1):
        for d in arith.fundamental_discriminants(max_abs, negative=sign < 0):
            delta = abs(d)
            n = 1
            while delta * n < cutoff:
                w = _max_omega_of_norm(d, n)
                if w is not None:
                    factor = isogeny_constant_factor(math.log(delta * n), w)
                    if factor > CONSTANTS["isogeny"]:
                        out.append((d, n, w, factor))
                n += 1
    return out


def _max_omega_of_norm(d: int, n: int) -> int | None:
    """Largest number of distinct prime ideals in an ideal of norm n, or None."""
    w = 0
    for p, e in specfun.factorize(n).items():
        k = arith.kronecker_prime(d, p)
        if k == -1:
            if e % 2:
                return None
            w += 1
        elif k == 0:
            w += 1
        else:
            w += 2 if e >= 2 else 1
    return w
