"""(Z/mZ)^* as an abstract abelian group, and the exhaustive generator check."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

from . import arith, kernels, specfun
from .abelian import (
    DEFAULT_SUBGROUP_CAP,
    FiniteAbelianGroup,
    GroupElement,
    Subgroup,
    enumerate_subgroups,
    generated_subgroup,
)
from .bounds import zm_bound, zm_main_bound
from .errors import DomainError, ResourceLimitError

DEFAULT_MODULUS_LIMIT = 10**6
_FIRST_PRIME_WINDOW = 1 << 12


@dataclass(frozen=True)
class UnitGroupStructure:
    modulus: int
    group: FiniteAbelianGroup
    generators: tuple[int, ...]
    residues: np.ndarray = field(repr=False, compare=False)  # flat index -> residue
    dlog_flat: np.ndarray = field(repr=False, compare=False)  # residue -> flat index, -1 if not a unit

    def dlog(self, a: int) -> GroupElement:
        f = int(self.dlog_flat[a % self.modulus])
        if f < 0:
            raise DomainError(f"{a} is not coprime to {self.modulus}")
        return GroupElement(self.group, self.group.decode(f))

    def residue(self, g: GroupElement) -> int:
        return int(self.residues[g.flat])

    @cached_property
    def dlog_table(self) -> dict[int, GroupElement]:
        return {int(r): GroupElement(self.group, self.group.decode(f)) for f, r in enumerate(self.residues)}

    def subgroup_residues(self, h: Subgroup) -> list[int]:
        return sorted(int(self.residues[f]) for f in h.element_flats())


def _components(m: int):
    """Cyclic factors of (Z/m)^* as (order, generator mod m) pairs."""
    out = []
    for p, e in sorted(specfun.factorize(m).items()):
        pe = p**e
        if p == 2:
            if e >= 2:
                out.append((2, arith.crt_lift(pe - 1, pe, m)))
            if e >= 3:
                out.append((2 ** (e - 2), arith.crt_lift(5, pe, m)))
        else:
            out.append((pe // p * (p - 1), arith.crt_lift(arith.primitive_root(pe), pe, m)))
    return out


def unit_group(m: int, limit: int = DEFAULT_MODULUS_LIMIT) -> UnitGroupStructure:
    """Invariant-factor presentation of (Z/mZ)^* with an explicit dlog table.

    Odd prime powers use their smallest primitive root, 2^k (k >= 3) uses
    <-1, 5>; the pieces are glued by CRT and regrouped into d_1 | ... | d_k.
    """
    if m < 2:
        raise DomainError(f"unit_group requires m >= 2, got {m}")
    if m > limit:
        raise ResourceLimitError(f"modulus {m} exceeds limit {limit}")
    pieces: dict[int, list[tuple[int, int]]] = {}
    for n, g in _components(m):
        for q, v in specfun.factorize(n).items():
            qv = q**v
            # idempotent exponent: = 1 mod q^v, = 0 mod n/q^v, so the pieces
            # of one component multiply back to g
            e = n // qv * pow(n // qv, -1, qv) if qv < n else 1
            pieces.setdefault(q, []).append((qv, pow(g, e, m)))
    k = max((len(v) for v in pieces.values()), default=0)
    factors = [1] * k
    gens = [1] * k
    for q in sorted(pieces):
        plist = sorted(pieces[q], key=lambda t: -t[0])
        for i, (qv, g) in enumerate(plist):
            factors[k - 1 - i] *= qv
            gens[k - 1 - i] = gens[k - 1 - i] * g % m
    group = FiniteAbelianGroup(tuple(factors))
    residues = np.ones(1, dtype=np.int64)
    for g, d in zip(gens, factors):
        powers = np.empty(d, dtype=np.int64)
        acc = 1
        for j in range(d):
            powers[j] = acc
            acc = acc * g % m
        residues = (residues[:, None] * powers[None, :] % m).ravel()
    dlog_flat = np.full(m, -1, dtype=np.int64)
    dlog_flat[residues] = np.arange(len(residues), dtype=np.int64)
    if int((dlog_flat >= 0).sum()) != group.order:
        raise AssertionError(f"generators of (Z/{m})^* are not independent")
    return UnitGroupStructure(m, group, tuple(gens), residues, dlog_flat)


@dataclass
class ZmVerificationResult:
    modulus: int
    subgroup_order: int
    subgroup_index: int
    basis: str
    bound: float
    bound_main: float
    generating_primes: list[int]
    largest_needed_prime: int
    pass_zm: bool
    pass_main: bool
    status: str  # PASS, FAIL, FAIL-INCOMPLETE, VACUOUS, SKIPPED
    reason: str = ""

    @property
    def passed(self) -> bool:
        return self.status in ("PASS", "VACUOUS")

    @property
    def skipped(self) -> bool:
        return self.status == "SKIPPED"

    @property
    def trivial(self) -> bool:
        return self.status == "VACUOUS"


def _format_basis(h: Subgroup) -> str:
    return ";".join(",".join(str(x) for x in col) for col in h.basis)


class _PrimeStream:
    """Primes not dividing m, as flat dlog indices, grown on demand."""

    def __init__(self, structure: UnitGroupStructure, sieve: specfun.Sieve):
        self.structure = structure
        self.sieve = sieve
        self.upto = 0
        self.primes = np.zeros(0, dtype=np.int64)
        self.flats = np.zeros(0, dtype=np.int64)

    def grow(self) -> bool:
        if self.upto >= self.sieve.limit + 1:
            return False
        target = min(max(_FIRST_PRIME_WINDOW, 2 * self.upto), self.sieve.limit + 1)
        primes = self.sieve.primes_below(target)
        m = self.structure.modulus
        primes = primes[m % primes != 0] if len(primes) else primes
        self.primes = primes
        self.flats = self.structure.dlog_flat[primes % m]
        self.upto = target
        return True


def verify_subgroup(
    structure: UnitGroupStructure,
    h: Subgroup,
    sieve: specfun.Sieve | None = None,
    _stream: _PrimeStream | None = None,
) -> ZmVerificationResult:
    """Walk the primes p not dividing m upwards, keep those with p mod m in h,
    and stop once they generate h.  The last prime kept is the smallest B for
    which the primes below B in h generate h."""
    m = structure.modulus
    basis = _format_basis(h)
    if h.is_trivial():
        return ZmVerificationResult(m, 1, h.index, basis, math.nan, math.nan, [], 1, True, True,
                                    "VACUOUS", "trivial subgroup")
    bound = zm_bound(m, h.index)
    bound_main = zm_main_bound(m, h.index)
    stream = _stream or _PrimeStream(structure, sieve or specfun.default_sieve())
    if stream.upto == 0:
        stream.grow()
    mask = h.mask()
    rad = structure.group.radices
    while True:
        picked, size = kernels.greedy_generate(stream.flats, mask, h.order, rad)
        if size >= h.order:
            break
        if not stream.grow():
            return ZmVerificationResult(m, h.order, h.index, basis, bound, bound_main, [], 0, False, False,
                                        "FAIL-INCOMPLETE", f"closure not reached below {stream.upto}")
    gens = [int(p) for p in stream.primes[picked]]
    largest = gens[-1]
    pass_zm = largest <= bound
    pass_main = largest < bound_main
    status = "PASS" if pass_zm and pass_main else "FAIL"
    return ZmVerificationResult(m, h.order, h.index, basis, bound, bound_main, gens, largest,
                                pass_zm, pass_main, status)


def closure_of_primes(structure: UnitGroupStructure, primes: list[int]) -> Subgroup:
    return generated_subgroup([structure.dlog(p) for p in primes], structure.group)


@dataclass(frozen=True)
class ZmScanConfig:
    subgroup_cap: int = DEFAULT_SUBGROUP_CAP
    sieve_limit: int = specfun.DEFAULT_SIEVE_LIMIT
    jobs: int = 1


def verify_modulus(m: int, config: ZmScanConfig = ZmScanConfig(), sieve: specfun.Sieve | None = None) -> list[ZmVerificationResult]:
    """All non-trivial subgroups of (Z/m)^*, verified, in (index, basis) order."""
    sieve = sieve or specfun.Sieve(config.sieve_limit)
    structure = unit_group(m)
    try:
        subgroups = enumerate_subgroups(structure.group, cap=config.subgroup_cap)
    except ResourceLimitError as exc:
        return [ZmVerificationResult(m, 0, 0, "", math.nan, math.nan, [], 0, False, False, "SKIPPED", str(exc))]
    stream = _PrimeStream(structure, sieve)
    return [verify_subgroup(structure, h, sieve, stream) for h in subgroups if not h.is_trivial()]


_worker_sieve: specfun.Sieve | None = None


def _worker(args):
    global _worker_sieve
    m, config = args
    if _worker_sieve is None or _worker_sieve.limit != config.sieve_limit:
        _worker_sieve = specfun.Sieve(config.sieve_limit)
    return m, verify_modulus(m, config, _worker_sieve)


def scan(
    m_min: int,
    m_max: int,
    config: ZmScanConfig = ZmScanConfig(),
    progress: Callable[[int, int], None] | None = None,
) -> list[ZmVerificationResult]:
    """Verify every non-trivial subgroup of (Z/m)^* for m_min <= m <= m_max.

    Results are ordered by m regardless of ``config.jobs``.
    """
    m_min = max(m_min, 2)
    ms = list(range(m_min, m_max + 1))
    if not ms:
        return []
    by_m: dict[int, list[ZmVerificationResult]] = {}
    tasks = [(m, config) for m in ms]
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            for done, (m, rows) in enumerate(pool.map(_worker, tasks, chunksize=16), 1):
                by_m[m] = rows
                if progress:
                    progress(done, len(ms))
    else:
        sieve = specfun.Sieve(config.sieve_limit)
        for done, m in enumerate(ms, 1):
            by_m[m] = verify_modulus(m, config, sieve)
            if progress:
                progress(done, len(ms))
    return [r for m in ms for r in by_m[m]]
