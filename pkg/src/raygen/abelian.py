"""Finite abelian groups in invariant-factor form.

Elements are exponent vectors (e_1, ..., e_k) with 0 <= e_i < d_i.  Inside the
hot paths they are packed into a single mixed-radix integer ("flat index",
first coordinate most significant).

A subgroup H is stored as the column Hermite normal form of its preimage
lattice L = {x in Z^k : x mod d in H}.  L contains diag(d), so it has full
rank and the form is a lower-triangular k x k matrix with positive diagonal
and every entry left of a pivot reduced modulo that pivot.  It is unique, so
subgroup equality is basis equality and [G:H] is the product of the pivots.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Sequence

import numpy as np

from . import kernels
from .errors import ParentMismatchError, ResourceLimitError
from .specfun import factorize

DEFAULT_SUBGROUP_CAP = 10**6
DEFAULT_ORDER_LIMIT = 10**6


@dataclass(frozen=True)
class FiniteAbelianGroup:
    invariant_factors: tuple[int, ...]

    def __post_init__(self):
        d = tuple(int(x) for x in self.invariant_factors)
        object.__setattr__(self, "invariant_factors", d)
        if any(x < 2 for x in d):
            raise ValueError(f"invariant factors must be >= 2: {d}")
        if any(b % a for a, b in zip(d, d[1:])):
            raise ValueError(f"invariant factors must form a divisibility chain: {d}")

    @classmethod
    def from_cyclic_orders(cls, orders: Iterable[int]) -> "FiniteAbelianGroup":
        """The group Z/n_1 x ... x Z/n_r rewritten in invariant-factor form."""
        return cls(invariant_factors_of(orders))

    @property
    def order(self) -> int:
        return math.prod(self.invariant_factors)

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)

    @property
    def exponent(self) -> int:
        return self.invariant_factors[-1] if self.invariant_factors else 1

    @property
    def radices(self) -> np.ndarray:
        return np.asarray(self.invariant_factors, dtype=np.int64)

    def identity(self) -> "GroupElement":
        return GroupElement(self, (0,) * self.rank)

    def element(self, exponents: Sequence[int]) -> "GroupElement":
        if len(exponents) != self.rank:
            raise ValueError(f"expected {self.rank} exponents, got {len(exponents)}")
        return GroupElement(self, tuple(int(e) % d for e, d in zip(exponents, self.invariant_factors)))

    def generators(self) -> list["GroupElement"]:
        return [self.element([int(i == j) for j in range(self.rank)]) for i in range(self.rank)]

    def encode(self, exponents: Sequence[int]) -> int:
        flat = 0
        for e, d in zip(exponents, self.invariant_factors):
            flat = flat * d + (int(e) % d)
        return flat

    def decode(self, flat: int) -> tuple[int, ...]:
        out = []
        for d in reversed(self.invariant_factors):
            flat, r = divmod(flat, d)
            out.append(r)
        return tuple(reversed(out))

    def elements(self) -> Iterable["GroupElement"]:
        for exps in itertools.product(*(range(d) for d in self.invariant_factors)):
            yield GroupElement(self, exps)

    def __repr__(self):
        if not self.invariant_factors:
            return "FiniteAbelianGroup(trivial)"
        return "FiniteAbelianGroup(" + " x ".join(f"Z/{d}" for d in self.invariant_factors) + ")"


@dataclass(frozen=True)
class GroupElement:
    group: FiniteAbelianGroup
    exponents: tuple[int, ...]

    def __add__(self, other: "GroupElement") -> "GroupElement":
        return add(self, other)

    def __neg__(self) -> "GroupElement":
        return self.group.element([-e for e in self.exponents])

    def __mul__(self, k: int) -> "GroupElement":
        return self.group.element([k * e for e in self.exponents])

    __rmul__ = __mul__

    @property
    def flat(self) -> int:
        return self.group.encode(self.exponents)

    def order(self) -> int:
        out = 1
        for e, d in zip(self.exponents, self.group.invariant_factors):
            out = math.lcm(out, d // math.gcd(e, d))
        return out

    def is_identity(self) -> bool:
        return not any(self.exponents)


def add(g: GroupElement, h: GroupElement) -> GroupElement:
    if g.group != h.group:
        raise ParentMismatchError("elements belong to different groups")
    return GroupElement(
        g.group, tuple((a + b) % d for a, b, d in zip(g.exponents, h.exponents, g.group.invariant_factors))
    )


def invariant_factors_of(orders: Iterable[int]) -> tuple[int, ...]:
    """Invariant factors of a product of cyclic groups of the given orders."""
    by_prime: dict[int, list[int]] = {}
    for n in orders:
        for p, e in factorize(int(n)).items():
            by_prime.setdefault(p, []).append(p**e)
    k = max((len(v) for v in by_prime.values()), default=0)
    factors = [1] * k
    for powers in by_prime.values():
        powers.sort(reverse=True)
        for i, q in enumerate(powers):
            factors[k - 1 - i] *= q
    return tuple(factors)


# --- Hermite normal form -------------------------------------------------------


def hermite_basis(group: FiniteAbelianGroup, vectors: Iterable[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    """Canonical HNF columns of the lattice spanned by ``vectors`` and diag(d)."""
    d = group.invariant_factors
    k = len(d)
    pool = [[int(v[i]) % d[i] for i in range(k)] for v in vectors]
    pool = [c for c in pool if any(c)]
    pool += [[d[i] if j == i else 0 for j in range(k)] for i in range(k)]
    pivots: list[list[int]] = []
    for i in range(k):
        active = [c for c in pool if c[i] != 0]
        rest = [c for c in pool if c[i] == 0]
        while len(active) > 1:
            active.sort(key=lambda c: abs(c[i]))
            piv = active[0]
            nxt = [piv]
            for c in active[1:]:
                q = c[i] // piv[i]
                c = [x - q * y for x, y in zip(c, piv)]
                if c[i] != 0:
                    nxt.append(c)
                elif any(c):
                    rest.append(c)
            active = nxt
        piv = active[0]
        if piv[i] < 0:
            piv = [-x for x in piv]
        for j, col in enumerate(pivots):
            q = col[i] // piv[i]
            if q:
                pivots[j] = [x - q * y for x, y in zip(col, piv)]
        pivots.append(piv)
        pool = rest
    return tuple(tuple(c) for c in pivots)


def _in_lattice(basis: Sequence[Sequence[int]], v: Sequence[int]) -> bool:
    v = list(v)
    for i, col in enumerate(basis):
        t, r = divmod(v[i], col[i])
        if r:
            return False
        if t:
            v = [a - t * b for a, b in zip(v, col)]
    return True


@dataclass(frozen=True)
class Subgroup:
    group: FiniteAbelianGroup
    basis: tuple[tuple[int, ...], ...]
    order: int = field(compare=False)
    index: int = field(compare=False)

    @classmethod
    def from_basis(cls, group: FiniteAbelianGroup, basis) -> "Subgroup":
        index = math.prod(col[i] for i, col in enumerate(basis))
        return cls(group, basis, group.order // index, index)

    @classmethod
    def generated_by_vectors(cls, group: FiniteAbelianGroup, vectors) -> "Subgroup":
        return cls.from_basis(group, hermite_basis(group, vectors))

    def contains_vector(self, v: Sequence[int]) -> bool:
        return _in_lattice(self.basis, v)

    def __contains__(self, g: GroupElement) -> bool:
        return membership(self, g)

    def generators(self) -> list[GroupElement]:
        """Columns of the basis, reduced; identity columns dropped."""
        out = []
        for col in self.basis:
            g = self.group.element(col)
            if not g.is_identity():
                out.append(g)
        return out

    def element_flats(self) -> np.ndarray:
        """Sorted flat indices of all elements."""
        elems, n, _ = _closure_arrays(self.group, [g.flat for g in self.generators()])
        return np.sort(elems[:n])

    def mask(self) -> np.ndarray:
        _, _, mask = _closure_arrays(self.group, [g.flat for g in self.generators()])
        return mask

    def is_trivial(self) -> bool:
        return self.order == 1

    def sort_key(self):
        return (self.index, self.basis)

    def __repr__(self):
        return f"Subgroup(order={self.order}, index={self.index}, basis={self.basis})"


def _closure_arrays(group: FiniteAbelianGroup, flats: Iterable[int]):
    size = group.order
    elems = np.zeros(size, dtype=np.int64)
    mask = np.zeros(size, dtype=np.uint8)
    mask[0] = 1
    n = 1
    rad = group.radices
    for f in flats:
        if not mask[f]:
            n = kernels.closure_extend(elems, n, mask, int(f), rad)
    return elems, n, mask


def trivial_subgroup(group: FiniteAbelianGroup) -> Subgroup:
    return Subgroup.generated_by_vectors(group, [])


def whole_group(group: FiniteAbelianGroup) -> Subgroup:
    return Subgroup.generated_by_vectors(group, [g.exponents for g in group.generators()])


def generated_subgroup(gens: Sequence[GroupElement], group: FiniteAbelianGroup | None = None) -> Subgroup:
    """Smallest subgroup containing ``gens``.  ``group`` is needed only when gens is empty."""
    if not gens:
        if group is None:
            raise ValueError("an empty generator list needs an explicit group")
        return trivial_subgroup(group)
    parent = group or gens[0].group
    for g in gens:
        if g.group != parent:
            raise ParentMismatchError("generators belong to different groups")
    return Subgroup.generated_by_vectors(parent, [g.exponents for g in gens])


def membership(h: Subgroup, g: GroupElement) -> bool:
    if g.group != h.group:
        raise ParentMismatchError("element and subgroup have different parents")
    return _in_lattice(h.basis, g.exponents)


# --- subgroup enumeration -----------------------------------------------------


def _pgroup_subgroups(radices: list[int], p: int, cap: int, max_order: int | None):
    """All subgroups of Z/radices[0] x ... (a p-group) as generator lists.

    Walks up the lattice one index-p step at a time: every proper inclusion
    S < T of p-groups refines to a chain whose steps add one g with p*g in S.
    """
    rad = np.asarray(radices, dtype=np.int64)
    size = int(np.prod(rad))
    flats = np.arange(size, dtype=np.int64)
    comps = kernels_decode(flats, rad)
    times_p = encode_rows((comps * p) % rad, rad)

    found: list[tuple[int, ...]] = [()]
    level = [((), _mask_of(size, [0]), np.zeros(1, dtype=np.int64))]
    seen = {level[0][1].tobytes()}
    order = 1
    while level:
        order *= p
        if max_order is not None and order > max_order:
            break
        nxt = []
        for gens, smask, selems in level:
            covered = smask.copy()
            cand = np.flatnonzero(smask[times_p].astype(bool) & ~smask.astype(bool))
            n0 = len(selems)
            for g in cand:
                if covered[g]:
                    continue
                elems = np.zeros(size, dtype=np.int64)
                elems[:n0] = selems
                mask = smask.copy()
                n = kernels.closure_extend(elems, n0, mask, int(g), rad)
                covered |= mask
                key = mask.tobytes()
                if key in seen:
                    continue
                seen.add(key)
                tg = gens + (int(g),)
                nxt.append((tg, mask, elems[:n].copy()))
                found.append(tg)
                if len(found) > cap:
                    raise ResourceLimitError(f"more than {cap} subgroups")
        level = nxt
    return found, comps


def _mask_of(size, flats):
    m = np.zeros(size, dtype=np.uint8)
    m[flats] = 1
    return m


def kernels_decode(flat: np.ndarray, radices: np.ndarray) -> np.ndarray:
    from ._core_py import _decode

    return _decode(flat, radices)


def encode_rows(comps: np.ndarray, radices: np.ndarray) -> np.ndarray:
    from ._core_py import _encode

    return _encode(comps, radices)


def _sylow_coordinates(group: FiniteAbelianGroup):
    """For each prime p | |G|: (p, p-part radices, embedding columns)."""
    out = []
    for p in sorted(factorize(group.order)) if group.order > 1 else []:
        radices, embed = [], []
        for i, d in enumerate(group.invariant_factors):
            q = 1
            while d % (q * p) == 0:
                q *= p
            if q > 1:
                radices.append(q)
                embed.append((i, d // q))
        out.append((p, radices, embed))
    return out


def count_subgroups_pgroup(radices: Sequence[int], p: int) -> int:
    """Number of subgroups of the p-group with the given cyclic factors.

    Sums the classical count of subgroups of each type mu inside type lambda
    (a product of Gaussian binomials over conjugate partitions).
    """
    lam = sorted((round(math.log(r, p)) for r in radices), reverse=True)
    return _count_subgroups_partition(tuple(lam), p)


def _conjugate(part: Sequence[int]) -> list[int]:
    if not part:
        return []
    return [sum(1 for x in part if x > i) for i in range(max(part))]


def _gauss_binom(n: int, k: int, p: int) -> int:
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= p ** (n - i) - 1
        den *= p ** (i + 1) - 1
    return num // den


def _count_subgroups_partition(lam: tuple[int, ...], p: int) -> int:
    lc = _conjugate(lam)
    total = 0
    for mu in _subpartitions(lam):
        mc = _conjugate(mu) + [0] * (len(lc) + 1)
        lc_ext = lc + [0]
        n = 1
        for i in range(len(lc)):
            n *= p ** (mc[i + 1] * (lc_ext[i] - mc[i])) * _gauss_binom(lc_ext[i] - mc[i + 1], mc[i] - mc[i + 1], p)
        total += n
    return total


def _subpartitions(lam: tuple[int, ...]):
    if not lam:
        yield ()
        return

    def rec(i, bound):
        if i == len(lam):
            yield ()
            return
        for v in range(min(lam[i], bound), -1, -1):
            for rest in rec(i + 1, v):
                yield (v,) + rest

    for mu in rec(0, lam[0]):
        yield tuple(x for x in mu if x > 0)


def subgroup_count(group: FiniteAbelianGroup) -> int:
    total = 1
    for p, radices, _ in _sylow_coordinates(group):
        total *= count_subgroups_pgroup(radices, p)
    return total


def enumerate_subgroups(
    group: FiniteAbelianGroup,
    cap: int = DEFAULT_SUBGROUP_CAP,
    max_order: int | None = None,
    order_limit: int = DEFAULT_ORDER_LIMIT,
) -> list[Subgroup]:
    """All subgroups, sorted by (index, basis).

    Built as direct products of the subgroups of each Sylow component.  Raises
    ResourceLimitError rather than truncating when more than ``cap`` would be
    produced.  ``max_order`` restricts to subgroups of at most that order.
    """
    if group.order > order_limit:
        raise ResourceLimitError(f"group order {group.order} exceeds limit {order_limit}")
    if max_order is None:
        expected = subgroup_count(group)
        if expected > cap:
            raise ResourceLimitError(f"{group!r} has {expected} subgroups, cap is {cap}")
    per_prime = []
    for p, radices, embed in _sylow_coordinates(group):
        gens_list, comps = _pgroup_subgroups(radices, p, cap, max_order)
        lifted = []
        for gens in gens_list:
            vecs = []
            for f in gens:
                v = [0] * group.rank
                for (i, scale), c in zip(embed, comps[f]):
                    v[i] = int(c) * scale
                vecs.append(v)
            # every chain step multiplies the order by exactly p
            order = p ** len(gens)
            lifted.append((vecs, order))
        per_prime.append(lifted)
    out = []
    for combo in itertools.product(*per_prime):
        order = math.prod(o for _, o in combo)
        if max_order is not None and order > max_order:
            continue
        vecs = [v for vs, _ in combo for v in vs]
        out.append(Subgroup.generated_by_vectors(group, vecs))
        if len(out) > cap:
            raise ResourceLimitError(f"more than {cap} subgroups")
    out.sort(key=Subgroup.sort_key)
    return out


def subgroups_of_index_at_most(group: FiniteAbelianGroup, max_index: int, cap: int = DEFAULT_SUBGROUP_CAP) -> list[Subgroup]:
    """Subgroups H with [G:H] <= max_index, via duality with small subgroups.

    H -> annihilator(H) is an inclusion-reversing bijection onto subgroups of
    the character group, which has the same invariant factors as G.
    """
    small = enumerate_subgroups(group, cap=cap, max_order=max_index)
    out = sorted((annihilator(s) for s in small), key=Subgroup.sort_key)
    return out


# --- characters ---------------------------------------------------------------


@dataclass(frozen=True)
class Character:
    """chi(e) = exp(2 pi i * sum_i weights_i e_i / d_i).

    Values are reported exactly as exponents of a primitive N-th root of
    unity, N = exponent of the group.
    """

    group: FiniteAbelianGroup
    weights: tuple[int, ...]

    def value_exponent(self, g: GroupElement) -> int:
        if g.group != self.group:
            raise ParentMismatchError("character and element have different parents")
        n = self.group.exponent
        return sum(w * e * (n // d) for w, e, d in zip(self.weights, g.exponents, self.group.invariant_factors)) % n

    def is_principal(self) -> bool:
        return not any(self.weights)

    def order(self) -> int:
        return self.group.element(self.weights).order()


def character_table(group: FiniteAbelianGroup) -> np.ndarray:
    """Exponent matrix T[w, g] with chi_w(g) = zeta_N^T[w, g], N the exponent.

    Rows and columns are indexed by flat index (weights and elements).
    """
    n = group.exponent
    rad = group.radices
    comps = kernels_decode(np.arange(group.order, dtype=np.int64), rad)
    scaled = comps * (n // rad)
    return (scaled @ comps.T) % n


def dual_weights(h: Subgroup) -> list[tuple[int, ...]]:
    """Generators (as weight vectors) of the characters vanishing on ``h``.

    The weights w with w_i/d_i in the dual lattice of L = preimage(h); that
    dual is spanned by the columns of B^{-T}, B the Hermite basis.
    """
    group = h.group
    k = group.rank
    B = [[Fraction(h.basis[j][i]) for j in range(k)] for i in range(k)]  # rows
    inv = _inverse_lower(B)
    out = []
    for j in range(k):
        # column j of inv^T is row j of inv
        w = []
        for i in range(k):
            val = inv[j][i] * group.invariant_factors[i]
            assert val.denominator == 1
            w.append(int(val) % group.invariant_factors[i])
        out.append(tuple(w))
    return out


def _inverse_lower(B):
    k = len(B)
    inv = [[Fraction(0)] * k for _ in range(k)]
    for col in range(k):
        for i in range(k):
            s = Fraction(int(i == col))
            for j in range(i):
                s -= B[i][j] * inv[j][col]
            inv[i][col] = s / B[i][i]
    return inv


def annihilator(h: Subgroup) -> Subgroup:
    """The subgroup of weight vectors of characters trivial on ``h``."""
    return Subgroup.generated_by_vectors(h.group, dual_weights(h))


def characters_trivial_on(h: Subgroup) -> list[Character]:
    """All [G:H] characters of G that are trivial on ``h``, ordered by weight."""
    ann = annihilator(h)
    group = h.group
    return [Character(group, group.decode(int(f))) for f in ann.element_flats()]


# --- structure of an abstract abelian group ---------------------------------------


def structure_from_elements(
    elements: Sequence[Hashable],
    op: Callable[[Hashable, Hashable], Hashable],
    identity: Hashable,
) -> tuple[FiniteAbelianGroup, list[Hashable], dict[Hashable, tuple[int, ...]]]:
    """Invariant factors of a finite abelian group given by its elements and law.

    Returns (group, generators, coordinates) where generators[i] has order
    d_i and coordinates maps each element to its exponent vector.
    """
    elements = list(elements)
    n = len(elements)

    def power(x, e):
        r, b = identity, x
        while e:
            if e & 1:
                r = op(r, b)
            b = op(b, b)
            e >>= 1
        return r

    def order_of(x):
        o = n
        for q in factorize(n) if n > 1 else {}:
            while o % q == 0 and power(x, o // q) == identity:
                o //= q
        return o

    orders = {x: order_of(x) for x in elements}
    per_prime_bases: list[list[tuple[Hashable, int]]] = []
    for p in sorted(factorize(n)) if n > 1 else []:
        pn = p ** factorize(n)[p]
        pel = [x for x in elements if pn % orders[x] == 0]
        basis: list[tuple[Hashable, int]] = []
        span = {identity: ()}
        while len(span) < pn:
            # element of largest order in the quotient by span
            best, best_q = None, 0
            for x in pel:
                if x in span:
                    continue
                q, y = 1, x
                while y not in span:
                    y = op(y, x)
                    q += 1
                if q > best_q:
                    best, best_q = x, q
            # lift: best^q = sum c_i b_i with q | c_i, subtract to get order q
            coords = span[power(best, best_q)]
            g = best
            for (b, ob), c in zip(basis, coords):
                g = op(g, power(b, (ob - (c // best_q)) % ob))
            basis.append((g, best_q))
            new_span = {}
            acc = identity
            for e in range(best_q):
                for x, cx in span.items():
                    new_span[op(x, acc)] = cx + (e,)
                acc = op(acc, g)
            span = new_span
        per_prime_bases.append(sorted(basis, key=lambda t: t[1]))

    k = max((len(b) for b in per_prime_bases), default=0)
    gens: list[Hashable] = []
    factors: list[int] = []
    for slot in range(k):
        g, d = identity, 1
        for basis in per_prime_bases:
            j = slot - (k - len(basis))
            if j >= 0:
                g = op(g, basis[j][0])
                d *= basis[j][1]
        gens.append(g)
        factors.append(d)
    group = FiniteAbelianGroup(tuple(factors))
    coords: dict[Hashable, tuple[int, ...]] = {identity: (0,) * k}
    for i, (g, d) in enumerate(zip(gens, factors)):
        nxt = {}
        acc = identity
        for e in range(d):
            for x, cx in coords.items():
                v = list(cx)
                v[i] = e
                nxt[op(x, acc)] = tuple(v)
            acc = op(acc, g)
        coords = nxt
    if len(coords) != n:
        raise ValueError("element list is not a group under op")
    return group, gens, coords
