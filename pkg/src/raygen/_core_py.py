"""Pure-Python/numpy versions of the hot kernels in ``_core.pyx``.

Signatures and results match the compiled module exactly.
"""
from __future__ import annotations

import numpy as np


def _decode(flat: np.ndarray, radices: np.ndarray) -> np.ndarray:
    comps = np.empty((len(flat), len(radices)), dtype=np.int64)
    rest = flat.astype(np.int64, copy=True)
    for i in range(len(radices) - 1, -1, -1):
        comps[:, i] = rest % radices[i]
        rest //= radices[i]
    return comps


def _encode(comps: np.ndarray, radices: np.ndarray) -> np.ndarray:
    out = np.zeros(len(comps), dtype=np.int64)
    for i in range(len(radices)):
        out = out * radices[i] + comps[:, i]
    return out


def add_flat(a: int, b: int, radices: np.ndarray) -> int:
    result, mult = 0, 1
    for i in range(len(radices) - 1, -1, -1):
        r = int(radices[i])
        s = a % r + b % r
        if s >= r:
            s -= r
        result += s * mult
        mult *= r
        a //= r
        b //= r
    return result


def closure_extend(elems: np.ndarray, n: int, mask: np.ndarray, g: int, radices: np.ndarray) -> int:
    """Grow the subgroup held in ``elems[:n]``/``mask`` by the element ``g``.

    ``elems`` must have room for the whole group.  Returns the new size.
    """
    x, k = g, 1
    while not mask[x]:
        x = add_flat(x, g, radices)
        k += 1
    if k == 1:
        return n
    base = _decode(elems[:n], radices)
    gc = _decode(np.array([g], dtype=np.int64), radices)[0]
    for t in range(1, k):
        new = _encode((base + t * gc) % radices, radices)
        elems[t * n : (t + 1) * n] = new
        mask[new] = 1
    return n * k


def greedy_generate(
    candidates: np.ndarray, target_mask: np.ndarray, target_order: int, radices: np.ndarray
) -> tuple[np.ndarray, int]:
    """Positions of the candidates that enlarge the running closure.

    Candidates outside the target are ignored.  Stops as soon as the closure
    has ``target_order`` elements.  Returns (positions, closure size).
    """
    size = int(np.prod(radices)) if len(radices) else 1
    elems = np.zeros(size, dtype=np.int64)
    mask = np.zeros(size, dtype=np.uint8)
    mask[0] = 1
    n = 1
    picked = []
    if n >= target_order:
        return np.zeros(0, dtype=np.int64), n
    inside = np.flatnonzero(target_mask[candidates])
    for pos in inside:
        f = int(candidates[pos])
        if not mask[f]:
            n = closure_extend(elems, n, mask, f, radices)
            picked.append(int(pos))
            if n >= target_order:
                break
    return np.asarray(picked, dtype=np.int64), n


def reduce_form(a: int, b: int, c: int) -> tuple[int, int, int]:
    """Gauss reduction of a positive definite form."""
    while True:
        if b > a or b <= -a:
            # normalise b into (-a, a]
            q, r = divmod(b, 2 * a)
            if r > a:
                r -= 2 * a
                q += 1
            c = c - q * (b + r) // 2
            b = r
        if a > c:
            a, b, c = c, -b, a
            continue
        if a == c and b < 0:
            b = -b
        return a, b, c
