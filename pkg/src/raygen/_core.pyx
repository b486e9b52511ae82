# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels.  ``_core_py`` holds the reference fallback."""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t, uint8_t

cnp.import_array()


cdef inline int64_t _add(int64_t a, int64_t b, const int64_t[:] rad, Py_ssize_t k) noexcept nogil:
    cdef int64_t result = 0, mult = 1, r, s
    cdef Py_ssize_t i
    for i in range(k - 1, -1, -1):
        r = rad[i]
        s = a % r + b % r
        if s >= r:
            s -= r
        result += s * mult
        mult *= r
        a //= r
        b //= r
    return result


def add_flat(int64_t a, int64_t b, const int64_t[:] radices):
    return _add(a, b, radices, radices.shape[0])


cdef Py_ssize_t _extend(int64_t[:] elems, Py_ssize_t n, uint8_t[:] mask, int64_t g,
                        const int64_t[:] rad) noexcept nogil:
    cdef Py_ssize_t k = rad.shape[0]
    cdef int64_t x = g, shift = g, y
    cdef Py_ssize_t order = 1, t, i
    while not mask[x]:
        x = _add(x, g, rad, k)
        order += 1
    if order == 1:
        return n
    for t in range(1, order):
        for i in range(n):
            y = _add(elems[i], shift, rad, k)
            elems[t * n + i] = y
            mask[y] = 1
        shift = _add(shift, g, rad, k)
    return n * order


def closure_extend(int64_t[:] elems, Py_ssize_t n, uint8_t[:] mask, int64_t g,
                   const int64_t[:] radices):
    return _extend(elems, n, mask, g, radices)


def greedy_generate(const int64_t[:] candidates, const uint8_t[:] target_mask,
                    Py_ssize_t target_order, const int64_t[:] radices):
    cdef Py_ssize_t size = 1, i, pos, n = 1, npicked = 0
    for i in range(radices.shape[0]):
        size *= radices[i]
    picked = np.zeros(min(64, candidates.shape[0]) + 1, dtype=np.int64)
    if target_order <= 1:
        return picked[:0], 1
    elems_arr = np.zeros(size, dtype=np.int64)
    mask_arr = np.zeros(size, dtype=np.uint8)
    cdef int64_t[:] elems = elems_arr
    cdef uint8_t[:] mask = mask_arr
    cdef int64_t[:] pk = picked
    cdef int64_t f
    mask[0] = 1
    for pos in range(candidates.shape[0]):
        f = candidates[pos]
        if target_mask[f] and not mask[f]:
            n = _extend(elems, n, mask, f, radices)
            pk[npicked] = pos
            npicked += 1
            if n >= target_order:
                break
    return picked[:npicked].copy(), n


def reduce_form(long long a, long long b, long long c):
    cdef long long q, r
    while True:
        if b > a or b <= -a:
            q = b // (2 * a)
            r = b - q * 2 * a
            if r < 0:
                r += 2 * a
                q -= 1
            if r > a:
                r -= 2 * a
                q += 1
            c = c - q * ((b + r) // 2)
            b = r
        if a > c:
            a, b, c = c, -b, a
            continue
        if a == c and b < 0:
            b = -b
        return (a, b, c)
