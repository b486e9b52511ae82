"""Small modular-arithmetic helpers shared by the unit-group and form code."""
from __future__ import annotations

import math

from .errors import DomainError
from .specfun import factorize


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a/p) for an odd prime p."""
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def kronecker_prime(d: int, p: int) -> int:
    """Kronecker symbol (d/p) for a prime p; d is a discriminant when p = 2."""
    if p == 2:
        if d % 2 == 0:
            return 0
        return 1 if d % 8 in (1, 7) else -1
    return legendre(d, p)


def sqrt_mod_prime(a: int, p: int) -> int:
    """Smallest non-negative r with r^2 = a (mod p), by Tonelli-Shanks.

    Raises DomainError when a is a non-residue.
    """
    a %= p
    if a == 0 or p == 2:
        return a
    if legendre(a, p) != 1:
        raise DomainError(f"{a} is not a square modulo {p}")
    if p % 4 == 3:
        r = pow(a, (p + 1) // 4, p)
        return min(r, p - r)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while legendre(z, p) != -1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return min(r, p - r)


def multiplicative_order(g: int, m: int, group_order: int | None = None) -> int:
    if math.gcd(g, m) != 1:
        raise DomainError(f"{g} is not a unit modulo {m}")
    n = group_order if group_order is not None else euler_phi(m)
    order = n
    for q in factorize(n):
        while order % q == 0 and pow(g, order // q, m) == 1:
            order //= q
    return order


def euler_phi(m: int) -> int:
    out = m
    for p in factorize(m):
        out = out // p * (p - 1)
    return out


def primitive_root(pe: int) -> int:
    """Smallest primitive root modulo an odd prime power (or 2, 4)."""
    phi = euler_phi(pe)
    qs = list(factorize(phi))
    for g in range(1, pe):
        if math.gcd(g, pe) != 1:
            continue
        if all(pow(g, phi // q, pe) != 1 for q in qs):
            return g
    raise DomainError(f"{pe} has no primitive root")


def crt_lift(residue: int, modulus: int, m: int) -> int:
    """The unit of Z/m that is ``residue`` mod ``modulus`` and 1 mod m/modulus."""
    rest = m // modulus
    if rest == 1:
        return residue % m
    # x = residue + modulus*k = 1 (mod rest)
    k = ((1 - residue) * pow(modulus, -1, rest)) % rest
    return (residue + modulus * k) % m


def is_fundamental_discriminant(d: int) -> bool:
    if d in (0, 1):
        return False
    if d % 4 == 1:
        return _squarefree(abs(d))
    if d % 4 == 0:
        r = d // 4
        return r % 4 in (2, 3) and _squarefree(abs(r))
    return False


def _squarefree(n: int) -> bool:
    return all(e == 1 for e in factorize(n).values())


def fundamental_discriminants(max_abs: int, negative: bool = True) -> list[int]:
    """Fundamental discriminants D with 0 < |D| <= max_abs, sorted by |D|."""
    sign = -1 if negative else 1
    return [sign * n for n in range(2, max_abs + 1) if is_fundamental_discriminant(sign * n)]
