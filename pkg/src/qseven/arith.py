"""Elementary integer and rational arithmetic shared by every module."""

from __future__ import annotations

import random
from fractions import Fraction
from math import gcd, isqrt

# Witnesses proving compositeness for every composite below 341,550,071,728,321
# (Jaeschke).  Sweeps stay far below that; beyond it we add random rounds.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17)
_MR_DETERMINISTIC_BOUND = 341_550_071_728_321
_MR_RANDOM_ROUNDS = 64  # error < 4^-64 = 2^-128

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _mr_witness(n: int, a: int) -> bool:
    """True if a proves n composite."""
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return False
    for _ in range(r - 1):
        x = x * x % n
        if x == n - 1:
            return False
    return True


def is_prime(n: int) -> bool:
    if n < 0:
        raise ValueError("is_prime expects n >= 0")
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    for a in _MR_WITNESSES:
        if _mr_witness(n, a):
            return False
    if n < _MR_DETERMINISTIC_BOUND:
        return True
    rng = random.Random(n)
    for _ in range(_MR_RANDOM_ROUNDS):
        if _mr_witness(n, rng.randrange(2, n - 1)):
            return False
    return True


def primes_in_class(lo: int, hi: int, a: int, m: int) -> list[int]:
    """Ascending primes p in [lo, hi] with p = a mod m."""
    if not 0 <= a < m:
        raise ValueError("residue a must satisfy 0 <= a < m")
    if hi < lo or hi < 2:
        return []
    lo = max(lo, 2)
    sieve = bytearray([1]) * (hi + 1)
    sieve[0:2] = b"\x00\x00"
    for p in range(2, isqrt(hi) + 1):
        if sieve[p]:
            sieve[p * p :: p] = b"\x00" * len(sieve[p * p :: p])
    return [n for n in range(lo, hi + 1) if sieve[n] and n % m == a]


def ord_p(x: int | Fraction, p: int) -> int:
    """Exponent of the prime p in x; negative for denominators."""
    if x == 0:
        raise ValueError("valuation of 0 is infinite")
    if isinstance(x, Fraction):
        return ord_p(x.numerator, p) - ord_p(x.denominator, p)
    n, v = abs(x), 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def jacobi(a: int, n: int) -> int:
    if n <= 0 or n % 2 == 0:
        raise ValueError("jacobi requires odd positive n")
    a %= n
    result = 1
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n), extending jacobi to all n."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    sign = 1
    if n < 0:
        n = -n
        if a < 0:
            sign = -1
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 and a % 8 in (3, 5):
            sign = -sign
    return sign * jacobi(a, n) if n > 1 else sign


def _sqrts_mod_odd_prime(n: int, p: int) -> list[int]:
    """All square roots of n modulo an odd prime p (Tonelli-Shanks)."""
    n %= p
    if n == 0:
        return [0]
    if pow(n, (p - 1) // 2, p) != 1:
        return []
    if p % 4 == 3:
        r = pow(n, (p + 1) // 4, p)
        return sorted({r, p - r})
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(n, q, p), pow(n, (q + 1) // 2, p)
    while t != 1:
        t2, i = t, 0
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return sorted({r, p - r})


def _lift_sqrts_prime_power(n: int, p: int, k: int) -> list[int]:
    """All square roots of n modulo p^k, p odd prime, via Hensel lifting."""
    roots = _sqrts_mod_odd_prime(n, p)
    mod = p
    for _ in range(k - 1):
        mod_next = mod * p
        lifted = []
        for r in roots:
            if r % p == 0:
                # Non-unit root: enumerate the fiber directly.
                for j in range(p):
                    cand = r + j * mod
                    if (cand * cand - n) % mod_next == 0:
                        lifted.append(cand)
            else:
                inv = pow(2 * r, -1, mod_next)
                lifted.append((r - (r * r - n) * inv) % mod_next)
        roots = sorted(set(lifted))
        mod = mod_next
    return roots


def _sqrts_mod_power_of_two(n: int, k: int) -> list[int]:
    """All square roots of n modulo 2^k by bitwise lifting."""
    if k <= 3:
        mod = 1 << k
        return [r for r in range(mod) if (r * r - n) % mod == 0]
    roots = _sqrts_mod_power_of_two(n, 3)
    mod = 8
    for j in range(3, k):
        mod_next = mod << 1
        lifted = set()
        for r in roots:
            for cand in (r, r + mod):
                if (cand * cand - n) % mod_next == 0:
                    lifted.add(cand)
        roots = sorted(lifted)
        mod = mod_next
    return roots


def _factorize(m: int) -> list[tuple[int, int]]:
    """Trial-division factorization; enough for the moduli used here."""
    out = []
    for p in (2, 3, 5, 7):
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        if e:
            out.append((p, e))
    d = 11
    while d * d <= m:
        if m % d == 0:
            e = 0
            while m % d == 0:
                m //= d
                e += 1
            out.append((d, e))
        d += 2
    if m > 1:
        if not is_prime(m):
            raise ValueError("modulus has a large composite cofactor")
        out.append((m, 1))
    return out


def _sqrts_mod(n: int, m: int) -> list[int]:
    """All square roots of n modulo m via CRT over the factorization of m."""
    if m == 1:
        return [0]
    residues = [(1, 0)]
    for p, k in _factorize(m):
        pk = p**k
        local = (
            _sqrts_mod_power_of_two(n, k) if p == 2 else _lift_sqrts_prime_power(n, p, k)
        )
        if not local:
            return []
        merged = []
        for mod_a, a in residues:
            inv = pow(mod_a, -1, pk)
            for b in local:
                merged.append((mod_a * pk, (a + mod_a * ((b - a) * inv % pk)) % (mod_a * pk)))
        residues = merged
    return sorted(r for _, r in residues)


def _cornacchia_primitive(d: int, m: int) -> list[tuple[int, int]]:
    """Primitive solutions of x^2 + d y^2 = m with x, y > 0."""
    if m <= d:
        return []
    sols = set()
    for r0 in _sqrts_mod(-d % m, m):
        r0 = min(r0, m - r0)
        if r0 == 0:
            continue
        # Descend the Euclidean remainder chain of (m, r0); every remainder
        # below sqrt(m) is a candidate x.
        a, b = m, r0
        limit = isqrt(m)
        while b > 0:
            if b <= limit:
                rem = m - b * b
                if rem > 0 and rem % d == 0:
                    y2 = rem // d
                    y = isqrt(y2)
                    if y * y == y2 and y > 0:
                        sols.add((b, y))
            a, b = b, a % b
    return sorted(sols)


def _square_divisors(m: int) -> list[int]:
    """All g > 0 with g^2 dividing m, from the factorization."""
    gs = [1]
    for p, e in _factorize(m):
        if e >= 2:
            gs = [g * p**j for g in gs for j in range(e // 2 + 1)]
    return sorted(gs)


def cornacchia(d: int, m: int) -> tuple[int, int] | None:
    """Minimal-x solution of x^2 + d y^2 = m with x, y > 0, or None."""
    if d <= 0 or m <= 0:
        raise ValueError("cornacchia requires d > 0 and m > 0")
    best = None
    for g in _square_divisors(m):
        for x, y in _cornacchia_primitive(d, m // (g * g)):
            cand = (g * x, g * y)
            if best is None or cand[0] < best[0]:
                best = cand
    return best


def cornacchia_all(d: int, m: int) -> list[tuple[int, int]]:
    """Every solution of x^2 + d y^2 = m with x, y > 0, ascending in x."""
    if d <= 0 or m <= 0:
        raise ValueError("cornacchia requires d > 0 and m > 0")
    sols = set()
    for g in _square_divisors(m):
        for x, y in _cornacchia_primitive(d, m // (g * g)):
            sols.add((g * x, g * y))
    return sorted(sols)


def frac_ord2(x: Fraction) -> int:
    return ord_p(x, 2)


__all__ = [
    "cornacchia",
    "cornacchia_all",
    "frac_ord2",
    "gcd",
    "is_prime",
    "isqrt",
    "jacobi",
    "kronecker",
    "ord_p",
    "primes_in_class",
]
