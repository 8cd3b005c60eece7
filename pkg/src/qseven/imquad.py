"""Imaginary quadratic class groups via binary quadratic forms.

Covers reduction, composition, class numbers by exhaustive enumeration,
orders of the prime-above-2 class for disc -q, the norm-2^t generator and
its 2-adic residue, and the 2-Sylow shape for disc -8q.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, isqrt

from .arith import cornacchia, cornacchia_all, is_prime, kronecker, ord_p
from .padic2 import sqrt_minus_q


class Form:
    """Positive definite binary quadratic form a x^2 + b xy + c y^2."""

    __slots__ = ("a", "b", "c")

    def __init__(self, a: int, b: int, c: int):
        if a <= 0:
            raise ValueError("a must be positive")
        if b * b - 4 * a * c >= 0:
            raise ValueError("discriminant must be negative")
        self.a = a
        self.b = b
        self.c = c

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def is_primitive(self) -> bool:
        return gcd(gcd(self.a, self.b), self.c) == 1

    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        if not (abs(b) <= a <= c):
            return False
        if (abs(b) == a or a == c) and b < 0:
            return False
        return True

    def reduce(self) -> "Form":
        a, b, c = self.a, self.b, self.c
        while True:
            if c < a:
                a, b, c = c, -b, a
                continue
            if b > a or b <= -a:
                r = b % (2 * a)
                if r > a:
                    r -= 2 * a
                c += (r * r - b * b) // (4 * a)
                b = r
                continue
            break
        if (abs(b) == a or a == c) and b < 0:
            b = -b
        return Form(a, b, c)

    def inverse(self) -> "Form":
        return Form(self.a, -self.b, self.c).reduce()

    def __eq__(self, other):
        return (self.a, self.b, self.c) == (other.a, other.b, other.c)

    def __hash__(self):
        return hash((self.a, self.b, self.c))

    def __repr__(self):
        return f"Form({self.a}, {self.b}, {self.c})"

    def value(self, x: int, y: int) -> int:
        return self.a * x * x + self.b * x * y + self.c * y * y

    def transform(self, p: int, q: int, r: int, s: int) -> "Form":
        """Apply the unimodular substitution (x, y) -> (px + ry, qx + sy)."""
        if p * s - q * r != 1:
            raise ValueError("matrix must have determinant 1")
        a, b, c = self.a, self.b, self.c
        na = self.value(p, q)
        nc = self.value(r, s)
        nb = 2 * a * p * r + b * (p * s + q * r) + 2 * c * q * s
        return Form(na, nb, nc)


def principal_form(D: int) -> Form:
    if D >= 0 or D % 4 not in (0, 1):
        raise ValueError("not a negative discriminant")
    if D % 4 == 0:
        return Form(1, 0, -D // 4)
    return Form(1, 1, (1 - D) // 4)


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        k = old_r // r
        old_r, r = r, old_r - k * r
        old_s, s = s, old_s - k * s
        old_t, t = t, old_t - k * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def _coprime_rep(f: Form, n: int) -> Form:
    """An equivalent form whose leading coefficient is coprime to n."""
    if gcd(f.a, n) == 1:
        return f
    for box in (6, 20, 80):
        for x in range(-box, box + 1):
            for y in range(-box, box + 1):
                if gcd(x, y) != 1:
                    continue
                v = f.value(x, y)
                if v > 0 and gcd(v, n) == 1:
                    gg, u, w = _xgcd(x, y)
                    assert gg == 1
                    # u*x + w*y = 1, so [[x, -w], [y, u]] has determinant 1.
                    return f.transform(x, y, -w, u)
    raise ArithmeticError("no coprime representative found in search box")


def compose(f: Form, g: Form) -> Form:
    """Gauss composition of primitive forms of the same discriminant."""
    D = f.disc
    if g.disc != D:
        raise ValueError("discriminants differ")
    if not (f.is_primitive() and g.is_primitive()):
        raise ValueError("forms must be primitive")
    g2 = _coprime_rep(g, f.a)
    a1, b1 = f.a, f.b
    a2, b2 = g2.a, g2.b
    # B = b1 mod 2a1, B = b2 mod 2a2; moduli share only the factor 2.
    m1, m2 = 2 * a1, 2 * a2
    d, u, v = _xgcd(m1, m2)
    assert (b2 - b1) % d == 0
    lift = (b2 - b1) // d * u % (m2 // d)
    B = b1 + m1 * lift
    A = a1 * a2
    assert (B * B - D) % (4 * A) == 0
    return Form(A, B, (B * B - D) // (4 * A)).reduce()


def power(f: Form, n: int) -> Form:
    e = principal_form(f.disc)
    if n < 0:
        return power(f.inverse(), -n)
    acc = e
    base = f.reduce()
    while n:
        if n & 1:
            acc = compose(acc, base)
        base = compose(base, base) if n > 1 else base
        n >>= 1
    return acc


def order_of_class(f: Form, bound: int | None = None) -> int:
    e = principal_form(f.disc)
    acc = f.reduce()
    k = 1
    limit = bound if bound is not None else 10**6
    while acc != e:
        acc = compose(acc, f)
        k += 1
        if k > limit:
            raise ArithmeticError("order exceeds bound")
    return k


def reduced_forms(D: int) -> list[Form]:
    """All reduced primitive forms of discriminant D < 0."""
    if D >= 0 or D % 4 not in (0, 1):
        raise ValueError("not a negative discriminant")
    out = []
    amax = isqrt(-D // 3)
    for a in range(1, amax + 1):
        for b in range(-a + 1, a + 1):
            if (b - D) % 2 != 0:
                continue
            num = b * b - D
            if num % (4 * a) != 0:
                continue
            c = num // (4 * a)
            if c < a:
                continue
            if a == c and b < 0:
                continue
            if gcd(gcd(a, b), c) != 1:
                continue
            out.append(Form(a, b, c))
    return out


def class_number(D: int) -> int:
    return len(reduced_forms(D))


@dataclass
class ClassGroupData:
    disc: int
    h: int
    two_sylow: list[int]


def class_group_two_sylow(D: int) -> ClassGroupData:
    """2-Sylow elementary divisors via the order statistics of all classes.

    Raising every class to the odd part of h enumerates the whole 2-Sylow S;
    the counts |{x in S : x^(2^k) = e}| determine the divisors uniquely.  The
    ambiguous (self-inverse) reduced forms independently give the 2-rank.
    """
    forms = reduced_forms(D)
    h = len(forms)
    v2 = ord_p(h, 2)
    if v2 == 0:
        return ClassGroupData(D, h, [])
    ambiguous = sum(1 for f in forms if f.b == 0 or f.b == f.a or f.a == f.c)
    odd = h >> v2
    sylow = {}
    for f in forms:
        g = power(f, odd)
        key = (g.a, g.b, g.c)
        if key not in sylow:
            o = order_of_class(g, bound=2 * h)
            if o & (o - 1):
                raise ArithmeticError("odd-power class has non-2-power order")
            sylow[key] = o
    if len(sylow) != 1 << v2:
        raise ArithmeticError("2-Sylow size disagrees with ord_2(h)")
    # m_k = log2 |{x : ord(x) divides 2^k}| = sum_i min(d_i, k); the backward
    # differences of (m_k) count the divisors of each size.
    kmax = max(sylow.values()).bit_length() - 1
    m = [0] * (kmax + 2)
    for k in range(kmax + 2):
        cnt = sum(1 for o in sylow.values() if o <= 1 << k)
        if cnt & (cnt - 1):
            raise ArithmeticError("order statistics are not a 2-group's")
        m[k] = cnt.bit_length() - 1
    delta = [m[k] - m[k - 1] for k in range(1, kmax + 2)]
    divisors = []
    for k in range(len(delta)):
        at_least_k1 = delta[k]
        at_least_k2 = delta[k + 1] if k + 1 < len(delta) else 0
        divisors.extend([1 << (k + 1)] * (at_least_k1 - at_least_k2))
    divisors.sort()
    if sum(d.bit_length() - 1 for d in divisors) != v2:
        raise ArithmeticError("divisor product disagrees with ord_2(h)")
    if ambiguous != 1 << len(divisors):
        raise ArithmeticError("2-torsion count disagrees with divisor rank")
    return ClassGroupData(D, h, divisors)


def class_number_analytic(D: int) -> int:
    """Class number from the truncated L-series with a rigorous tail bound.

    h = (sqrt(|D|)/pi) * sum chi_D(n)/n; the tail after N terms is at most
    2*B/(N+1) where B bounds all partial character sums (exact by periodicity).
    Only intended for |D| <= a few thousand.
    """
    import math

    if D >= 0 or D % 4 not in (0, 1):
        raise ValueError("not a negative discriminant")
    period = abs(D)
    partial = 0
    best = 0
    for n in range(1, period + 1):
        partial += kronecker(D, n)
        best = max(best, abs(partial))
    B = best
    scale = math.sqrt(abs(D)) / math.pi
    # err < 0.2 below, so |estimate - nearest| + err < 0.5 always holds when
    # the truncation analysis is sound; the guard is defensive.
    N = int(scale * 2 * B / 0.2) + 10
    total = 0.0
    for n in range(1, N + 1):
        ch = kronecker(D, n)
        if ch:
            total += ch / n
    w = 6 if D == -3 else 4 if D == -4 else 2
    h = scale * total * w / 2
    err = scale * 2 * B / (N + 1) * w / 2
    nearest = round(h)
    if abs(h - nearest) + err >= 0.49:
        raise ArithmeticError("analytic estimate not conclusive; raise N")
    return int(nearest)


def order_of_prime2_class(q: int) -> int:
    """Order t (odd) of the class of the prime above 2 for disc -q."""
    if not is_prime(q) or q % 8 != 7:
        raise ValueError("q must be a prime that is 7 mod 8")
    f = Form(2, 1, (1 + q) // 8)
    assert f.disc == -q
    t = order_of_class(f, bound=class_number(-q))
    if t % 2 == 0:
        raise ArithmeticError("order of the prime-above-2 class must be odd")
    return t


def generator_pi(q: int) -> tuple[int, int, int]:
    """(u, v, t) with u^2 + q v^2 = 2^(t+2): (u + v sqrt(-q))/2 has norm 2^t."""
    t = order_of_prime2_class(q)
    sol = cornacchia(q, 1 << (t + 2))
    if sol is None:
        raise ArithmeticError("no generator found; contradicts the class order")
    u, v = sol
    assert u * u + q * v * v == 1 << (t + 2)
    assert (u - v) % 2 == 0
    return u, v, t


def generator_residue_check(q: int, prec: int = 64) -> dict:
    """Embed the norm-2^t generator 2-adically on its unit side and test the
    residue mod 8: +-3 for q = 7 mod 16, +-1 for q = 15 mod 16.

    Either orientation of the two conjugate embeddings may be the unit side;
    the verdict reports which one held.
    """
    u, v, t = generator_pi(q)
    prec = max(prec, t + 32)
    s = sqrt_minus_q(q, prec)
    mod = 1 << prec
    plus = (u + v * s) % mod
    minus = (u - v * s) % mod
    ord_plus = ord_p(plus, 2) if plus else prec
    ord_minus = ord_p(minus, 2) if minus else prec
    if ord_plus == 1:
        unit_side, other = plus, ord_minus
        orientation = "+s"
    elif ord_minus == 1:
        unit_side, other = minus, ord_plus
        orientation = "-s"
    else:
        raise ArithmeticError("neither embedding has valuation 1; labeling bug")
    if other != t + 1:
        raise ArithmeticError("conjugate valuation mismatch")
    residue = (unit_side >> 1) % 8
    if q % 16 == 7:
        ok = residue in (3, 5)
        expected = "+-3"
    else:
        ok = residue in (1, 7)
        expected = "+-1"
    return {
        "q": q,
        "t": t,
        "u": u,
        "v": v,
        "residue_mod8": residue,
        "expected": expected,
        "orientation": orientation,
        "ok": ok,
    }


def hasse_check(q: int) -> dict:
    """2-part of h(-8q): cyclic, exactly 4 when q = 7 mod 16, >= 8 otherwise."""
    if not is_prime(q) or q % 8 != 7:
        raise ValueError("q must be a prime that is 7 mod 8")
    data = class_group_two_sylow(-8 * q)
    cyclic = len(data.two_sylow) == 1
    two_part = 1
    for d in data.two_sylow:
        two_part *= d
    if q % 16 == 7:
        ok = cyclic and two_part == 4
    else:
        ok = cyclic and two_part >= 8
    return {
        "q": q,
        "disc": -8 * q,
        "h": data.h,
        "two_part": two_part,
        "cyclic": cyclic,
        "ok": ok,
    }


def minimality_witness(q: int) -> bool:
    """No odd j < t admits a half-integer element of norm 2^j; certifies that
    t really is the order of the prime class."""
    t = order_of_prime2_class(q)
    for j in range(1, t, 2):
        for u, v in cornacchia_all(q, 1 << (j + 2)):
            if u % 2 == 1 and v % 2 == 1:
                return False
    return True
