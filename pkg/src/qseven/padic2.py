"""2-adic arithmetic: floating-precision elements, quadratic extensions of Q2,
Hensel square roots, the 2-adic logarithm and Hilbert symbols."""

from __future__ import annotations

from fractions import Fraction

from .arith import is_prime, jacobi, ord_p

DEFAULT_PREC = 192
_MIN_PREC = 16

# Square-free d with Q2(sqrt(d)) ramified; 3 and -1 are the ones the quartic
# splitting produces, the rest round out the six ramified quadratic extensions.
RAMIFIED_D = (3, -1, 2, -2, 6, -6)


class PrecisionError(ArithmeticError):
    """Raised when a result would be known to fewer than _MIN_PREC unit bits."""


class Z2Elem:
    """Floating 2-adic number 2^val * unit, unit odd and known mod 2^prec.

    Zero-to-precision is val=None unit=0 for exact zero, or an integer val
    meaning only ord >= val is known (the residue of a full cancellation).
    """

    __slots__ = ("val", "unit", "prec")

    def __init__(self, val, unit, prec):
        if unit == 0:
            self.val = val  # None: exact zero; int: lower bound on ord
            self.unit = 0
            self.prec = 0
            return
        shift = (unit & -unit).bit_length() - 1
        unit >>= shift
        val += shift
        prec -= shift
        if prec < _MIN_PREC:
            raise PrecisionError(f"unit known to {prec} bits")
        self.val = val
        self.unit = unit % (1 << prec)
        self.prec = prec

    @classmethod
    def from_int(cls, n: int, prec: int = DEFAULT_PREC):
        if n == 0:
            return cls(None, 0, 0)
        v = (n & -n).bit_length() - 1
        return cls(v, n >> v, prec)

    @classmethod
    def from_frac(cls, x, prec: int = DEFAULT_PREC):
        x = Fraction(x)
        if x == 0:
            return cls(None, 0, 0)
        num, den = x.numerator, x.denominator
        vn = (num & -num).bit_length() - 1
        vd = (den & -den).bit_length() - 1
        mod = 1 << prec
        unit = (num >> vn) * pow(den >> vd, -1, mod) % mod
        return cls(vn - vd, unit, prec)

    def is_zero(self) -> bool:
        return self.unit == 0

    def ord(self) -> int:
        if self.unit == 0:
            raise PrecisionError("ord of a zero-to-precision element")
        return self.val

    def ord_lower(self) -> int | None:
        """Certified lower bound on ord; None means exact zero (ord infinite)."""
        return self.val if self.unit != 0 or self.val is not None else None

    def unit_mod(self, bits: int) -> int:
        if self.unit == 0:
            raise PrecisionError("unit of a zero element")
        if bits > self.prec:
            raise PrecisionError(f"need {bits} unit bits, have {self.prec}")
        return self.unit % (1 << bits)

    def __neg__(self):
        if self.unit == 0:
            return self
        return Z2Elem(self.val, (1 << self.prec) - self.unit, self.prec)

    def __add__(self, other):
        a, b = self, other
        if a.unit == 0 and b.unit == 0:
            if a.val is None:
                return b
            if b.val is None:
                return a
            return Z2Elem(min(a.val, b.val), 0, 0)
        if a.unit == 0:
            a, b = b, a
        if b.unit == 0:
            if b.val is None:
                return a
            # b only known to lie in 2^b.val Z2.
            if b.val <= a.val:
                return Z2Elem(b.val, 0, 0)
            if b.val - a.val < _MIN_PREC:
                return Z2Elem(a.val, 0, 0)
            return Z2Elem(a.val, a.unit, min(a.prec, b.val - a.val))
        v = min(a.val, b.val)
        abs_known = min(a.val + a.prec, b.val + b.prec)
        p = abs_known - v
        s = ((a.unit << (a.val - v)) + (b.unit << (b.val - v))) % (1 << p)
        if s == 0:
            return Z2Elem(abs_known, 0, 0)
        sv = (s & -s).bit_length() - 1
        if p - sv < _MIN_PREC:
            # Cancellation left too few unit bits; weaken to the sound
            # interval 2^(v+sv) Z2 rather than carry junk bits.
            return Z2Elem(v + sv, 0, 0)
        return Z2Elem(v, s, p)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        a, b = self, other
        if a.unit == 0 or b.unit == 0:
            if a.unit != 0:
                a, b = b, a
            # a is zero-ish
            if a.val is None:
                return a
            if b.unit == 0:
                if b.val is None:
                    return b
                return Z2Elem(a.val + b.val, 0, 0)
            return Z2Elem(a.val + b.val, 0, 0)
        p = min(a.prec, b.prec)
        return Z2Elem(a.val + b.val, (a.unit * b.unit) % (1 << p), p)

    def inverse(self):
        if self.unit == 0:
            raise PrecisionError("inverting a zero-to-precision element")
        mod = 1 << self.prec
        return Z2Elem(-self.val, pow(self.unit, -1, mod), self.prec)

    def __truediv__(self, other):
        return self * other.inverse()

    def shift(self, k: int):
        """Multiply by 2^k."""
        if self.unit == 0:
            if self.val is None:
                return self
            return Z2Elem(self.val + k, 0, 0)
        return Z2Elem(self.val + k, self.unit, self.prec)

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = Z2Elem.from_int(1, self.prec if self.unit else DEFAULT_PREC)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def sqrt(self):
        if self.unit == 0:
            raise PrecisionError("sqrt of a zero-to-precision element")
        if self.val % 2 != 0:
            raise ValueError("odd valuation has no square root in Q2")
        if self.unit % 8 != 1:
            raise ValueError("unit not congruent to 1 mod 8")
        s = hensel_sqrt(self.unit, self.prec)
        return Z2Elem(self.val // 2, s, self.prec - 1)

    def __repr__(self):
        if self.unit == 0:
            return "Z2Elem(0)" if self.val is None else f"Z2Elem(O(2^{self.val}))"
        return f"Z2Elem(2^{self.val} * {self.unit % 256}... mod 2^{self.prec})"


def hensel_sqrt(a: int, prec: int) -> int:
    """Minimal s with s^2 = a mod 2^prec, s = 1 mod 4, s < 2^(prec-1).

    Requires a = 1 mod 8 (a may be given as any integer; it is reduced).
    """
    if prec < 3:
        raise ValueError("prec must be at least 3")
    mod = 1 << prec
    a = a % mod
    if a % 8 != 1:
        raise ValueError("no square root: a is not 1 mod 8")
    s = 1
    for k in range(3, prec):
        if (s * s - a) % (1 << (k + 1)):
            s += 1 << (k - 1)
    s %= mod
    if s % 4 != 1:
        s = mod - s
    if s >= mod // 2:
        s -= mod // 2
    return s


def is_square_q2(x) -> bool:
    """Whether a nonzero rational is a square in Q2."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("zero is not handled")
    v = ord_p(x, 2)
    if v % 2 != 0:
        return False
    unit = Fraction(x, Fraction(2) ** v)
    num, den = unit.numerator, unit.denominator
    return (num * pow(den, -1, 8)) % 8 == 1


class LQElem:
    """Element a + b*gen of a LocalQuad field, coordinates Z2Elem."""

    __slots__ = ("field", "a", "b")

    def __init__(self, field, a, b):
        self.field = field
        self.a = a
        self.b = b

    def __add__(self, other):
        return LQElem(self.field, self.a + other.a, self.b + other.b)

    def __neg__(self):
        return LQElem(self.field, -self.a, -self.b)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        f = self.field
        a, b, c, d = self.a, self.b, other.a, other.b
        if f.kind == "unram":
            # gen^2 = -1 - gen
            cross = b * d
            return LQElem(f, a * c - cross, a * d + b * c - cross)
        return LQElem(f, a * c + f.d_z2 * (b * d), a * d + b * c)

    def conj(self):
        f = self.field
        if f.kind == "unram":
            # conjugate of gen is gen^2 = -1 - gen
            return LQElem(f, self.a - self.b, -self.b)
        return LQElem(f, self.a, -self.b)

    def norm(self) -> Z2Elem:
        n = self * self.conj()
        return n.a

    def inverse(self):
        n = self.norm().inverse()
        c = self.conj()
        return LQElem(self.field, c.a * n, c.b * n)

    def __truediv__(self, other):
        return self * other.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def shift(self, k: int):
        return LQElem(self.field, self.a.shift(k), self.b.shift(k))

    def ord_w(self) -> int:
        """Valuation normalized so a uniformizer has ord 1."""
        f = self.field
        if f.kind == "unram":
            # ord(2) = 1; ord = min of coordinate ords
            cands = []
            for z in (self.a, self.b):
                if z.unit != 0:
                    cands.append(z.val)
            if not cands:
                raise PrecisionError("ord of zero-to-precision element")
            return min(cands)
        return self.norm().ord()

    def is_zero(self) -> bool:
        return self.a.is_zero() and self.b.is_zero()

    def __repr__(self):
        return f"LQElem({self.a!r}, {self.b!r})"


class LocalQuad:
    """Quadratic extension of Q2: 'unram' is Q2(zeta), zeta^2 = -1 - zeta
    (the unramified one); ('ram', d) is Q2(sqrt(d)) for ramified d."""

    def __init__(self, kind: str, d: int | None = None, prec: int = DEFAULT_PREC):
        if kind == "unram":
            self.d = None
        elif kind == "ram":
            if d not in RAMIFIED_D:
                raise ValueError(f"d must be one of {RAMIFIED_D}")
            self.d = d
            self.d_z2 = Z2Elem.from_int(d, prec)
        else:
            raise ValueError("kind must be 'unram' or 'ram'")
        self.kind = kind
        self.prec = prec
        # Ramification index: ord_w(2).
        self.e = 1 if kind == "unram" else 2

    def elem(self, a, b=0) -> LQElem:
        def coerce(x):
            if isinstance(x, Z2Elem):
                return x
            return Z2Elem.from_frac(Fraction(x), self.prec)

        return LQElem(self, coerce(a), coerce(b))

    def one(self) -> LQElem:
        return self.elem(1, 0)

    def gen(self) -> LQElem:
        return self.elem(0, 1)

    def log(self, x: LQElem) -> LQElem:
        """2-adic logarithm of a unit with x = 1 mod the maximal ideal.

        Tolerates torsion of 2-power order (log(-1) = 0).  Units whose residue
        has odd order > 1 must be raised to that order by the caller first.
        """
        one = self.one()
        t = x - one
        if not t.is_zero() and t.ord_w() < 1:
            raise ValueError("not a principal unit")
        m = 0
        y = x
        while True:
            t = y - one
            if t.is_zero() or t.ord_w() >= 5:
                break
            y = y * y
            m += 1
            if m > 64:
                raise ValueError("unit does not become principal by squaring")
        if t.is_zero():
            return LQElem(self, Z2Elem(None, 0, 0), Z2Elem(None, 0, 0))
        target = self.e * (self.prec + 8) + 40
        acc = LQElem(self, Z2Elem(None, 0, 0), Z2Elem(None, 0, 0))
        power = t
        k = 1
        while True:
            kv = (k & -k).bit_length() - 1
            k_odd = k >> kv
            inv = Z2Elem.from_frac(Fraction(1, k_odd), self.prec).shift(-kv)
            term = LQElem(self, power.a * inv, power.b * inv)
            if k % 2 == 0:
                term = -term
            acc = acc + term
            k += 1
            power = power * t
            if power.is_zero() or power.ord_w() > target:
                break
            if k > 4 * self.prec:
                raise PrecisionError("log series did not terminate")
        return acc.shift(-m)


def log_z2(x: Z2Elem) -> Z2Elem:
    """2-adic logarithm of an odd 2-adic integer (log(-1) = 0)."""
    one = Z2Elem.from_int(1, x.prec)
    if x.is_zero() or x.val != 0:
        raise ValueError("log needs a unit")
    m = 0
    y = x
    while True:
        t = y - one
        if t.is_zero() or t.val >= 5:
            break
        y = y * y
        m += 1
        if m > 64:
            raise ValueError("not +-1 times a principal unit")
    if t.is_zero():
        return Z2Elem(None, 0, 0)
    acc = Z2Elem(None, 0, 0)
    power = t
    k = 1
    target = x.prec + 48
    while True:
        kv = (k & -k).bit_length() - 1
        k_odd = k >> kv
        inv = pow(k_odd, -1, 1 << power.prec)
        term = Z2Elem(power.val - kv, (power.unit * inv) % (1 << power.prec), power.prec)
        if k % 2 == 0:
            term = -term
        acc = acc + term
        k += 1
        power = power * t
        if power.is_zero() or power.val > target:
            break
    return acc.shift(-m)


def _eps(u: int) -> int:
    return ((u - 1) // 2) % 2


def _omega(u: int) -> int:
    return ((u * u - 1) // 8) % 2


def _split2(x: Fraction) -> tuple[int, int]:
    v = ord_p(x, 2)
    unit = Fraction(x, Fraction(2) ** v)
    num, den = unit.numerator, unit.denominator
    return v, (num * pow(den, -1, 64)) % 64


def hilbert2(a, b) -> int:
    """Hilbert symbol (a, b) at the place 2 for nonzero rationals."""
    a, b = Fraction(a), Fraction(b)
    if a == 0 or b == 0:
        raise ValueError("arguments must be nonzero")
    al, u = _split2(a)
    be, v = _split2(b)
    exp = _eps(u) * _eps(v) + al * _omega(v) + be * _omega(u)
    return -1 if exp % 2 else 1


def hilbert_odd(a, b, p: int) -> int:
    """Hilbert symbol (a, b) at an odd prime p."""
    a, b = Fraction(a), Fraction(b)
    if a == 0 or b == 0:
        raise ValueError("arguments must be nonzero")
    if p == 2 or not is_prime(p):
        raise ValueError("p must be an odd prime")
    al = ord_p(a, p)
    be = ord_p(b, p)
    u = Fraction(a, Fraction(p) ** al)
    v = Fraction(b, Fraction(p) ** be)
    un = u.numerator * pow(u.denominator, -1, p) % p
    vn = v.numerator * pow(v.denominator, -1, p) % p
    sign = 1
    if (al * be) % 2 and p % 4 == 3:
        sign = -sign
    if be % 2 and jacobi(un, p) == -1:
        sign = -sign
    if al % 2 and jacobi(vn, p) == -1:
        sign = -sign
    return sign


def hilbert_inf(a, b) -> int:
    return -1 if a < 0 and b < 0 else 1


def sqrt_minus_q(q: int, prec: int = DEFAULT_PREC) -> int:
    """The distinguished square root s of -q mod 2^prec, s = 1 mod 4, minimal."""
    if q % 8 != 7:
        raise ValueError("q must be 7 mod 8")
    return hensel_sqrt(-q, prec)


def splitting_pattern(q: int, prec: int = DEFAULT_PREC, mirror: bool = False) -> dict:
    """Local data of x^4 + q over Q2 for prime q = 7 mod 8.

    The two square roots of -q in Z2 are +-s with s = 1 mod 4; the place
    labeled 'star' is the one where the root is s, the other gets -s.  The
    quartic factors as (x^2 - s)(x^2 + s); which side is ramified depends on
    q mod 16.

    With mirror=True every local root is negated, which exchanges the roles
    of the two square roots of -q: each embedding is replaced by its
    conjugate over the quadratic subfield.  At the split pair this swaps the
    two places' labels.
    """
    if not is_prime(q) or q % 8 != 7:
        raise ValueError("q must be a prime that is 7 mod 8")
    s = sqrt_minus_q(q, prec)
    out = {"q": q, "s": s, "prec": prec}
    if q % 16 == 7:
        # s = 5 mod 8: x^2 - s inert (unramified quadratic), x^2 + s ramified.
        assert s % 8 == 5
        unram = LocalQuad("unram", prec=prec)
        # (1 + 2*zeta)^2 = -3, so sqrt(s) = (1 + 2*zeta) * sqrt(s / -3).
        t = hensel_sqrt(s * pow(-3, -1, 1 << prec), prec)
        root_star = unram.elem(1, 2) * unram.elem(t)
        ram = LocalQuad("ram", 3, prec=prec)
        u = hensel_sqrt((-s) * pow(3, -1, 1 << prec), prec)
        root_plain = ram.elem(0, u)
        out.update(
            {
                "class": "7mod16",
                "places": {
                    "wstar": {"field": unram, "root": root_star, "e": 1, "f": 2},
                    "w": {"field": ram, "root": root_plain, "e": 2, "f": 1},
                },
            }
        )
    else:
        # q = 15 mod 16, s = 1 mod 8: x^2 - s splits, x^2 + s is ramified
        # with Q2(sqrt(-s)) = Q2(i).
        assert s % 8 == 1
        tau = hensel_sqrt(s, prec)
        ram = LocalQuad("ram", -1, prec=prec)
        root_plain = ram.elem(0, tau)
        out.update(
            {
                "class": "15mod16",
                "tau": tau,
                "places": {
                    "w1star": {"field": None, "root": tau, "e": 1, "f": 1},
                    "w2star": {"field": None, "root": -tau, "e": 1, "f": 1},
                    "w": {"field": ram, "root": root_plain, "e": 2, "f": 1},
                },
            }
        )
    if mirror:
        for place in out["places"].values():
            place["root"] = -place["root"]
    total = sum(p["e"] * p["f"] for p in out["places"].values())
    assert total == 4
    return out


def primes_above_q_count(q: int, prec: int = 64) -> int:
    """Number of primes above q in the first layer where q splits completely
    in the 2-cyclotomic direction: 2^(ord2(q+1) - 3)."""
    if q % 8 != 7:
        raise ValueError("q must be 7 mod 8")
    s = hensel_sqrt(-q, prec)
    k = max(ord_p(s - 1, 2), ord_p(s + 1, 2))
    count = 1 << (k - 2)
    assert count == 1 << (ord_p(q + 1, 2) - 3)
    return count
