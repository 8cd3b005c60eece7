"""Rigorous interval bounds for the lower-vs-upper comparison that forces a
simple zero at s = 1.

The lower bound is an explicit polynomial in W^(-1/4); the upper bound is a
lattice-point sum of 2x * f(pi(x^2 + q y^2)/(2q)) with f(z) = E1(z)/z, either
summed directly with a certified tail or majorized term-by-term through a
product of two one-dimensional series.  All arithmetic is outward-rounded
interval arithmetic; a verdict is issued only when the intervals separate
with margin.
"""

from contextlib import contextmanager
from dataclasses import dataclass
from functools import lru_cache
from math import isqrt, nextafter

from mpmath import iv, mp, mpf

DEFAULT_FLOAT_PREC = 128
MARGIN_BITS = 64

U_COEFFS = ("0.5235", "0.8458", "0.3951")
U_SLOPE_FLOOR = "0.08107226"
V_CHAIN_CONST = "0.01341663832"


@contextmanager
def _ivprec(p: int):
    old = iv.prec
    iv.prec = p
    try:
        yield
    finally:
        iv.prec = old


def _elo(x) -> mpf:
    """Exact lower endpoint of an interval scalar, no re-rounding."""
    return mp.make_mpf(x._mpi_[0])


def _ehi(x) -> mpf:
    """Exact upper endpoint of an interval scalar, no re-rounding."""
    return mp.make_mpf(x._mpi_[1])


def _float_down(x) -> float:
    f = float(x)
    return nextafter(f, float("-inf")) if f > x else f


def _float_up(x) -> float:
    f = float(x)
    return nextafter(f, float("inf")) if f < x else f


class HPReal:
    """Enclosure of a real number between outward-rounded endpoints.

    exceeds() certifies a strict inequality between the enclosed numbers,
    requiring the intervals to separate by 2^-64 times their scale.
    """

    __slots__ = ("x",)

    def __init__(self, x):
        self.x = x if isinstance(x, iv.mpf) else iv.mpf(x)

    @property
    def lo(self) -> mpf:
        return _elo(self.x)

    @property
    def hi(self) -> mpf:
        return _ehi(self.x)

    def width(self) -> float:
        return float(self.x.delta)

    def exceeds(self, other) -> bool:
        with mp.workprec(160):
            gap = self.lo - other.hi
            scale = max(mpf(1), abs(self.hi), abs(other.hi))
            return gap > scale * mpf(2) ** -MARGIN_BITS

    def midpoint(self) -> float:
        with mp.workprec(160):
            return float((self.lo + self.hi) / 2)

    def __repr__(self):
        return f"HPReal[{float(self.lo)!r}, {float(self.hi)!r}]"


@dataclass(frozen=True)
class BoundReport:
    """Outcome of the comparison for one q.

    u_lower is rounded down, the two upper bounds are rounded up, so the
    reported floats stay conservative.  verdict is True only when the lower
    bound exceeds both upper bounds with margin.
    """

    q: int
    W: int
    u_lower: float
    v_upper_truncated: float
    v_upper_chain: float
    verdict: bool

    def margin(self) -> float:
        return self.u_lower - max(self.v_upper_truncated, self.v_upper_chain)


def _e1_series(z, prec: int):
    """E1(z) = -euler - log z + sum (-1)^(k+1) z^k / (k k!), for 0 < z <= 4."""
    acc = -iv.euler - iv.log(z)
    term = iv.mpf(1)
    k = 0
    thresh = iv.mpf(2) ** (-(prec + 8))
    while True:
        k += 1
        term = term * z / k
        t = term / k
        if k % 2:
            acc = acc + t
        else:
            acc = acc - t
        if k >= 8 and _ehi(t) < _elo(thresh) and k > 2 * float(_ehi(z)):
            # remaining terms decay faster than 1/2 per step
            tail = 2 * _ehi(t)
            acc = acc + iv.mpf([-tail, tail])
            return acc
        if k > 16 * prec:
            raise ArithmeticError("series for E1 did not settle")


def _e1_cf(z, prec: int):
    """E1(z) = e^-z * F(z) for z > 4, F the Stieltjes continued fraction
    1/(z+ 1/(1+ 1/(z+ 2/(1+ 2/(z+ ...))))) whose consecutive convergents
    bracket the value; returns the hull of two convergents."""

    def convergent(n):
        t = iv.mpf(0)
        for k in range(n, 0, -1):
            a = max(1, k // 2)
            b = z if k % 2 else iv.mpf(1)
            t = a / (b + t)
        return t

    n = 24
    while True:
        c1, c2 = convergent(n), convergent(n + 1)
        with mp.workprec(prec + 64):
            lo = min(_elo(c1), _elo(c2))
            hi = max(_ehi(c1), _ehi(c2))
            settled = hi - lo < lo * mpf(2) ** (-(prec + 6))
        if settled:
            return iv.exp(-z) * iv.mpf([lo, hi])
        n *= 2
        if n > 1 << 14:
            raise ArithmeticError("continued fraction for E1 did not settle")


def f_of_z(z, prec: int = DEFAULT_FLOAT_PREC) -> HPReal:
    """f(z) = E1(z)/z for z > 0, with certified enclosure.

    Power series with alternating-tail bound up to z = 4, Stieltjes continued
    fraction with bracketing convergents beyond.
    """
    with _ivprec(prec + 16):
        zi = z.x if isinstance(z, HPReal) else iv.mpf(z)
        if not mpf(zi.a) > 0:
            raise ValueError("f is evaluated only at positive arguments")
        if mpf(zi.b) <= 4:
            e1 = _e1_series(zi, prec)
        else:
            e1 = _e1_cf(zi, prec)
        return HPReal(e1 / zi)


def u_lower_bound(W: int, prec: int = DEFAULT_FLOAT_PREC) -> HPReal:
    """W * (0.5235 - 0.8458 W^(-1/4) - 0.3951 W^(-1/2)), valid from W = 28.

    The slope is checked to stay above 0.08107226, the value of the
    parenthesis near its left end.
    """
    if W < 28:
        raise ValueError("lower bound needs W >= 28")
    with _ivprec(prec + 16):
        wi = iv.mpf(W)
        c0, c1, c2 = (iv.mpf(c) for c in U_COEFFS)
        quarter = iv.exp(iv.log(wi) / 4)
        slope = c0 - c1 / quarter - c2 / iv.sqrt(wi)
        out = HPReal(wi * slope)
        if not HPReal(slope).exceeds(HPReal(iv.mpf(U_SLOPE_FLOOR))):
            raise ArithmeticError(f"W={W}: lower-bound slope fell below floor")
        return out


def _gauss_tail(c, X: int):
    """Upper bound for sum_{x > X} x e^(-c x^2): drop e^(-c k^2) and sum the
    resulting geometric series, e^(-c X^2) (X g/(1-g) + g/(1-g)^2)."""
    g = iv.exp(-2 * c * X)
    one = iv.mpf(1)
    head = iv.exp(-c * X * X)
    return head * (X * g / (one - g) + g / (one - g) ** 2)


@lru_cache(maxsize=None)
def y_series(prec: int = DEFAULT_FLOAT_PREC) -> HPReal:
    """sum_{y >= 1} e^(-pi y^2 / 2) / y^4, enclosed; about 0.207997."""
    with _ivprec(prec + 24):
        half_pi = iv.pi / 2
        acc = iv.mpf(0)
        y_max = max(6, isqrt(prec) + 4)
        for y in range(1, y_max + 1):
            acc = acc + iv.exp(-half_pi * y * y) / (y ** 4)
        tail = _gauss_tail(half_pi, y_max)  # even dropping the 1/y^4 factor
        acc = acc + iv.mpf([0, _ehi(tail)])
        return HPReal(acc)


def chain_constant(prec: int = DEFAULT_FLOAT_PREC) -> HPReal:
    """2 * 0.208 / pi^3, the per-W slope of the closed-form upper bound.

    0.208 is the decimal ceiling of y_series; the ceiling is re-certified
    here, so 0.01341663832... * W dominates the product-form bound.
    """
    with _ivprec(prec + 24):
        y_up = HPReal(iv.mpf("0.208"))
        if not y_up.exceeds(y_series(prec)):
            raise ArithmeticError("y-series ceiling 0.208 no longer certifies")
        return HPReal(2 * y_up.x / iv.pi ** 3)


def x_gauss_sum(q: int, prec: int = DEFAULT_FLOAT_PREC) -> HPReal:
    """sum_{x >= 1} x e^(-pi x^2 / (2q)), enclosed and certified < q/pi."""
    with _ivprec(prec + 16):
        c = iv.pi / (2 * q)
        X = isqrt((2 * q * (prec + 40)) // 9) + 2  # e^(-c X^2) below 2^-(prec+40)
        acc = iv.mpf(0)
        for x in range(1, X + 1):
            acc = acc + x * iv.exp(-c * x * x)
        tail = _gauss_tail(c, X)
        acc = acc + iv.mpf([0, _ehi(tail)])
        out = HPReal(acc)
        bound = HPReal(iv.mpf(q) / iv.pi)
        if not bound.exceeds(out):
            raise ArithmeticError(f"q={q}: x-sum does not stay below q/pi")
        return out


def _v_truncated(q: int, prec: int, x_cut: int | None = None):
    """Upper enclosure of sum_{x,y>=1} 2x f(pi(x^2 + q y^2)/(2q)).

    The y = 1 row is summed directly up to x_cut; the x-tail of that row and
    the entire y >= 2 block are majorized by 2x f(z) <= (8/pi^2) x
    e^(-pi x^2/(2q)) e^(-pi y^2/2) / y^4, which also proves the product-form
    bound dominates this one.  The default cutoff keeps every evaluated
    argument at z <= 1.25 pi, so only the cheap series branch of f runs.
    """
    pi = iv.pi
    c = pi / (2 * q)
    X = x_cut if x_cut is not None else max(1, isqrt(3 * q // 2))
    acc = iv.mpf(0)
    for x in range(1, X + 1):
        z = pi * (x * x + q) / (2 * q)
        acc = acc + 2 * x * f_of_z(HPReal(z), prec).x
    eight = 8 / pi ** 2
    y1 = iv.exp(-pi / 2)
    row_tail = eight * y1 * _gauss_tail(c, X)
    ys = y_series(prec).x
    rest_rows = eight * x_gauss_sum(q, prec).x * (ys - y1)
    pad = _ehi(row_tail + rest_rows)
    if pad < 0:
        pad = mpf(0)
    return acc + iv.mpf([0, pad]), float(_float_up(pad))


def v_upper_bound(q: int, prec: int = DEFAULT_FLOAT_PREC) -> tuple:
    """Pair of upper bounds: the truncated lattice sum with certified tail,
    and the product-form majorant (8/pi^2) * x_gauss_sum * y_series.

    The first is asserted to lie below the second, which holds because the
    second majorizes the first term by term.
    """
    if q % 8 != 7:
        raise ValueError("upper bound is defined for q = 7 mod 8")
    with _ivprec(prec + 16):
        truncated, _ = _v_truncated(q, prec)
        chain = 8 / iv.pi ** 2 * x_gauss_sum(q, prec).x * y_series(prec).x
        t, ch = HPReal(truncated), HPReal(chain)
        if not t.hi <= ch.hi:
            raise ArithmeticError(f"q={q}: truncated bound escaped its majorant")
        return t, ch


def simple_zero_criterion(q: int, prec: int = DEFAULT_FLOAT_PREC) -> BoundReport:
    """Compare the lower bound at W = 4q against both upper bounds.

    verdict is True only when the lower bound strictly exceeds each upper
    bound with interval margin, certifying U > |V|.
    """
    W = 4 * q
    u = u_lower_bound(W, prec)
    vt, vc = v_upper_bound(q, prec)
    verdict = u.exceeds(vt) and u.exceeds(vc)
    return BoundReport(
        q=q,
        W=W,
        u_lower=_float_down(u.lo),
        v_upper_truncated=_float_up(vt.hi),
        v_upper_chain=_float_up(vc.hi),
        verdict=verdict,
    )
