"""Real quadratic field Q(sqrt(q)) for q = 7 mod 8: continued fractions,
Pell units, the norm-2 generator theta, and 2-adic logarithms of units.

The chain verified here: epsilon' = theta^2/2 is a norm-one unit and an odd
power of the fundamental unit; ord_2(Tr epsilon') is 4 exactly when
q = 7 mod 16; the 2-adic log of epsilon' has the matching valuation by two
independent routes; and the CM identity i*(theta/(1+i))^2 = epsilon' holds
exactly in the degree-4 rational representation of Q(i, sqrt(q)).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import isqrt

from .arith import is_prime, ord_p
from .padic2 import DEFAULT_PREC, LocalQuad, PrecisionError, hensel_sqrt

DEFAULT_BIT_BUDGET = 1 << 20


class BudgetSkip(RuntimeError):
    """Coefficient growth passed the configured bit budget; skip this q."""

    def __init__(self, q: int, bits: int, budget: int):
        super().__init__(f"q={q}: coefficients reached {bits} bits, budget {budget}")
        self.q = q
        self.bits = bits
        self.budget = budget


class TheoryViolation(ArithmeticError):
    """A value that is provably impossible for a valid input appeared."""


@dataclass(frozen=True)
class RQInt:
    """x + y*sqrt(q) with integer coordinates (q = 3 mod 4, so this is the
    full ring of integers)."""

    q: int
    x: int
    y: int

    @property
    def norm(self) -> int:
        return self.x * self.x - self.q * self.y * self.y

    @property
    def trace(self) -> int:
        return 2 * self.x

    def conj(self) -> "RQInt":
        return RQInt(self.q, self.x, -self.y)

    def __mul__(self, other: "RQInt") -> "RQInt":
        if self.q != other.q:
            raise ValueError("mixed radicands")
        return RQInt(
            self.q,
            self.x * other.x + self.q * self.y * other.y,
            self.x * other.y + self.y * other.x,
        )

    def __pow__(self, n: int) -> "RQInt":
        if n < 0:
            raise ValueError("negative powers leave the ring")
        result = RQInt(self.q, 1, 0)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result


@dataclass(frozen=True)
class CFData:
    """Continued fraction of sqrt(q): leading digit a0 and one full period."""

    q: int
    a0: int
    period: tuple[int, ...]


def _tableau(q: int):
    """Walk the continued fraction tableau of sqrt(q).

    Yields (i, d_i, a_i, p, k) for i = 1, 2, ... where a_i is the i-th digit,
    (p, k) is the convergent built from digits a_0 .. a_{i-1}, and
    p^2 - q k^2 = (-1)^i d_i exactly.  d_i = 1 marks a period boundary.
    """
    a0 = isqrt(q)
    if a0 * a0 == q:
        raise ValueError(f"{q} is a square")
    m, d, a = 0, 1, a0
    p_prev, p = 1, a0
    k_prev, k = 0, 1
    i = 0
    while True:
        i += 1
        m = d * a - m
        d = (q - m * m) // d
        a = (a0 + m) // d
        yield i, d, a, p, k
        p_prev, p = p, a * p + p_prev
        k_prev, k = k, a * k + k_prev


@lru_cache(maxsize=None)
def cf_sqrt(q: int) -> CFData:
    """Full period of the continued fraction of sqrt(q)."""
    if q < 2:
        raise ValueError("q must be at least 2")
    a0 = isqrt(q)
    digits = []
    for _, d, a, _, _ in _tableau(q):
        digits.append(a)
        if d == 1:
            break
    assert digits[-1] == 2 * a0
    return CFData(q=q, a0=a0, period=tuple(digits))


def _require_q(q: int) -> None:
    if q % 8 != 7 or not is_prime(q):
        raise ValueError(f"{q} is not a prime congruent to 7 mod 8")


@lru_cache(maxsize=None)
def fundamental_unit(q: int, bit_budget: int = DEFAULT_BIT_BUDGET) -> RQInt:
    """Least unit > 1 of Z[sqrt(q)], from the convergent at the period end.

    For q = 7 mod 8 the norm is forced to be +1; a norm -1 unit would need
    x^2 + y^2 = 7 mod 8, which no pair of squares achieves.
    """
    _require_q(q)
    for i, d, _, p, k in _tableau(q):
        if p.bit_length() > bit_budget:
            raise BudgetSkip(q, p.bit_length(), bit_budget)
        if d == 1:
            if i % 2:
                raise TheoryViolation(f"q={q}: fundamental unit has norm -1")
            unit = RQInt(q, p, k)
            assert unit.norm == 1
            return unit


def _odd_power_exponent(eps_prime: RQInt, eps: RQInt) -> int:
    """Exponent k with eps_prime = eps^k; raises unless k exists and is odd."""
    power = eps
    k = 1
    while power.x < eps_prime.x and k < 64:
        power = power * eps
        k += 1
    if power != eps_prime:
        raise TheoryViolation(f"q={eps.q}: theta^2/2 is not a power of the unit")
    if k % 2 == 0:
        raise TheoryViolation(f"q={eps.q}: theta^2/2 is an even unit power")
    return k


@lru_cache(maxsize=None)
def solve_norm2(q: int, bit_budget: int = DEFAULT_BIT_BUDGET) -> RQInt:
    """Least theta = x + y*sqrt(q) with positive coordinates and norm 2.

    Found as the first convergent of sqrt(q) whose residual is +2; the prime
    above 2 ramifies and its class is trivial (the class number is odd), so a
    hit inside the first period is guaranteed.  Verifies theta^2/2 is an odd
    power of the fundamental unit before returning.
    """
    _require_q(q)
    period = None
    for i, d, _, p, k in _tableau(q):
        if p.bit_length() > bit_budget:
            raise BudgetSkip(q, p.bit_length(), bit_budget)
        if d == 2:
            if i % 2:
                raise TheoryViolation(f"q={q}: a convergent has norm -2")
            theta = RQInt(q, p, k)
            assert theta.norm == 2
            _odd_power_exponent(norm2_unit_of(theta), fundamental_unit(q, bit_budget))
            return theta
        if d == 1 and period is None:
            period = i
        if period is not None and i >= 4 * period:
            raise ArithmeticError(f"q={q}: no norm-2 convergent within 4 periods")


def norm2_unit_of(theta: RQInt) -> RQInt:
    """theta^2/2, integral because both coordinates of theta are odd."""
    sq = theta * theta
    if sq.x % 2 or sq.y % 2:
        raise TheoryViolation(f"q={theta.q}: theta^2 is not divisible by 2")
    return RQInt(theta.q, sq.x // 2, sq.y // 2)


@lru_cache(maxsize=None)
def norm2_unit(q: int, bit_budget: int = DEFAULT_BIT_BUDGET) -> RQInt:
    """The norm-one unit theta^2/2 attached to the norm-2 generator."""
    return norm2_unit_of(solve_norm2(q, bit_budget))


def trace_tests(q: int, bit_budget: int = DEFAULT_BIT_BUDGET) -> dict:
    """Congruence and valuation checks on Tr(theta^2/2) = 2 + 2 q y^2."""
    theta = solve_norm2(q, bit_budget)
    eps = norm2_unit_of(theta)
    tr = eps.trace
    assert tr == 2 + 2 * q * theta.y * theta.y
    v = ord_p(tr, 2)
    congruence_ok = (tr - 2 * (1 + q)) % 32 == 0
    y_square_ok = theta.y * theta.y % 16 == 1
    seven_mod_16 = q % 16 == 7
    value_ok = v == 4 if seven_mod_16 else v > 4
    return {
        "q": q,
        "trace": tr,
        "ord2_trace": v,
        "congruence_ok": congruence_ok,
        "y_square_1_mod_16": y_square_ok,
        "residue_class": "7mod16" if seven_mod_16 else "15mod16",
        "ok": congruence_ok and y_square_ok and value_ok,
    }


def _ord_log_direct(q: int, eps: RQInt, prec: int) -> int:
    """ord_2 of c where log(eps^4) = c * (image of sqrt(q)) in Q2(i).

    sqrt(q) embeds as i * hensel_sqrt(-q), a unit, so the valuation of the
    log is read off the gen-coordinate.  The rational coordinate must vanish
    because eps has norm 1 (conjugation negates the log).
    """
    field = LocalQuad("ram", -1, prec)
    s = hensel_sqrt(-q, prec)
    assert (s * s + q) % (1 << prec) == 0
    root = field.elem(0, s)
    u = field.elem(eps.x) + root * field.elem(eps.y)
    z = field.log(u**4)
    if not z.a.is_zero():
        raise ArithmeticError(f"q={q}: log of a norm-1 unit has a rational part")
    if z.a.val is not None and z.a.val < prec - 64:
        raise PrecisionError(f"rational part of the log only bounded by 2^{z.a.val}")
    return z.b.ord() - 2


def ord_log_epsilon(
    q: int, prec: int | None = None, bit_budget: int = DEFAULT_BIT_BUDGET
) -> int:
    """ord_2 of the 2-adic log of theta^2/2, by two routes that must agree.

    Route one is the exact trace identity ord_2(log eps) = ord_2(Tr eps) - 1;
    route two evaluates the log directly in the ramified local field.  On
    disagreement the direct route retries at doubled precision, then the
    mismatch is a hard error.  The value is 3 exactly when q = 7 mod 16.
    """
    eps = norm2_unit(q, bit_budget)
    route_trace = ord_p(eps.trace, 2) - 1
    p = prec if prec else DEFAULT_PREC
    route_direct = None
    for _ in range(3):
        try:
            route_direct = _ord_log_direct(q, eps, p)
        except PrecisionError:
            p *= 2
            continue
        if route_direct == route_trace:
            return route_trace
        p *= 2
    raise ArithmeticError(
        f"q={q}: log valuation routes disagree, trace {route_trace} direct {route_direct}"
    )


def quartic_mul(u: tuple, v: tuple, q: int) -> tuple:
    """Product in Q(i, sqrt(q)) on the basis (1, i, sqrt(q), i*sqrt(q))."""
    a0, a1, a2, a3 = u
    b0, b1, b2, b3 = v
    return (
        a0 * b0 - a1 * b1 + q * (a2 * b2 - a3 * b3),
        a0 * b1 + a1 * b0 + q * (a2 * b3 + a3 * b2),
        a0 * b2 + a2 * b0 - a1 * b3 - a3 * b1,
        a0 * b3 + a3 * b0 + a1 * b2 + a2 * b1,
    )


def cm_unit_index(
    q: int, prec: int | None = None, bit_budget: int = DEFAULT_BIT_BUDGET
) -> dict:
    """Exact check of i*(theta/(1+i))^2 = theta^2/2 in Q(i, sqrt(q)), and the
    resulting log valuation of a fundamental unit xi of that field.

    The unit group of Q(i, sqrt(q)) is mu_4 times the real units with index 2,
    generated over them by theta/(1+i), so ord_2(log xi) is one less than
    ord_2(log eps): 2 exactly when q = 7 mod 16.
    """
    theta = solve_norm2(q, bit_budget)
    eps = norm2_unit_of(theta)
    half = Fraction(1, 2)
    xi0 = (half * theta.x, -half * theta.x, half * theta.y, -half * theta.y)
    lhs = quartic_mul((0, 1, 0, 0), quartic_mul(xi0, xi0, q), q)
    rhs = (Fraction(eps.x), Fraction(0), Fraction(eps.y), Fraction(0))
    if tuple(lhs) != rhs:
        raise ArithmeticError(f"q={q}: CM unit identity failed in the 4-dim model")
    r = ord_log_epsilon(q, prec, bit_budget)
    seven_mod_16 = q % 16 == 7
    return {
        "q": q,
        "theta": (theta.x, theta.y),
        "unit": (eps.x, eps.y),
        "identity_ok": True,
        "ord_log_eps": r,
        "ord_log_xi": r - 1,
        "residue_class": "7mod16" if seven_mod_16 else "15mod16",
        "ok": (r - 1 == 2) if seven_mod_16 else (r - 1 > 2),
    }
