from fractions import Fraction
from math import gcd, isqrt

import pytest
from hypothesis import given, settings, strategies as st

from qseven.arith import primes_in_class
from qseven.realquad import (
    BudgetSkip,
    RQInt,
    TheoryViolation,
    cf_sqrt,
    cm_unit_index,
    fundamental_unit,
    norm2_unit,
    norm2_unit_of,
    ord_log_epsilon,
    quartic_mul,
    solve_norm2,
    trace_tests,
)


# -- oracles ---------------------------------------------------------------


def brute_pell(q: int, n: int, y_max: int):
    """Minimal x + y*sqrt(q) with positive coordinates and x^2 - q y^2 = n,
    by exhaustive scan over y.  Independent of the continued fraction code."""
    for y in range(1, y_max + 1):
        t = n + q * y * y
        if t <= 0:
            continue
        x = isqrt(t)
        if x * x == t:
            return x, y
    return None


def oracle_cf_digits(q: int, count: int, prec: int = 512) -> list[int]:
    """Continued fraction digits of sqrt(q) by interval arithmetic on exact
    rational brackets; retries with more precision if a bracket straddles an
    integer."""
    r = isqrt(q << (2 * prec))
    lo, hi = Fraction(r, 1 << prec), Fraction(r + 1, 1 << prec)
    digits = []
    for _ in range(count):
        a = lo.numerator // lo.denominator
        if hi.numerator // hi.denominator != a or lo == a:
            return oracle_cf_digits(q, count, 2 * prec)
        digits.append(a)
        lo, hi = 1 / (hi - a), 1 / (lo - a)
    return digits


def convergents_from_digits(q: int, digits: list[int]) -> list[tuple[int, int]]:
    out = []
    p_prev, p = 0, 1
    k_prev, k = 1, 0
    for a in digits:
        p_prev, p = p, a * p + p_prev
        k_prev, k = k, a * k + k_prev
        out.append((p, k))
    return out


nonsquare = st.integers(2, 3000).filter(lambda n: isqrt(n) ** 2 != n)


# -- continued fractions ---------------------------------------------------


def test_cf_sqrt_examples():
    d7 = cf_sqrt(7)
    assert (d7.a0, d7.period) == (2, (1, 1, 1, 4))
    d23 = cf_sqrt(23)
    assert (d23.a0, d23.period) == (4, (1, 3, 1, 8))
    assert oracle_cf_digits(7, 9) == [2, 1, 1, 1, 4, 1, 1, 1, 4]
    assert oracle_cf_digits(23, 9) == [4, 1, 3, 1, 8, 1, 3, 1, 8]


def test_cf_sqrt_rejects_squares():
    for n in (0, 1, 4, 9, 144):
        with pytest.raises(ValueError):
            cf_sqrt(n)


@given(nonsquare)
@settings(max_examples=150, deadline=None)
def test_cf_digits_match_interval_oracle(q):
    data = cf_sqrt(q)
    want = 1 + min(len(data.period) + 3, 17)
    reps = want // len(data.period) + 2
    got = [data.a0] + list((data.period * reps)[: want - 1])
    assert got == oracle_cf_digits(q, want)


@given(nonsquare)
@settings(max_examples=150, deadline=None)
def test_cf_period_shape(q):
    data = cf_sqrt(q)
    assert data.period[-1] == 2 * data.a0
    body = data.period[:-1]
    assert body == body[::-1]


@given(nonsquare)
@settings(max_examples=120, deadline=None)
def test_cf_two_period_unit_identity(q):
    """The convergent at one period end is a unit (norm (-1)^len) and the
    convergent at two period ends is exactly its square."""
    data = cf_sqrt(q)
    digits = [data.a0] + list(data.period * 2)
    conv = convergents_from_digits(q, digits)
    ln = len(data.period)
    p1, k1 = conv[ln - 1]
    u = RQInt(q, p1, k1)
    assert u.norm == (1 if ln % 2 == 0 else -1)
    p2, k2 = conv[2 * ln - 1]
    assert u * u == RQInt(q, p2, k2)
    bound = 2 * isqrt(q) + 2
    for i, (p, k) in enumerate(conv):
        r = p * p - q * k * k
        assert 0 < abs(r) < bound
        assert (r > 0) == (i % 2 == 1)


# -- Pell units ------------------------------------------------------------


def test_fundamental_unit_examples():
    assert fundamental_unit(7) == RQInt(7, 8, 3)
    assert fundamental_unit(23) == RQInt(23, 24, 5)
    assert brute_pell(7, 1, 10) == (8, 3)
    assert brute_pell(23, 1, 10) == (24, 5)


def test_fundamental_unit_rejects_bad_q():
    for bad in (11, 13, 15, 49, 2):
        with pytest.raises(ValueError):
            fundamental_unit(bad)


@pytest.mark.parametrize("q", primes_in_class(7, 300, 7, 8))
def test_fundamental_unit_minimal_by_exhaustion(q):
    u = fundamental_unit(q)
    assert u.norm == 1 and u.x > 0 and u.y > 0
    if u.y <= 100_000:
        assert brute_pell(q, 1, u.y) == (u.x, u.y)


def test_unit_sweep():
    for q in primes_in_class(7, 3000, 7, 8):
        u = fundamental_unit(q)
        assert u.norm == 1 and u.x > 1 and u.y > 0


# -- norm-2 generator ------------------------------------------------------


def test_solve_norm2_examples():
    assert solve_norm2(7) == RQInt(7, 3, 1)
    assert solve_norm2(23) == RQInt(23, 5, 1)
    assert solve_norm2(31) == RQInt(31, 39, 7)
    assert brute_pell(7, 2, 10) == (3, 1)
    assert brute_pell(31, 2, 10) == (39, 7)
    assert norm2_unit(31) == RQInt(31, 1520, 273)


@pytest.mark.parametrize("q", primes_in_class(7, 300, 7, 8))
def test_solve_norm2_minimal_by_exhaustion(q):
    th = solve_norm2(q)
    if th.y <= 100_000:
        assert brute_pell(q, 2, th.y) == (th.x, th.y)


def test_norm2_sweep():
    for q in primes_in_class(7, 3000, 7, 8):
        th = solve_norm2(q)
        assert th.norm == 2
        assert th.x % 2 == 1 and th.y % 2 == 1
        assert gcd(th.x, th.y) == 1
        # first norm-2 convergent is sqrt(2 * fundamental unit)
        assert norm2_unit(q) == fundamental_unit(q)


def test_norm2_unit_of_rejects_even_theta():
    with pytest.raises(TheoryViolation):
        norm2_unit_of(RQInt(7, 2, 1))


def test_budget_skip():
    with pytest.raises(BudgetSkip) as ei:
        solve_norm2(103, bit_budget=8)
    assert ei.value.q == 103 and ei.value.budget == 8
    with pytest.raises(BudgetSkip):
        fundamental_unit(103, bit_budget=8)
    # generous budgets succeed and are cached independently
    assert fundamental_unit(103, bit_budget=1 << 16) == fundamental_unit(103)


# -- trace congruences -----------------------------------------------------


def test_trace_examples():
    r7 = trace_tests(7)
    assert r7["trace"] == 16 and r7["ord2_trace"] == 4 and r7["ok"]
    r23 = trace_tests(23)
    assert r23["trace"] == 48 and r23["ord2_trace"] == 4 and r23["ok"]
    r31 = trace_tests(31)
    assert r31["trace"] == 3040 and r31["ord2_trace"] == 5 and r31["ok"]
    assert r31["residue_class"] == "15mod16"


def test_trace_sweep():
    for q in primes_in_class(7, 3000, 7, 8):
        r = trace_tests(q)
        assert r["congruence_ok"] and r["y_square_1_mod_16"] and r["ok"]
        if q % 16 == 7:
            assert r["ord2_trace"] == 4
        else:
            assert r["ord2_trace"] > 4


# -- 2-adic unit logarithm -------------------------------------------------


def test_ord_log_epsilon_examples():
    assert ord_log_epsilon(7) == 3
    assert ord_log_epsilon(23) == 3
    assert ord_log_epsilon(103) == 3
    assert ord_log_epsilon(31) == 4
    assert ord_log_epsilon(47) == 4


def test_ord_log_epsilon_low_precision():
    assert ord_log_epsilon(7, prec=48) == 3


def test_ord_log_sweep():
    for q in primes_in_class(7, 1500, 7, 8):
        v = ord_log_epsilon(q)
        if q % 16 == 7:
            assert v == 3
        else:
            assert v >= 4


# -- CM unit index ---------------------------------------------------------


def test_cm_unit_index_examples():
    c7 = cm_unit_index(7)
    assert c7["identity_ok"] and c7["unit"] == (8, 3)
    assert c7["ord_log_xi"] == 2 and c7["ok"]
    c31 = cm_unit_index(31)
    assert c31["ord_log_xi"] == 3 and c31["ok"]


def test_cm_sweep():
    for q in primes_in_class(7, 1500, 7, 8):
        c = cm_unit_index(q)
        assert c["identity_ok"] and c["ok"]
        assert c["ord_log_xi"] == c["ord_log_eps"] - 1
        if q % 16 == 7:
            assert c["ord_log_xi"] == 2
        else:
            assert c["ord_log_xi"] > 2


# -- algebra of the representations ----------------------------------------


@given(st.data())
@settings(max_examples=80, deadline=None)
def test_rqint_norm_multiplicative(data):
    q = data.draw(nonsquare)
    xs = st.integers(-50, 50)
    u = RQInt(q, data.draw(xs), data.draw(xs))
    v = RQInt(q, data.draw(xs), data.draw(xs))
    assert (u * v).norm == u.norm * v.norm
    assert (u * v).conj() == u.conj() * v.conj()
    assert u**3 == u * u * u


def test_rqint_rejects_mixed_radicands():
    with pytest.raises(ValueError):
        _ = RQInt(7, 1, 1) * RQInt(23, 1, 1)


@given(st.data())
@settings(max_examples=80, deadline=None)
def test_quartic_mul_ring_axioms(data):
    q = data.draw(st.integers(2, 200))
    xs = st.integers(-9, 9)
    vec = lambda: tuple(data.draw(xs) for _ in range(4))
    u, v, w = vec(), vec(), vec()
    assert quartic_mul(u, v, q) == quartic_mul(v, u, q)
    assert quartic_mul(quartic_mul(u, v, q), w, q) == quartic_mul(u, quartic_mul(v, w, q), q)
    i = (0, 1, 0, 0)
    root = (0, 0, 1, 0)
    assert quartic_mul(i, i, q) == (-1, 0, 0, 0)
    assert quartic_mul(root, root, q) == (q, 0, 0, 0)
    assert quartic_mul(i, root, q) == (0, 0, 0, 1)


@given(st.data())
@settings(max_examples=80, deadline=None)
def test_cm_identity_is_formal(data):
    """i * (theta/(1+i))^2 = theta^2/2 for any theta = x + y sqrt(q), not
    just norm-2 solutions; the module check exercises exactly this algebra."""
    q = data.draw(st.integers(2, 200))
    x = data.draw(st.integers(-30, 30))
    y = data.draw(st.integers(-30, 30))
    half = Fraction(1, 2)
    xi0 = (half * x, -half * x, half * y, -half * y)
    lhs = quartic_mul((0, 1, 0, 0), quartic_mul(xi0, xi0, q), q)
    assert lhs == (half * (x * x + q * y * y), 0, Fraction(x * y), 0)
