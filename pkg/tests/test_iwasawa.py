from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from qseven.iwasawa import (
    CWInputs,
    GalStruct,
    chevalley_rhs,
    cw_inputs_d,
    cw_inputs_f,
    cw_inputs_fstar,
    cw_valuation,
    xstar_structure,
    xstar_structure_inert,
    xstar_structure_split,
)
from qseven.quartic import ord_log_eta

Q7 = [7, 23, 71, 103, 151, 167, 199]
Q15 = [31, 47, 79, 127, 191, 223, 239]


# -- index valuation formula -------------------------------------------------


def test_cw_fixed_inputs():
    # quartic field at the inert prime, at the ramified prime, and the CM
    # quadratic at the ramified prime
    assert cw_valuation(CWInputs(0, 0, 3, 0, 1, 0, (-2,))) == 2
    assert cw_valuation(CWInputs(0, 0, 1, 0, 1, 1, (-1,))) == 0
    assert cw_valuation(CWInputs(0, 0, 2, 0, 2, 1, (-1,))) == 0


@pytest.mark.parametrize("q", Q7)
def test_cw_builders_seven_mod_16(q):
    assert cw_valuation(cw_inputs_fstar(q)) == 2
    assert cw_valuation(cw_inputs_f(q)) == 0
    assert cw_valuation(cw_inputs_d(q)) == 0


@pytest.mark.parametrize("q", [31, 47, 79])
def test_cw_builders_fifteen_mod_16(q):
    with pytest.raises(ValueError):
        cw_inputs_fstar(q)
    # split-class valuations are strictly larger, so both indices are nonzero
    assert cw_valuation(cw_inputs_f(q)) >= 3
    assert cw_valuation(cw_inputs_d(q)) >= 1


cw_ints = st.integers(min_value=-6, max_value=6)


@given(
    e=cw_ints,
    f=cw_ints,
    r=cw_ints,
    h=cw_ints,
    om=cw_ints,
    sd=cw_ints,
    facs=st.lists(cw_ints, max_size=4),
    d=cw_ints,
)
@settings(max_examples=80, deadline=None)
def test_cw_linear_in_each_input(e, f, r, h, om, sd, facs, d):
    base = CWInputs(e, f, r, h, om, sd, tuple(facs))
    v = cw_valuation(base)
    assert cw_valuation(CWInputs(e + d, f, r, h, om, sd, tuple(facs))) == v + d
    assert cw_valuation(CWInputs(e, f + d, r, h, om, sd, tuple(facs))) == v - d
    assert cw_valuation(CWInputs(e, f, r + d, h, om, sd, tuple(facs))) == v + d
    assert cw_valuation(CWInputs(e, f, r, h + d, om, sd, tuple(facs))) == v + d
    assert cw_valuation(CWInputs(e, f, r, h, om + d, sd, tuple(facs))) == v - d
    assert cw_valuation(CWInputs(e, f, r, h, om, sd + d, tuple(facs))) == v - d
    assert cw_valuation(CWInputs(e, f, r, h, om, sd, tuple(facs) + (d,))) == v + d


@given(facs=st.lists(cw_ints, min_size=2, max_size=5), seed=st.randoms())
@settings(max_examples=40, deadline=None)
def test_cw_factor_order_irrelevant(facs, seed):
    shuffled = list(facs)
    seed.shuffle(shuffled)
    a = CWInputs(0, 0, 1, 0, 1, 0, tuple(facs))
    b = CWInputs(0, 0, 1, 0, 1, 0, tuple(shuffled))
    assert cw_valuation(a) == cw_valuation(b)


def test_cw_inputs_validation():
    with pytest.raises(ValueError):
        CWInputs(0, 0, 1.5, 0, 1, 0, ())
    with pytest.raises(ValueError):
        CWInputs(0, 0, 1, 0, 1, 0, (1, "x"))


# -- group shape container ---------------------------------------------------


def test_galstruct_validation():
    g = GalStruct(1, (2, 8))
    assert g.torsion_order() == 16
    assert not g.is_cyclic_torsion()
    assert GalStruct(1, (4,)).is_cyclic_torsion()
    assert GalStruct(0, ()).torsion_order() == 1
    with pytest.raises(ValueError):
        GalStruct(1, (8, 2))
    with pytest.raises(ValueError):
        GalStruct(1, (6,))
    with pytest.raises(ValueError):
        GalStruct(1, (1,))
    with pytest.raises(ValueError):
        GalStruct(-1, ())


# -- unit quotient at the inert prime ----------------------------------------


@pytest.mark.parametrize("q", Q7)
def test_inert_quotient_is_z4(q):
    g = xstar_structure_inert(q)
    assert g == GalStruct(free_rank=1, elementary_divisors=(4,))


@pytest.mark.parametrize("q", Q7)
def test_inert_quotient_has_no_two_by_two_torsion(q):
    assert xstar_structure_inert(q).is_cyclic_torsion()


@pytest.mark.parametrize("q", Q7)
def test_inert_order_matches_index_formula(q):
    g = xstar_structure_inert(q)
    assert g.torsion_order() == 2 ** cw_valuation(cw_inputs_fstar(q))


def test_inert_rejects_split_class():
    with pytest.raises(ValueError):
        xstar_structure_inert(31)


def test_inert_survives_low_precision_start():
    assert xstar_structure_inert(7, prec=48).elementary_divisors == (4,)


# -- unit quotient at the split pair -----------------------------------------

SPLIT_SHAPES = [
    (31, 4),
    (47, 4),
    (79, 4),
    (127, 16),
    (191, 4),
    (223, 32),
    (239, 4),
    (479, 8),
]


@pytest.mark.parametrize("q,top", SPLIT_SHAPES)
def test_split_quotient_shape(q, top):
    g = xstar_structure_split(q)
    assert g.free_rank == 1
    assert g.elementary_divisors == (2, top)


@pytest.mark.parametrize("q", Q15)
def test_split_quotient_exactly_one_z2(q):
    d = xstar_structure_split(q).elementary_divisors
    assert len(d) == 2 and d[0] == 2 and d[1] >= 4


@pytest.mark.parametrize("q", [31, 127, 223, 479])
def test_split_r_tracks_log_valuation(q):
    # the top divisor is 2^(k-2) where k is the common split log valuation
    k = ord_log_eta(q)["ords"]["w1star"]
    assert xstar_structure_split(q).elementary_divisors[1] == 1 << (k - 2)


def test_split_rejects_inert_class():
    with pytest.raises(ValueError):
        xstar_structure_split(7)


def test_split_survives_low_precision_start():
    assert xstar_structure_split(31, prec=48).elementary_divisors == (2, 4)


def test_dispatch_by_residue_class():
    assert xstar_structure(7).is_cyclic_torsion()
    assert not xstar_structure(31).is_cyclic_torsion()


# -- ambiguous class number ---------------------------------------------------


def test_chevalley_degree_four_over_imaginary_quadratic():
    # one prime with e=4 and one with e=2, degree 4, unit norm index 2
    assert chevalley_rhs(1, [4, 2], [], 4, 2) == Fraction(1)


@pytest.mark.parametrize("h", [1, 2, 3, 5, 9])
def test_chevalley_trivial_extension(h):
    assert chevalley_rhs(h, [], [], 1, 1) == h


def test_chevalley_split_tower_step_is_even():
    # quadratic step ramified at both split primes, odd base class number,
    # norm index 1: the ambiguous class number is even
    out = chevalley_rhs(1, [2, 2], [], 2, 1)
    assert out == 2 and out % 2 == 0


def test_chevalley_s_terms_carry_residue_degree():
    assert chevalley_rhs(3, [], [(2, 2)], 2, 1) == 6


def test_chevalley_rejects_non_integer():
    with pytest.raises(ValueError):
        chevalley_rhs(1, [2], [], 4, 1)
    with pytest.raises(ValueError):
        chevalley_rhs(0, [], [], 1, 1)
    with pytest.raises(ValueError):
        chevalley_rhs(1, [], [], 1, 0)


@given(h=st.integers(min_value=1, max_value=50), k=st.integers(min_value=1, max_value=9))
@settings(max_examples=60, deadline=None)
def test_chevalley_multiplicative_in_class_number(h, k):
    base = chevalley_rhs(h, [2, 2], [], 2, 1)
    assert chevalley_rhs(h * k, [2, 2], [], 2, 1) == k * base
