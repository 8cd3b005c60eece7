"""2-adic index valuations and Galois module shapes above 2.

Three computations share this module: the valuation of a local unit index
given by a Coates-Wiles style formula, the elementary divisors of the local
principal units modulo the closure of the global unit group (the group that
class field theory identifies with a Galois group of a 2-ramified abelian
extension), and the exact right-hand side of the ambiguous class number
formula.  Everything is a pure function of q plus small integer inputs.
"""

from dataclasses import dataclass
from fractions import Fraction

from .linalg import smith_z2
from .padic2 import DEFAULT_PREC, PrecisionError, Z2Elem, log_z2, splitting_pattern
from .quartic import embed_unit, find_fundamental_unit, maximal_order, ord_log_eta
from .realquad import DEFAULT_BIT_BUDGET, cm_unit_index


@dataclass(frozen=True)
class CWInputs:
    """Normalized inputs to the index valuation formula.

    Every field is an ord_2.  e and f are offsets entering only through
    e - f + 1; ord_R is the valuation of the regulator term, ord_h of the
    class number, ord_omega of the root-of-unity count, ord_sqrt_disc of the
    square root of the local discriminant.  local_norm_factors holds
    ord_2(1 - 1/Ng) for each prime g of the base, negative since Ng is a
    2-power here.
    """

    e: int
    f: int
    ord_R: int
    ord_h: int
    ord_omega: int
    ord_sqrt_disc: int
    local_norm_factors: tuple

    def __post_init__(self):
        object.__setattr__(self, "local_norm_factors", tuple(self.local_norm_factors))
        for name in ("e", "f", "ord_R", "ord_h", "ord_omega", "ord_sqrt_disc"):
            if not isinstance(getattr(self, name), int):
                raise ValueError(f"{name} must be an integer ord_2")
        if any(not isinstance(t, int) for t in self.local_norm_factors):
            raise ValueError("local_norm_factors must be integers")


@dataclass(frozen=True)
class GalStruct:
    """Abelian pro-2 group shape: free rank plus cyclic torsion factors.

    elementary_divisors are powers of 2 in non-decreasing order, so each
    divides the next; the torsion subgroup is the direct sum of Z/d for d in
    the list.
    """

    free_rank: int
    elementary_divisors: tuple

    def __post_init__(self):
        object.__setattr__(
            self, "elementary_divisors", tuple(self.elementary_divisors)
        )
        if self.free_rank < 0:
            raise ValueError("free rank must be non-negative")
        prev = 1
        for d in self.elementary_divisors:
            if d < 2 or d & (d - 1):
                raise ValueError("elementary divisors must be powers of 2, each > 1")
            if d < prev:
                raise ValueError("elementary divisors must be non-decreasing")
            prev = d

    def torsion_order(self) -> int:
        n = 1
        for d in self.elementary_divisors:
            n *= d
        return n

    def is_cyclic_torsion(self) -> bool:
        return len(self.elementary_divisors) <= 1


def cw_valuation(inputs: CWInputs) -> int:
    """ord_2 of the unit index 2 * p^(e-f+1) * R * h / (omega * sqrt(disc))
    times the product of the local norm factors, all terms as valuations."""
    return (
        1
        + (inputs.e - inputs.f + 1)
        + inputs.ord_R
        + inputs.ord_h
        - inputs.ord_omega
        - inputs.ord_sqrt_disc
        + sum(inputs.local_norm_factors)
    )


def cw_inputs_fstar(q: int, prec: int | None = None, t_budget: float | None = None) -> CWInputs:
    """Index inputs for the quartic field at the inert prime (q = 7 mod 16).

    The completion is the unramified quadratic extension of Q2: it contains
    the sixth roots of unity (ord_omega = 1), its discriminant is a unit
    (ord_sqrt_disc = 0), and the residue norm is 4 so 1 - 1/Ng = 3/4
    contributes -2.  The regulator term is ord of log(eta) there, and the
    class number of the quartic field is odd.
    """
    if q % 16 != 7:
        raise ValueError("the upper prime is inert only for q = 7 mod 16")
    rep = ord_log_eta(q, prec, t_budget=t_budget)
    return CWInputs(
        e=0,
        f=0,
        ord_R=rep["ords"]["wstar"],
        ord_h=0,
        ord_omega=1,
        ord_sqrt_disc=0,
        local_norm_factors=(-2,),
    )


def cw_inputs_f(q: int, prec: int | None = None, t_budget: float | None = None) -> CWInputs:
    """Index inputs for the quartic field at the ramified prime.

    The completion is a ramified quadratic extension of Q2 with only +-1 as
    roots of unity (ord_omega = 1) and discriminant of valuation 2
    (ord_sqrt_disc = 1); the residue norm is 2, so 1 - 1/Ng contributes -1.
    The regulator term is ord_w(log eta) - 1: the formula divides by the
    logarithmic derivative of the distinguished local unit, which at a
    ramified place carries one factor of the uniformizer.
    """
    rep = ord_log_eta(q, prec, t_budget=t_budget)
    return CWInputs(
        e=0,
        f=0,
        ord_R=rep["ords"]["w"] - 1,
        ord_h=0,
        ord_omega=1,
        ord_sqrt_disc=1,
        local_norm_factors=(-1,),
    )


def cw_inputs_d(
    q: int, prec: int | None = None, bit_budget: int = DEFAULT_BIT_BUDGET
) -> CWInputs:
    """Index inputs for the CM quadratic extension at the ramified prime.

    That field contains i, so ord_omega = 2; the local discriminant again has
    valuation 2 and the residue norm is 2.  The regulator term is the
    valuation of log of its fundamental unit xi, one less than ord_2(log eps)
    of the real quadratic subfield.
    """
    rep = cm_unit_index(q, prec, bit_budget)
    return CWInputs(
        e=0,
        f=0,
        ord_R=rep["ord_log_xi"],
        ord_h=0,
        ord_omega=2,
        ord_sqrt_disc=1,
        local_norm_factors=(-1,),
    )


def _v2(x: int, cap: int) -> int:
    return cap if x == 0 else (x & -x).bit_length() - 1


def _z2_rep(z: Z2Elem, bits: int) -> int:
    """Integer representative of a 2-adic integer modulo 2^bits."""
    if z.unit == 0:
        if z.val is None or z.val >= bits:
            return 0
        raise PrecisionError(f"approximate zero known only past ord {z.val}")
    if z.val < 0:
        raise ValueError("not a 2-adic integer")
    if z.val >= bits:
        return 0
    if z.val + z.prec < bits:
        raise PrecisionError(f"have {z.val + z.prec} certain bits, need {bits}")
    return (z.unit << z.val) % (1 << bits)


def _log_u1_basis(fld, bits: int):
    """Triangular basis of the log image of the principal units of the
    unramified quadratic field, in coordinates over {1, zeta}.

    The principal units are generated over U2 = 1 + 4*O by -1 and 1 + 2*zeta
    (their residues 1 and zeta span O/2O), and log maps U2 isomorphically
    onto 4*O, so {log(1 + 2*zeta), (4, 0), (0, 4)} spans the image.  Returns
    (row0, row1, v0, v1) with row1[0] = 0 and pivot valuations v0, v1.
    """
    z = fld.log(fld.elem(1, 2))
    mod = 1 << bits
    rows = [[_z2_rep(z.a, bits), _z2_rep(z.b, bits)], [4, 0], [0, 4]]
    pi = min(range(3), key=lambda i: _v2(rows[i][0], bits))
    piv = rows[pi]
    v0 = _v2(piv[0], bits)
    if v0 >= bits - 16:
        raise PrecisionError("lattice pivot swallowed by precision")
    inv = pow(piv[0] >> v0, -1, mod)
    rest = []
    for i, r in enumerate(rows):
        if i == pi:
            continue
        if r[0] % mod:
            f = ((r[0] >> v0) * inv) % mod
            r = [(r[0] - f * piv[0]) % mod, (r[1] - f * piv[1]) % mod]
        rest.append(r)
    v1, second = min(((_v2(r[1], bits), r) for r in rest), key=lambda t: t[0])
    if v1 >= bits - 16:
        raise PrecisionError("lattice pivot swallowed by precision")
    return [piv[0] % mod, piv[1] % mod], [0, second[1] % mod], v0, v1


def _coords_in_basis(vec, row0, row1, v0, v1, bits: int):
    """Solve c0*row0 + c1*row1 = vec over Z2, requiring integral coords."""
    mod = 1 << bits
    a, b = vec[0] % mod, vec[1] % mod
    if _v2(a, bits) < v0:
        raise ArithmeticError("log of the unit lies outside the unit-log lattice")
    c0 = ((a >> v0) * pow(row0[0] >> v0, -1, mod)) % mod
    rem = (b - c0 * row0[1]) % mod
    if _v2(rem, bits) < v1:
        raise ArithmeticError("log of the unit lies outside the unit-log lattice")
    c1 = ((rem >> v1) * pow(row1[1] >> v1, -1, mod)) % mod
    return c0, c1


def _xstar_inert_once(q: int, field, u, prec: int) -> GalStruct:
    pattern = splitting_pattern(q, prec)
    place = pattern["places"]["wstar"]
    x = embed_unit(field, u, place, prec)
    x = x * x * x  # residue in F4 has odd order; the cube is principal
    v = place["field"].log(x)
    bits = prec - 8
    row0, row1, v0, v1 = _log_u1_basis(place["field"], bits)
    vec = (_z2_rep(v.a, bits), _z2_rep(v.b, bits))
    c0, c1 = _coords_in_basis(vec, row0, row1, v0, v1, bits)
    m = min(_v2(c0, bits), _v2(c1, bits))
    if m >= bits - 24:
        raise PrecisionError("unit line indistinguishable from the lattice")
    cw = cw_valuation(cw_inputs_fstar(q, prec))
    if m != cw:
        raise ArithmeticError(
            f"q={q}: lattice index 2^{m} disagrees with the index formula 2^{cw}"
        )
    if m != 2:
        raise ArithmeticError(f"q={q}: torsion has order 2^{m}, expected 4")
    return GalStruct(free_rank=1, elementary_divisors=(1 << m,))


def xstar_structure_inert(
    q: int, prec: int | None = None, t_budget: float | None = None
) -> GalStruct:
    """Structure of the principal local units at the inert prime modulo the
    closure of the global units, for q = 7 mod 16.

    The quotient has Z2-rank 1 and cyclic torsion 2^m where m is the minimal
    valuation of the coordinates of log(eta^3) in a basis of log(U1).  The
    result is checked against the independent index-formula valuation and
    must be cyclic of order 4.
    """
    if q % 16 != 7:
        raise ValueError("inert structure applies to q = 7 mod 16 only")
    cert = find_fundamental_unit(q, t_budget)
    field = maximal_order(q)
    p = prec if prec is not None else DEFAULT_PREC
    last = None
    for _ in range(3):
        try:
            return _xstar_inert_once(q, field, cert.u, p)
        except (PrecisionError, ValueError) as exc:
            last = exc
            p *= 2
    raise ArithmeticError(f"q={q}: inert unit quotient failed at prec {p}: {last}")


def _approx_zero(z: Z2Elem, floor: int) -> bool:
    return z.unit == 0 and (z.val is None or z.val >= floor)


def _xstar_split_once(q: int, field, u, prec: int) -> GalStruct:
    pattern = splitting_pattern(q, prec)
    u1 = embed_unit(field, u, pattern["places"]["w1star"], prec)
    u2 = embed_unit(field, u, pattern["places"]["w2star"], prec)
    for x in (u1, u2):
        if x.is_zero() or x.val != 0:
            raise PrecisionError(f"q={q}: split image is not a visible unit")
    prod = u1 * u2 - Z2Elem.from_int(1, prec)
    if not _approx_zero(prod, prec // 2):
        raise ArithmeticError(f"q={q}: split images do not multiply to 1")
    v1 = log_z2(u1)
    v2 = log_z2(u2)
    if not _approx_zero(v1 + v2, prec // 2):
        raise ArithmeticError(f"q={q}: split logs do not negate each other")
    k = v1.ord()
    if k < 4 or v2.ord() != k:
        raise ArithmeticError(f"q={q}: split log valuations ({v1.ord()}, {v2.ord()})")
    bits = prec - 8
    b1 = (1 - u1.unit_mod(2)) % 4 // 2  # 0 when the image is 1 mod 4, else 1
    b2 = (1 - u2.unit_mod(2)) % 4 // 2
    if b1 != b2:
        raise ArithmeticError(f"q={q}: split sign components disagree")
    c1 = _z2_rep(v1, bits + 2) >> 2
    c2 = _z2_rep(v2, bits + 2) >> 2
    # Generators: sign at each place, then a Z2-basis 4Z2 x 4Z2 of the log
    # part.  Relations: the squares of the signs, the diagonal -1, and eta.
    rows = [
        [2, 0, 0, 0],
        [0, 2, 0, 0],
        [1, 1, 0, 0],
        [b1, b2, c1, c2],
    ]
    vals, free = smith_z2(rows, bits)
    if free != 1:
        raise ArithmeticError(f"q={q}: unit quotient has free rank {free}")
    tors = [t for t in vals if t > 0]
    if len(tors) != 2 or tors[0] != 1 or tors[1] < 1:
        raise ArithmeticError(f"q={q}: torsion shape 2^{tors} unexpected")
    r = tors[1]
    diff = v1 - v2
    if diff.ord() - 2 != 1 + r:
        raise ArithmeticError(
            f"q={q}: log-difference valuation {diff.ord()} disagrees with r={r}"
        )
    return GalStruct(free_rank=1, elementary_divisors=(2, 1 << r))


def xstar_structure_split(
    q: int, prec: int | None = None, t_budget: float | None = None
) -> GalStruct:
    """Structure of the product of local units at the two split primes modulo
    the closure of the global units, for q = 15 mod 16.

    The torsion is Z/2 x Z/2^r with exactly one order-2 factor; r is read off
    a 2-adic Smith normal form and cross-checked against the valuation of the
    difference of the two local logs.
    """
    if q % 16 != 15:
        raise ValueError("split structure applies to q = 15 mod 16 only")
    cert = find_fundamental_unit(q, t_budget)
    field = maximal_order(q)
    p = prec if prec is not None else DEFAULT_PREC
    last = None
    for _ in range(3):
        try:
            return _xstar_split_once(q, field, cert.u, p)
        except (PrecisionError, ValueError) as exc:
            last = exc
            p *= 2
    raise ArithmeticError(f"q={q}: split unit quotient failed at prec {p}: {last}")


def xstar_structure(q: int, prec: int | None = None, t_budget: float | None = None) -> GalStruct:
    """Dispatch on the residue class of q mod 16."""
    if q % 16 == 7:
        return xstar_structure_inert(q, prec, t_budget)
    return xstar_structure_split(q, prec, t_budget)


def chevalley_rhs(
    h_m: int,
    ramified_e: list,
    s_terms: list,
    degree: int,
    unit_norm_index: int,
) -> Fraction:
    """Ambiguous class number: h_M times the product of e_v*f_v over primes
    in S and e_v over ramified primes outside S, divided by the extension
    degree times the unit norm index.  The result must be a whole number.
    """
    if h_m < 1 or degree < 1 or unit_norm_index < 1:
        raise ValueError("class number, degree and unit index must be positive")
    num = Fraction(h_m)
    for e, f in s_terms:
        num *= e * f
    for e in ramified_e:
        num *= e
    out = num / (degree * unit_norm_index)
    if out.denominator != 1:
        raise ValueError(
            f"ambiguous class number {out} is not an integer; inputs inconsistent"
        )
    return out
