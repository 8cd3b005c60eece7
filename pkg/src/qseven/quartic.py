"""Quartic field F = Q(alpha) with alpha^4 = -q, for primes q = 7 mod 8.

Maximal order by saturation at 2, a certified fundamental unit found by a
sliding-window lattice scan in the Minkowski embedding, and the 2-adic
valuations of the logarithm of that unit at every place above 2.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import acosh, cosh, isqrt, log2, sqrt

from mpmath import mp

from .arith import is_prime
from .linalg import (
    char_poly_frac,
    det_int,
    f2_kernel,
    hnf_rows,
    identity,
    lll,
    mat_inv_frac,
    mat_mul,
    short_vectors,
)
from .padic2 import (
    DEFAULT_PREC,
    LocalQuad,
    PrecisionError,
    Z2Elem,
    is_square_q2,
    log_z2,
    splitting_pattern,
)
from .realquad import BudgetSkip

LN2 = 0.6931471805599453


def _require_q(q: int):
    if q % 8 != 7 or not is_prime(q):
        raise ValueError(f"{q} is not a prime that is 7 mod 8")


# ---------------------------------------------------------------------------
# Maximal order
# ---------------------------------------------------------------------------


def _power_mul(u, v, q: int):
    """Product of two coordinate vectors over the power basis of alpha."""
    tmp = [Fraction(0)] * 7
    for i in range(4):
        if u[i]:
            for j in range(4):
                tmp[i + j] += u[i] * v[j]
    for k in range(6, 3, -1):
        if tmp[k]:
            tmp[k - 4] -= q * tmp[k]
            tmp[k] = Fraction(0)
    return tuple(tmp[:4])


def _mult_table(basis, q: int):
    """table[i][j] = coordinates of w_i * w_j in the basis; must be integral
    exactly when the basis spans an order."""
    inv = mat_inv_frac([list(r) for r in basis])
    table = []
    for i in range(4):
        row = []
        for j in range(4):
            prod = _power_mul(basis[i], basis[j], q)
            coords = [sum(prod[t] * inv[t][k] for t in range(4)) for k in range(4)]
            row.append(coords)
        table.append(row)
    return table


def _hnf_frac(rows):
    """Canonical triangular basis of a full-rank rational row lattice."""
    den = 1
    for r in rows:
        for x in r:
            f = Fraction(x)
            den = den * f.denominator // __import__("math").gcd(den, f.denominator)
    scaled = [[int(Fraction(x) * den) for x in r] for r in rows]
    h = hnf_rows(scaled)
    return tuple(tuple(Fraction(x, den) for x in r) for r in h)


def _enlarge_at_2(basis, q: int):
    """One step of saturation at 2: multiplier ring of the 2-radical."""
    table = _mult_table(basis, q)
    for row in table:
        for coords in row:
            for c in coords:
                if c.denominator != 1:
                    raise ArithmeticError("basis is not closed under multiplication")
    tab = [[[int(c) for c in coords] for coords in row] for row in table]
    # x -> x^2 is linear on O/2O; its square kills the radical since 4 >= deg.
    frob = [[tab[j][j][i] & 1 for j in range(4)] for i in range(4)]
    frob2 = [[sum(frob[i][k] * frob[k][j] for k in range(4)) & 1 for j in range(4)] for i in range(4)]
    kernel = f2_kernel(frob2, 4)
    gens = [list(v) for v in kernel] + [[2 * int(i == j) for j in range(4)] for i in range(4)]
    rad = hnf_rows(gens)
    rad_inv = mat_inv_frac(rad)
    # x is in the multiplier ring iff x*g stays in the radical for each
    # generator g; collect the constraint columns and dualize.
    cols = []
    for g in rad:
        gm = [[sum(g[j] * tab[i][j][k] for j in range(4)) for k in range(4)] for i in range(4)]
        gt = mat_mul(gm, rad_inv)
        for c in range(4):
            cols.append([gt[r][c] for r in range(4)])
    den = 1
    for col in cols:
        for x in col:
            f = Fraction(x)
            den = den * f.denominator // __import__("math").gcd(den, f.denominator)
    w = hnf_rows([[int(Fraction(x) * den) for x in col] for col in cols])
    w_inv = mat_inv_frac(w)
    # Dual of the span of the constraint columns, back in w-coordinates.
    mult_ring = [[den * w_inv[c][r] for c in range(4)] for r in range(4)]
    new_rows = mat_mul(mult_ring, [list(r) for r in basis])
    return _hnf_frac(new_rows)


@dataclass(frozen=True)
class QuarticField:
    """The maximal order of Q(alpha), alpha^4 = -q, with exact arithmetic."""

    q: int
    basis: tuple  # rows of Fractions over the power basis, triangular
    inv_basis: tuple  # power coords -> integral coords
    table: tuple  # table[i][j] = integer coords of w_i w_j
    disc: int
    index: int  # index of Z[alpha] in the maximal order
    one: tuple  # integral coords of 1

    def to_power(self, z):
        return tuple(
            sum(Fraction(z[i]) * self.basis[i][j] for i in range(4)) for j in range(4)
        )

    def from_power(self, p):
        coords = tuple(
            sum(Fraction(p[t]) * self.inv_basis[t][k] for t in range(4)) for k in range(4)
        )
        if any(c.denominator != 1 for c in coords):
            raise ValueError("element is not in the order")
        return tuple(int(c) for c in coords)

    def mul(self, z1, z2):
        out = [0, 0, 0, 0]
        for i in range(4):
            if z1[i]:
                for j in range(4):
                    if z2[j]:
                        t = self.table[i][j]
                        f = z1[i] * z2[j]
                        for k in range(4):
                            out[k] += f * t[k]
        return tuple(out)

    def mult_matrix(self, z):
        rows = []
        for i in range(4):
            row = [0, 0, 0, 0]
            for j in range(4):
                if z[j]:
                    t = self.table[j][i]
                    for k in range(4):
                        row[k] += z[j] * t[k]
            rows.append(row)
        return rows

    def norm(self, z) -> int:
        return det_int(self.mult_matrix(z))

    def trace(self, z) -> int:
        m = self.mult_matrix(z)
        return sum(m[i][i] for i in range(4))

    def char_poly(self, z):
        """Monic characteristic polynomial coefficients, integers."""
        coeffs = char_poly_frac(self.mult_matrix(z))
        assert all(c.denominator == 1 for c in coeffs)
        return tuple(int(c) for c in coeffs)

    def inverse(self, z):
        m = mat_inv_frac(self.mult_matrix(z))
        coords = [sum(Fraction(self.one[t]) * m[t][k] for t in range(4)) for k in range(4)]
        if any(c.denominator != 1 for c in coords):
            raise ValueError("element is not a unit of the order")
        return tuple(int(c) for c in coords)

    def power(self, z, n: int):
        if n < 0:
            return self.power(self.inverse(z), -n)
        acc = self.one
        base = z
        while n:
            if n & 1:
                acc = self.mul(acc, base)
            base = self.mul(base, base)
            n >>= 1
        return acc


@lru_cache(maxsize=None)
def maximal_order(q: int) -> QuarticField:
    """Maximal order of Q(alpha), alpha^4 = -q, by saturation at 2.

    x^4 + q is Eisenstein at q and its discriminant 256 q^3 has no other
    prime factors, so enlarging at 2 until the radical's multiplier ring
    stabilizes reaches the maximal order.
    """
    _require_q(q)
    basis = tuple(tuple(Fraction(int(i == j)) for j in range(4)) for i in range(4))
    while True:
        bigger = _enlarge_at_2(basis, q)
        if bigger == basis:
            break
        basis = bigger
    d = det_int([[int(Fraction(x) * 4) for x in r] for r in basis])
    index = 256 // abs(d)  # basis denominators divide 4
    assert abs(d) * index == 256 and index & (index - 1) == 0
    table = _mult_table(basis, q)
    tab = tuple(
        tuple(tuple(int(c) for c in coords) for coords in row) for row in table
    )
    inv = tuple(tuple(r) for r in mat_inv_frac([list(r) for r in basis]))
    field = QuarticField(q, basis, inv, tab, 0, index, ())
    gram = [[field.trace(field.mul(ei, ej)) for ej in identity(4)] for ei in identity(4)]
    disc = det_int(gram)
    assert disc * index * index == 256 * q**3
    one = tuple(
        int(c)
        for c in (
            sum(Fraction(int(t == 0)) * inv[t][k] for t in range(4)) for k in range(4)
        )
    )
    return QuarticField(q, basis, inv, tab, disc, index, one)


def unit_rank_and_torsion(q: int) -> dict:
    """Unit rank 1 and torsion {+-1}, with the local certificates.

    x^4 = -q has no real roots, so the signature is (0, 2) and the rank is
    0 + 2 - 1 = 1.  Torsion injects into any completion; at a place above 2
    with residue field F_2 the odd part dies, and i is missing because the
    relevant square classes of Q2 obstruct it.
    """
    _require_q(q)
    if q % 16 == 7:
        # F_w = Q2(sqrt(3)): i there would force -3 square in Q2.
        place, no_i = "w", not is_square_q2(-3)
    else:
        # q = 15 mod 16: a split place gives F_w = Q2 itself.
        place, no_i = "w1star", not is_square_q2(-1)
    assert no_i
    return {
        "q": q,
        "rank": 1,
        "torsion_order": 2,
        "cert": {"place": place, "residue_degree": 1, "contains_i": False},
    }


# ---------------------------------------------------------------------------
# Fundamental unit by a sliding-window scan
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UnitCert:
    """A fundamental unit with the radius to which the scan certified it."""

    q: int
    u: tuple  # coordinates in the integral basis
    regulator: float  # |log of the first complex absolute value|
    certified: bool
    enumeration_radius: float


def _embedding_rows(field: QuarticField, bits: int):
    """Integer matrix round(2^bits * M) where M has rows
    (sqrt2*Re s1(w_i), sqrt2*Im s1(w_i), sqrt2*Re s2(w_i), sqrt2*Im s2(w_i));
    row norms of M are the T2 form."""
    with mp.workprec(bits + 64):
        c = mp.root(field.q, 4) / mp.sqrt(2)
        a1 = mp.mpc(c, c)
        a2 = mp.mpc(-c, c)
        pows1 = [mp.mpc(1), a1, a1 * a1, a1 * a1 * a1]
        pows2 = [mp.mpc(1), a2, a2 * a2, a2 * a2 * a2]
        r2 = mp.sqrt(2)
        rows = []
        for i in range(4):
            z1 = mp.mpc(0)
            z2 = mp.mpc(0)
            for j in range(4):
                f = field.basis[i][j]
                if f:
                    fm = mp.mpf(f.numerator) / f.denominator
                    z1 += fm * pows1[j]
                    z2 += fm * pows2[j]
            rows.append(
                [
                    int(mp.nint(mp.ldexp(r2 * z1.real, bits))),
                    int(mp.nint(mp.ldexp(r2 * z1.imag, bits))),
                    int(mp.nint(mp.ldexp(r2 * z2.real, bits))),
                    int(mp.nint(mp.ldexp(r2 * z2.imag, bits))),
                ]
            )
    return rows


def _man_exp(x):
    sign, man, exp, bc = x._mpf_
    assert sign == 0 and man
    return man, exp


def _round_shift(v: int, sh: int) -> int:
    if sh <= 0:
        return v << -sh
    return (v + (1 << (sh - 1))) >> sh


def _rows_at(us, t: float, p_bits: int):
    """Working rows at slide parameter t: columns 0,1 scaled by e^-t and
    columns 2,3 by e^t, rescaled from 2^p_bits down to 2^96, rounded."""
    with mp.workprec(320):
        m_lo, e_lo = _man_exp(mp.exp(-mp.mpf(t)))
        m_hi, e_hi = _man_exp(mp.exp(mp.mpf(t)))
    rows = []
    for i in range(4):
        row = []
        for c in range(4):
            man, exp = (m_lo, e_lo) if c < 2 else (m_hi, e_hi)
            row.append(_round_shift(us[i][c] * man, p_bits - 96 - exp))
        rows.append(row)
    return rows


def unit_log(field: QuarticField, z, bits: int = 256):
    """log of the first complex absolute value of z, as an mpf."""
    p = field.to_power(z)
    with mp.workprec(bits):
        c = mp.root(field.q, 4) / mp.sqrt(2)
        a1 = mp.mpc(c, c)
        acc = mp.mpc(0)
        pw = mp.mpc(1)
        for j in range(4):
            f = Fraction(p[j])
            if f:
                acc += (mp.mpf(f.numerator) / f.denominator) * pw
            pw *= a1
        return mp.log(abs(acc))


_seeded_units: dict[int, UnitCert] = {}


def seed_unit(cert: UnitCert) -> None:
    """Install a previously certified unit so the scan for its q is skipped.

    The caller is responsible for having validated the certificate (the cache
    layer checks tool version, basis and the log identities before seeding).
    """
    _seeded_units[cert.q] = cert


def find_fundamental_unit(q: int, t_budget: float | None = None) -> UnitCert:
    """Fundamental unit of the maximal order, from the seed table or a scan."""
    got = _seeded_units.get(q)
    if got is not None:
        return got
    return _scan_fundamental_unit(q, t_budget)


@lru_cache(maxsize=None)
def _scan_fundamental_unit(q: int, t_budget: float | None = None) -> UnitCert:
    """Fundamental unit of the maximal order by a certified sliding scan.

    At slide parameter t the form e^-2t |s1(x)|^2 + e^2t |s2(x)|^2 doubled
    gives a unit u the value 4 cosh(2 (log|u|_1 - t)), so enumerating up to a
    constant bound catches every unit within a fixed window of t.  Windows
    overlap as t walks a grid, so the first window that catches a non-torsion
    unit catches one of minimal positive log, which is the fundamental unit.
    Exact integer coordinates are carried through every basis change; norms
    are verified exactly, so floating point can cause a missed window only if
    the rounding error analysis fails, and the margins exceed it by far.
    """
    field = maximal_order(q)
    if t_budget is None:
        t_budget = max(600.0, 64.0 * sqrt(q))
    covol = sqrt(field.disc)
    delta = max(0.75, 0.5 * acosh(max(4.0, sqrt(5.0 * covol)) / 2))
    cbound = 2 * cosh(2 * (delta + 0.2)) * 1.05 + 2
    halfwidth = 0.5 * acosh(cbound / 4)
    assert halfwidth >= delta / 2 + 0.05
    p_bits = int(2.9 * t_budget) + 4 * int(log2(q) + 2) + 256
    s_int = _embedding_rows(field, p_bits)
    b_enum = int(cbound * 2**192) + (1 << 162)
    lo_screen = (1 << 386) * 2 // 5
    hi_screen = (1 << 386) * 8 // 5
    u_tot = identity(4)
    t = 0.0
    while t <= t_budget:
        us = mat_mul(u_tot, s_int)
        rows = _rows_at(us, t, p_bits)
        rows, u_step = lll(rows, prec=192)
        u_tot = mat_mul(u_step, u_tot)
        units = []
        for cvec in short_vectors(rows, b_enum, prec=192):
            v = [sum(cvec[i] * rows[i][j] for i in range(4)) for j in range(4)]
            n1 = v[0] * v[0] + v[1] * v[1]
            n2 = v[2] * v[2] + v[3] * v[3]
            if not lo_screen < n1 * n2 < hi_screen:
                continue
            z = tuple(sum(cvec[i] * u_tot[i][k] for i in range(4)) for k in range(4))
            if abs(field.norm(z)) != 1:
                continue
            if z == field.one or z == tuple(-x for x in field.one):
                continue
            units.append(z)
        if units:
            logs = [(abs(unit_log(field, z)), z) for z in units]
            lam, z = min(logs, key=lambda p: p[0])
            assert lam <= t + halfwidth + 0.01
            assert t == 0.0 or lam >= t - halfwidth - 0.01
            if unit_log(field, z) < 0:
                z = field.inverse(z)
            return UnitCert(q, z, float(lam), True, float(t))
        t += delta
    est = int(t_budget / LN2) + 1
    raise BudgetSkip(q, est, est)


# ---------------------------------------------------------------------------
# Local logarithms of the unit
# ---------------------------------------------------------------------------


def embed_unit(field: QuarticField, z, place: dict, prec: int):
    """Image of an element of the order at a completion above 2.

    `place` is an entry of splitting_pattern's places: a split place embeds
    into Z2, the others into their LocalQuad field.
    """
    p = field.to_power(z)
    root = place["root"]
    if place["field"] is None:
        acc = Z2Elem(None, 0, 0)
        rt = Z2Elem.from_int(root, prec)
        pw = Z2Elem.from_int(1, prec)
        for j in range(4):
            if p[j]:
                acc = acc + Z2Elem.from_frac(p[j], prec) * pw
            pw = pw * rt
        return acc
    fld = place["field"]
    acc = fld.elem(0)
    pw = fld.one()
    for j in range(4):
        if p[j]:
            acc = acc + fld.elem(Fraction(p[j])) * pw
        pw = pw * root
    return acc


def _ord_log_once(q: int, field: QuarticField, u, prec: int, mirror: bool) -> dict:
    pattern = splitting_pattern(q, prec, mirror=mirror)
    ords = {}
    for name, place in pattern["places"].items():
        x = embed_unit(field, u, place, prec)
        if place["field"] is None:
            if x.is_zero() or x.val != 0:
                raise PrecisionError(f"q={q}: unit image at {name} is not a visible unit")
            ords[name] = log_z2(x).ord()
        else:
            if place["f"] == 2:
                # Residue field F4: cube to reach residue 1; the valuation of
                # the log is unchanged by an odd power.
                x = x * x * x
            ords[name] = place["field"].log(x).ord_w()
    out = {"q": q, "class": pattern["class"], "ords": ords, "prec": prec}
    if pattern["class"] == "7mod16":
        out["tuple"] = (ords["w"], ords["wstar"])
        out["expected_ok"] = out["tuple"] == (2, 3)
    else:
        if ords["w1star"] != ords["w2star"]:
            raise ArithmeticError(
                f"q={q}: conjugate split places disagree: {ords}"
            )
        out["tuple"] = (ords["w"], ords["w1star"], ords["w2star"])
        out["expected_ok"] = (
            ords["w"] >= 6 and ords["w1star"] >= 4 and ords["w2star"] >= 4
        )
    return out


def ord_log_eta(
    q: int,
    prec: int | None = None,
    mirror: bool = False,
    t_budget: float | None = None,
) -> dict:
    """Valuations of log(eta) at every place of F above 2.

    eta is the certified fundamental unit.  For q = 7 mod 16 the expected
    tuple is (2, 3) at (w, w*); for q = 15 mod 16 the place over the
    distinguished prime is split and both split valuations are >= 4 with
    ord_w >= 6.  Valuations are normalized so a uniformizer has value 1.
    """
    cert = find_fundamental_unit(q, t_budget)
    field = maximal_order(q)
    p = prec if prec is not None else DEFAULT_PREC
    last = None
    for _ in range(3):
        try:
            out = _ord_log_once(q, field, cert.u, p, mirror)
            out["regulator"] = cert.regulator
            out["certified"] = cert.certified
            return out
        except (PrecisionError, ValueError) as exc:
            last = exc
            p *= 2
    raise ArithmeticError(f"q={q}: local log valuations unstable: {last}")


def mirror_check(q: int, prec: int | None = None) -> dict:
    """Recompute the valuations with the two square roots of -q exchanged.

    Exchanging them replaces each embedding by its conjugate over the
    quadratic subfield and swaps the labels of the split pair, so the
    valuation tuple must come back identical.
    """
    plain = ord_log_eta(q, prec=prec)
    swapped = ord_log_eta(q, prec=prec, mirror=True)
    ok = plain["tuple"] == swapped["tuple"]
    if not ok:
        raise ArithmeticError(
            f"q={q}: mirror tuples disagree: {plain['tuple']} vs {swapped['tuple']}"
        )
    return {
        "q": q,
        "class": plain["class"],
        "tuple": plain["tuple"],
        "mirrored": swapped["tuple"],
        "ok": True,
    }


def ramification_data(q: int) -> dict:
    """Shape (e, f) of every place of F above 2, with the sum check."""
    pattern = splitting_pattern(q, prec=96)
    places = {
        name: {"e": pl["e"], "f": pl["f"]} for name, pl in pattern["places"].items()
    }
    total = sum(pl["e"] * pl["f"] for pl in places.values())
    assert total == 4
    if pattern["class"] == "7mod16":
        ok = places == {"wstar": {"e": 1, "f": 2}, "w": {"e": 2, "f": 1}}
    else:
        ok = places == {
            "w1star": {"e": 1, "f": 1},
            "w2star": {"e": 1, "f": 1},
            "w": {"e": 2, "f": 1},
        }
    return {"q": q, "class": pattern["class"], "places": places, "ok": ok}
