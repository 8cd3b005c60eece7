"""Exact linear algebra and integer lattice tools for rank <= 8 problems."""

from __future__ import annotations

from fractions import Fraction

from mpmath import mp


def mat_mul(a, b):
    n, k, m = len(a), len(b), len(b[0])
    assert len(a[0]) == k
    return [[sum(a[i][t] * b[t][j] for t in range(k)) for j in range(m)] for i in range(n)]


def mat_vec(a, v):
    return [sum(a[i][t] * v[t] for t in range(len(v))) for i in range(len(a))]


def vec_mat(v, a):
    return [sum(v[t] * a[t][j] for t in range(len(v))) for j in range(len(a[0]))]


def identity(n, one=1):
    return [[one if i == j else one * 0 for j in range(n)] for i in range(n)]


def det_int(rows: list[list[int]]) -> int:
    """Exact determinant of an integer matrix by fraction-free Bareiss."""
    n = len(rows)
    m = [list(r) for r in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def det_frac(rows) -> Fraction:
    n = len(rows)
    den = 1
    for r in rows:
        for x in r:
            xf = Fraction(x)
            den = den * xf.denominator // __import__("math").gcd(den, xf.denominator)
    scaled = [[int(Fraction(x) * den) for x in r] for r in rows]
    return Fraction(det_int(scaled), den**n)


def mat_inv_frac(rows):
    """Inverse of a square matrix over Fraction by Gauss-Jordan."""
    n = len(rows)
    a = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(rows)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def char_poly_frac(m):
    """Characteristic polynomial coefficients [1, c1, ..., cn] (Faddeev-LeVerrier)."""
    n = len(m)
    coeffs = [Fraction(1)]
    mk = [[Fraction(x) for x in row] for row in m]
    for k in range(1, n + 1):
        ck = -sum(mk[i][i] for i in range(n)) / k
        coeffs.append(ck)
        if k < n:
            for i in range(n):
                mk[i][i] += ck
            mk = mat_mul(m, mk)
    return coeffs


def hnf_rows(rows: list[list[int]]) -> list[list[int]]:
    """Lower-triangular basis of the row lattice (full column rank required)."""
    work = [list(r) for r in rows if any(r)]
    n = len(work[0])
    basis = []
    for col in range(n):
        while True:
            nz = [r for r in work if r[col] != 0]
            if len(nz) <= 1:
                break
            nz.sort(key=lambda r: abs(r[col]))
            piv = nz[0]
            for r in nz[1:]:
                f = r[col] // piv[col]
                for j in range(n):
                    r[j] -= f * piv[j]
        piv = next((r for r in work if r[col] != 0), None)
        if piv is None:
            raise ValueError("rows do not have full column rank")
        if piv[col] < 0:
            piv = [-x for x in piv]
        basis.append(list(piv))
        work = [r for r in work if r is not piv and any(r)]
        for r in work:
            f = r[col] // basis[-1][col]
            if f:
                for j in range(n):
                    r[j] -= f * basis[-1][j]
    # Entries left of each pivot are exactly zero; reduce those to the right
    # so the form is canonical (0 <= basis[i][j] < basis[j][j] for j > i).
    for i in range(n):
        for j in range(i + 1, n):
            f = basis[i][j] // basis[j][j]
            if f:
                for t in range(n):
                    basis[i][t] -= f * basis[j][t]
    return basis


def f2_kernel(rows: list[list[int]], ncols: int) -> list[list[int]]:
    """Basis of the right kernel of a matrix over F2."""
    mat = [[x & 1 for x in r] for r in rows]
    pivots = {}
    rank_rows = []
    for r in mat:
        r = list(r)
        for col, prow in pivots.items():
            if r[col]:
                r = [(a + b) & 1 for a, b in zip(r, prow)]
        lead = next((j for j in range(ncols) if r[j]), None)
        if lead is not None:
            pivots[lead] = r
            rank_rows.append(r)
    kernel = []
    free_cols = [j for j in range(ncols) if j not in pivots]
    for fc in free_cols:
        v = [0] * ncols
        v[fc] = 1
        # Back-substitute pivot columns.
        for col in sorted(pivots, reverse=True):
            row = pivots[col]
            s = sum(row[j] * v[j] for j in range(ncols) if j != col) & 1
            v[col] = s
        kernel.append(v)
    return kernel


def smith_z2(rows: list[list[int]], prec: int) -> tuple[list[int], int]:
    """2-adic elementary divisor valuations of the cokernel Z2^n / rowspan.

    Returns (sorted pivot valuations, free rank of the cokernel).  Entries are
    read modulo 2^prec; a pivot valuation within 8 of prec raises ValueError so
    callers retry at higher precision.
    """
    mod = 1 << prec
    work = [[x % mod for x in r] for r in rows]
    ncols = len(rows[0]) if rows else 0
    active_rows = list(range(len(work)))
    active_cols = list(range(ncols))
    vals = []

    def v2(x):
        return prec if x == 0 else (x & -x).bit_length() - 1

    while active_rows and active_cols:
        best = None
        for i in active_rows:
            for j in active_cols:
                v = v2(work[i][j])
                if best is None or v < best[0]:
                    best = (v, i, j)
        v, pi, pj = best
        if v >= prec:
            break  # remaining block is zero to precision
        if v > prec - 8:
            raise ValueError("smith_z2 pivot too close to precision")
        unit = work[pi][pj] >> v
        inv_unit = pow(unit, -1, mod)
        for i in active_rows:
            if i != pi and work[i][pj]:
                f = ((work[i][pj] >> v) * inv_unit) % mod
                for j in active_cols:
                    work[i][j] = (work[i][j] - f * work[pi][j]) % mod
        for j in active_cols:
            if j != pj and work[pi][j]:
                # Column operations change the basis of Z2^n; allowed for SNF.
                f = ((work[pi][j] >> v) * inv_unit) % mod
                for i in active_rows:
                    work[i][j] = (work[i][j] - f * work[i][pj]) % mod
        vals.append(v)
        active_rows.remove(pi)
        active_cols.remove(pj)
    return sorted(vals), len(active_cols) if active_cols else 0


def gram(rows):
    n = len(rows)
    g = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1):
            s = sum(rows[i][t] * rows[j][t] for t in range(len(rows[i])))
            g[i][j] = g[j][i] = s
    return g


def _gs_float(rows):
    """Gram-Schmidt data (mu, B) of integer rows at the current mp precision."""
    n = len(rows)
    bf = [[mp.mpf(x) for x in r] for r in rows]
    bstar = [list(r) for r in bf]
    mu = [[mp.mpf(0)] * n for _ in range(n)]
    B = [mp.mpf(0)] * n
    for i in range(n):
        for j in range(i):
            num = mp.fsum(bf[i][t] * bstar[j][t] for t in range(len(bf[i])))
            mu[i][j] = num / B[j] if B[j] != 0 else mp.mpf(0)
            bstar[i] = [x - mu[i][j] * y for x, y in zip(bstar[i], bstar[j])]
        B[i] = mp.fsum(x * x for x in bstar[i])
    return mu, B


def lll(rows: list[list[int]], prec: int = 192, max_ops: int = 20000):
    """LLL-reduce integer rows; returns (reduced_rows, transform U).

    U is unimodular with reduced = U @ rows.  Gram-Schmidt runs in floating
    point at `prec` bits; row operations stay exact, so the output basis is a
    genuine basis of the input lattice regardless of float behaviour.  Float
    inaccuracy can only degrade reduction quality, never correctness.
    """
    n = len(rows)
    b = [list(map(int, r)) for r in rows]
    u = identity(n)
    with mp.workprec(prec):
        mu, B = _gs_float(b)
        ops = 0
        half = mp.mpf(1) / 2 + mp.mpf(2) ** (-40)
        delta = mp.mpf(99) / 100
        k = 1
        while k < n and ops < max_ops:
            # Classical size reduction of row k with in-place mu updates.
            for j in range(k - 1, -1, -1):
                if abs(mu[k][j]) > half:
                    r = int(mp.nint(mu[k][j]))
                    b[k] = [x - r * y for x, y in zip(b[k], b[j])]
                    u[k] = [x - r * y for x, y in zip(u[k], u[j])]
                    for jj in range(j):
                        mu[k][jj] -= r * mu[j][jj]
                    mu[k][j] -= r
                    ops += 1
            if B[k] < (delta - mu[k][k - 1] ** 2) * B[k - 1]:
                b[k - 1], b[k] = b[k], b[k - 1]
                u[k - 1], u[k] = u[k], u[k - 1]
                mu, B = _gs_float(b)
                k = max(k - 1, 1)
                ops += 1
            else:
                k += 1
    return b, u


def cholesky_mpf(g, prec: int):
    """LDL^T factorization of a positive definite matrix at `prec` bits."""
    n = len(g)
    with mp.workprec(prec):
        L = [[mp.mpf(0)] * n for _ in range(n)]
        D = [mp.mpf(0)] * n
        for i in range(n):
            for j in range(i):
                s = mp.mpf(g[i][j])
                for k in range(j):
                    s -= D[k] * L[i][k] * L[j][k]
                L[i][j] = s / D[j]
            s = mp.mpf(g[i][i])
            for k in range(i):
                s -= D[k] * L[i][k] ** 2
            if s <= 0:
                raise ValueError("matrix not positive definite at this precision")
            D[i] = s
        for i in range(n):
            L[i][i] = mp.mpf(1)
    return L, D


def short_vectors(rows: list[list[int]], bound, prec: int = 192) -> list[tuple[int, ...]]:
    """Coefficient vectors c != 0 with ||c . rows||^2 <= bound (one per +-pair).

    Fincke-Pohst on an LDL^T factorization computed at `prec` bits.  The bound
    is inflated by 2^-40 relative so borderline vectors are kept; callers do
    exact acceptance checks on the candidates.
    """
    g = gram(rows)
    n = len(g)
    with mp.workprec(prec):
        L, D = cholesky_mpf(g, prec)
        C = mp.mpf(bound) * (1 + mp.mpf(2) ** (-40))
        results = []
        x = [0] * n

        def recurse(i, remaining):
            if i < 0:
                if any(x):
                    results.append(tuple(x))
                return
            center = -mp.fsum(L[k][i] * x[k] for k in range(i + 1, n)) if i < n - 1 else mp.mpf(0)
            radius = mp.sqrt(remaining / D[i])
            lo = int(mp.ceil(center - radius))
            hi = int(mp.floor(center + radius))
            for xi in range(lo, hi + 1):
                if i == n - 1 and xi < 0:
                    continue  # fix sign of the last coordinate to halve the tree
                x[i] = xi
                used = D[i] * (xi - center) ** 2
                if used <= remaining:
                    recurse(i - 1, remaining - used)
            x[i] = 0

        recurse(n - 1, C)
    # Dedupe +-pairs where the last nonzero coordinate is negative.
    out = []
    seen = set()
    for c in results:
        neg = tuple(-t for t in c)
        if neg in seen:
            continue
        seen.add(c)
        out.append(c)
    return out
