"""Small exact matrix kernel over Z and Q.

Matrices are row-major tuples of tuples of ``int`` or ``Fraction``.  Every
routine is exact; nothing here touches floating point.  Sizes in this
package are tiny (at most 20x20), so the algorithms favour clarity over
asymptotics.
"""

from fractions import Fraction
from math import gcd

Matrix = tuple  # tuple[tuple[int | Fraction, ...], ...]


def as_matrix(rows):
    return tuple(tuple(r) for r in rows)


def identity(n):
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def zeros(m, n):
    return tuple(tuple(0 for _ in range(n)) for _ in range(m))


def shape(a):
    return len(a), (len(a[0]) if a else 0)


def transpose(a):
    return tuple(zip(*a)) if a and a[0] else tuple(() for _ in range(len(a[0]) if a else 0))


def matmul(a, b):
    bt = list(zip(*b))
    if not bt:
        return tuple(() for _ in a)
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def matvec(a, v):
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def scale(a, c):
    return tuple(tuple(c * x for x in row) for row in a)


def columns(a):
    """List of column vectors of ``a``."""
    return [tuple(col) for col in zip(*a)] if a and a[0] else []


def from_columns(cols, nrows=None):
    if not cols:
        return tuple(() for _ in range(nrows or 0))
    return tuple(zip(*cols))


def block_diag(*blocks):
    n = sum(len(b) for b in blocks)
    out = [[0] * n for _ in range(n)]
    off = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, x in enumerate(row):
                out[off + i][off + j] = x
        off += len(b)
    return as_matrix(out)


def is_integral(a):
    return all(Fraction(x).denominator == 1 for row in a for x in row)


def to_int(a):
    out = []
    for row in a:
        r = []
        for x in row:
            x = Fraction(x)
            if x.denominator != 1:
                raise ValueError("matrix is not integral")
            r.append(int(x))
        out.append(tuple(r))
    return tuple(out)


def denominator_lcm(a):
    d = 1
    for row in a:
        for x in row:
            q = Fraction(x).denominator
            d = d * q // gcd(d, q)
    return d


def xgcd(a, b):
    """Return ``(g, s, t)`` with ``s*a + t*b == g == gcd(a, b) >= 0``."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def det(a):
    """Exact determinant.  Integer input uses fraction-free Bareiss."""
    n = len(a)
    if n == 0:
        return 1
    if all(isinstance(x, int) for row in a for x in row):
        m = [list(r) for r in a]
        sign, prev = 1, 1
        for k in range(n - 1):
            if m[k][k] == 0:
                for i in range(k + 1, n):
                    if m[i][k]:
                        m[k], m[i] = m[i], m[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            prev = m[k][k]
        return sign * m[n - 1][n - 1]
    m = [[Fraction(x) for x in r] for r in a]
    d = Fraction(1)
    for k in range(n):
        p = next((i for i in range(k, n) if m[i][k]), None)
        if p is None:
            return Fraction(0)
        if p != k:
            m[k], m[p] = m[p], m[k]
            d = -d
        d *= m[k][k]
        for i in range(k + 1, n):
            f = m[i][k] / m[k][k]
            if f:
                for j in range(k, n):
                    m[i][j] -= f * m[k][j]
    return d


def rank(a):
    m = [[Fraction(x) for x in r] for r in a]
    rows, cols = shape(a)
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        for i in range(r + 1, rows):
            f = m[i][c] / m[r][c]
            if f:
                for j in range(c, cols):
                    m[i][j] -= f * m[r][j]
        r += 1
    return r


def solve(a, b):
    """Solve ``a @ x == b`` over Q for ``a`` of full column rank.

    ``b`` is a matrix; returns ``x`` as a Fraction matrix.  Raises
    ``ValueError`` when the system is inconsistent or ``a`` is rank deficient.
    """
    rows, k = shape(a)
    r = len(b[0]) if b else 0
    # clear denominators row by row, then eliminate over Z with content removal
    m = []
    for i in range(rows):
        row = list(a[i]) + list(b[i])
        den = 1
        for x in row:
            if not isinstance(x, int):
                d = Fraction(x).denominator
                den = den * d // gcd(den, d)
        m.append([int(x * den) if not isinstance(x, int) else x * den for x in row])
    row = 0
    for c in range(k):
        p = next((i for i in range(row, rows) if m[i][c]), None)
        if p is None:
            raise ValueError("matrix is rank deficient")
        m[row], m[p] = m[p], m[row]
        pr = m[row]
        piv = pr[c]
        for i in range(rows):
            if i != row and m[i][c]:
                f = m[i][c]
                ri = [piv * x - f * y for x, y in zip(m[i], pr)]
                g = 0
                for x in ri:
                    g = gcd(g, x)
                    if g == 1:
                        break
                m[i] = [x // g for x in ri] if g > 1 else ri
        row += 1
    for i in range(row, rows):
        if any(m[i][k:]):
            raise ValueError("inconsistent system")
    return tuple(tuple(Fraction(m[i][k + j], m[i][i]) for j in range(r)) for i in range(k))


def inverse(a):
    return solve(a, identity(len(a)))


def _row_combine(m, i, j, s, t, u, v):
    """Replace rows (i, j) by (s*ri + t*rj, u*ri + v*rj)."""
    ri, rj = m[i], m[j]
    m[i] = [s * x + t * y for x, y in zip(ri, rj)]
    m[j] = [u * x + v * y for x, y in zip(ri, rj)]


def row_hnf(a, transform=False):
    """Row-style Hermite normal form of an integer matrix.

    Returns ``h`` (same shape, zero rows last) and, if requested, a unimodular
    ``u`` with ``u @ a == h``.  Pivots are positive and entries above each
    pivot lie in ``[0, pivot)``.
    """
    rows, cols = shape(a)
    m = [list(r) for r in a]
    u = [list(r) for r in identity(rows)] if transform else None
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = next((i for i in range(r, rows) if m[i][c]), None)
        if p is None:
            continue
        if p != r:
            m[r], m[p] = m[p], m[r]
            if transform:
                u[r], u[p] = u[p], u[r]
        for i in range(r + 1, rows):
            if m[i][c]:
                x, y = m[r][c], m[i][c]
                g, s, t = xgcd(x, y)
                args = (s, t, -y // g, x // g)
                _row_combine(m, r, i, *args)
                if transform:
                    _row_combine(u, r, i, *args)
        if m[r][c] < 0:
            m[r] = [-x for x in m[r]]
            if transform:
                u[r] = [-x for x in u[r]]
        pv = m[r][c]
        for i in range(r):
            q = m[i][c] // pv
            if q:
                m[i] = [x - q * y for x, y in zip(m[i], m[r])]
                if transform:
                    u[i] = [x - q * y for x, y in zip(u[i], u[r])]
        r += 1
    h = as_matrix(m)
    return (h, as_matrix(u)) if transform else h


def hnf_columns(a):
    """Column-style HNF of the column span of integer matrix ``a``.

    The result has ``rank(a)`` columns; column ``j`` has its first nonzero
    entry (the pivot, positive) in row ``p_j`` with ``p_0 < p_1 < ...``, and
    in each pivot row the entries left of the pivot lie in ``[0, pivot)``.
    """
    nrows = len(a)
    h = row_hnf(transpose(a))
    nz = [row for row in h if any(row)]
    return from_columns(nz, nrows)


def snf(a):
    """Smith normal form: returns ``(d, u, v)`` with ``u @ a @ v == d``.

    ``u`` and ``v`` are unimodular; the diagonal of ``d`` is nonnegative with
    ``d[0][0] | d[1][1] | ...`` (zeros last).
    """
    rows, cols = shape(a)
    m = [list(r) for r in a]
    u = [list(r) for r in identity(rows)]
    v = [list(r) for r in identity(cols)]

    def swap_rows(i, j):
        m[i], m[j] = m[j], m[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in m:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):
        m[dst] = [x + q * y for x, y in zip(m[dst], m[src])]
        u[dst] = [x + q * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, q):
        for row in m:
            row[dst] += q * row[src]
        for row in v:
            row[dst] += q * row[src]

    for t in range(min(rows, cols)):
        while True:
            best = None
            for i in range(t, rows):
                for j in range(t, cols):
                    if m[i][j] and (best is None or abs(m[i][j]) < abs(m[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                break
            swap_rows(t, best[0])
            swap_cols(t, best[1])
            p = m[t][t]
            dirty = False
            for i in range(t + 1, rows):
                if m[i][t]:
                    add_row(i, t, -(m[i][t] // p))
                    dirty = dirty or m[i][t] != 0
            for j in range(t + 1, cols):
                if m[t][j]:
                    add_col(j, t, -(m[t][j] // p))
                    dirty = dirty or m[t][j] != 0
            if dirty:
                continue
            bad = next(
                (i for i in range(t + 1, rows) for j in range(t + 1, cols) if m[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if m[t][t] < 0:
            m[t] = [-x for x in m[t]]
            u[t] = [-x for x in u[t]]
    return as_matrix(m), as_matrix(u), as_matrix(v)


def elementary_divisors(a):
    d, _, _ = snf(a)
    return tuple(d[i][i] for i in range(min(shape(a))) if d[i][i])


def kernel(a, ncols=None):
    """Integer basis (list of column vectors) of ``{x in Z^n : a @ x == 0}``.

    The returned lattice is saturated in ``Z^n``.
    """
    rows = len(a)
    n = ncols if ncols is not None else (len(a[0]) if rows else 0)
    if rows == 0:
        return [tuple(1 if i == j else 0 for i in range(n)) for j in range(n)]
    h, u = row_hnf(transpose(a), transform=True)
    return [tuple(u[i]) for i in range(n) if not any(h[i])]


def is_unimodular(a):
    return all(isinstance(x, int) for row in a for x in row) and abs(det(a)) == 1
