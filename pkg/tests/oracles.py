"""Slow, independent reference computations used by the tests.

Nothing here calls the package routine it is meant to check; each oracle
is a direct search or a closed formula written from scratch.
"""

from fractions import Fraction
from itertools import product
from math import gcd

from sympy import divisor_sigma, factorint, kronecker_symbol


# --- sublattices of Z^k, listed by lower-triangular Hermite shapes --------------


def index_n_shapes(k, n):
    """Lower-triangular integer matrices with positive diagonal of product n
    whose entries left of each diagonal pivot lie in [0, pivot).

    These are in bijection with the index-n sublattices of Z^k (columns span).
    """
    def diagonals(k, n):
        if k == 1:
            yield (n,)
            return
        for d in range(1, n + 1):
            if n % d == 0:
                for rest in diagonals(k - 1, n // d):
                    yield (d,) + rest

    for diag in diagonals(k, n):
        slots = [(i, j) for i in range(k) for j in range(i)]
        for vals in product(*[range(diag[i]) for i, _ in slots]):
            m = [[0] * k for _ in range(k)]
            for i in range(k):
                m[i][i] = diag[i]
            for (i, j), v in zip(slots, vals):
                m[i][j] = v
            yield m


def count_index_n(k, n):
    """Closed form: sum over d1...dk = n of d2 d3^2 ... dk^(k-1)... written as
    the multiplicative formula prod_p prod_{i=1}^{k-1} (p^(e+i) - 1)/(p^i - 1)."""
    out = 1
    for p, e in factorint(n).items():
        num = den = 1
        for i in range(1, k):
            num *= p ** (e + i) - 1
            den *= p**i - 1
        out *= num // den
    return out


def _in_span_tri(m, v):
    """Membership of an integer vector in the column span of lower-triangular m."""
    v = list(v)
    k = len(m)
    for j in range(k):
        if v[j] % m[j][j]:
            return False
        x = v[j] // m[j][j]
        for i in range(j, k):
            v[i] -= x * m[i][j]
    return all(x == 0 for x in v)


def _mat_inv(a):
    n = len(a)
    m = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    for c in range(n):
        p = next(i for i in range(c, n) if m[i][c])
        m[c], m[p] = m[p], m[c]
        inv = 1 / m[c][c]
        m[c] = [x * inv for x in m[c]]
        for i in range(n):
            if i != c and m[i][c]:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return [row[n:] for row in m]


def _mul(a, b):
    return [[sum(a[i][t] * b[t][j] for t in range(len(b))) for j in range(len(b[0]))] for i in range(len(a))]


def _pfaffian_2x2_gram(gram, u, v):
    return sum(u[i] * gram[i][j] * v[j] for i in range(4) for j in range(4))


def literal_minimal_isogeny(model, max_degree):
    """Least N <= max_degree such that some index-N sublattice of the model
    lattice (Z^4) splits along the factor planes with equal multipliers.

    Returns (N, list of split sublattices as lower-triangular matrices).
    Decomposability: L = (L ∩ V1) ⊕ (L ∩ V2) iff the projector onto V1 along
    V2 maps L into itself.
    """
    f = [list(v) for v in model.factor1] + [list(v) for v in model.factor2]
    basis = [[Fraction(f[j][i]) for j in range(4)] for i in range(4)]
    proj = _mul(_mul(basis, [[int(i == j and i < 2) for j in range(4)] for i in range(4)]), _mat_inv(basis))
    den = 1
    for row in proj:
        for x in row:
            den = den * x.denominator // gcd(den, x.denominator)
    p_int = [[int(x * den) for x in row] for row in proj]
    gram = model.sym.gram
    for big_n in range(1, max_degree + 1):
        found = []
        for m in index_n_shapes(4, big_n):
            cols = [[m[i][j] for i in range(4)] for j in range(4)]
            images = []
            ok = True
            for c in cols:
                w = [sum(p_int[i][t] * c[t] for t in range(4)) for i in range(4)]
                if any(x % den for x in w):
                    ok = False
                    break
                w = [x // den for x in w]
                if not _in_span_tri(m, w):
                    ok = False
                    break
                images.append(w)
            if not ok:
                continue
            # L ∩ V1 is the image of the projector; its multiplier is |pairing| of a basis
            first = _saturated_pair(images)
            second = _saturated_pair([[c[i] - w[i] for i in range(4)] for c, w in zip(cols, images)])
            m1 = abs(_pfaffian_2x2_gram(gram, *first))
            m2 = abs(_pfaffian_2x2_gram(gram, *second))
            if m1 == m2:
                found.append(m)
        if found:
            return big_n, found
    return None, []


def _saturated_pair(vectors):
    """A Z-basis (two vectors) of the group generated by vectors of rank 2."""
    rows = [list(v) for v in vectors if any(v)]
    # integer row reduction to echelon form
    out = []
    col = 0
    while rows and col < 4:
        rows = [r for r in rows if any(r)]
        nz = [r for r in rows if r[col]]
        if not nz:
            col += 1
            continue
        while len([r for r in rows if r[col]]) > 1:
            nz = sorted([r for r in rows if r[col]], key=lambda r: abs(r[col]))
            piv = nz[0]
            for r in nz[1:]:
                q = r[col] // piv[col]
                for i in range(4):
                    r[i] -= q * piv[i]
        piv = next(r for r in rows if r[col])
        out.append(piv)
        rows = [r for r in rows if r is not piv]
        col += 1
    assert len(out) == 2
    return out


# --- glue superlattices ---------------------------------------------------------


def perfect_glue_count(n):
    """Superlattices M of Z^4 on which n(J ⊕ J) is integral and perfect and
    whose intersections with both coordinate planes stay Z^2."""
    from itertools import product as prod_

    count = 0
    gram = [[0, n, 0, 0], [-n, 0, 0, 0], [0, 0, 0, n], [0, 0, -n, 0]]
    for m in index_n_shapes(4, n * n):
        cols = [[m[i][j] for i in range(4)] for j in range(4)]
        # L = n M must contain n Z^4
        if not all(_in_span_tri(m, [n * int(i == j) for i in range(4)]) for j in range(4)):
            continue
        # pairing on M = (1/n) L scaled by n: entries (1/n) c_i^T J c_j must be integral
        g = [[sum(a[i] * gram[i][j] * b[j] for i in range(4) for j in range(4)) for b in cols] for a in cols]
        if any(x % (n * n) for row in g for x in row):
            continue
        # perfect: det of the Gram on M equals 1, i.e. det(g) = n^8
        if _det([[Fraction(x, n * n) for x in row] for row in g]) != 1:
            continue
        # M ∩ V_i = Z^2: no vector of M in a coordinate plane outside Z^2
        bad = False
        for plane in ((0, 1), (2, 3)):
            for a, b in prod_(range(n), repeat=2):
                if (a, b) == (0, 0):
                    continue
                v = [0, 0, 0, 0]
                v[plane[0]], v[plane[1]] = a, b
                if _in_span_tri(m, v):
                    bad = True
        if not bad:
            count += 1
    return count


def _det(a):
    n = len(a)
    m = [list(r) for r in a]
    d = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if m[i][c]), None)
        if p is None:
            return 0
        if p != c:
            m[c], m[p] = m[p], m[c]
            d = -d
        d *= m[c][c]
        for i in range(c + 1, n):
            f = m[i][c] / m[c][c]
            for j in range(c, n):
                m[i][j] -= f * m[c][j]
    return d


def glue_maps(n):
    """2x2 matrices over Z/n with determinant -1."""
    return [g for g in product(range(n), repeat=4) if (g[0] * g[3] - g[1] * g[2] + 1) % n == 0]


# --- orders ---------------------------------------------------------------------


def unit_index_formula(fundamental_disc, f):
    """[O_K^ : O_f^] = f * prod_{p | f} (1 - (dK/p)/p) for the profinite unit groups."""
    out = Fraction(f)
    for p in factorint(f):
        out *= 1 - Fraction(kronecker_symbol(fundamental_disc, p), p)
    assert out.denominator == 1
    return int(out)


def fundamental_disc(m):
    """Discriminant of Q(sqrt(m)) for a nonzero integer m."""
    s = -1 if m < 0 else 1
    for p, e in factorint(abs(m)).items():
        if e % 2:
            s *= p
    return s if s % 4 == 1 else 4 * s


def biquadratic_disc(d1, d2):
    """Conductor-discriminant formula: product of the three quadratic subfield discriminants."""
    a, b = fundamental_disc(d1), fundamental_disc(d2)
    return abs(a * b * fundamental_disc(a * b))


def sigma1(n):
    return int(divisor_sigma(n, 1))


# --- heights --------------------------------------------------------------------


def quadratic_height_oracle(p, k):
    """Least max-coefficient of a primitive multiple q*p (deg <= k) of the
    quadratic p (ascending coefficients), by a top-down exhaustive search.

    Coefficients of q*p are fixed from the top: the x^(m+2-j) coefficient is
    q_{m-j} p_2 + (terms in already chosen q's), which pins q_{m-j} to a
    bounded interval once a height bound is known.  Replacing q by -q does
    not change the height, so the leading multiplier is taken positive.
    """
    best = max(abs(c) for c in p)
    # reversing p reverses every multiple, so search with the larger end leading
    if abs(p[0]) > abs(p[2]):
        p = tuple(reversed(p))
    for m in range(0, k - 1):  # deg q = m, deg(q p) = m + 2 <= k
        q = [0] * (m + 1)

        def rec(j):
            nonlocal best
            if j > m:
                prod_ = [0] * (m + 3)
                for a, qa in enumerate(q):
                    for b, pb in enumerate(p):
                        prod_[a + b] += qa * pb
                g = 0
                for c in prod_:
                    g = gcd(g, c)
                h = max(abs(c) for c in prod_)
                if g == 1 and h < best:
                    best = h
                return
            idx = m - j  # choose q[idx]; it first appears in coefficient idx + 2
            known = sum(q[a] * p[idx + 2 - a] for a in range(idx + 1, m + 1) if 0 <= idx + 2 - a <= 2)
            lo = -((best + known) // abs(p[2])) - 1
            hi = (best - known) // abs(p[2]) + 1
            for v in range(min(lo, -hi), max(hi, -lo) + 1):
                if abs(v * p[2] + known) >= best or (idx == m and v <= 0):
                    continue
                # q[0] alone fixes the constant coefficient q[0] * p[0]
                if idx == 0 and abs(v * p[0]) >= best:
                    continue
                q[idx] = v
                rec(j + 1)
            q[idx] = 0

        rec(0)
    return best
