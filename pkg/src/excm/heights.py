"""k-heights of real algebraic numbers, 1-heights of rational matrices, det*.

A real algebraic number is given by its minimal polynomial (primitive,
integer coefficients listed from the constant term up) and an isolating
interval with rational endpoints.

Every integer polynomial of degree <= k vanishing at ``y`` is ``p * q`` for
the minimal polynomial ``p``; the coefficient vectors of these form the
lattice spanned by ``x^j p`` (``j <= k - deg p``).  The k-height is the
least sup-norm of a nonzero vector in that lattice, found by an exact
Fincke-Pohst enumeration over the Euclidean ball that contains the sup-norm
box.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt, lcm

from sympy import Poly, symbols

from . import intmat
from .errors import HeightBudgetExceeded, SingularBasisError

DEFAULT_HEIGHT_BUDGET = 2_000_000
MAX_K = 8

_x = symbols("x")


def _content(v):
    c = 0
    for a in v:
        c = gcd(c, a)
    return c


@dataclass(frozen=True)
class AlgebraicInput:
    """Root of ``poly`` (ascending coefficients) isolated in ``[lo, hi]``."""

    poly: tuple
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        p = tuple(int(a) for a in self.poly)
        while len(p) > 1 and p[-1] == 0:
            p = p[:-1]
        object.__setattr__(self, "poly", p)
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if len(p) < 2:
            raise ValueError("minimal polynomial must have positive degree")
        if _content(p) != 1:
            raise ValueError("minimal polynomial must be primitive")
        if self.lo > self.hi:
            raise ValueError("empty isolating interval")
        sp = Poly(list(reversed(p)), _x)
        if not sp.is_irreducible:
            raise ValueError("polynomial is not irreducible over Q")
        if sp.count_roots(self.lo, self.hi) != 1:
            raise ValueError("interval does not isolate exactly one real root")

    @property
    def degree(self):
        return len(self.poly) - 1

    def as_rational(self):
        if self.degree != 1:
            return None
        return Fraction(-self.poly[0], self.poly[1])

    def to_json(self):
        return {"poly": list(self.poly), "interval": [str(self.lo), str(self.hi)]}


def parse_algebraic(obj):
    """Inverse of the JSON forms: a rational string/int or ``{"poly", "interval"}``."""
    if isinstance(obj, (int, str, Fraction)):
        return Fraction(obj)
    if "rational" in obj:
        return Fraction(obj["rational"])
    lo, hi = obj["interval"]
    return AlgebraicInput(tuple(obj["poly"]), Fraction(lo), Fraction(hi))


def _ldl(g):
    """``q(x) = sum d_i (x_i + sum_{j>i} mu_ij x_j)^2`` for positive definite ``g``."""
    m = len(g)
    a = [[Fraction(x) for x in row] for row in g]
    d = [Fraction(0)] * m
    mu = [[Fraction(0)] * m for _ in range(m)]
    for i in range(m):
        d[i] = a[i][i]
        for j in range(i + 1, m):
            mu[i][j] = a[i][j] / d[i]
        for k in range(i + 1, m):
            for l in range(k, m):
                a[k][l] -= d[i] * mu[i][k] * mu[i][l]
                a[l][k] = a[k][l]
    return d, mu


def _floor_sqrt(t):
    return isqrt(t.numerator * t.denominator) // t.denominator


def short_vectors(basis, radius_sq, budget, on_leaf):
    """Call ``on_leaf(coeffs, vector)`` for every nonzero lattice vector of
    squared norm <= the current radius; ``on_leaf`` may return a smaller
    radius to shrink the search.
    """
    m = len(basis)
    g = [[sum(x * y for x, y in zip(u, v)) for v in basis] for u in basis]
    d, mu = _ldl(g)
    x = [0] * m
    nodes = 0
    radius = [Fraction(radius_sq)]

    def rec(i, used):
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise HeightBudgetExceeded()
        c = -sum((mu[i][j] * x[j] for j in range(i + 1, m)), Fraction(0))
        t = (radius[0] - used) / d[i]
        if t < 0:
            return
        s = _floor_sqrt(t)
        for xi in range(math.floor(c) - s - 1, math.ceil(c) + s + 2):
            step = (xi - c) ** 2
            if step > t:
                continue
            x[i] = xi
            u = used + d[i] * step
            if i == 0:
                if any(x):
                    v = tuple(sum(x[j] * basis[j][k] for j in range(m)) for k in range(len(basis[0])))
                    r = on_leaf(tuple(x), v)
                    if r is not None and r < radius[0]:
                        radius[0] = Fraction(r)
            else:
                rec(i - 1, u)
        x[i] = 0

    rec(m - 1, Fraction(0))
    return nodes


def _height_poly(v):
    return max(abs(a) for a in v)


def height_hk(y, k, budget=DEFAULT_HEIGHT_BUDGET):
    """``H_k(y)``: an int, or ``math.inf`` when ``deg y > k``."""
    if k < 1:
        raise ValueError("k must be positive")
    if k > MAX_K:
        raise HeightBudgetExceeded(f"k = {k} exceeds the configured cap {MAX_K}")
    if isinstance(y, AlgebraicInput):
        r = y.as_rational()
        if r is None:
            return _height_algebraic(y.poly, k, budget)
        y = r
    y = Fraction(y)
    return max(abs(y.numerator), abs(y.denominator))


def _height_algebraic(p, k, budget):
    d = len(p) - 1
    if d > k:
        return math.inf
    best = _height_poly(p)
    # leading and constant coefficients of any multiple are multiples of p_d and p_0
    floor = max(abs(p[0]), abs(p[-1]))
    if best == floor:
        return best
    basis = [tuple([0] * j + list(p) + [0] * (k - d - j)) for j in range(k - d + 1)]
    n = k + 1
    state = {"best": best}

    def leaf(_, v):
        h = _height_poly(v)
        if h < state["best"] and _content(v) == 1:
            state["best"] = h
            return n * (h - 1) ** 2
        return None

    short_vectors(basis, n * (best - 1) ** 2, budget, leaf)
    return state["best"]


def height_hk_vector(values, k, budget=DEFAULT_HEIGHT_BUDGET):
    """Max of coordinate heights; a 2-tuple entry is a complex number (re, im)."""
    out = 1
    for v in values:
        parts = v if isinstance(v, tuple) and not isinstance(v, AlgebraicInput) else (v,)
        for part in parts:
            out = max(out, height_hk(part, k, budget))
    return out


def height_h1_matrix(g):
    return max(max(abs(Fraction(a).numerator), Fraction(a).denominator) for row in g for a in row)


def detstar(g):
    """``|det g| * lcm(denominators)^n`` for a nonsingular rational matrix.

    Equivalently ``|det(den * g)|``, an integer determinant.
    """
    g = [[a if isinstance(a, int) else Fraction(a) for a in row] for row in g]
    den = lcm(*[1 if isinstance(a, int) else a.denominator for row in g for a in row])
    m = [[a * den if isinstance(a, int) else a.numerator * (den // a.denominator) for a in row] for row in g]
    dt = intmat.det(m)
    if dt == 0:
        raise SingularBasisError("singular matrix")
    return abs(dt)
