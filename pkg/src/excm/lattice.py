"""Exact lattices in Q^n: canonical forms, indices, saturation, enumeration.

A :class:`Lattice` is stored canonically as ``(1/denominator) * H`` where
``H`` is the column Hermite normal form of an integer matrix and
``denominator`` is the least positive integer making the lattice integral.
Two lattices are equal exactly when these canonical data agree.
"""

from dataclasses import dataclass
from functools import cached_property
from fractions import Fraction
from itertools import product
from math import gcd, prod

from . import intmat
from .errors import (
    EnumerationBudgetExceeded,
    InternalConsistencyError,
    NotSublatticeError,
    SingularBasisError,
)

DEFAULT_ENUM_BUDGET = 10**6


def hnf(m):
    """Column HNF of an integer matrix of full column rank."""
    m = intmat.as_matrix(m)
    ncols = len(m[0]) if m else 0
    h = intmat.hnf_columns(m)
    if (len(h[0]) if h else 0) != ncols:
        raise SingularBasisError()
    return h


def snf(m):
    """Smith normal form ``(d, u, v)`` with ``u @ m @ v == d``."""
    return intmat.snf(intmat.as_matrix(m))


def _canonical(gens, ambient_rank):
    gens = [tuple(Fraction(x) for x in v) for v in gens]
    den = 1
    for v in gens:
        for x in v:
            den = den * x.denominator // gcd(den, x.denominator)
    ints = [tuple(int(x * den) for x in v) for v in gens]
    if not ints:
        return intmat.from_columns([], ambient_rank), 1
    h = intmat.hnf_columns(intmat.from_columns(ints, ambient_rank))
    content = 0
    for row in h:
        for x in row:
            content = gcd(content, x)
    e = gcd(content, den) if content else den
    if e > 1:
        h = tuple(tuple(x // e for x in row) for row in h)
        den //= e
    return h, den


@dataclass(frozen=True)
class Lattice:
    """Free Z-submodule of Q^ambient_rank, kept in canonical form.

    Use :meth:`from_basis` (independent vectors) or :meth:`span`
    (arbitrary generators) rather than the raw constructor.
    """

    basis: tuple
    ambient_rank: int
    denominator: int = 1

    @classmethod
    def from_basis(cls, vectors, ambient_rank=None):
        vectors = [tuple(v) for v in vectors]
        n = ambient_rank if ambient_rank is not None else len(vectors[0])
        if vectors and intmat.rank(intmat.from_columns(vectors, n)) != len(vectors):
            raise SingularBasisError()
        h, den = _canonical(vectors, n)
        return cls(h, n, den)

    @classmethod
    def from_matrix(cls, m):
        """Lattice spanned by the columns of ``m`` (must be independent)."""
        m = intmat.as_matrix(m)
        return cls.from_basis(intmat.columns(m), len(m))

    @classmethod
    def span(cls, vectors, ambient_rank=None):
        vectors = [tuple(v) for v in vectors]
        n = ambient_rank if ambient_rank is not None else len(vectors[0])
        h, den = _canonical(vectors, n)
        return cls(h, n, den)

    @classmethod
    def standard(cls, n):
        return cls(intmat.identity(n), n, 1)

    @classmethod
    def zero(cls, n):
        return cls(intmat.from_columns([], n), n, 1)

    @property
    def rank(self):
        return len(self.basis[0]) if self.basis and self.basis[0] else 0

    def vectors(self):
        """Basis vectors (Fractions when the denominator is not 1)."""
        cols = intmat.columns(self.basis)
        if self.denominator == 1:
            return cols
        return [tuple(Fraction(x, self.denominator) for x in c) for c in cols]

    def rational_basis(self):
        return intmat.from_columns(self.vectors(), self.ambient_rank)

    def is_integral(self):
        return self.denominator == 1

    def coordinates(self, vectors):
        """Coordinates (Fraction matrix, one column per vector) in this basis.

        Raises ``ValueError`` if some vector is outside the rational span.
        """
        if self.rank == 0:
            if any(any(v) for v in vectors):
                raise ValueError("vector outside rational span")
            return tuple()
        cols = [_echelon_solve(self.basis, self._pivots, v, self.denominator) for v in vectors]
        return intmat.from_columns(cols, self.rank)

    @cached_property
    def _pivots(self):
        piv = [next(i for i in range(self.ambient_rank) if self.basis[i][j]) for j in range(self.rank)]
        if any(a >= b for a, b in zip(piv, piv[1:])):
            raise InternalConsistencyError("basis is not in echelon form")
        return piv

    def contains(self, v):
        try:
            c = self.coordinates([v])
        except ValueError:
            return False
        return all(row[0].denominator == 1 for row in c)

    def contains_lattice(self, other):
        if other.rank == 0:
            return True
        try:
            c = self.coordinates(other.vectors())
        except ValueError:
            return False
        return intmat.is_integral(c)

    def __add__(self, other):
        return Lattice.span(self.vectors() + other.vectors(), self.ambient_rank)

    def scaled(self, c):
        c = Fraction(c)
        return Lattice.span([tuple(c * x for x in v) for v in self.vectors()], self.ambient_rank)

    def image(self, m):
        """Image under the linear map with (rational) matrix ``m``."""
        return Lattice.from_basis([intmat.matvec(m, v) for v in self.vectors()], len(m))

    def volume(self):
        """|det| of the basis; only defined for full-rank lattices."""
        if self.rank != self.ambient_rank:
            raise ValueError("lattice is not of full rank")
        return abs(intmat.det(self.rational_basis()))

    def sort_key(self):
        return (self.denominator, self.basis)

    def to_json(self):
        out = {
            "rank": self.rank,
            "ambient_rank": self.ambient_rank,
            "basis": [list(r) for r in self.basis],
        }
        if self.denominator != 1:
            out["denominator"] = self.denominator
        return out

    @classmethod
    def from_json(cls, obj):
        n = obj.get("ambient_rank", len(obj["basis"]))
        basis = intmat.as_matrix(obj["basis"]) if obj["basis"] else intmat.from_columns([], n)
        den = obj.get("denominator", 1)
        vecs = [tuple(Fraction(x, den) for x in c) for c in intmat.columns(basis)]
        lat = cls.from_basis(vecs, n)
        if lat.rank != obj.get("rank", lat.rank):
            raise ValueError("rank field disagrees with basis")
        return lat


def _echelon_solve(b, piv, v, den):
    """``x`` with ``b x = den * v`` by forward substitution on the pivot rows."""
    w = [x * den for x in v]
    x = []
    for j, p in enumerate(piv):
        t = w[p] - sum(b[p][i] * x[i] for i in range(j))
        q = b[p][j]
        x.append(t // q if isinstance(t, int) and t % q == 0 else Fraction(t, q) if isinstance(t, int) else t / q)
    for i, row in enumerate(b):
        if sum(r * y for r, y in zip(row, x)) != w[i]:
            raise ValueError("vector outside rational span")
    return tuple(x)


def index_of_sublattice(sub, sup):
    """[sup : sub] for a finite-index sublattice ``sub`` of ``sup``."""
    try:
        c = sup.coordinates(sub.vectors())
    except ValueError:
        raise NotSublatticeError() from None
    if not intmat.is_integral(c):
        raise NotSublatticeError()
    if sub.rank != sup.rank:
        raise NotSublatticeError("sublattice has infinite index")
    return abs(intmat.det(intmat.to_int(c)))


def saturate(sub, sup):
    """(sub ⊗ Q) ∩ sup: the primitive closure of ``sub`` inside ``sup``."""
    if sub.rank == 0:
        return Lattice.zero(sup.ambient_rank)
    c = sup.coordinates(sub.vectors())
    den = intmat.denominator_lcm(c)
    ci = intmat.to_int(intmat.scale(c, den))
    _, u, _ = intmat.snf(ci)
    uinv = intmat.to_int(intmat.inverse(u))
    r = sub.rank
    cols = [tuple(uinv[i][j] for i in range(len(uinv))) for j in range(r)]
    b = sup.rational_basis()
    return Lattice.from_basis([intmat.matvec(b, col) for col in cols], sup.ambient_rank)


def is_primitive(sub, sup):
    return saturate(sub, sup) == sub


def _ordered_factorisations(n, k):
    if k == 1:
        yield (n,)
        return
    for d in range(1, n + 1):
        if n % d == 0:
            for rest in _ordered_factorisations(n // d, k - 1):
                yield (d,) + rest


def count_hnf_shapes(k, n):
    """Number of index-``n`` sublattices of Z^k."""
    return sum(prod(d[i] ** i for i in range(k)) for d in _ordered_factorisations(n, k))


def hnf_shapes(k, n):
    """Yield every k x k lower-triangular column HNF of determinant ``n``.

    Row ``i`` has pivot ``d_i`` on the diagonal and entries in ``[0, d_i)``
    to its left; these are in bijection with index-``n`` sublattices of Z^k.
    """
    for diag in _ordered_factorisations(n, k):
        ranges = [range(diag[i]) for i in range(k) for _ in range(i)]
        for offs in product(*ranges):
            m = [[0] * k for _ in range(k)]
            pos = 0
            for i in range(k):
                m[i][i] = diag[i]
                for j in range(i):
                    m[i][j] = offs[pos]
                    pos += 1
            yield tuple(tuple(r) for r in m)


def tri_member(c, w):
    """Is ``w`` in the column span of lower-triangular integer ``c``?"""
    w = list(w)
    k = len(c)
    for j in range(k):
        p = c[j][j]
        if w[j] % p:
            return False
        x = w[j] // p
        if x:
            for i in range(j, k):
                w[i] -= x * c[i][j]
    return True


def _lift(l, c):
    b = l.rational_basis()
    return Lattice.from_basis(intmat.columns(intmat.matmul(b, c)), l.ambient_rank)


def enumerate_sublattices(l, n, budget=DEFAULT_ENUM_BUDGET):
    """All sublattices of ``l`` of index exactly ``n``, sorted canonically."""
    if n < 1:
        raise ValueError("index must be positive")
    k = l.rank
    if count_hnf_shapes(k, n) > budget:
        raise EnumerationBudgetExceeded()
    return sorted((_lift(l, c) for c in hnf_shapes(k, n)), key=Lattice.sort_key)


def enumerate_superlattices(l, n, index=None, budget=DEFAULT_ENUM_BUDGET):
    """All lattices M with l ⊆ M ⊆ (1/n)·l, optionally of fixed [M : l]."""
    if n < 1:
        raise ValueError("n must be positive")
    k = l.rank
    total = n**k
    if index is not None:
        if total % index:
            return []
        indices = [total // index]
    else:
        indices = [d for d in range(1, total + 1) if total % d == 0]
    if sum(count_hnf_shapes(k, d) for d in indices) > budget:
        raise EnumerationBudgetExceeded()
    scaled = [tuple(n if i == j else 0 for i in range(k)) for j in range(k)]
    b = l.rational_basis()
    out = []
    for d in indices:
        for c in hnf_shapes(k, d):
            if any(c[i][i] and n % c[i][i] for i in range(k)):
                continue
            if all(tri_member(c, v) for v in scaled):
                cols = intmat.columns(intmat.matmul(b, c))
                out.append(
                    Lattice.from_basis(
                        [tuple(Fraction(x, n) for x in v) for v in cols], l.ambient_rank
                    )
                )
    return sorted(out, key=Lattice.sort_key)
