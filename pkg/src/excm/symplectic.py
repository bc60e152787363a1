"""Alternating integer pairings on lattices.

Convention: the standard form on Z^(2k) is ``J2 ⊕ ... ⊕ J2`` with
``J2 = [[0, 1], [-1, 0]]``, so consecutive basis vectors pair to 1 and the
coordinate planes ``span(e_{2i}, e_{2i+1})`` are mutually orthogonal.
"""

from dataclasses import dataclass
from typing import NamedTuple

from . import intmat
from .errors import (
    DegenerateFormError,
    FormNotIntegralError,
    GluePreconditionError,
    NotSublatticeError,
)
from .lattice import Lattice, index_of_sublattice, saturate


def j_form(k=1, n=1):
    """``n * (J2 ⊕ ... ⊕ J2)`` with ``k`` blocks."""
    return intmat.block_diag(*[((0, n), (-n, 0))] * k)


def _check_alternating(g):
    r = len(g)
    for i in range(r):
        if len(g[i]) != r:
            raise ValueError("gram matrix is not square")
        if g[i][i] != 0:
            raise ValueError("gram matrix has nonzero diagonal")
        for j in range(i + 1, r):
            if g[i][j] != -g[j][i]:
                raise ValueError("gram matrix is not antisymmetric")


@dataclass(frozen=True)
class SymplecticLattice:
    """A lattice with a nondegenerate alternating integer form.

    ``gram[i][j]`` is the pairing of the i-th and j-th vectors of
    ``lattice.vectors()`` (the canonical basis).
    """

    lattice: Lattice
    gram: tuple

    def __post_init__(self):
        g = intmat.as_matrix(self.gram)
        object.__setattr__(self, "gram", g)
        if not all(isinstance(x, int) for row in g for x in row):
            raise FormNotIntegralError("gram matrix is not integral")
        if len(g) != self.lattice.rank:
            raise ValueError("gram size does not match lattice rank")
        _check_alternating(g)
        d = intmat.det(g)
        if d == 0:
            raise DegenerateFormError(gram=g)

    @classmethod
    def from_basis(cls, vectors, gram, ambient_rank=None):
        """Build from an arbitrary basis and the Gram matrix on that basis."""
        vectors = [tuple(v) for v in vectors]
        lat = Lattice.from_basis(vectors, ambient_rank)
        b = intmat.from_columns(vectors, lat.ambient_rank)
        u = intmat.to_int(intmat.solve(b, lat.rational_basis()))
        g = intmat.matmul(intmat.matmul(intmat.transpose(u), intmat.as_matrix(gram)), u)
        return cls(lat, g)

    @classmethod
    def standard(cls, k=1, n=1):
        return cls(Lattice.standard(2 * k), j_form(k, n))

    @property
    def rank(self):
        return self.lattice.rank

    @property
    def ambient_rank(self):
        return self.lattice.ambient_rank

    def coordinates(self, vectors):
        return self.lattice.coordinates(vectors)

    def gram_of(self, vectors):
        """Gram matrix (Fractions allowed) of ambient vectors in the span."""
        if not vectors:
            return ()
        c = self.coordinates(vectors)
        return intmat.matmul(intmat.matmul(intmat.transpose(c), self.gram), c)

    def pair(self, x, y):
        return self.gram_of([x, y])[0][1]

    def is_perfect(self):
        return abs(intmat.det(self.gram)) == 1

    def rescaled(self, n):
        return SymplecticLattice(self.lattice, intmat.scale(self.gram, n))

    def to_json(self):
        return {"lattice": self.lattice.to_json(), "gram": [list(r) for r in self.gram]}

    @classmethod
    def from_json(cls, obj):
        return cls(Lattice.from_json(obj["lattice"]), intmat.as_matrix(obj["gram"]))


def restrict_form(amb, sub):
    """Restriction of the pairing of ``amb`` to the lattice ``sub``.

    Raises :class:`FormNotIntegralError` if the restriction is not integral
    and :class:`DegenerateFormError` (carrying the Gram matrix) if it is
    degenerate, e.g. on an isotropic plane.
    """
    try:
        g = amb.gram_of(sub.vectors())
    except ValueError:
        raise NotSublatticeError("sublattice outside the rational span") from None
    if not intmat.is_integral(g):
        raise FormNotIntegralError()
    g = intmat.to_int(g) if g else ()
    if sub.rank == 0 or intmat.det(g) == 0:
        raise DegenerateFormError("degenerate restriction", gram=g)
    return SymplecticLattice(sub, g)


def discriminant(s):
    """det of the Gram matrix; ``n**2`` for ``n * J2``."""
    d = intmat.det(s.gram)
    if d == 0:
        raise DegenerateFormError(gram=s.gram)
    return d


def _swap(g, p, i, j):
    if i == j:
        return
    g[i], g[j] = g[j], g[i]
    for row in g:
        row[i], row[j] = row[j], row[i]
    for row in p:
        row[i], row[j] = row[j], row[i]


def _add(g, p, k, l, c):
    """Basis change v_k <- v_k + c * v_l applied to Gram ``g`` and transform ``p``."""
    if not c:
        return
    g[k] = [x + c * y for x, y in zip(g[k], g[l])]
    for row in g:
        row[k] += c * row[l]
    for row in p:
        row[k] += c * row[l]


def symplectic_basis(s):
    """Unimodular ``p`` and divisors ``(d1 | d2 | ...)`` with
    ``p^T gram p == d1*J2 ⊕ d2*J2 ⊕ ...``.
    """
    g = [list(r) for r in s.gram]
    r = len(g)
    p = [list(row) for row in intmat.identity(r)]
    divisors = []
    for t in range(0, r, 2):
        while True:
            best = None
            for i in range(t, r):
                for j in range(i + 1, r):
                    if g[i][j] and (best is None or abs(g[i][j]) < abs(g[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                raise DegenerateFormError(gram=s.gram)
            i, j = best
            # j > i >= t, so the first swap leaves position j untouched
            _swap(g, p, t, i)
            _swap(g, p, t + 1, j)
            if g[t][t + 1] < 0:
                _swap(g, p, t, t + 1)
            a = g[t][t + 1]
            dirty = False
            for k in range(t + 2, r):
                # g[t][k] -> g[t][k] - q*a via v_k -= q v_{t+1}
                _add(g, p, k, t + 1, -(g[t][k] // a))
                # g[t+1][k] -> g[t+1][k] - q*a via v_k += q v_t
                _add(g, p, k, t, g[t + 1][k] // a)
                dirty = dirty or g[t][k] != 0 or g[t + 1][k] != 0
            if dirty:
                continue
            bad = next(
                (k for k in range(t + 2, r) for l in range(t + 2, r) if g[k][l] % a),
                None,
            )
            if bad is None:
                break
            _add(g, p, t, bad, 1)
        divisors.append(g[t][t + 1])
    return intmat.as_matrix(p), tuple(divisors)


def orthogonal_complement(amb, sub):
    """Saturated sublattice ``{v in amb : pair(v, sub) == 0}``."""
    if sub.rank == 0:
        return amb.lattice
    c = amb.coordinates(sub.vectors())
    den = intmat.denominator_lcm(c)
    rows = intmat.to_int(intmat.scale(intmat.matmul(intmat.transpose(c), amb.gram), den))
    ker = intmat.kernel(rows, amb.rank)
    if not ker:
        return Lattice.zero(amb.ambient_rank)
    b = amb.lattice.rational_basis()
    return Lattice.from_basis([intmat.matvec(b, v) for v in ker], amb.ambient_rank)


class GlueDisc(NamedTuple):
    d1: int
    d2: int
    index: int


def glue_disc_check(amb, l1, l2):
    """Restricted discriminants and glue index for a perfect ``amb``.

    Hypotheses are checked in order and a :class:`GluePreconditionError`
    names the first that fails.
    """
    if not amb.is_perfect():
        raise GluePreconditionError("form not perfect")
    for sub in (l1, l2):
        if not amb.lattice.contains_lattice(sub):
            raise GluePreconditionError("not a sublattice")
        if saturate(sub, amb.lattice) != sub:
            raise GluePreconditionError("not primitive")
    cross = [[amb.pair(x, y) for y in l2.vectors()] for x in l1.vectors()]
    if any(v for row in cross for v in row):
        raise GluePreconditionError("not orthogonal")
    total = l1 + l2
    if total.rank != amb.rank or l1.rank + l2.rank != amb.rank:
        raise GluePreconditionError("sum not of finite index")
    d1 = discriminant(restrict_form(amb, l1))
    d2 = discriminant(restrict_form(amb, l2))
    return GlueDisc(d1, d2, index_of_sublattice(total, amb.lattice))
