"""Lattice models of split abelian surfaces and their product isogenies.

A model is a perfect rank-4 symplectic lattice ``L`` together with two
rank-2 rational subspaces ``V1``, ``V2`` (the isotypic pieces coming from
the two elliptic factors).  An isogeny ``E1' x E2' -> A`` is an inclusion of
``L1 + L2`` into ``L`` with ``Li`` a rank-2 lattice in ``Vi``; its degree is
the index.
"""

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import isqrt
from typing import NamedTuple

from . import intmat
from .errors import (
    EnumerationBudgetExceeded,
    GluePreconditionError,
    InternalConsistencyError,
)
from .lattice import (
    DEFAULT_ENUM_BUDGET,
    Lattice,
    count_hnf_shapes,
    enumerate_sublattices,
    index_of_sublattice,
    saturate,
)
from .orders import ImaginaryQuadraticOrder
from .symplectic import SymplecticLattice, glue_disc_check, j_form


# --- endomorphism tags -------------------------------------------------------


@dataclass(frozen=True)
class NonCM:
    def is_cm(self):
        return False

    def to_json(self):
        return {"type": "noncm"}


@dataclass(frozen=True)
class CM:
    """CM by ``order``; ``action`` is the matrix of ``w_disc`` on the factor vectors."""

    order: ImaginaryQuadraticOrder
    action: tuple

    def __post_init__(self):
        object.__setattr__(self, "action", tuple(tuple(Fraction(x) for x in r) for r in self.action))

    def is_cm(self):
        return True

    def to_json(self):
        return {
            "type": "cm",
            "order": self.order.to_json(),
            "action": [[str(x) for x in r] for r in self.action],
        }


def tag_from_json(obj):
    if obj["type"] == "noncm":
        return NonCM()
    return CM(
        ImaginaryQuadraticOrder.from_json(obj["order"]),
        tuple(tuple(Fraction(x) for x in r) for r in obj["action"]),
    )


def _tags_distinct(t1, t2):
    if t1.is_cm() and t2.is_cm():
        return not t1.order.same_field(t2.order)
    return t1.is_cm() or t2.is_cm()


def _action_on(vectors, span_vectors, action):
    """Matrix of ``action`` (given on ``span_vectors``) in the basis ``vectors``."""
    f = intmat.from_columns(span_vectors, len(span_vectors[0]))
    c = intmat.solve(f, intmat.from_columns(vectors, len(vectors[0])))
    return intmat.matmul(intmat.matmul(intmat.inverse(c), action), c)


def multiplier_conductor(order, action_on_basis):
    """Conductor of ``{x in O_K : x L ⊆ L}`` given the action of ``w_disc`` on a basis of L."""
    f, dk = order.conductor, order.fundamental_disc
    shift = f * dk * (f - 1) // 2
    wk = [[Fraction(x - (shift if i == j else 0), f) for j, x in enumerate(row)] for i, row in enumerate(action_on_basis)]
    return intmat.denominator_lcm(wk)


# --- models --------------------------------------------------------------------


@dataclass(frozen=True)
class SplitSurfaceModel:
    sym: SymplecticLattice
    factor1: tuple
    factor2: tuple
    tag1: object = field(default_factory=NonCM)
    tag2: object = field(default_factory=NonCM)

    def __post_init__(self):
        for name in ("factor1", "factor2"):
            object.__setattr__(self, name, tuple(tuple(v) for v in getattr(self, name)))
        if self.sym.rank != 4 or not self.sym.is_perfect():
            raise GluePreconditionError("form not perfect")
        if len(self.factor1) != 2 or len(self.factor2) != 2:
            raise ValueError("each factor needs two spanning vectors")
        if intmat.rank(intmat.from_columns(self.factor1 + self.factor2, 4)) != 4:
            raise GluePreconditionError("sum not of finite index")
        if not _tags_distinct(self.tag1, self.tag2):
            raise ValueError("factor tags must be distinct (non-isogenous factors)")
        l1, l2 = self.lambdas
        if any(self.sym.pair(x, y) for x in l1.vectors() for y in l2.vectors()):
            raise GluePreconditionError("not orthogonal")
        for tag, vecs, lam in ((self.tag1, self.factor1, l1), (self.tag2, self.factor2, l2)):
            if tag.is_cm():
                self._check_cm(tag, vecs, lam)

    @staticmethod
    def _check_cm(tag, vecs, lam):
        d = tag.order.disc
        a = tag.action
        tr = a[0][0] + a[1][1]
        nm = a[0][0] * a[1][1] - a[0][1] * a[1][0]
        if tr != d or nm != (d * d - d) // 4:
            raise ValueError("action does not satisfy the minimal polynomial of w_disc")
        on_lam = _action_on(lam.vectors(), list(vecs), a)
        if not intmat.is_integral(on_lam):
            raise ValueError("order does not preserve the saturated factor")
        if multiplier_conductor(tag.order, on_lam) != tag.order.conductor:
            raise ValueError("saturated factor is not proper for the order")

    @cached_property
    def lambdas(self):
        """Saturations ``(V1 ∩ L, V2 ∩ L)``."""
        return tuple(
            saturate(Lattice.span(list(vecs), 4), self.sym.lattice) for vecs in (self.factor1, self.factor2)
        )

    @cached_property
    def glue_index(self):
        l1, l2 = self.lambdas
        return index_of_sublattice(l1 + l2, self.sym.lattice)

    def glue_disc(self):
        return glue_disc_check(self.sym, *self.lambdas)

    def cm_position(self):
        """Index (0 or 1) of the unique CM factor, or None."""
        cms = [i for i, t in enumerate((self.tag1, self.tag2)) if t.is_cm()]
        return cms[0] if len(cms) == 1 else None

    def spans(self):
        return (self.factor1, self.factor2)

    def tags(self):
        return (self.tag1, self.tag2)

    def to_json(self):
        return {
            "sym": self.sym.to_json(),
            "factor1": [[str(x) for x in v] for v in self.factor1],
            "factor2": [[str(x) for x in v] for v in self.factor2],
            "tag1": self.tag1.to_json(),
            "tag2": self.tag2.to_json(),
        }

    @classmethod
    def from_json(cls, obj):
        def vecs(rows):
            return tuple(tuple(Fraction(x) for x in r) for r in rows)

        return cls(
            SymplecticLattice.from_json(obj["sym"]),
            vecs(obj["factor1"]),
            vecs(obj["factor2"]),
            tag_from_json(obj["tag1"]),
            tag_from_json(obj["tag2"]),
        )


def same_span(u, v):
    """Do two families of vectors span the same rational subspace?"""
    r = intmat.rank(intmat.from_columns(list(u), len(u[0])))
    return r == intmat.rank(intmat.from_columns(list(v), len(v[0]))) == intmat.rank(
        intmat.from_columns(list(u) + list(v), len(u[0]))
    )


# --- generator ------------------------------------------------------------------


def random_unimodular(rng, k, steps=8, bound=2):
    m = [list(r) for r in intmat.identity(k)]
    for _ in range(steps):
        i, j = rng.sample(range(k), 2)
        c = rng.choice([x for x in range(-bound, bound + 1) if x])
        for row in m:
            row[j] += c * row[i]
    perm = list(range(k))
    rng.shuffle(perm)
    signs = [rng.choice((1, -1)) for _ in range(k)]
    return intmat.as_matrix([[signs[j] * m[i][perm[j]] for j in range(k)] for i in range(k)])


def _random_nonsingular(rng, bound=3):
    while True:
        t = ((rng.randint(-bound, bound), rng.randint(-bound, bound)), (rng.randint(-bound, bound), rng.randint(-bound, bound)))
        if intmat.det(t):
            return t


def sample_glue_map(rng, n, tries=10_000):
    """A 2x2 integer matrix with entries in [0, n) and det ≡ -1 (mod n)."""
    for _ in range(tries):
        g = ((rng.randrange(n), rng.randrange(n)), (rng.randrange(n), rng.randrange(n)))
        if (intmat.det(g) + 1) % n == 0:
            return g
    raise EnumerationBudgetExceeded("no glue map found")


def glue_lattice(n, g):
    """The overlattice of ``(Z^4, n(J ⊕ J))`` glued along ``u -> g u``.

    Returns ``(lattice, ambient_gram)``; the rescaled form is perfect on the
    lattice exactly when ``det g ≡ -1 (mod n)``.
    """
    gens = [tuple(1 if i == j else 0 for i in range(4)) for j in range(4)]
    for u in ((1, 0), (0, 1)):
        gu = intmat.matvec(g, u)
        gens.append(tuple(Fraction(x, n) for x in u + gu))
    return Lattice.span(gens, 4), j_form(2, n)


def generate_surface(seed, n, cm_disc, scramble=True):
    """A glued model of glue index ``n**2`` with tags (NonCM, CM(cm_disc))."""
    if n < 1:
        raise ValueError("glue multiplier must be positive")
    order = ImaginaryQuadraticOrder(cm_disc)
    rng = seed if isinstance(seed, random.Random) else random.Random(f"surface/{seed}/{n}/{cm_disc}")
    g = sample_glue_map(rng, n) if n > 1 else ((0, 0), (0, 0))
    lat, amb = glue_lattice(n, g)
    b = lat.rational_basis()
    gram = intmat.matmul(intmat.matmul(intmat.transpose(b), amb), b)
    if not intmat.is_integral(gram) or abs(intmat.det(gram)) != 1:
        raise InternalConsistencyError("glued form is not perfect")
    gram = intmat.to_int(gram)
    binv = intmat.inverse(b)
    u = random_unimodular(rng, 4) if scramble else intmat.identity(4)
    uinv = intmat.to_int(intmat.inverse(u))
    gram = intmat.matmul(intmat.matmul(intmat.transpose(u), gram), u)
    to_new = intmat.matmul(uinv, binv)
    e = intmat.identity(4)
    f1 = [intmat.to_int([intmat.matvec(to_new, e[i])])[0] for i in (0, 1)]
    f2 = [intmat.to_int([intmat.matvec(to_new, e[i])])[0] for i in (2, 3)]
    action = order.omega_matrix()
    if scramble:
        t1, t2 = _random_nonsingular(rng), _random_nonsingular(rng)
        f1 = intmat.columns(intmat.matmul(intmat.from_columns(f1, 4), t1))
        f2 = intmat.columns(intmat.matmul(intmat.from_columns(f2, 4), t2))
        action = intmat.matmul(intmat.matmul(intmat.inverse(t2), action), t2)
    sym = SymplecticLattice(Lattice.standard(4), gram)
    return SplitSurfaceModel(sym, f1, f2, NonCM(), CM(order, action))


# --- isogeny witnesses -----------------------------------------------------------


def _oriented_basis(sym, lat):
    x, y = lat.vectors()
    return [x, y] if sym.pair(x, y) > 0 else [y, x]


@dataclass(frozen=True)
class IsogenyWitness:
    """Inclusion of ``(Z^2, J) ⊕ (Z^2, J)`` into the target lattice.

    Columns of ``inclusion`` are target-lattice coordinates of the images of
    the standard symplectic bases of the two source planes.
    """

    target: SplitSurfaceModel
    inclusion: tuple
    source: tuple = (SymplecticLattice.standard(1), SymplecticLattice.standard(1))

    def __post_init__(self):
        m = intmat.as_matrix(self.inclusion)
        object.__setattr__(self, "inclusion", m)
        if len(m) != 4 or not all(isinstance(x, int) for r in m for x in r) or intmat.det(m) == 0:
            raise ValueError("inclusion must be a nonsingular 4x4 integer matrix")

    @classmethod
    def from_factors(cls, target, l1, l2):
        sym = target.sym
        cols = _oriented_basis(sym, l1) + _oriented_basis(sym, l2)
        c = sym.coordinates(cols)
        return cls(target, intmat.to_int(c))

    @property
    def degree(self):
        return abs(intmat.det(self.inclusion))

    @cached_property
    def pullback_gram(self):
        m = self.inclusion
        return intmat.matmul(intmat.matmul(intmat.transpose(m), self.target.sym.gram), m)

    @property
    def multipliers(self):
        """``(m1, m2)`` when the pullback is ``m1 J ⊕ m2 J`` with ``mi > 0``, else None."""
        g = self.pullback_gram
        m1, m2 = g[0][1], g[2][3]
        if m1 > 0 and m2 > 0 and g == intmat.block_diag(((0, m1), (-m1, 0)), ((0, m2), (-m2, 0))):
            return (m1, m2)
        return None

    @property
    def is_polarised(self):
        m = self.multipliers
        return m is not None and m[0] == m[1]

    def factor_vectors(self):
        b = self.target.sym.lattice.rational_basis()
        cols = [intmat.matvec(b, c) for c in intmat.columns(self.inclusion)]
        return cols[:2], cols[2:]

    def factor_lattices(self):
        return tuple(Lattice.from_basis(v, 4) for v in self.factor_vectors())

    def to_json(self):
        return {
            "inclusion": [list(r) for r in self.inclusion],
            "degree": self.degree,
            "multipliers": list(self.multipliers) if self.multipliers else None,
        }


def factors_through(w, v):
    """Is ``w.inclusion = v.inclusion @ T`` for an integer matrix ``T``?"""
    t = intmat.solve(v.inclusion, w.inclusion)
    return intmat.is_integral(t)


def _match_spans(model, vecs):
    """Position (0/1) of the model factor whose span contains ``vecs``."""
    for pos, span in enumerate(model.spans()):
        if same_span(span, vecs):
            return pos
    return None


def polarised_isogeny(model, w):
    """Saturate the factors of ``w``; the result is polarised of degree ``n**2``."""
    v1, v2 = w.factor_vectors()
    p1, p2 = _match_spans(model, v1), _match_spans(model, v2)
    if p1 is None or p2 is None or p1 == p2:
        raise InternalConsistencyError("witness factors do not match the model decomposition")
    lam = model.sym.lattice
    s1 = saturate(Lattice.from_basis(v1, 4), lam)
    s2 = saturate(Lattice.from_basis(v2, 4), lam)
    if any(model.sym.pair(x, y) for x in s1.vectors() for y in s2.vectors()):
        raise InternalConsistencyError("saturated factors are not orthogonal")
    out = IsogenyWitness.from_factors(model, s1, s2)
    m = out.multipliers
    if m is None or m[0] != m[1] or out.degree != m[0] ** 2:
        raise InternalConsistencyError("saturated factors do not give a polarised isogeny")
    return out


def kernel_exponent(w):
    """Exponent of ``L / (L1 ⊕ L2)``."""
    if not w.is_polarised:
        raise ValueError("kernel exponent needs a polarised witness")
    return max(intmat.elementary_divisors(w.inclusion))


def random_witness(model, rng, max_index=4):
    """A witness with random finite-index sublattices of the saturated factors."""
    l1, l2 = model.lambdas
    a = rng.randint(1, max_index)
    b = rng.randint(1, max_index)
    m1 = rng.choice(enumerate_sublattices(l1, a))
    m2 = rng.choice(enumerate_sublattices(l2, b))
    if rng.random() < 0.5:
        m1, m2 = m2, m1
    return IsogenyWitness.from_factors(model, m1, m2)


# --- minimal product isogenies ---------------------------------------------------


class MinimalIsogeny(NamedTuple):
    degree: object  # least polarised degree N(s), or None if not reached
    witnesses: list  # all witnesses of that degree
    degree_any: object  # least degree of any product isogeny
    status: str  # "certified" or "inconclusive"
    candidates: int


def _divisor_pairs(m):
    return [(a, m // a) for a in range(1, m + 1) if m % a == 0]


def minimal_product_isogeny(model, max_degree=10_000, budget=DEFAULT_ENUM_BUDGET):
    """Scan N = 1, 2, ... for decomposable sublattices of index N.

    A decomposable sublattice is ``L1 ⊕ L2`` with ``Li ⊆ Vi ∩ L``, so its
    index is ``g * a * b`` where ``g`` is the glue index and ``a, b`` are the
    indices of ``Li`` in the saturations.  Both the least index of any such
    sublattice and the least index with equal multipliers are recorded.
    """
    l1, l2 = model.lambdas
    g = model.glue_index
    degree = degree_any = None
    witnesses = []
    seen = 0
    for n in range(1, max_degree + 1):
        if n % g:
            continue
        for a, b in _divisor_pairs(n // g):
            seen += count_hnf_shapes(2, a) * count_hnf_shapes(2, b)
            if seen > budget:
                raise EnumerationBudgetExceeded()
            if degree_any is None:
                degree_any = n
            # multipliers of L1, L2 are (a, b) times the common multiplier of the saturations
            if a != b:
                continue
            for m1 in enumerate_sublattices(l1, a):
                for m2 in enumerate_sublattices(l2, b):
                    witnesses.append(IsogenyWitness.from_factors(model, m1, m2))
        if witnesses:
            degree = n
            break
    status = "certified" if degree is not None and degree == degree_any else "inconclusive"
    return MinimalIsogeny(degree, witnesses, degree_any, status, seen)


# --- endomorphism data carried along witnesses -------------------------------------


def cm_order_of_factor(model, pos, lat):
    """Multiplier ring of the rank-2 lattice ``lat`` inside CM factor ``pos``."""
    tag = model.tags()[pos]
    on_lat = _action_on(lat.vectors(), list(model.spans()[pos]), tag.action)
    f = multiplier_conductor(tag.order, on_lat)
    return ImaginaryQuadraticOrder.from_conductor(tag.order.fundamental_disc, f)


def source_model(w):
    """The product surface ``E1' x E2'`` at the source of ``w``, as a model."""
    model = w.target
    vecs = w.factor_vectors()
    tags = []
    for vs in vecs:
        pos = _match_spans(model, vs)
        if pos is None:
            raise InternalConsistencyError("witness factors do not match the model decomposition")
        tag = model.tags()[pos]
        if not tag.is_cm():
            tags.append(NonCM())
            continue
        lat = Lattice.from_basis(vs, 4)
        o = cm_order_of_factor(model, pos, lat)
        on_lat = _action_on(list(vs), list(model.spans()[pos]), tag.action)
        # express w_{disc(o)} through w_{disc(tag)} on the source basis
        f_old, f_new, dk = tag.order.conductor, o.conductor, o.fundamental_disc
        shift_old = f_old * dk * (f_old - 1) // 2
        shift_new = f_new * dk * (f_new - 1) // 2
        act = tuple(
            tuple(
                Fraction(f_new, f_old) * (x - (shift_old if i == j else 0)) + (shift_new if i == j else 0)
                for j, x in enumerate(row)
            )
            for i, row in enumerate(on_lat)
        )
        tags.append(CM(o, act))
    e = intmat.identity(4)
    sym = SymplecticLattice(Lattice.standard(4), j_form(2))
    return SplitSurfaceModel(sym, [e[0], e[1]], [e[2], e[3]], tags[0], tags[1])


def direct_sum_model(model):
    """Model of ``E1 x E2`` built from the saturated factors of ``model``."""
    n = isqrt(model.glue_disc().d1)
    w = IsogenyWitness.from_factors(model, *model.lambdas)
    if w.multipliers != (n, n):
        raise InternalConsistencyError("saturated factors carry unequal multipliers")
    return source_model(w)


__all__ = [
    "CM",
    "NonCM",
    "SplitSurfaceModel",
    "IsogenyWitness",
    "MinimalIsogeny",
    "generate_surface",
    "polarised_isogeny",
    "minimal_product_isogeny",
    "kernel_exponent",
    "factors_through",
    "random_witness",
    "source_model",
    "direct_sum_model",
    "cm_order_of_factor",
    "same_span",
]
