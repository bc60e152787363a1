"""Imaginary quadratic orders, product orders, unit indices and composita.

Coordinates: the maximal order ``O_K`` of discriminant ``dK`` has Z-basis
``(1, w)`` with ``w = (dK + sqrt(dK)) / 2``, so ``w^2 = dK*w - (dK^2 - dK)/4``.
A product order lives in ``Z^r`` with the concatenated bases of its maximal
components (``(1,)`` for a rational-integer component).
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import gcd, isqrt, prod

from sympy import factorint

from . import intmat
from .errors import CompositumDegenerateError, PrecisionEscalationError
from .lattice import Lattice, enumerate_sublattices, tri_member


def _squarefree_part(n):
    s = -1 if n < 0 else 1
    for p, e in factorint(abs(n)).items():
        if e % 2:
            s *= p
    return s


def is_fundamental(d):
    if d % 4 == 1:
        return _squarefree_part(d) == d
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and _squarefree_part(m) == m
    return False


def _fundamental_and_conductor(d):
    best = None
    for f in range(1, isqrt(abs(d)) + 1):
        if d % (f * f) == 0 and (d // (f * f)) % 4 in (0, 1) and is_fundamental(d // (f * f)):
            best = (d // (f * f), f)
    return best


@dataclass(frozen=True)
class ImaginaryQuadraticOrder:
    """The order of discriminant ``disc = conductor**2 * fundamental_disc``."""

    disc: int

    def __post_init__(self):
        d = self.disc
        if not isinstance(d, int) or d >= 0 or d % 4 not in (0, 1):
            raise ValueError(f"not an imaginary quadratic discriminant: {d}")

    @classmethod
    def from_conductor(cls, fundamental_disc, f):
        if not is_fundamental(fundamental_disc) or fundamental_disc >= 0:
            raise ValueError("not a negative fundamental discriminant")
        return cls(f * f * fundamental_disc)

    @property
    def fundamental_disc(self):
        return _fundamental_and_conductor(self.disc)[0]

    @property
    def conductor(self):
        return _fundamental_and_conductor(self.disc)[1]

    def is_maximal(self):
        return self.conductor == 1

    def maximal(self):
        return ImaginaryQuadraticOrder(self.fundamental_disc)

    def same_field(self, other):
        return self.fundamental_disc == other.fundamental_disc

    def omega_matrix(self):
        """Matrix of multiplication by ``w_disc`` on the basis ``(1, w_disc)``."""
        d = self.disc
        return ((0, -(d * d - d) // 4), (1, d))

    def trace_gram(self):
        d = self.disc
        return ((2, d), (d, (d * d + d) // 2))

    def to_json(self):
        return {"disc": self.disc, "conductor": self.conductor}

    @classmethod
    def from_json(cls, obj):
        o = cls(obj["disc"])
        if "conductor" in obj and obj["conductor"] != o.conductor:
            raise ValueError("conductor disagrees with discriminant")
        return o


# --- arithmetic in maximal components ---------------------------------------


def _mul_component(comp, x, y):
    if comp is None:
        return (x[0] * y[0],)
    dk = comp.disc
    nw = (dk * dk - dk) // 4
    a, b = x
    c, e = y
    return (a * c - b * e * nw, a * e + b * c + b * e * dk)


def _trace_component(comp):
    if comp is None:
        return ((1,),)
    return comp.trace_gram()


def _norm_component(comp, x):
    if comp is None:
        return x[0]
    dk = comp.disc
    a, b = x
    return a * a + dk * a * b + b * b * ((dk * dk - dk) // 4)


def _adjugate_component(comp, x):
    """``y`` with ``x * y == N(x)``."""
    if comp is None:
        return (1,)
    a, b = x
    return (a + b * comp.disc, -b)


def _dims(components):
    return [1 if c is None else 2 for c in components]


def _split(components, v):
    out, pos = [], 0
    for k in _dims(components):
        out.append(tuple(v[pos : pos + k]))
        pos += k
    return out


@dataclass(frozen=True)
class ProductOrder:
    """A subring of finite index in ``O_1 x ... x O_s`` (each ``O_i`` maximal).

    ``components`` holds ``None`` for a rational-integer factor and a
    maximal :class:`ImaginaryQuadraticOrder` otherwise; ``lattice`` is the
    order in the coordinates described in the module docstring.
    """

    components: tuple
    lattice: Lattice

    def __post_init__(self):
        comps = tuple(None if c is None else c.maximal() for c in self.components)
        object.__setattr__(self, "components", comps)
        if self.lattice.rank != self.rank or not self.lattice.is_integral():
            raise ValueError("order lattice must be full rank and integral")

    @classmethod
    def maximal_of(cls, components):
        comps = tuple(None if c is None else c.maximal() for c in components)
        return cls(comps, Lattice.standard(sum(_dims(comps))))

    @classmethod
    def from_quadratic(cls, *orders):
        """Direct product of quadratic orders (``None`` for a Z factor)."""
        vecs, pos = [], 0
        r = sum(_dims(orders))
        for o in orders:
            if o is None:
                vecs.append(tuple(1 if i == pos else 0 for i in range(r)))
                pos += 1
                continue
            f = o.conductor
            vecs.append(tuple(1 if i == pos else 0 for i in range(r)))
            vecs.append(tuple(f if i == pos + 1 else 0 for i in range(r)))
            pos += 2
        return cls(tuple(orders), Lattice.from_basis(vecs, r))

    @property
    def rank(self):
        return sum(_dims(self.components))

    @property
    def index(self):
        return self.lattice.volume()

    def maximal(self):
        return ProductOrder.maximal_of(self.components)

    def one(self):
        out = []
        for k in _dims(self.components):
            out += [1] + [0] * (k - 1)
        return tuple(out)

    def mul(self, x, y):
        out = ()
        for comp, a, b in zip(self.components, _split(self.components, x), _split(self.components, y)):
            out += _mul_component(comp, a, b)
        return out

    def contains(self, v):
        # full-rank integral HNF: triangular back-substitution suffices
        if not all(isinstance(x, int) for x in v):
            return self.lattice.contains(v)
        return tri_member(self.lattice.basis, v)

    def is_ring(self):
        basis = self.lattice.vectors()
        if not self.contains(self.one()):
            return False
        return all(self.contains(self.mul(x, y)) for x in basis for y in basis)

    def maximal_trace_gram(self):
        return intmat.block_diag(*[_trace_component(c) for c in self.components])

    def to_json(self):
        return {
            "components": [None if c is None else c.to_json() for c in self.components],
            "basis": [list(r) for r in self.lattice.basis],
            "index": self.index,
        }

    @classmethod
    def from_json(cls, obj):
        comps = tuple(None if c is None else ImaginaryQuadraticOrder.from_json(c) for c in obj["components"])
        lat = Lattice.from_basis(intmat.columns(intmat.as_matrix(obj["basis"])), sum(_dims(comps)))
        return cls(comps, lat)


def trace_form_disc(o):
    """Determinant of the trace form on a Z-basis of ``o``."""
    if isinstance(o, ImaginaryQuadraticOrder):
        return intmat.det(o.trace_gram())
    b = o.lattice.rational_basis()
    g = intmat.matmul(intmat.matmul(intmat.transpose(b), o.maximal_trace_gram()), b)
    return intmat.det(intmat.to_int(g))


def enumerate_suborders(maximal, c, budget=None):
    """All subrings of index ``c`` in a maximal product order."""
    kwargs = {} if budget is None else {"budget": budget}
    out = []
    for sub in enumerate_sublattices(maximal.lattice, c, **kwargs):
        o = ProductOrder(maximal.components, sub)
        if o.is_ring():
            out.append(o)
    return out


# --- unit indices -------------------------------------------------------------

ENUM_LIMIT = 200_000


def _is_unit_mod_p(components, v, p):
    return all(_norm_component(c, x) % p for c, x in zip(components, _split(components, v)))


def _inverse_mod(components, v, q, p):
    out = ()
    for c, x in zip(components, _split(components, v)):
        ninv = pow(_norm_component(c, x) % q, -1, q)
        out += tuple(ninv * y % q for y in _adjugate_component(c, x))
    return out


@lru_cache(maxsize=None)
def _units_mod_p(components, p):
    r = sum(_dims(components))
    return sum(1 for v in product(range(p), repeat=r) if _is_unit_mod_p(components, v, p))


def _count_units_maximal(components, p, k):
    r = sum(_dims(components))
    return _units_mod_p(components, p) * p ** ((k - 1) * r)


def _local_unit_index(sub, p, k):
    """Enumerate ``R / p^k O`` and count units; needs ``p^k O ⊆ R_p``."""
    comps = sub.components
    r = sub.rank
    q = p**k
    gens = sub.lattice.vectors() + [tuple(q if i == j else 0 for i in range(r)) for j in range(r)]
    h = Lattice.span(gens, r).basis
    cols = intmat.columns(h)
    ranges = [range(q // h[j][j]) for j in range(r)]
    units = 0
    for ys in product(*ranges):
        v = tuple(sum(y * col[i] for y, col in zip(ys, cols)) % q for i in range(r))
        if _is_unit_mod_p(comps, v, p):
            inv = _inverse_mod(comps, v, q, p)
            # R_p is a ring, so the inverse of a unit of R must land in R
            if not tri_member(h, inv):
                raise PrecisionEscalationError("inverse of a unit left the order")
            units += 1
    total = _count_units_maximal(comps, p, k)
    if total % units:
        raise PrecisionEscalationError("unit count does not divide group order")
    return total // units


def _residue_unit_index(sub, p):
    """Same index from the image of R in O / pO.

    ``p`` lies in the Jacobson radical of ``R_p``, so an element of ``R_p``
    is a unit iff its residue is; hence
    ``[O_p^x : R_p^x] = c_p * u(O/p) * |Rbar| / (p^r * u(Rbar))``.
    """
    comps = sub.components
    r = sub.rank
    gens = sub.lattice.vectors() + [tuple(p if i == j else 0 for i in range(r)) for j in range(r)]
    h = Lattice.span(gens, r).basis
    cols = intmat.columns(h)
    size = 1
    for j in range(r):
        size *= p // h[j][j]
    units = 0
    for ys in product(*[range(p // h[j][j]) for j in range(r)]):
        v = tuple(sum(y * col[i] for y, col in zip(ys, cols)) % p for i in range(r))
        units += _is_unit_mod_p(comps, v, p)
    c_p = p ** factorint(sub.index).get(p, 0)
    num = c_p * _units_mod_p(comps, p) * size
    den = p**r * units
    if num % den:
        raise PrecisionEscalationError("residue count is not integral")
    return num // den


def local_unit_index(maximal, sub, p, enum_limit=ENUM_LIMIT):
    """``[O_p^x : R_p^x]`` via the finite quotient ``O / p^k O``.

    ``k`` is the exponent of ``p`` in the largest elementary divisor of
    ``O / R``; the count is rechecked against the residue formula.
    """
    divs = intmat.elementary_divisors(intmat.to_int(sub.lattice.rational_basis()))
    k0 = max((factorint(d).get(p, 0) for d in divs), default=0)
    if k0 == 0:
        return 1
    a = _residue_unit_index(sub, p)
    if p ** (k0 * sub.rank) // p ** factorint(sub.index).get(p, 0) <= enum_limit:
        if _local_unit_index(sub, p, k0) != a:
            raise PrecisionEscalationError()
    return a


def unit_index_profinite(maximal, sub):
    """``prod_p [O_p^x : R_p^x]`` over the primes dividing ``[O : R]``."""
    if sub.components != maximal.components:
        raise ValueError("orders live in different algebras")
    if not maximal.lattice.contains_lattice(sub.lattice):
        raise ValueError("sub is not contained in maximal")
    c = sub.index // maximal.index
    return prod(local_unit_index(maximal, sub, p) for p in factorint(c))


# --- biquadratic composita ---------------------------------------------------


def _charpoly(m):
    """Characteristic polynomial of an integer matrix (monic, descending), Faddeev-LeVerrier."""
    n = len(m)
    coeffs = [1]
    mk = intmat.zeros(n, n)
    for k in range(1, n + 1):
        prev = tuple(
            tuple(x + (coeffs[-1] if i == j else 0) for j, x in enumerate(row)) for i, row in enumerate(mk)
        )
        mk = intmat.matmul(m, prev)
        # exact: the coefficients of an integer matrix's charpoly are integers
        coeffs.append(-sum(mk[i][i] for i in range(n)) // k)
    return coeffs


class _Biquadratic:
    """Arithmetic in Q(sqrt a, sqrt b) on the basis (1, sqrt a, sqrt b, sqrt c)."""

    def __init__(self, a, b):
        self.a, self.b = a, b
        self.g = gcd(a, b)
        self.c = a * b // (self.g * self.g)
        g = self.g
        # products of basis elements as coordinate vectors
        t = {}
        t[1, 1] = (a, 0, 0, 0)
        t[2, 2] = (b, 0, 0, 0)
        t[3, 3] = (self.c, 0, 0, 0)
        t[1, 2] = (0, 0, 0, g)
        t[1, 3] = (0, 0, a // g, 0)
        t[2, 3] = (0, b // g, 0, 0)
        self.table = t

    def basis_product(self, i, j):
        if i == 0:
            return tuple(1 if k == j else 0 for k in range(4))
        if j == 0:
            return tuple(1 if k == i else 0 for k in range(4))
        return self.table[min(i, j), max(i, j)]

    def mul(self, x, y):
        out = [0] * 4
        for i in range(4):
            if not x[i]:
                continue
            for j in range(4):
                if y[j]:
                    for k, z in enumerate(self.basis_product(i, j)):
                        out[k] += x[i] * y[j] * z
        return tuple(out)

    def mult_matrix(self, x):
        cols = [self.mul(x, tuple(1 if k == j else 0 for k in range(4))) for j in range(4)]
        return intmat.from_columns(cols, 4)

    def trace(self, x):
        return 4 * x[0]

    def is_integral_over(self, c, den):
        """Is ``c / den`` an algebraic integer (``c`` an integer vector)?"""
        cp = _charpoly(self.mult_matrix(c))
        return all(a % den**i == 0 for i, a in enumerate(cp))


def compositum_disc(o1, o2):
    """|disc| of the biquadratic field generated by the fields of ``o1``, ``o2``."""
    d1, d2 = o1.fundamental_disc, o2.fundamental_disc
    if d1 == d2:
        raise CompositumDegenerateError()
    return _compositum_disc(min(d1, d2), max(d1, d2))


@lru_cache(maxsize=None)
def _compositum_disc(d1, d2):
    f = _Biquadratic(_squarefree_part(d1), _squarefree_part(d2))
    # every algebraic integer of the field has the form c / 4 on this basis
    integral = []
    for cs in product(range(4), repeat=4):
        if any(cs) and f.is_integral_over(cs, 4):
            integral.append(tuple(Fraction(c, 4) for c in cs))
    unit = [tuple(1 if i == j else 0 for i in range(4)) for j in range(4)]
    ring = Lattice.span(integral + unit, 4)
    vs = ring.vectors()
    gram = [[f.trace(f.mul(x, y)) for y in vs] for x in vs]
    return int(abs(intmat.det(intmat.as_matrix(gram))))


# --- endomorphism rings of split models ----------------------------------------


def _factor_operators(model):
    """Ambient matrices (rational) of the Z-basis of the maximal product order."""
    f1 = list(model.factor1)
    f2 = list(model.factor2)
    p = intmat.from_columns(f1 + f2, 4)
    pinv = intmat.inverse(p)
    zero2 = intmat.zeros(2, 2)
    id2 = intmat.identity(2)
    blocks = []
    components = []
    for pos, tag in enumerate((model.tag1, model.tag2)):
        embed = (lambda m: (m, zero2)) if pos == 0 else (lambda m: (zero2, m))
        blocks.append(embed(id2))
        if tag.is_cm():
            o = tag.order
            f, dk = o.conductor, o.fundamental_disc
            shift = f * dk * (f - 1) // 2
            wk = tuple(
                tuple(Fraction(x - (shift if i == j else 0), f) for j, x in enumerate(row))
                for i, row in enumerate(tag.action)
            )
            blocks.append(embed(wk))
            components.append(o.maximal())
        else:
            components.append(None)
    ops = [intmat.matmul(intmat.matmul(p, intmat.block_diag(*blk)), pinv) for blk in blocks]
    return tuple(components), ops


def end_ring_of_surface(model):
    """Stabiliser of the lattice inside the maximal order acting factorwise."""
    components, ops = _factor_operators(model)
    b = model.sym.lattice.rational_basis()
    binv = intmat.inverse(b)
    local = [intmat.matmul(intmat.matmul(binv, x), b) for x in ops]
    den = 1
    for x in local:
        den = den * intmat.denominator_lcm(x) // gcd(den, intmat.denominator_lcm(x))
    r = len(local)
    a = tuple(
        tuple(int(local[j][i][k] * den) for j in range(r))
        for i in range(4)
        for k in range(4)
    )
    d, _, v = intmat.snf(a)
    scales = [den // gcd(den, d[i][i]) if i < len(d) else 1 for i in range(r)]
    cols = [tuple(v[i][j] * scales[j] for i in range(r)) for j in range(r)]
    return ProductOrder(components, Lattice.from_basis(cols, r))
