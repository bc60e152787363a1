"""Reduction to classical fundamental domains in degrees 1 and 2.

Degree 1: ``F = {|Re z| <= 1/2, |z| >= 1}`` with boundary representatives
``Re z`` in ``[-1/2, 1/2)`` and, on the unit circle, ``Re z <= 0``.

Degree 2: Siegel's conditions.  The working convention for ``Sp_4(Z)`` is
``M^T J M = J`` with ``J = [[0, I], [-I, 0]]`` and ``M = [[A, B], [C, D]]``
acting by ``Z -> (AZ + B)(CZ + D)^-1``.
"""

from dataclasses import dataclass, field
from itertools import product

import mpmath

from . import intmat
from .errors import BoundaryAmbiguityError, ReductionNotConvergedError

DEFAULT_PREC = 128
TOL_BITS = 64
DEFAULT_ITER_CAP = 10_000

_J4 = ((0, 0, 1, 0), (0, 0, 0, 1), (-1, 0, 0, 0), (0, -1, 0, 0))


def tolerance():
    return mpmath.mpf(2) ** -TOL_BITS


@dataclass(frozen=True)
class UpperHalfPoint:
    """A point of the upper half plane (degree 1) or Siegel space (degree 2)."""

    degree: int
    value: object
    prec: int = DEFAULT_PREC

    def __post_init__(self):
        with mpmath.workprec(self.prec):
            tol = tolerance()
            if self.degree == 1:
                v = mpmath.mpc(self.value)
                if v.imag <= tol:
                    raise ValueError("point is not in the upper half plane")
            elif self.degree == 2:
                v = mpmath.matrix(self.value)
                if v.rows != 2 or v.cols != 2 or abs(v[0, 1] - v[1, 0]) > tol:
                    raise ValueError("degree-2 point must be a symmetric 2x2 matrix")
                y = _imag(v)
                if y[0, 0] <= tol or mpmath.det(y) <= tol:
                    raise ValueError("imaginary part is not positive definite")
            else:
                raise ValueError("degree must be 1 or 2")
        object.__setattr__(self, "value", v)


# --- degree 1 -------------------------------------------------------------------


def mobius(g, z):
    (a, b), (c, d) = g
    return (a * z + b) / (c * z + d)


@dataclass(frozen=True)
class H1Reduction:
    point: object
    witness: tuple
    flagged: bool


def _reduce_h1_once(z0, prec):
    with mpmath.workprec(prec):
        tol = tolerance()
        z = mpmath.mpc(z0)
        g = ((1, 0), (0, 1))
        flagged = False
        for _ in range(100_000):
            b = int(mpmath.floor(z.real + mpmath.mpf(1) / 2))
            f = z.real + mpmath.mpf(1) / 2 - b
            if f > 1 - tol:
                b += 1
                flagged = True
            elif f < tol:
                flagged = True
            if b:
                z -= b
                g = intmat.matmul(((1, -b), (0, 1)), g)
            r = abs(z) ** 2
            if r < 1 - tol:
                invert = True
            elif r <= 1 + tol:
                flagged = True
                invert = z.real > tol
                if abs(z.real) <= tol:
                    flagged = True
            else:
                invert = False
            if not invert:
                break
            z = -1 / z
            g = intmat.matmul(((0, -1), (1, 0)), g)
        else:
            raise ReductionNotConvergedError(H1Reduction(z, g, True))
        return g, flagged


def reduce_h1(tau, prec=None):
    """``(point, witness)`` with ``witness . tau`` in the fundamental domain."""
    if not isinstance(tau, UpperHalfPoint):
        tau = UpperHalfPoint(1, tau, prec or DEFAULT_PREC)
    prec = prec or tau.prec
    g, flagged = _reduce_h1_once(tau.value, prec)
    if flagged:
        g2, _ = _reduce_h1_once(tau.value, 2 * prec)
        if g2 != g:
            with mpmath.workprec(2 * prec):
                raise BoundaryAmbiguityError([(mobius(g, tau.value), g), (mobius(g2, tau.value), g2)])
    with mpmath.workprec(prec):
        z = mobius(g, tau.value)
    return H1Reduction(z, g, flagged)


def in_fundamental_domain_h1(z, tol=None):
    tol = tolerance() if tol is None else tol
    return abs(z.real) <= mpmath.mpf(1) / 2 + tol and abs(z) >= 1 - tol


# --- degree 2 -------------------------------------------------------------------


def _imag(z):
    return mpmath.matrix([[z[i, j].imag for j in range(2)] for i in range(2)])


def _real(z):
    return mpmath.matrix([[z[i, j].real for j in range(2)] for i in range(2)])


def _blocks(m):
    a = mpmath.matrix([[m[0][0], m[0][1]], [m[1][0], m[1][1]]])
    b = mpmath.matrix([[m[0][2], m[0][3]], [m[1][2], m[1][3]]])
    c = mpmath.matrix([[m[2][0], m[2][1]], [m[3][0], m[3][1]]])
    d = mpmath.matrix([[m[2][2], m[2][3]], [m[3][2], m[3][3]]])
    return a, b, c, d


def siegel_action(m, z):
    a, b, c, d = _blocks(m)
    return (a * z + b) * mpmath.inverse(c * z + d)


def automorphy_det(m, z):
    _, _, c, d = _blocks(m)
    return abs(mpmath.det(c * z + d))


def is_symplectic(m):
    return intmat.matmul(intmat.matmul(intmat.transpose(m), _J4), m) == _J4


def _embed_gl(u):
    """``diag(U, U^-T)`` for ``U`` in GL_2(Z)."""
    (a, b), (c, d) = u
    det = a * d - b * c
    # U^-T = (1/det) [[d, -c], [-b, a]]
    ut = ((d * det, -c * det), (-b * det, a * det))
    return (
        (a, b, 0, 0),
        (c, d, 0, 0),
        (0, 0, ut[0][0], ut[0][1]),
        (0, 0, ut[1][0], ut[1][1]),
    )


def _translation(s):
    return ((1, 0, s[0][0], s[0][1]), (0, 1, s[1][0], s[1][1]), (0, 0, 1, 0), (0, 0, 0, 1))


def _partial_inversion(k):
    """Invert the k-th diagonal coordinate only."""
    a = [[0, 0], [0, 0]]
    b = [[0, 0], [0, 0]]
    c = [[0, 0], [0, 0]]
    d = [[0, 0], [0, 0]]
    o = 1 - k
    a[o][o] = 1
    d[o][o] = 1
    b[k][k] = -1
    c[k][k] = 1
    return tuple(tuple(r) for r in _from_blocks(a, b, c, d))


def _from_blocks(a, b, c, d):
    return [list(a[0]) + list(b[0]), list(a[1]) + list(b[1]), list(c[0]) + list(d[0]), list(c[1]) + list(d[1])]


def inversion_list():
    """Finite list of candidate elements ``sigma`` for the height-increase step.

    It contains the classical degree-2 generator list: the 27 elements
    ``[[0, -I], [I, S]]`` with ``S`` symmetric and entries in {-1, 0, 1}, the
    partial inversions composed with unit translations, and their conjugates
    by the unipotents ``[[1, -1], [0, 1]]`` and ``[[1, 1], [0, 1]]``.
    """
    out = []
    for s11, s12, s22 in product((-1, 0, 1), repeat=3):
        out.append(tuple(tuple(r) for r in _from_blocks(((0, 0), (0, 0)), ((-1, 0), (0, -1)), ((1, 0), (0, 1)), ((s11, s12), (s12, s22)))))
    for k in (0, 1):
        inv = _partial_inversion(k)
        for e in (-1, 0, 1):
            s = [[0, 0], [0, 0]]
            s[k][k] = e
            out.append(intmat.matmul(inv, _translation(s)))
    for u in (((1, -1), (0, 1)), ((1, 1), (0, 1))):
        conj = _embed_gl(u)
        conj_inv = _embed_gl(intmat.to_int(intmat.inverse(u)))
        inv = _partial_inversion(0)
        for e in (-1, 0, 1):
            s = ((e, 0), (0, 0))
            m = intmat.matmul(intmat.matmul(conj_inv, intmat.matmul(inv, _translation(s))), conj)
            out.append(m)
    return [intmat.as_matrix(m) for m in out]


_SIGMAS = inversion_list()


def _gauss_reduce(y):
    """``U`` in GL_2(Z) with ``U Y U^T`` satisfying 0 <= 2 y12 <= y11 <= y22."""
    u = [[1, 0], [0, 1]]
    y = [[y[0, 0], y[0, 1]], [y[1, 0], y[1, 1]]]

    def apply(m):
        nonlocal y, u
        yy = [[sum(m[i][k] * y[k][l] * m[j][l] for k in range(2) for l in range(2)) for j in range(2)] for i in range(2)]
        y = yy
        u = [[sum(m[i][k] * u[k][j] for k in range(2)) for j in range(2)] for i in range(2)]

    for _ in range(10_000):
        if y[0][0] > y[1][1]:
            apply([[0, 1], [1, 0]])
        q = int(mpmath.nint(y[0][1] / y[0][0]))
        if q:
            apply([[1, 0], [-q, 1]])
        if y[0][0] <= y[1][1] and 2 * abs(y[0][1]) <= y[0][0]:
            break
    if y[0][1] < 0:
        apply([[1, 0], [0, -1]])
    return tuple(tuple(r) for r in u)


@dataclass
class H2Reduction:
    point: object
    witness: tuple
    iterations: int
    converged: bool
    det_im_history: list = field(default_factory=list)

    def certificate_ok(self, tol=None):
        """Imaginary-part determinant never decreases across accepted steps."""
        tol = tolerance() if tol is None else tol
        h = self.det_im_history
        return all(b >= a * (1 - tol) for a, b in zip(h, h[1:]))


def reduce_h2(z, prec=None, iter_cap=DEFAULT_ITER_CAP):
    """Reduce a degree-2 point; the witness is an integral symplectic matrix."""
    if not isinstance(z, UpperHalfPoint):
        z = UpperHalfPoint(2, z, prec or DEFAULT_PREC)
    prec = prec or z.prec
    with mpmath.workprec(prec):
        tol = tolerance()
        z0 = z.value
        cur = z0
        w = intmat.identity(4)
        hist = [mpmath.det(_imag(cur))]
        for it in range(1, iter_cap + 1):
            u = _gauss_reduce(_imag(cur))
            step = _embed_gl(u)
            cur = siegel_action(step, cur)
            w = intmat.matmul(step, w)
            x = _real(cur)
            s = tuple(tuple(-int(mpmath.nint(x[i, j])) for j in range(2)) for i in range(2))
            s = ((s[0][0], s[0][1]), (s[0][1], s[1][1]))
            t = _translation(s)
            cur = siegel_action(t, cur)
            w = intmat.matmul(t, w)
            best, best_val = None, 1 - tol
            for sigma in _SIGMAS:
                v = automorphy_det(sigma, cur)
                if v < best_val:
                    best, best_val = sigma, v
            if best is None:
                point = siegel_action(w, z0)
                return H2Reduction(point, w, it, True, hist)
            cur = siegel_action(best, cur)
            w = intmat.matmul(best, w)
            hist.append(mpmath.det(_imag(cur)))
        res = H2Reduction(siegel_action(w, z0), w, iter_cap, False, hist)
        raise ReductionNotConvergedError(res)


def is_reduced_h2(z, tol=None):
    """Post-hoc check of the degree-2 reduction conditions."""
    tol = tolerance() if tol is None else tol
    y = _imag(z)
    x = _real(z)
    half = mpmath.mpf(1) / 2
    mink = -tol <= 2 * y[0, 1] <= y[0, 0] + tol and y[0, 0] <= y[1, 1] + tol
    real_ok = all(abs(x[i, j]) <= half + tol for i in range(2) for j in range(2))
    inv_ok = all(automorphy_det(s, z) >= 1 - tol for s in _SIGMAS)
    return mink and real_ok and inv_ok
