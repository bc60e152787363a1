"""Cayley graphs of SL_2(Z/n) and Sp_4(Z/n): BFS distances and short lifts.

Elements are flattened row-major tuples reduced into ``[0, n)``; words act
by right multiplication, so the element at distance L is ``s_1 s_2 ... s_L``
and its lift is the same product of integral generators.
"""

import math
import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

from sympy import factorint

from . import intmat
from .errors import BudgetExceeded, NotInGroupError
from .fitting import fit_power
from .heights import height_h1_matrix

DEFAULT_BFS_CAP = 10**7
DEFAULT_LIFT_LIMIT = 200_000

_S = ((0, -1), (1, 0))
_T = ((1, 1), (0, 1))


def sl2_generators():
    """``S, S^-1, T, T^-1``."""
    return [_S, ((0, 1), (-1, 0)), _T, ((1, -1), (0, 1))]


def sp4_generators():
    """``J^{±1}`` and ``[[I, ±B], [0, I]]`` for ``B`` in {E11, E22, E12 + E21}."""
    j = ((0, 0, 1, 0), (0, 0, 0, 1), (-1, 0, 0, 0), (0, -1, 0, 0))
    jinv = tuple(tuple(-x for x in r) for r in j)
    gens = [j, jinv]
    for b in (((1, 0), (0, 0)), ((0, 0), (0, 1)), ((0, 1), (1, 0))):
        for s in (1, -1):
            gens.append(
                (
                    (1, 0, s * b[0][0], s * b[0][1]),
                    (0, 1, s * b[1][0], s * b[1][1]),
                    (0, 0, 1, 0),
                    (0, 0, 0, 1),
                )
            )
    return gens


def group_order(n, degree=2):
    """``|SL_2(Z/n)|`` or ``|Sp_4(Z/n)|`` from the classical product formulas."""
    if n == 1:
        return 1
    if degree == 2:
        out = Fraction(n**3)
        for p in factorint(n):
            out *= 1 - Fraction(1, p**2)
    else:
        out = Fraction(n**10)
        for p in factorint(n):
            out *= (1 - Fraction(1, p**2)) * (1 - Fraction(1, p**4))
    return int(out)


def _flat(m, n):
    return tuple(x % n for row in m for x in row)


def _mul_flat(a, b, k, n):
    if k == 2:
        a0, a1, a2, a3 = a
        b0, b1, b2, b3 = b
        return ((a0 * b0 + a1 * b2) % n, (a0 * b1 + a1 * b3) % n, (a2 * b0 + a3 * b2) % n, (a2 * b1 + a3 * b3) % n)
    return tuple(
        sum(a[i * k + t] * b[t * k + j] for t in range(k)) % n for i in range(k) for j in range(k)
    )


@dataclass
class FiniteMatrixGroupSnapshot:
    """Result of a breadth-first search of a finite matrix group."""

    n: int
    dim: int
    generators: list
    order: int
    diameter: int
    distance: dict = field(repr=False)
    parent: dict = field(repr=False)
    elements: list = field(repr=False)

    def word(self, target):
        """Generator indices of a shortest word for ``target`` (a flat tuple)."""
        if target not in self.distance:
            raise NotInGroupError()
        out = []
        x = target
        while self.parent[x] is not None:
            x, g = self.parent[x]
            out.append(g)
        return out[::-1]

    def lift(self, target):
        m = intmat.identity(self.dim)
        for g in self.word(target):
            m = intmat.matmul(m, self.generators[g])
        return m

    def all_lifts(self):
        """Lifts of every element, built incrementally along the BFS tree."""
        lifts = {self.elements[0]: intmat.identity(self.dim)}
        for x in self.elements[1:]:
            p, g = self.parent[x]
            lifts[x] = intmat.matmul(lifts[p], self.generators[g])
        return lifts


def _right_multiplier(g, k, n):
    """``x -> x g`` on flat elements, using only the nonzero entries of ``g``."""
    if k == 2:
        return lambda x: _mul_flat(x, g, 2, n)
    cols = [[(t, g[t * k + j]) for t in range(k) if g[t * k + j]] for j in range(k)]

    def act(x):
        return tuple(
            sum(c * x[i * k + t] for t, c in col) % n for i in range(k) for col in cols
        )

    return act


def cayley_bfs(n, degree=2, cap=DEFAULT_BFS_CAP):
    """Exact BFS distances from the identity in ``SL_2(Z/n)`` or ``Sp_4(Z/n)``."""
    if n < 1:
        raise ValueError("modulus must be positive")
    gens = sl2_generators() if degree == 2 else sp4_generators()
    k = 2 if degree == 2 else 4
    expected = group_order(n, degree)
    if expected > cap:
        raise BudgetExceeded(f"group order {expected} exceeds the BFS cap {cap}")
    flat_gens = [_right_multiplier(_flat(g, n), k, n) for g in gens]
    e = _flat(intmat.identity(k), n)
    dist = {e: 0}
    parent = {e: None}
    order = [e]
    queue = deque([e])
    while queue:
        x = queue.popleft()
        dx = dist[x] + 1
        for gi, g in enumerate(flat_gens):
            y = g(x)
            if y not in dist:
                dist[y] = dx
                parent[y] = (x, gi)
                order.append(y)
                queue.append(y)
    return FiniteMatrixGroupSnapshot(
        n, k, gens, len(order), dist[order[-1]], dist, parent, order
    )


def lift_representative(snapshot, target):
    """Integral lift (product of generators along a shortest word) of ``target``."""
    t = _flat(target, snapshot.n) if isinstance(target[0], (tuple, list)) else tuple(x % snapshot.n for x in target)
    return snapshot.lift(t)


def lift_bound_holds(lift, length, dim):
    """``H_1(lift) <= dim^(L-1) * 1^L`` for a word of length ``L`` in height-1 generators."""
    if length == 0:
        return height_h1_matrix(lift) == 1
    return height_h1_matrix(lift) <= dim ** (length - 1)


def check_lift(snapshot, target, lift):
    """Exact congruence, determinant and height-chain checks for a lift."""
    if _flat(lift, snapshot.n) != target:
        return False
    if intmat.det(lift) != 1:
        return False
    return lift_bound_holds(lift, snapshot.distance[target], snapshot.dim)


@dataclass(frozen=True)
class ScanRow:
    n: int
    order: int
    diameter: int
    max_h1: int
    mode: str
    lifts_ok: bool

    def to_csv_row(self):
        return [self.n, self.order, self.diameter, self.max_h1, self.mode]


def scan_modulus(n, degree=2, cap=DEFAULT_BFS_CAP, lift_limit=DEFAULT_LIFT_LIMIT, samples=2000, seed=0):
    snap = cayley_bfs(n, degree, cap)
    if snap.order <= lift_limit:
        lifts = snap.all_lifts()
        ok = all(check_lift(snap, x, m) for x, m in lifts.items())
        max_h1 = max(height_h1_matrix(m) for m in lifts.values())
        mode = "full"
    else:
        rng = random.Random(f"lift/{seed}/{n}/{degree}")
        picks = [rng.choice(snap.elements) for _ in range(samples)]
        ok, max_h1 = True, 1
        for x in picks:
            m = snap.lift(x)
            ok = ok and check_lift(snap, x, m)
            max_h1 = max(max_h1, height_h1_matrix(m))
        mode = "sampled"
    return ScanRow(n, snap.order, snap.diameter, max_h1, mode, ok)


def summarise_scan(rows):
    """Fits of diameter against log(3n) and of log max H_1 against log n."""
    out = {"rows": rows, "diameter_fit": None, "height_fit": None}
    if len(rows) >= 2:
        diam = fit_power([3 * r.n for r in rows], [r.diameter for r in rows], linear_y=True)
        height = fit_power([r.n for r in rows], [r.max_h1 for r in rows])
        out["diameter_fit"] = diam.to_json()
        out["height_fit"] = height.to_json()
    fits = [out["diameter_fit"], out["height_fit"]]
    out["ok"] = all(r.lifts_ok for r in rows) and all(
        f is None or (not f["degenerate"] and math.isfinite(f["slope"])) for f in fits
    )
    return out


def diameter_scan(n_list, degree=2, cap=DEFAULT_BFS_CAP, lift_limit=DEFAULT_LIFT_LIMIT, seed=0):
    """Rows per modulus plus the fits of :func:`summarise_scan`."""
    return summarise_scan([scan_modulus(n, degree, cap, lift_limit, seed=seed) for n in n_list])
