"""Hecke coset representatives for SL_2 and the height versus det* experiment."""

import math
from dataclasses import asdict, dataclass

import mpmath

from . import intmat
from .errors import BoundaryAmbiguityError, ReductionNotConvergedError
from .fitting import fit_power
from .heights import detstar, height_h1_matrix
from .lattice import DEFAULT_ENUM_BUDGET, Lattice, enumerate_sublattices
from .reduction import DEFAULT_PREC, UpperHalfPoint, in_fundamental_domain_h1, mobius, reduce_h1


def hecke_cosets_sl2(n, budget=DEFAULT_ENUM_BUDGET):
    """Representatives ``[[a, b], [0, d]]`` with ``ad = n`` and ``0 <= b < d``.

    These are the transposes of the column HNFs of index-``n`` sublattices
    of Z^2, listed in canonical order.
    """
    subs = enumerate_sublattices(Lattice.standard(2), n, budget=budget)
    return [intmat.transpose(s.basis) for s in subs]


def base_point(sample=0, prec=DEFAULT_PREC):
    """Deterministic generic base points; sample 0 is ``sqrt(2)/10 + i sqrt(3)``."""
    with mpmath.workprec(prec):
        re = mpmath.sqrt(2) / 10 + mpmath.mpf(sample) / 7
        im = mpmath.sqrt(3 + sample)
        return mpmath.mpc(re, im)


@dataclass(frozen=True)
class HeightRow:
    n: int
    rep_index: int
    detstar: int
    h1_witness: int
    reduced_flag: bool

    def to_json(self):
        return asdict(self)


def height_vs_detstar_experiment(n_max, samples=1, prec=DEFAULT_PREC, budget=DEFAULT_ENUM_BUDGET, n_min=1):
    """Reduce ``g . tau0`` for every Hecke representative ``g`` with ``det g <= n_max``.

    Each row records ``det*(g)`` and the 1-height of ``gamma g`` where
    ``gamma`` is the reduction witness, so that ``gamma g tau0`` lies in the
    fundamental domain.  ``rep_index`` runs over (sample, coset) pairs.
    """
    rows = []
    taus = [base_point(s, prec) for s in range(samples)]
    for n in range(n_min, n_max + 1):
        cosets = hecke_cosets_sl2(n, budget=budget)
        idx = 0
        for tau in taus:
            for g in cosets:
                ok = True
                with mpmath.workprec(prec):
                    try:
                        red = reduce_h1(UpperHalfPoint(1, mobius(g, tau), prec), prec)
                        gamma = red.witness
                        ok = intmat.det(gamma) == 1 and in_fundamental_domain_h1(red.point)
                    except (BoundaryAmbiguityError, ReductionNotConvergedError):
                        gamma, ok = intmat.identity(2), False
                h = intmat.matmul(gamma, g)
                rows.append(HeightRow(n, idx, detstar(g), height_h1_matrix(h), ok))
                idx += 1
    return rows


def summarise_height_rows(rows):
    """Max 1-height per det* value and a log-log envelope fit."""
    best = {}
    for r in rows:
        best[r.detstar] = max(best.get(r.detstar, 0), r.h1_witness)
    xs = sorted(best)
    ys = [best[x] for x in xs]
    use = [(x, y) for x, y in zip(xs, ys) if x > 1]
    fit = fit_power([x for x, _ in use], [y for _, y in use]) if len(use) >= 2 else None
    ok = (
        fit is not None
        and not fit.degenerate
        and math.isfinite(fit.slope)
        and fit.slope > 0
        and all(r.reduced_flag for r in rows)
    )
    return {
        "max_h1": [{"detstar": x, "max_h1": y} for x, y in zip(xs, ys)],
        "fit": fit.to_json() if fit else None,
        "ok": ok,
    }
