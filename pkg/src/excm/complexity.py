"""Complexities of E x CM points: the isogeny measure and a surrogate built
from the splitting-field discriminant and a profinite unit index."""

import math
from dataclasses import asdict, dataclass

from .errors import FamilyTooSmallError
from .fitting import fit_power
from .lattice import DEFAULT_ENUM_BUDGET
from .orders import (
    ImaginaryQuadraticOrder,
    compositum_disc,
    end_ring_of_surface,
    unit_index_profinite,
)
from .surfaces import cm_order_of_factor, generate_surface, minimal_product_isogeny

MIN_FAMILY = 50


@dataclass(frozen=True)
class ComplexityReport:
    n_min: int
    cm_disc_abs: int
    delta_prime: int
    d_t: object = None
    unit_index: object = None
    delta_surrogate: object = None
    # delta_surrogate is max(D_T, unit index): it stands in for the adelic index
    surrogate: bool = True
    status: str = "certified"

    def __post_init__(self):
        if self.delta_prime != max(self.n_min, self.cm_disc_abs):
            raise ValueError("delta_prime must be max(n_min, cm_disc_abs)")

    def to_json(self):
        return asdict(self)


def delta_prime(model, budget=DEFAULT_ENUM_BUDGET):
    pos = model.cm_position()
    if pos is None:
        raise ValueError("model needs exactly one CM factor")
    mi = minimal_product_isogeny(model, budget=budget)
    if mi.degree is None:
        raise ValueError("minimal isogeny not reached within the scan")
    lat = mi.witnesses[0].factor_lattices()[pos]
    order = cm_order_of_factor(model, pos, lat)
    d = abs(order.disc)
    return ComplexityReport(mi.degree, d, max(mi.degree, d), status=mi.status)


def default_partner(cm_disc):
    """A CM discriminant whose field differs from that of ``cm_disc``."""
    return -4 if ImaginaryQuadraticOrder(cm_disc).fundamental_disc == -3 else -3


def delta_surrogate(model, special_partner_disc=None, budget=DEFAULT_ENUM_BUDGET):
    base = delta_prime(model, budget=budget)
    cm = model.tags()[model.cm_position()].order
    if special_partner_disc is None:
        special_partner_disc = default_partner(cm.disc)
    partner = ImaginaryQuadraticOrder(special_partner_disc)
    d_t = compositum_disc(cm.maximal(), partner.maximal())
    r = end_ring_of_surface(model)
    ui = unit_index_profinite(r.maximal(), r)
    return ComplexityReport(
        base.n_min,
        base.cm_disc_abs,
        base.delta_prime,
        d_t=d_t,
        unit_index=ui,
        delta_surrogate=max(d_t, ui),
        status=base.status,
    )


def cycle_family_labels(seed, ns=range(1, 7), discs=(-3, -4, -7, -8, -11), per_cell=2):
    """Generator seeds of :func:`cycle_family`, in the same order."""
    return [f"{seed}/{rep}" for rep in range(per_cell) for _ in ns for _ in discs]


def cycle_family(seed, ns=range(1, 7), discs=(-3, -4, -7, -8, -11), per_cell=2):
    """Seeded family covering every (n, disc) pair ``per_cell`` times."""
    out = []
    for rep in range(per_cell):
        for n in ns:
            for d in discs:
                out.append(generate_surface(f"{seed}/{rep}", n, d))
    return out


def comparison_experiment(family, special_partner_disc=None, budget=DEFAULT_ENUM_BUDGET, labels=None):
    """Envelope exponents relating Δ′ and the surrogate complexity.

    The surrogate at the level of the curve is ``max(N, max(D_T, unit index))``.
    Returns rows plus two fits: ``upper`` regresses log Δ′ on log Δ,
    ``reverse`` regresses log Δ on log Δ′.  Exponents:
    Δ′ <= C Δ^a with ``a = upper.slope``, and Δ′ >= c Δ^b with
    ``b = 1 / reverse.slope``.
    """
    if len(family) < MIN_FAMILY:
        raise FamilyTooSmallError(f"family has {len(family)} members, need {MIN_FAMILY}")
    rows = []
    for j, model in enumerate(family):
        rep = delta_surrogate(model, special_partner_disc, budget=budget)
        rows.append(
            {
                "seed": labels[j] if labels else j,
                "n": math.isqrt(model.glue_index),
                "cm_disc": model.tags()[model.cm_position()].order.disc,
                "N": rep.n_min,
                "delta_prime": rep.delta_prime,
                "d_t": rep.d_t,
                "unit_index": rep.unit_index,
                "delta": max(rep.n_min, rep.delta_surrogate),
            }
        )
    xs = [r["delta"] for r in rows]
    ys = [r["delta_prime"] for r in rows]
    out = {"rows": rows, "surrogate": True}
    if len(set(xs)) < 2 or len(set(ys)) < 2:
        out.update(degenerate=True, upper=None, reverse=None, exponents=None, ok=None)
        return out
    up = fit_power(xs, ys)
    rev = fit_power(ys, xs)
    a = up.slope
    b = 1 / rev.slope if rev.slope else math.inf
    ok = all(math.isfinite(e) and e > 0 for e in (a, b))
    out.update(
        degenerate=False,
        upper=up.to_json(),
        reverse=rev.to_json(),
        exponents={"upper": a, "lower": round(b, 9)},
        ok=ok,
    )
    return out
