"""Seeded property suites behind ``excm verify``.

Each suite draws its instances from ``cfg.rng(suite, i)`` and returns a
:class:`SuiteReport`; failing instances are listed by their seed label so
they can be replayed.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from . import intmat
from .complexity import comparison_experiment, cycle_family
from .congruence import _mul_flat, cayley_bfs, diameter_scan, group_order
from .errors import BudgetExceeded, ExcmError
from .heights import AlgebraicInput, detstar, height_hk
from .lattice import Lattice, saturate
from .orders import (
    ImaginaryQuadraticOrder,
    ProductOrder,
    compositum_disc,
    end_ring_of_surface,
    enumerate_suborders,
    trace_form_disc,
    unit_index_profinite,
)
from .reduction import (
    UpperHalfPoint,
    in_fundamental_domain_h1,
    is_reduced_h2,
    is_symplectic,
    mobius,
    reduce_h1,
    reduce_h2,
    tolerance,
)
from .surfaces import (
    direct_sum_model,
    factors_through,
    generate_surface,
    kernel_exponent,
    minimal_product_isogeny,
    polarised_isogeny,
    random_unimodular,
    random_witness,
    same_span,
    source_model,
)
from .symplectic import SymplecticLattice, glue_disc_check, j_form, orthogonal_complement

CM_DISCS = (-3, -4, -7, -8, -11, -12, -15, -16, -19, -20, -24, -27, -28)
PRIMES_50 = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


@dataclass
class SuiteReport:
    suite: str
    instances: int = 0
    failures: list = field(default_factory=list)
    details: dict = field(default_factory=dict)
    budget_exhausted: bool = False

    @property
    def passed(self):
        return not self.failures and not self.budget_exhausted

    def fail(self, seed, reason):
        self.failures.append({"seed": seed, "reason": reason})

    def to_json(self):
        return {
            "suite": self.suite,
            "passed": self.passed,
            "instances": self.instances,
            "failures": self.failures,
            "details": self.details,
            "budget_exhausted": self.budget_exhausted,
        }


def _label(cfg, suite, i):
    return f"{cfg.seed}/{suite}/{i}"


def _run(report, label, check):
    """Run one instance; a False/str result or an exception is a failure."""
    report.instances += 1
    try:
        out = check()
    except BudgetExceeded as e:
        report.budget_exhausted = True
        report.fail(label, f"budget: {type(e).__name__}: {e}")
        return
    except (ExcmError, ValueError, ZeroDivisionError) as e:
        report.fail(label, f"{type(e).__name__}: {e}")
        return
    if out is not True:
        report.fail(label, out or "check failed")


# --- instance generators ------------------------------------------------------------


def glued_instance(cfg, suite, i, max_n=6):
    rng = cfg.rng(suite, i)
    n = rng.randint(1, max_n)
    d = rng.choice(CM_DISCS)
    return n, d, generate_surface(rng, n, d)


def _random_vector(rng, bound=3):
    return tuple(rng.randint(-bound, bound) for _ in range(4))


def plane_instance(rng):
    """A perfect rank-4 lattice with a random primitive plane and its complement."""
    u = random_unimodular(rng, 4)
    gram = intmat.matmul(intmat.matmul(intmat.transpose(u), j_form(2)), u)
    amb = SymplecticLattice(Lattice.standard(4), gram)
    while True:
        v1, v2 = _random_vector(rng), _random_vector(rng)
        if intmat.rank(intmat.from_columns([v1, v2], 4)) < 2 or amb.pair(v1, v2) == 0:
            continue
        l1 = saturate(Lattice.from_basis([v1, v2], 4), amb.lattice)
        return amb, l1, orthogonal_complement(amb, l1)


# --- suites ---------------------------------------------------------------------


def suite_glue_disc(cfg):
    rep = SuiteReport("glue-disc")
    count = cfg.param("count", 1000)
    for i in range(count):
        label = _label(cfg, "glue-disc", i)
        if i % 2 == 0:
            n, _, model = glued_instance(cfg, "glue-disc", i)

            def check(model=model, n=n):
                d1, d2, idx = model.glue_disc()
                return (d1, d2, idx) == (n * n,) * 3 or f"got {(d1, d2, idx)} for n = {n}"

        else:
            amb, l1, l2 = plane_instance(cfg.rng("glue-disc", i))

            def check(amb=amb, l1=l1, l2=l2):
                d1, d2, idx = glue_disc_check(amb, l1, l2)
                r = math.isqrt(idx)
                return (d1 == d2 == idx and r * r == idx) or f"got {(d1, d2, idx)}"

        _run(rep, label, check)
    return rep


def suite_polarised_isogeny(cfg):
    rep = SuiteReport("polarised-isogeny")
    count = cfg.param("count", 500)
    for i in range(count):
        label = _label(cfg, "polarised-isogeny", i)
        n, _, model = glued_instance(cfg, "polarised-isogeny", i, max_n=4)
        w = random_witness(model, cfg.rng("polarised-isogeny/witness", i))

        def check(model=model, w=w, n=n):
            v = polarised_isogeny(model, w)
            if v.multipliers != (n, n):
                return f"multipliers {v.multipliers}, expected {(n, n)}"
            if v.degree != n * n or v.degree > w.degree:
                return f"degree {v.degree} (input {w.degree})"
            if not factors_through(w, v):
                return "input does not factor through the output"
            return kernel_exponent(v) == n or "kernel exponent differs from n"

        _run(rep, label, check)
    return rep


def min_isogeny_instance(cfg, i):
    return glued_instance(cfg, "min-isogeny", i, max_n=cfg.param("max_n", 4))


def suite_min_isogeny(cfg):
    rep = SuiteReport("min-isogeny")
    count = cfg.param("count", 200)
    for i in range(count):
        label = _label(cfg, "min-isogeny", i)
        n, _, model = min_isogeny_instance(cfg, i)

        def check(model=model, n=n):
            mi = minimal_product_isogeny(model, budget=cfg.caps.enum_budget)
            if mi.status != "certified" or mi.degree != n * n:
                return f"N = {mi.degree} ({mi.status}), expected {n * n}"
            spans = model.spans()
            for w in mi.witnesses:
                v1, v2 = w.factor_vectors()
                direct = same_span(v1, spans[0]) and same_span(v2, spans[1])
                swapped = same_span(v1, spans[1]) and same_span(v2, spans[0])
                if not (direct or swapped):
                    return "minimal witnesses disagree on factor spans"
                if not w.is_polarised or kernel_exponent(w) != n:
                    return "kernel exponent differs from n"
            return True

        _run(rep, label, check)
    return rep


PRODUCT_ALGEBRAS = (
    (None, -4),
    (None, -3),
    (None, -7),
    (-4, -3),
)


def _components(algebra):
    return tuple(None if d is None else ImaginaryQuadraticOrder(d) for d in algebra)


def _field_disc(comp):
    return 1 if comp is None else comp.disc


def check_suborders(cfg, rep, max_index):
    for algebra in cfg.param("algebras", PRODUCT_ALGEBRAS):
        comps = _components(algebra)
        m = ProductOrder.maximal_of(comps)
        base = trace_form_disc(m)
        want = math.prod(_field_disc(c) for c in comps) if len(comps) > 1 else _field_disc(comps[0])
        rep.instances += 1
        if base != want:
            rep.fail(f"{algebra}", f"maximal disc {base}, expected {want}")
        for c in range(1, max_index + 1):
            for j, sub in enumerate(enumerate_suborders(m, c, budget=cfg.caps.enum_budget)):

                def check(sub=sub, c=c, m=m, base=base):
                    if trace_form_disc(sub) != base * c * c:
                        return "trace-form discriminant formula fails"
                    ui = unit_index_profinite(m, sub)
                    return ui <= c**4 or f"unit index {ui} > {c}^4"

                _run(rep, f"{algebra}/{c}/{j}", check)


def check_end_rings(cfg, rep, count):
    for i in range(count):
        label = _label(cfg, "orders/end", i)
        n, _, model = glued_instance(cfg, "orders/end", i, max_n=4)

        def check(model=model, n=n):
            r = end_ring_of_surface(model)
            if not r.is_ring():
                return "stabiliser is not a ring"
            s = end_ring_of_surface(direct_sum_model(model))
            cm = model.tags()[model.cm_position()].order
            if s.index != cm.conductor:
                return f"direct sum order index {s.index}"
            # the degree-n^2 isogeny from E1 x E2 carries n End(E1 x E2) into End(A)
            if not all(r.contains(tuple(n * x for x in v)) for v in s.lattice.vectors()):
                return "stabiliser does not contain n End(E1 x E2)"
            return (s.index * n ** (s.rank - 1)) % r.index == 0 or f"index {r.index} too large"

        _run(rep, label, check)


def isogeny_disc_pair(cfg, i):
    """A target model, a random witness into it and its source model."""
    n, _, model = glued_instance(cfg, "isogeny-disc", i, max_n=4)
    w = random_witness(model, cfg.rng("isogeny-disc/witness", i))
    return model, w, source_model(w)


def check_isogeny_discriminants(cfg, rep, count):
    for i in range(count):
        label = _label(cfg, "isogeny-disc", i)
        target, w, source = isogeny_disc_pair(cfg, i)

        def check(target=target, w=w, source=source):
            big_n = w.degree
            ra = end_ring_of_surface(source)
            rb = end_ring_of_surface(target)
            da, db = abs(trace_form_disc(ra)), abs(trace_form_disc(rb))
            if db > big_n ** (2 * ra.rank) * da:
                return f"|disc B| = {db} > N^{2 * ra.rank} |disc A| = {big_n ** (2 * ra.rank) * da}"
            return db <= big_n**8 * da or "N^8 bound fails"

        _run(rep, label, check)


def suite_orders(cfg):
    rep = SuiteReport("orders")
    check_suborders(cfg, rep, cfg.param("max_index", 12))
    check_end_rings(cfg, rep, cfg.param("end_count", 100))
    check_isogeny_discriminants(cfg, rep, cfg.param("isogeny_count", 200))
    pairs = [(a, b) for a in (-3, -4, -7, -8, -11) for b in (-3, -4, -7, -8, -11) if a < b]
    for a, b in pairs:
        oa, ob = ImaginaryQuadraticOrder(a), ImaginaryQuadraticOrder(b)

        def check(oa=oa, ob=ob):
            d = compositum_disc(oa, ob)
            if d % abs(oa.disc) or d % abs(ob.disc):
                return f"compositum disc {d} not divisible by the subfield discs"
            return d <= (oa.disc * ob.disc) ** 2 or "compositum disc exceeds the square bound"

        _run(rep, f"compositum/{a}/{b}", check)
    return rep


def suite_complexity(cfg):
    rep = SuiteReport("complexity")
    family = cycle_family(cfg.seed, per_cell=cfg.param("per_cell", 2))
    out = comparison_experiment(family, budget=cfg.caps.enum_budget)
    rep.instances = len(out["rows"])
    for j, row in enumerate(out["rows"]):
        label = _label(cfg, "complexity", j)
        if row["N"] != row["n"] ** 2:
            rep.fail(label, f"N = {row['N']} for n = {row['n']}")
        if row["delta_prime"] != max(row["N"], abs(row["cm_disc"])):
            rep.fail(label, "delta_prime is not max(N, |disc|)")
        if row["delta"] < row["N"]:
            rep.fail(label, "surrogate below N")
    if out["degenerate"] or not out["ok"]:
        rep.fail(f"{cfg.seed}/complexity", "comparison fits degenerate or non-finite")
    rep.details = {"exponents": out["exponents"], "surrogate": True}
    return rep


QUADRATIC_CASES = (
    # (poly ascending, interval, H_2)
    ((-2, 0, 1), (1, 2), 2),
    ((-1, -1, 1), (1, 2), 1),
    ((1, -3, 1), (2, 3), 3),
    ((-3, 0, 1), (1, 2), 3),
)


def _unimodular(rng, k, steps=4):
    """Product of a few elementary integer operations and a sign flip."""
    m = [[int(i == j) for j in range(k)] for i in range(k)]
    for _ in range(steps if k > 1 else 0):
        i, j = rng.sample(range(k), 2)
        c = rng.randint(-3, 3)
        for row in m:
            row[j] += c * row[i]
    s = rng.randrange(k)
    for row in m:
        row[s] = -row[s]
    return m


def suite_heights(cfg):
    rep = SuiteReport("heights")
    for y, h in ((Fraction(3, 4), 4), (Fraction(-7, 2), 7), (Fraction(0), 1), (Fraction(5), 5)):
        _run(rep, f"rational/{y}", lambda y=y, h=h: all(height_hk(y, k) == h for k in (1, 2, 5)))
    for poly, (lo, hi), h in QUADRATIC_CASES:
        y = AlgebraicInput(poly, lo, hi)

        def check(y=y, h=h):
            if height_hk(y, 1) != math.inf:
                return "quadratic has finite 1-height"
            hs = [height_hk(y, k) for k in range(2, 6)]
            if hs[0] != h:
                return f"H_2 = {hs[0]}, expected {h}"
            return all(a >= b for a, b in zip(hs, hs[1:])) or "H_k not monotone in k"

        _run(rep, f"quadratic/{poly}", check)
    count = cfg.param("count", 10_000)
    for i in range(count):
        rng = cfg.rng("heights/detstar", i)
        k = rng.randint(1, 4)
        # g = num / den held as an integer matrix so products stay integral
        den = rng.choice((1, 2, 3, 4, 6, 12, 60))
        while True:
            num = [[rng.randint(-9 * den, 9 * den) for _ in range(k)] for _ in range(k)]
            if intmat.det(num):
                break
        u, v = _unimodular(rng, k), _unimodular(rng, k)
        integral = [[rng.randint(-5, 5) for _ in range(k)] for _ in range(k)]

        def check(num=num, den=den, u=u, v=v, integral=integral):
            def rat(m):
                return [[Fraction(x, den) for x in row] for row in m]

            base = detstar(rat(num))
            if detstar(rat(intmat.matmul(u, num))) != base or detstar(rat(intmat.matmul(num, v))) != base:
                return "det* changed under a unimodular multiplication"
            if intmat.det(integral) and detstar(integral) != abs(intmat.det(integral)):
                return "det* of an integer matrix differs from |det|"
            return True

        _run(rep, _label(cfg, "heights/detstar", i), check)
    return rep


def _random_tau(rng, prec):
    with mpmath.workprec(prec):
        re = mpmath.mpf(rng.uniform(-10, 10))
        im = mpmath.mpf(10) ** mpmath.mpf(rng.uniform(-2, 1))
        return mpmath.mpc(re, im)


def _random_sl2(rng, steps=6):
    m = ((1, 0), (0, 1))
    for _ in range(steps):
        t = rng.randint(-3, 3)
        m = intmat.matmul(m, ((1, t), (0, 1)))
        m = intmat.matmul(m, ((0, -1), (1, 0)))
    return m


def _random_siegel(rng, prec):
    with mpmath.workprec(prec):
        a, c = rng.uniform(0.05, 3), rng.uniform(0.05, 3)
        b = rng.uniform(-1, 1) * math.sqrt(a * c) * 0.9
        xs = [rng.uniform(-3, 3) for _ in range(3)]
        return mpmath.matrix([[mpmath.mpc(xs[0], a), mpmath.mpc(xs[1], b)], [mpmath.mpc(xs[1], b), mpmath.mpc(xs[2], c)]])


def suite_reduction(cfg):
    rep = SuiteReport("reduction")
    prec = cfg.caps.prec_bits
    count = cfg.param("count", 10_000)
    for i in range(count):
        rng = cfg.rng("reduction/h1", i)
        tau = _random_tau(rng, prec)
        gamma = _random_sl2(rng)

        def check(tau=tau, gamma=gamma):
            with mpmath.workprec(prec):
                tol = tolerance()
                r = reduce_h1(UpperHalfPoint(1, tau, prec), prec)
                if intmat.det(r.witness) != 1 or not in_fundamental_domain_h1(r.point):
                    return "reduced point outside the fundamental domain"
                again = reduce_h1(UpperHalfPoint(1, r.point, prec), prec)
                if abs(again.point - r.point) > tol:
                    return "reduction is not idempotent"
                moved = reduce_h1(UpperHalfPoint(1, mobius(gamma, tau), prec), prec)
                if abs(moved.point - r.point) > tol:
                    return "reduction is not equivariant"
                return True

        _run(rep, _label(cfg, "reduction/h1", i), check)
    for i in range(cfg.param("count_h2", 200)):
        rng = cfg.rng("reduction/h2", i)
        z = _random_siegel(rng, prec)

        def check(z=z):
            with mpmath.workprec(prec):
                r = reduce_h2(UpperHalfPoint(2, z, prec), prec, cfg.caps.iter_cap)
                if not is_symplectic(r.witness):
                    return "witness is not symplectic"
                if not r.certificate_ok():
                    return "descent certificate violated"
                return is_reduced_h2(r.point) or "point fails the reduction conditions"

        _run(rep, _label(cfg, "reduction/h2", i), check)
    return rep


def suite_lift(cfg):
    rep = SuiteReport("lift")
    primes = cfg.param("primes", PRIMES_50)
    scan = diameter_scan(list(primes), cap=cfg.caps.bfs_cap, seed=cfg.seed)
    rep.instances += len(scan["rows"])
    for row in scan["rows"]:
        if not row.lifts_ok:
            rep.fail(f"{cfg.seed}/lift/{row.n}", "a lift failed the congruence or height check")
        if row.order != row.n * (row.n**2 - 1):
            rep.fail(f"{cfg.seed}/lift/{row.n}", f"order {row.order}")
    if not scan["ok"]:
        rep.fail(f"{cfg.seed}/lift", "fits degenerate or non-finite")
    for n in range(1, cfg.param("order_max", 30) + 1):
        _run(rep, f"order/{n}", lambda n=n: cayley_bfs(n, cap=cfg.caps.bfs_cap).order == group_order(n))
    snap = cayley_bfs(cfg.param("triangle_n", 23), cap=cfg.caps.bfs_cap)
    rng = cfg.rng("lift/triangle")
    for i in range(cfg.param("triangle_pairs", 1000)):
        x, y = rng.choice(snap.elements), rng.choice(snap.elements)

        def check(x=x, y=y):
            xy = _mul_flat(x, y, 2, snap.n)
            return snap.distance[xy] <= snap.distance[x] + snap.distance[y] or "triangle inequality fails"

        _run(rep, f"{cfg.seed}/lift/triangle/{i}", check)
    rep.details = {"diameter_fit": scan["diameter_fit"], "height_fit": scan["height_fit"]}
    return rep


SUITES = {
    "glue-disc": suite_glue_disc,
    "polarised-isogeny": suite_polarised_isogeny,
    "min-isogeny": suite_min_isogeny,
    "orders": suite_orders,
    "complexity": suite_complexity,
    "heights": suite_heights,
    "reduction": suite_reduction,
    "lift": suite_lift,
}


def run_verify(name, cfg):
    if name not in SUITES:
        raise KeyError(name)
    return SUITES[name](cfg)

