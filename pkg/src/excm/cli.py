"""Command-line driver.

Exit codes: 0 pass, 1 invariant violation, 2 usage error or rejected
input, 3 budget exhausted.
Every command writes JSON (sorted keys) or CSV to ``--out`` or stdout.
"""

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction

import mpmath

from .complexity import comparison_experiment, cycle_family, cycle_family_labels, delta_surrogate
from .config import Caps, RunConfig
from .congruence import cayley_bfs, scan_modulus, summarise_scan
from .errors import BudgetExceeded, ExcmError, InternalConsistencyError, ReductionNotConvergedError
from .hecke import hecke_cosets_sl2, height_vs_detstar_experiment, summarise_height_rows
from .heights import detstar, height_hk, parse_algebraic
from .reduction import UpperHalfPoint, reduce_h1, reduce_h2
from .surfaces import SplitSurfaceModel, generate_surface, kernel_exponent, minimal_product_isogeny
from .verify import SUITES, run_verify

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3

COMPLEXITY_COLUMNS = ["seed", "n", "cm_disc", "N", "delta_prime", "d_t", "unit_index"]
HEIGHT_COLUMNS = ["n", "rep_index", "detstar", "h1_witness", "reduced_flag"]
LIFT_COLUMNS = ["n", "order", "diameter", "max_h1", "mode"]


def _default(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (mpmath.mpf, mpmath.mpc)):
        return _mp_str(x)
    raise TypeError(f"cannot serialise {type(x).__name__}")


def _mp_str(x, digits=30):
    if isinstance(x, mpmath.mpc):
        return [mpmath.nstr(x.real, digits), mpmath.nstr(x.imag, digits)]
    return mpmath.nstr(x, digits)


def _finite(obj):
    """Replace non-finite floats by strings so the output stays strict JSON."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


def dumps_json(obj):
    return json.dumps(_finite(obj), sort_keys=True, indent=2, default=_default, allow_nan=False) + "\n"


def dumps_csv(columns, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([r[c] for c in columns])
    return buf.getvalue()


def _emit(cfg, text):
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _config(args, **params):
    return RunConfig(
        seed=args.seed,
        caps=Caps.from_env(),
        output=args.out,
        fmt=getattr(args, "format", None) or "json",
        params={k: v for k, v in params.items() if v is not None},
    )


# --- verify ---------------------------------------------------------------------


def cmd_verify(args):
    cfg = _config(args, count=args.count)
    rep = run_verify(args.suite, cfg)
    _emit(cfg, dumps_json({"config": cfg.to_json(), "report": rep.to_json()}))
    if rep.budget_exhausted:
        return EXIT_BUDGET
    return EXIT_OK if rep.passed else EXIT_VIOLATION


# --- surfaces -------------------------------------------------------------------


def _model_from_args(args):
    if getattr(args, "input", None):
        with open(args.input, encoding="utf-8") as fh:
            return SplitSurfaceModel.from_json(json.load(fh))
    return generate_surface(args.seed, args.n, args.disc, scramble=not args.no_scramble)


def cmd_surfaces_gen(args):
    cfg = _config(args)
    model = _model_from_args(args)
    d = model.glue_disc()
    out = {"model": model.to_json(), "glue_disc": {"d1": d.d1, "d2": d.d2, "index": d.index}}
    _emit(cfg, dumps_json(out))
    return EXIT_OK


def cmd_surfaces_min(args):
    cfg = _config(args)
    model = _model_from_args(args)
    mi = minimal_product_isogeny(model, budget=cfg.caps.enum_budget)
    out = {
        "model": model.to_json(),
        "degree": mi.degree,
        "degree_any": mi.degree_any,
        "status": mi.status,
        "candidates": mi.candidates,
        "witnesses": [dict(w.to_json(), kernel_exponent=kernel_exponent(w)) for w in mi.witnesses],
    }
    _emit(cfg, dumps_json(out))
    return EXIT_OK if mi.status == "certified" else EXIT_VIOLATION


# --- complexity -----------------------------------------------------------------


def cmd_complexity_report(args):
    cfg = _config(args)
    model = _model_from_args(args)
    rep = delta_surrogate(model, args.partner, budget=cfg.caps.enum_budget)
    row = {
        "seed": args.seed,
        "n": math.isqrt(model.glue_index),
        "cm_disc": model.tags()[model.cm_position()].order.disc,
        "N": rep.n_min,
        "delta_prime": rep.delta_prime,
        "d_t": rep.d_t,
        "unit_index": rep.unit_index,
    }
    if cfg.fmt == "csv":
        _emit(cfg, dumps_csv(COMPLEXITY_COLUMNS, [row]))
    else:
        _emit(cfg, dumps_json(rep.to_json()))
    return EXIT_OK


def complexity_compare(cfg, partner=None):
    per_cell = cfg.param("per_cell", 2)
    family = cycle_family(cfg.seed, per_cell=per_cell)
    labels = cycle_family_labels(cfg.seed, per_cell=per_cell)
    return comparison_experiment(family, partner, budget=cfg.caps.enum_budget, labels=labels)


def cmd_complexity_compare(args):
    cfg = _config(args, per_cell=args.per_cell)
    out = complexity_compare(cfg, args.partner)
    if cfg.fmt == "csv":
        _emit(cfg, dumps_csv(COMPLEXITY_COLUMNS, out["rows"]))
    else:
        _emit(cfg, dumps_json(out))
    return EXIT_OK if out["ok"] else EXIT_VIOLATION


# --- heights --------------------------------------------------------------------


def _literal(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def cmd_heights_hk(args):
    cfg = _config(args)
    y = parse_algebraic(_literal(args.value))
    h = height_hk(y, args.k, budget=cfg.caps.height_budget)
    _emit(cfg, dumps_json({"k": args.k, "height": "inf" if h == math.inf else h}))
    return EXIT_OK


def cmd_heights_detstar(args):
    cfg = _config(args)
    m = [[Fraction(str(x)) for x in row] for row in json.loads(args.matrix)]
    _emit(cfg, dumps_json({"detstar": detstar(m)}))
    return EXIT_OK


# --- reduction and Hecke ----------------------------------------------------------


def _complex(text):
    return mpmath.mpmathify(text.replace(" ", ""))


def cmd_reduce_h1(args):
    cfg = _config(args)
    prec = cfg.caps.prec_bits
    with mpmath.workprec(prec):
        r = reduce_h1(UpperHalfPoint(1, _complex(args.tau), prec), prec)
        out = {"point": _mp_str(r.point), "witness": [list(x) for x in r.witness], "flagged": r.flagged}
    _emit(cfg, dumps_json(out))
    return EXIT_OK


def cmd_reduce_h2(args):
    cfg = _config(args)
    prec = cfg.caps.prec_bits
    with mpmath.workprec(prec):
        z = mpmath.matrix([[_complex(x) for x in row] for row in json.loads(args.z)])
        try:
            r = reduce_h2(UpperHalfPoint(2, z, prec), prec, cfg.caps.iter_cap)
            code = EXIT_OK if r.certificate_ok() else EXIT_VIOLATION
        except ReductionNotConvergedError as e:
            r, code = e.result, EXIT_BUDGET
        out = {
            "point": [[_mp_str(r.point[i, j]) for j in range(2)] for i in range(2)],
            "witness": [list(x) for x in r.witness],
            "iterations": r.iterations,
            "converged": r.converged,
            "certificate_ok": r.certificate_ok(),
        }
    _emit(cfg, dumps_json(out))
    return code


def cmd_hecke_enum(args):
    cfg = _config(args)
    reps = hecke_cosets_sl2(args.n, budget=cfg.caps.enum_budget)
    _emit(cfg, dumps_json({"n": args.n, "count": len(reps), "cosets": [[list(r) for r in g] for g in reps]}))
    return EXIT_OK


def height_detstar(cfg):
    """Rows for n = 1..nmax; stops early on a budget error, flagging the result."""
    rows, partial, error = [], False, None
    for n in range(1, cfg.param("nmax", 50) + 1):
        try:
            rows += height_vs_detstar_experiment(
                n, cfg.param("samples", 1), cfg.caps.prec_bits, cfg.caps.enum_budget, n_min=n
            )
        except BudgetExceeded as e:
            partial, error = True, f"{type(e).__name__}: {e}"
            break
    out = summarise_height_rows(rows) if rows else {"max_h1": [], "fit": None, "ok": False}
    out.update(rows=[r.to_json() for r in rows], partial=partial, error=error)
    return out


# --- congruence lifts -----------------------------------------------------------


def _primes_up_to(p):
    return [n for n in range(2, p + 1) if all(n % q for q in range(2, math.isqrt(n) + 1))]


def cmd_lift_bfs(args):
    cfg = _config(args)
    snap = cayley_bfs(args.n, args.degree, cap=cfg.caps.bfs_cap)
    _emit(cfg, dumps_json({"n": args.n, "degree": args.degree, "order": snap.order, "diameter": snap.diameter}))
    return EXIT_OK


def lift_diameter(cfg):
    rows, partial, error = [], False, None
    for n in cfg.param("moduli", _primes_up_to(cfg.param("primes_up_to", 50))):
        try:
            rows.append(scan_modulus(n, cfg.param("degree", 2), cfg.caps.bfs_cap, seed=cfg.seed))
        except BudgetExceeded as e:
            partial, error = True, f"{type(e).__name__}: {e}"
            break
    out = summarise_scan(rows)
    out.update(
        rows=[dict(zip(LIFT_COLUMNS + ["lifts_ok"], r.to_csv_row() + [r.lifts_ok])) for r in rows],
        partial=partial,
        error=error,
    )
    return out


def _emit_experiment(cfg, out, columns):
    if cfg.fmt == "csv":
        _emit(cfg, dumps_csv(columns, out["rows"]))
    else:
        _emit(cfg, dumps_json(out))
    if out.get("partial"):
        print(f"partial output: {out['error']}", file=sys.stderr)
        return EXIT_BUDGET
    return EXIT_OK if out["ok"] else EXIT_VIOLATION


def cmd_lift_scan(args):
    cfg = _config(args, primes_up_to=args.primes_up_to, degree=args.degree)
    cfg = RunConfig(cfg.seed, cfg.caps, cfg.output, args.format or "csv", cfg.params)
    return _emit_experiment(cfg, lift_diameter(cfg), LIFT_COLUMNS)


# --- experiments ----------------------------------------------------------------

EXPERIMENTS = {
    "complexity-compare": (lambda cfg: complexity_compare(cfg), COMPLEXITY_COLUMNS, "json"),
    "height-detstar": (height_detstar, HEIGHT_COLUMNS, "csv"),
    "lift-diameter": (lift_diameter, LIFT_COLUMNS, "csv"),
}


def run_experiment(name, cfg):
    fn, columns, _ = EXPERIMENTS[name]
    return fn(cfg), columns


def cmd_experiment(args):
    fmt = args.format or EXPERIMENTS[args.name][2]
    cfg = _config(args, nmax=args.nmax, primes_up_to=args.primes_up_to, per_cell=args.per_cell, samples=args.samples)
    cfg = RunConfig(cfg.seed, cfg.caps, cfg.output, fmt, cfg.params)
    out, columns = run_experiment(args.name, cfg)
    return _emit_experiment(cfg, out, columns)


# --- parser ---------------------------------------------------------------------


def _common(p, fmt=False):
    p.add_argument("--seed", type=int, default=0, help="run seed (default 0)")
    p.add_argument("--out", help="output file (default stdout)")
    if fmt:
        p.add_argument("--format", choices=["json", "csv"], default=None)


def _model_args(p):
    p.add_argument("--n", type=int, default=2, help="glue multiplier")
    p.add_argument("--disc", type=int, default=-4, help="CM discriminant of the second factor")
    p.add_argument("--no-scramble", action="store_true", help="keep the unscrambled basis")
    p.add_argument("--input", help="read a surface model JSON instead of generating one")


def build_parser():
    parser = argparse.ArgumentParser(prog="excm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run a property suite")
    p.add_argument("suite", choices=sorted(SUITES))
    p.add_argument("--count", type=int, help="instance count for sampled suites")
    _common(p)
    p.set_defaults(func=cmd_verify)

    surf = sub.add_parser("surfaces", help="split surface models").add_subparsers(dest="action", required=True)
    p = surf.add_parser("gen", help="generate a glued model")
    _model_args(p)
    _common(p)
    p.set_defaults(func=cmd_surfaces_gen)
    p = surf.add_parser("minimal-isogeny", help="minimal polarised product isogeny")
    _model_args(p)
    _common(p)
    p.set_defaults(func=cmd_surfaces_min)

    comp = sub.add_parser("complexity", help="complexity measures").add_subparsers(dest="action", required=True)
    p = comp.add_parser("report", help="measures for one model")
    _model_args(p)
    p.add_argument("--partner", type=int, help="CM discriminant of the reference special point")
    _common(p, fmt=True)
    p.set_defaults(func=cmd_complexity_report)
    p = comp.add_parser("compare", help="fit the two measures over a seeded family")
    p.add_argument("--per-cell", type=int, help="models per (n, disc) cell (default 2)")
    p.add_argument("--partner", type=int)
    _common(p, fmt=True)
    p.set_defaults(func=cmd_complexity_compare)

    hts = sub.add_parser("heights", help="k-heights and det*").add_subparsers(dest="action", required=True)
    p = hts.add_parser("hk", help="k-height of a rational or real algebraic number")
    p.add_argument("--value", required=True, help='"3/4" or {"poly": [...], "interval": [lo, hi]}')
    p.add_argument("--k", type=int, required=True)
    _common(p)
    p.set_defaults(func=cmd_heights_hk)
    p = hts.add_parser("detstar", help="det* of a rational matrix")
    p.add_argument("--matrix", required=True, help='JSON rows, entries as ints or "p/q" strings')
    _common(p)
    p.set_defaults(func=cmd_heights_detstar)

    red = sub.add_parser("reduce", help="fundamental-domain reduction").add_subparsers(dest="action", required=True)
    p = red.add_parser("h1", help="reduce a point of the upper half plane")
    p.add_argument("--tau", required=True, help='complex number, e.g. "0.3+2j"')
    _common(p)
    p.set_defaults(func=cmd_reduce_h1)
    p = red.add_parser("h2", help="reduce a degree-2 Siegel point")
    p.add_argument("--z", required=True, help='JSON 2x2 matrix of complex strings')
    _common(p)
    p.set_defaults(func=cmd_reduce_h2)

    hk = sub.add_parser("hecke", help="Hecke cosets").add_subparsers(dest="action", required=True)
    p = hk.add_parser("enum", help="coset representatives of determinant n")
    p.add_argument("--n", type=int, required=True)
    _common(p)
    p.set_defaults(func=cmd_hecke_enum)

    lift = sub.add_parser("lift", help="Cayley graphs and congruence lifts").add_subparsers(dest="action", required=True)
    p = lift.add_parser("bfs", help="order and diameter mod n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--degree", type=int, choices=[2, 4], default=2)
    _common(p)
    p.set_defaults(func=cmd_lift_bfs)
    p = lift.add_parser("scan", help="diameters and lifts for primes up to a bound")
    p.add_argument("--primes-up-to", type=int, required=True)
    p.add_argument("--degree", type=int, choices=[2, 4], default=2)
    _common(p, fmt=True)
    p.set_defaults(func=cmd_lift_scan)

    p = sub.add_parser("experiment", help="run a named experiment")
    p.add_argument("name", choices=sorted(EXPERIMENTS))
    p.add_argument("--nmax", type=int, help="height-detstar: largest determinant (default 50)")
    p.add_argument("--primes-up-to", type=int, help="lift-diameter: prime bound (default 50)")
    p.add_argument("--per-cell", type=int, help="complexity-compare: models per cell")
    p.add_argument("--samples", type=int, help="height-detstar: base points (default 1)")
    _common(p, fmt=True)
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceeded as e:
        print(f"budget exhausted: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except InternalConsistencyError as e:
        print(f"invariant violated: {e}", file=sys.stderr)
        return EXIT_VIOLATION
    except (ExcmError, ValueError) as e:
        # malformed or out-of-contract input
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
