"""Command-line front end.

    lctlab <verb> [paths] [flags]

Exact results are printed as JSON with rationals rendered "p/q"; table verbs accept
--format csv. Exit codes: 0 ok, 1 input error, 2 domain error, 3 resource cap,
4 internal invariant breach.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from math import factorial

from . import __version__
from .errors import InvariantError, LctLabError, ParseError
from .groebner import buchberger, initial_ideal, semicontinuity_report
from .ideal import MonomialIdeal, colength, read_ideal
from .ideal import product as ideal_product
from .multiplicity import (
    check_colength_bound,
    check_main_inequality,
    check_weighted_inequality,
    colength_series,
    random_ideals,
)
from .numeric import (
    DEFAULT_BISECTION_STEPS,
    McConfig,
    PshModel,
    estimate_threshold,
    holder_experiment,
    kiselman_experiment,
    sharpness_experiment,
)
from .poly import MonomialOrder, read_polynomials
from .polytope import (
    complement_volume,
    integral_closure,
    is_power_of_maximal,
    lct,
    newton_polytope,
    weighted_threshold,
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(ParseError.exit_code, f"{self.prog}: error: {message}\n")


def _fractions(text: str) -> list[Fraction]:
    try:
        return [Fraction(t.strip()) for t in text.split(",") if t.strip()]
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected comma-separated rationals, got {text!r}")


def _gens(J: MonomialIdeal) -> list[list[int]]:
    return [list(g) for g in J.gens]


def _mc_config(args) -> McConfig:
    return McConfig(
        samples=args.samples,
        shells=args.shells,
        radius=args.radius,
        ratio=args.ratio,
        seed=args.seed,
        window=args.window,
    )


def _provenance(args, cfg: McConfig | None = None) -> dict:
    d = {"version": __version__}
    if cfg is not None:
        d["config"] = cfg.to_dict()
        d["bisection_steps"] = getattr(args, "steps", None) or DEFAULT_BISECTION_STEPS
    return d


def cmd_lct(args):
    J = read_ideal(args.path)
    P = newton_polytope(J)
    return {"ideal": _gens(J), "lct": str(lct(P)), "polytope": P.to_dict()}


def cmd_mult(args):
    J = read_ideal(args.path)
    P = newton_polytope(J)
    vol = complement_volume(P)
    series = colength_series(J, args.kmax)
    return {
        "ideal": _gens(J),
        "e": str(factorial(J.dim) * vol),
        "complement_volume": str(vol),
        "colength_series": series.to_rows(),
    }


def cmd_closure(args):
    J = read_ideal(args.path)
    Jbar = integral_closure(J)
    ok, s = is_power_of_maximal(newton_polytope(J))
    return {
        "ideal": _gens(J),
        "closure": _gens(Jbar),
        "integrally_closed": Jbar == J,
        "closure_power": {"is_power": ok, "s": s},
    }


def _check(J: MonomialIdeal) -> dict:
    rep = check_main_inequality(J).to_dict()
    rep["ideal"] = _gens(J)
    rep["colength"] = colength(J)
    rep["colength_bound"] = check_colength_bound(J)
    return rep


def cmd_check(args):
    return _check(read_ideal(args.path))


def cmd_weighted(args):
    J = read_ideal(args.path)
    rep = check_weighted_inequality(J, args.gamma)
    d = rep.to_dict()
    d["ideal"] = _gens(J)
    d["weighted_threshold"] = str(weighted_threshold(newton_polytope(J), args.gamma))
    return d


def cmd_product(args):
    J1, J2 = read_ideal(args.paths[0]), read_ideal(args.paths[1])
    J = ideal_product(J1, J2)
    return {"factors": [_gens(J1), _gens(J2)], "product": _gens(J), "check": _check(J)}


def cmd_reduce(args):
    dim, gens = read_polynomials(args.path)
    order = MonomialOrder(args.order)
    basis = buchberger(gens, order)
    out = {
        "order": order.kind,
        "basis": [p.to_str(order) for p in basis],
        "initial_ideal": _gens(initial_ideal(basis, order)),
    }
    if args.skip_mc:
        J0 = initial_ideal(basis, order)
        out["colength"] = colength(J0)
        out["lct_initial"] = str(lct(newton_polytope(J0)))
        return out
    cfg = _mc_config(args)
    rep = semicontinuity_report(gens, order, cfg, steps=args.steps)
    out.update(rep.to_dict())
    out["provenance"] = _provenance(args, cfg)
    return out


def cmd_colengths(args):
    J = read_ideal(args.path)
    return {"ideal": _gens(J), "rows": colength_series(J, args.kmax).to_rows()}


def _model_from_path(path: str, scale) -> PshModel:
    if path.endswith(".poly"):
        _, gens = read_polynomials(path)
        return PshModel.poly(gens, scale)
    return PshModel.toric(read_ideal(path), scale)


def cmd_estimate(args):
    model = _model_from_path(args.path, args.scale)
    cfg = _mc_config(args)
    lo, hi = estimate_threshold(model, args.gamma, cfg, steps=args.steps)
    out = {"model": model.describe(), "interval": [lo, hi], "width": hi - lo}
    if args.gamma is not None:
        out["gamma"] = [str(g) for g in args.gamma]
    if model.ideal is not None:
        P = newton_polytope(model.ideal)
        exact = lct(P) if args.gamma is None else weighted_threshold(P, args.gamma)
        exact /= model.scale
        out["exact"] = str(exact)
        out["contains_exact"] = lo <= float(exact) <= hi
    out["provenance"] = _provenance(args, cfg)
    return out


def cmd_experiment(args):
    cfg = _mc_config(args)
    if args.name == "sharpness":
        eps = args.eps_list or [Fraction(1, 5), Fraction(1, 10), Fraction(1, 20)]
        out = sharpness_experiment(args.n, eps, cfg)
    elif args.name == "kiselman":
        eps = [float(e) for e in (args.eps_list or [Fraction(1, 10), Fraction(1, 100)])]
        out = kiselman_experiment(args.n, eps, cfg)
    else:
        if len(args.paths) != 2:
            raise ParseError("experiment holder needs two ideal files")
        out = holder_experiment(read_ideal(args.paths[0]), read_ideal(args.paths[1]), cfg, args.steps)
    out["provenance"] = _provenance(args, cfg)
    return out


def _sweep_row(J: MonomialIdeal) -> dict:
    rep = check_main_inequality(J)
    return {
        "n": J.dim,
        "gens": ";".join(" ".join(str(v) for v in g) for g in J.gens),
        "lct": str(rep.lct),
        "e": str(rep.e),
        "lhs": str(rep.lhs),
        "rhs": str(rep.rhs),
        "holds": rep.holds,
        "equality": rep.equality,
        "closure_power": rep.closure_is_power[1] if rep.closure_is_power[0] else "",
        "colength_bound": check_colength_bound(J),
    }


def run_sweep(count: int, seed: int, dims=(2, 3)) -> list[dict]:
    ideals = random_ideals(count, seed, dims)
    workers = max(1, int(os.environ.get("TOOL_THREADS", "1") or 1))
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            return list(ex.map(_sweep_row, ideals, chunksize=16))
    return [_sweep_row(J) for J in ideals]


def cmd_sweep(args):
    rows = run_sweep(args.count, args.seed, tuple(args.dims))
    bad = [
        r
        for r in rows
        if not r["holds"] or r["equality"] != (r["closure_power"] != "") or not r["colength_bound"]
    ]
    out = {
        "count": len(rows),
        "seed": args.seed,
        "violations": len(bad),
        "equality_cases": sum(1 for r in rows if r["equality"]),
        "rows": rows,
        "provenance": _provenance(args),
    }
    if bad:
        raise _SweepFailure(out)
    return out


class _SweepFailure(InvariantError):
    def __init__(self, report):
        super().__init__(f"{report['violations']} ideals violate the inequality properties")
        self.report = report


TABLE_VERBS = {"colengths": "rows", "sweep": "rows", "experiment": "rows"}


def _emit(verb: str, result: dict, fmt: str, out) -> None:
    if fmt == "json":
        body = {"verb": verb, "result": result}
        out.write(json.dumps(body, indent=2, sort_keys=True, default=str) + "\n")
        return
    key = TABLE_VERBS.get(verb)
    rows = result.get(key) if key else None
    if not rows:
        raise ParseError(f"--format csv is only available for table output ({', '.join(TABLE_VERBS)})")
    fields: list[str] = []
    for r in rows:
        fields.extend(k for k in r if k not in fields)
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    out.write(buf.getvalue())


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lctlab", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=func)
        sp.add_argument("--format", choices=["json", "csv"], default="json")
        return sp

    def mc_flags(sp):
        sp.add_argument("--seed", type=int, default=42)
        sp.add_argument("--samples", type=int, default=McConfig.samples)
        sp.add_argument("--shells", type=int, default=McConfig.shells)
        sp.add_argument("--radius", type=float, default=McConfig.radius)
        sp.add_argument("--ratio", type=float, default=McConfig.ratio)
        sp.add_argument("--window", type=int, default=McConfig.window)
        sp.add_argument("--steps", type=int, default=None, help="bisection steps")

    add("lct", cmd_lct, "log canonical threshold via the Newton polytope").add_argument("path")
    sp = add("mult", cmd_mult, "Samuel multiplicity and the head of the colength series")
    sp.add_argument("path")
    sp.add_argument("--kmax", type=int, default=5)
    add("closure", cmd_closure, "integral closure and the m^s test").add_argument("path")
    add("check", cmd_check, "lct^n * e >= n^n and the colength bound").add_argument("path")
    sp = add("weighted", cmd_weighted, "weighted threshold and inequality")
    sp.add_argument("path")
    sp.add_argument("--gamma", type=_fractions, required=True)
    sp = add("product", cmd_product, "product ideal, then check")
    sp.add_argument("paths", nargs=2)
    sp = add("reduce", cmd_reduce, "Groebner degeneration of a polynomial ideal")
    sp.add_argument("path")
    sp.add_argument("--order", choices=["grevlex", "lex", "grlex"], default="grevlex")
    sp.add_argument("--skip-mc", action="store_true", help="exact part only")
    mc_flags(sp)
    sp = add("colengths", cmd_colengths, "exact colengths of J^k")
    sp.add_argument("path")
    sp.add_argument("--kmax", type=int, default=10)
    sp = add("estimate", cmd_estimate, "Monte Carlo threshold bracket")
    sp.add_argument("path", help=".ideal (toric model) or .poly (polynomial model)")
    sp.add_argument("--gamma", type=_fractions, default=None)
    sp.add_argument("--scale", type=Fraction, default=Fraction(1))
    mc_flags(sp)
    sp = add("experiment", cmd_experiment, "sharpness | kiselman | holder")
    sp.add_argument("name", choices=["sharpness", "kiselman", "holder"])
    sp.add_argument("paths", nargs="*")
    sp.add_argument("--n", type=int, default=2)
    sp.add_argument("--eps-list", type=_fractions, default=None)
    mc_flags(sp)
    sp = add("sweep", cmd_sweep, "randomized exact property sweep")
    sp.add_argument("--count", type=int, default=500)
    sp.add_argument("--seed", type=int, default=2024)
    sp.add_argument("--dims", type=lambda s: [int(t) for t in s.split(",")], default=[2, 3])
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        result = args.func(args)
    except _SweepFailure as exc:
        _emit(args.verb, exc.report, args.format, out)
        print(f"lctlab: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"lctlab: {exc}", file=sys.stderr)
        return ParseError.exit_code
    except LctLabError as exc:
        print(f"lctlab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except Exception as exc:  # anything unclassified is a bug
        print(f"lctlab: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return InvariantError.exit_code
    try:
        _emit(args.verb, result, args.format, out)
    except LctLabError as exc:
        print(f"lctlab: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
