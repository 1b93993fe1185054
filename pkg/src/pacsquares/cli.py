"""pacsquares command line.

Exit codes: 0 success, 1 bad input or usage, 2 a certificate or bound check
failed (including a search that finds a ratio above 4).
"""
from __future__ import annotations

import argparse
import csv
import io
import os
import sys

from . import __version__
from .bounds import GENERAL_BOUND_CAP, gyenes_bound, thickness_profile
from .certify import verify_oriented
from .explore import paper_examples
from .formats import (
    ConfigError,
    RunManifest,
    config_svg,
    config_to_dict,
    dumps_report,
    fmt,
    load_config,
)
from .geometry import DomainError, GeometryError, measure, monte_carlo_area, union
from .search import SearchSettings, search

SEED_ENV = "PACSQUARES_SEED"
OK, INPUT_ERROR, CHECK_FAILED = 0, 1, 2
BOUND_GRID = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV}={raw!r} is not an integer") from None


def _write_out(args, manifest: RunManifest, text: str) -> None:
    if getattr(args, "out", None):
        manifest.emit(args.out, text)


def cmd_compute(args, manifest) -> int:
    c = load_config(args.input)
    region = union(c)
    p, a = measure(c)
    r = p / a
    within_general = r <= gyenes_bound() + 1e-9
    within_oriented = (not c.axis_aligned) or r <= 4.0 + 1e-9
    print(f"p = {fmt(p)}")
    print(f"a = {fmt(a)}")
    print(f"ratio = {fmt(r)}")
    report = {
        "n_squares": len(c),
        "perimeter": p,
        "area": a,
        "ratio": r,
        "shells": len(region.shells),
        "holes": len(region.holes),
        "within_general_bound": within_general,
        "within_oriented_bound": within_oriented,
    }
    _write_out(args, manifest, dumps_report(report))
    return OK if within_general and within_oriented else CHECK_FAILED


def cmd_verify_oriented(args, manifest) -> int:
    c = load_config(args.input)
    if not c.axis_aligned:
        raise ConfigError(f"{args.input}: every theta must be 0 for verify-oriented")
    report = verify_oriented(c)
    status = "pass" if report["pass"] else "fail"
    print(f"strip certificate: {'pass' if report['strip_certificate']['pass'] else 'fail'}")
    print(f"bump steps: {sum(s['pass'] for s in report['bump_steps'])}/{len(report['bump_steps'])} pass")
    print(f"boundary strips: {sum(s['pass'] for s in report['boundary_strips'])}/"
          f"{len(report['boundary_strips'])} pass")
    print(f"ratio = {fmt(report['ratio'])}")
    print(f"certificate: {status}")
    _write_out(args, manifest, dumps_report({"certificate": status, **report}))
    return OK if report["pass"] else CHECK_FAILED


def cmd_bound(args, manifest) -> int:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "closed", "numeric", "abs_diff", "exact"])
    for x in BOUND_GRID:
        prof = thickness_profile(x, args.tol)
        w.writerow([fmt(x), fmt(prof.closed_form_T), fmt(prof.numeric_T),
                    fmt(prof.published_gap), fmt(prof.exact_T)])
    bound = gyenes_bound()
    ok = bound <= GENERAL_BOUND_CAP
    w.writerow(["bound", fmt(bound), "", "", ""])
    text = buf.getvalue()
    sys.stdout.write(text)
    print(f"{bound:.6f} {'<=' if ok else '>'} {GENERAL_BOUND_CAP}")
    _write_out(args, manifest, text)
    return OK if ok else CHECK_FAILED


def _search_report_dict(rep) -> dict:
    s = rep.settings
    return {
        "best": config_to_dict(rep.best),
        "best_ratio": rep.best_ratio,
        "evals": rep.evals,
        "filter_prunes": rep.filter_prunes,
        "history": [list(h) for h in rep.history],
        "seed": rep.seed,
        "max_evaluated_ratio": rep.max_evaluated_ratio,
        "within_general_bound": rep.within_general_bound,
        "geometry_errors": rep.geometry_errors,
        "best_passes_filter": rep.filter_passes,
        "filter_witness": rep.filter_witness,
        "settings": {
            "n_squares": s.n_squares, "oriented": s.oriented, "box": s.box,
            "max_evals": s.max_evals, "restarts": s.restarts,
            "filter_enabled": s.filter_enabled, "penalty": s.penalty,
        },
    }


def cmd_search(args, manifest) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    manifest.seed = seed
    settings = SearchSettings(
        n_squares=args.n, oriented=args.oriented, box=args.box, seed=seed,
        max_evals=args.max_evals, restarts=args.restarts,
        filter_enabled=args.filter == "on", penalty=args.penalty, workers=args.workers,
    )
    rep = search(settings)
    print(f"best ratio = {fmt(rep.best_ratio)} after {rep.evals} evaluations (seed {seed})")
    print(f"max evaluated ratio = {fmt(rep.max_evaluated_ratio)}")
    if settings.filter_enabled:
        print(f"filter prunes = {rep.filter_prunes}")
    if rep.counterexample:
        print("ratio above 4 found")
    _write_out(args, manifest, dumps_report(_search_report_dict(rep)))
    if args.svg:
        manifest.emit(args.svg, config_svg(rep.best))
    return CHECK_FAILED if rep.counterexample or not rep.within_general_bound else OK


def cmd_examples(args, manifest) -> int:
    rows = paper_examples()
    head = f"{'name':<34} {'parameter':<18} {'expected':>18} {'computed':>18}  pass"
    print(head)
    print("-" * len(head))
    for r in rows:
        rel = "" if r.relation == "==" else r.relation + " "
        print(f"{r.name:<34} {r.parameter:<18} {rel + fmt(r.expected):>18} {fmt(r.computed):>18}  "
              f"{'yes' if r.passed else 'NO'}")
    report = [{"name": r.name, "parameter": r.parameter, "expected": r.expected,
               "computed": r.computed, "relation": r.relation, "pass": r.passed} for r in rows]
    _write_out(args, manifest, dumps_report(report))
    return OK if all(r.passed for r in rows) else CHECK_FAILED


def cmd_oracle(args, manifest) -> int:
    c = load_config(args.input)
    seed = args.seed if args.seed is not None else _default_seed()
    manifest.seed = seed
    est, se = monte_carlo_area(c, args.samples, seed)
    _, a = measure(c)
    z = abs(est - a) / se if se > 0 else (0.0 if est == a else float("inf"))
    ok = z <= 3.0
    print(f"exact area = {fmt(a)}")
    print(f"monte carlo = {fmt(est)} +- {fmt(se)} ({args.samples} samples, seed {seed})")
    print(f"agreement: {'pass' if ok else 'fail'} ({z:.2f} sigma)")
    report = {"area": a, "estimate": est, "std_error": se, "sigma": z,
              "samples": args.samples, "seed": seed, "pass": ok}
    _write_out(args, manifest, dumps_report(report))
    return OK if ok else CHECK_FAILED


def cmd_render(args, manifest) -> int:
    c = load_config(args.input)
    manifest.emit(args.svg, config_svg(c))
    print(f"wrote {args.svg}")
    return OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="pacsquares", description="Perimeter/area ratios of unions of unit squares.")
    p.add_argument("--version", action="version", version=f"pacsquares {__version__}")
    common = _Parser(add_help=False)
    common.add_argument("--manifest", help="write a run manifest JSON here")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def with_input(sp):
        sp.add_argument("--in", dest="input", required=True, help="configuration JSON")

    sp = sub.add_parser("compute", parents=[common], help="perimeter, area and ratio of a configuration")
    with_input(sp)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_compute)

    sp = sub.add_parser("verify-oriented", parents=[common], help="run the axis-aligned certificates")
    with_input(sp)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_verify_oriented)

    sp = sub.add_parser("bound", parents=[common], help="thickness table and the general ratio bound (CSV)")
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_bound)

    sp = sub.add_parser("search", parents=[common], help="look for configurations with ratio above 4")
    sp.add_argument("--n", type=int, default=3)
    sp.add_argument("--oriented", action="store_true")
    sp.add_argument("--box", type=float, default=2.0)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--max-evals", type=int, default=10_000)
    sp.add_argument("--restarts", type=int, default=4)
    sp.add_argument("--filter", choices=["on", "off"], default="off")
    sp.add_argument("--penalty", type=float, default=10.0)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--out")
    sp.add_argument("--svg")
    sp.set_defaults(func=cmd_search)

    sp = sub.add_parser("examples", parents=[common], help="recompute the named examples")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_examples)

    sp = sub.add_parser("oracle", parents=[common], help="Monte Carlo cross-check of the union area")
    with_input(sp)
    sp.add_argument("--samples", type=int, default=1_000_000)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("render", parents=[common], help="write the union as SVG")
    with_input(sp)
    sp.add_argument("--svg", required=True)
    sp.set_defaults(func=cmd_render)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        manifest = RunManifest(args.command, [getattr(args, "input", None)] if getattr(args, "input", None) else [],
                               None, __version__)
        code = args.func(args, manifest)
    except SystemExit as exc:  # --help and --version
        return OK if exc.code in (0, None) else INPUT_ERROR
    except (UsageError, ConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    except (ArithmeticError, GeometryError) as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return CHECK_FAILED
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    if args.manifest:
        manifest.finish()
        manifest.outputs.append(args.manifest)
        with open(args.manifest, "w") as fh:
            fh.write(dumps_report(manifest.to_dict()))
    return code


def main() -> None:
    sys.exit(run())
