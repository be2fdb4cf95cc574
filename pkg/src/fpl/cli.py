"""``fpl`` command line: monitor, oracle, normalize, learn, check, plot.

Exit status is 0 on success, 1 on domain errors and 2 on usage errors.
Option defaults can be overridden through ``FPL_*`` environment variables;
explicit flags take precedence over both.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import __version__
from .core.paths import format_distance
from .dsl import (catalog_of, emit_atoms, emit_formula, parse_atoms, parse_formula,
                  parse_trajectory, placeholder_catalog)
from .metrics import Metric
from .normalize import to_lnf
from .semantics import Aggregator, SemanticsConfig, error_bound, monitor


class UsageError(Exception):
    pass


def _env(name, default):
    return os.environ.get(f"FPL_{name}", default)


def _read(path) -> str:
    return Path(path).read_text(encoding="utf-8")


def _formula_text(value: str) -> str:
    p = Path(value)
    if p.is_file():
        return p.read_text(encoding="utf-8").strip()
    return value


def _positive(text):
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number") from None
    if not x > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return x


def _metric(text):
    try:
        return Metric.parse(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _agg(text):
    try:
        return Aggregator.parse(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _threshold(text):
    if text.strip().lower() == "inf":
        return float("inf")
    x = float(text)
    if x < 0:
        raise argparse.ArgumentTypeError("threshold must be non-negative")
    return x


def _env_typed(name, default, kind):
    raw = _env(name, None)
    if raw is None:
        return default
    try:
        return kind(raw)
    except (argparse.ArgumentTypeError, ValueError) as e:
        raise UsageError(f"FPL_{name}={raw!r}: {e}") from None


def _semantics_args(p):
    p.add_argument("--formula", required=True, help="formula text or a file containing it")
    p.add_argument("--atoms", required=True, help="atom catalog JSON")
    p.add_argument("--metric", type=_metric, default=_env_typed("METRIC", Metric.MAHALANOBIS, _metric),
                   help="mahalanobis, mahalanobis-inf, quantile-uniform, quantile-triangular, euclidean")
    p.add_argument("--agg", type=_agg, default=_env_typed("AGG", Aggregator.MAX, _agg),
                   help="max or int (default max)")
    p.add_argument("--delta-until", type=_positive, default=_env_typed("DELTA_UNTIL", 0.5, _positive))
    p.add_argument("--delta-atom", type=_positive, default=_env_typed("DELTA_ATOM", 0.01, _positive))


def _config(args, bound=False):
    return SemanticsConfig(args.metric, args.agg, args.delta_until, args.delta_atom, bound)


def _load(args):
    catalog = parse_atoms(_read(args.atoms))
    f = parse_formula(_formula_text(args.formula), catalog)
    return catalog, f


def cmd_monitor(args, out):
    _, f = _load(args)
    z = parse_trajectory(_read(args.trajectory))
    res = monitor(z, f, _config(args, args.bound))
    print(format_distance(res.value), file=out)
    if args.bound:
        print(f"bound {format_distance(res.bound)}", file=out)
    return 0


def cmd_oracle(args, out):
    from .oracle import oracle_semantics

    _, f = _load(args)
    z = parse_trajectory(_read(args.trajectory))
    grid = args.grid if args.grid is not None else args.delta_until / 8
    cfg = _config(args)
    print(format_distance(oracle_semantics(z, f, grid, cfg)), file=out)
    if args.bound:
        print(f"bound {format_distance(error_bound(f, z, cfg))}", file=out)
    return 0


def cmd_normalize(args, out):
    text = _formula_text(args.formula)
    catalog = parse_atoms(_read(args.atoms)) if args.atoms else placeholder_catalog(text)
    print(emit_formula(to_lnf(parse_formula(text, catalog))), file=out)
    return 0


def _data_dir(path):
    files = sorted(Path(path).glob("*.csv"))
    if not files:
        raise ValueError(f"no .csv trajectories in {path}")
    return [parse_trajectory(f.read_text(encoding="utf-8")) for f in files]


def cmd_learn(args, out):
    from .learn import LearnConfig, describe_atom, learn

    data = _data_dir(args.data)
    cfg = LearnConfig(init_len=args.init_len, min_traj=args.min_traj, dev_threshold=args.dev_threshold,
                      cluster_std_threshold=args.cluster_std,
                      merge_similarity_threshold=args.merge_threshold)
    res = learn(data, cfg)
    text = emit_formula(res.formula)
    learned = res.atoms
    catalog = catalog_of(learned)
    out_path = Path(args.out)
    out_path.write_text(text + "\n", encoding="utf-8")
    atoms_path = Path(args.atoms_out) if args.atoms_out else out_path.with_suffix(".json")
    atoms_path.write_text(emit_atoms(catalog), encoding="utf-8")
    if args.emit_dag:
        Path(args.emit_dag).write_text(res.merged.dumps(), encoding="utf-8")
    if args.emit_svg:
        from .svg import dag_offsets, emit_svg

        offsets = dag_offsets(res.merged)
        names = {a.name for a in learned}
        picked = [(n.atom, offsets[u]) for u, n in sorted(res.merged.nodes.items())
                  if n.atom is not None and n.atom.name in names]
        emit_svg(args.emit_svg, [a for a, _ in picked], data, offsets=[o for _, o in picked])
    print(text, file=out)
    for a in learned:
        print(f"{a.name} {describe_atom(a)} horizon {a.horizon:.6f}", file=out)
    return 0


def cmd_check(args, out):
    from .hybrid import model_check, parse_automaton

    _, f = _load(args)
    ha = parse_automaton(_read(args.automaton))
    v = model_check(ha, f, args.threshold, _config(args), horizon=args.horizon, cap=args.cap,
                    bound_mode=args.bound_mode)
    for r in v.results:
        line = f"run {r.run.id} {r.run.describe()} distance {format_distance(r.distance)}"
        if r.bound is not None:
            line += f" bound {format_distance(r.bound)}"
        print(line, file=out)
    print(f"worst run {v.worst.run.id} distance {format_distance(v.worst.distance)}", file=out)
    print(f"best run {v.best.run.id} distance {format_distance(v.best.distance)}", file=out)
    print("all_within " + ("true" if v.all_within else "false"), file=out)
    return 0


def cmd_plot(args, out):
    from .svg import emit_svg

    atoms = []
    if args.atoms:
        catalog = parse_atoms(_read(args.atoms))
        wanted = args.names.split(",") if args.names else [a.name for a in catalog]
        for name in wanted:
            if name not in catalog:
                raise ValueError(f"unknown atom {name!r}")
            entry = catalog[name]
            if not hasattr(entry, "mean"):
                raise ValueError(f"atom {name!r} has no mean to plot")
            atoms.append(entry)
    trajs = [parse_trajectory(_read(p)) for p in args.trajectory or []]
    if not atoms and not trajs:
        raise UsageError("plot needs --atoms or --trajectory")
    for x in atoms + trajs:
        if args.dim >= x.dim:
            raise ValueError(f"--dim {args.dim} out of range for dimension {x.dim}")
    emit_svg(args.out, atoms, trajs, dim=args.dim, title=args.title or "")
    print(args.out, file=out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fpl", description="Fuzzy path logic tools.")
    ap.add_argument("--version", action="version", version=f"fpl {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("monitor", help="distance of a trajectory to a formula")
    _semantics_args(p)
    p.add_argument("--trajectory", required=True, help="trajectory CSV")
    p.add_argument("--bound", action="store_true", help="also print the discretization error bound")
    p.set_defaults(func=cmd_monitor)

    p = sub.add_parser("oracle", help="brute-force reference distance over fuzzy paths")
    _semantics_args(p)
    p.add_argument("--trajectory", required=True, help="trajectory CSV")
    p.add_argument("--grid", type=_positive, default=_env_typed("GRID", None, _positive),
                   help="switch-time grid (default delta-until / 8)")
    p.add_argument("--bound", action="store_true")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("normalize", help="print the left normal form")
    p.add_argument("--formula", required=True)
    p.add_argument("--atoms", help="atom catalog (optional; names are free without it)")
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("learn", help="learn a formula from a directory of CSV demonstrations")
    p.add_argument("--data", required=True)
    p.add_argument("--init-len", type=int, default=_env_typed("INIT_LEN", 10, int))
    p.add_argument("--min-traj", type=int, default=_env_typed("MIN_TRAJ", 5, int))
    p.add_argument("--dev-threshold", type=_positive, default=_env_typed("DEV_THRESHOLD", None, _positive))
    p.add_argument("--cluster-std", type=_positive, default=_env_typed("CLUSTER_STD", 2.0, _positive))
    p.add_argument("--merge-threshold", type=float, default=_env_typed("MERGE_THRESHOLD", 0.5, float))
    p.add_argument("--out", required=True, help="formula output file")
    p.add_argument("--atoms-out", help="atom catalog output (default: --out with .json suffix)")
    p.add_argument("--emit-dag")
    p.add_argument("--emit-svg")
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("check", help="model check a restricted hybrid automaton")
    _semantics_args(p)
    p.add_argument("--automaton", required=True)
    p.add_argument("--threshold", type=_threshold, required=True)
    p.add_argument("--horizon", type=_positive)
    p.add_argument("--cap", type=int, default=_env_typed("RUN_CAP", 10_000, int))
    p.add_argument("--bound-mode", choices=("ignore", "strict", "lenient"),
                   default=_env("BOUND_MODE", "ignore"))
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("plot", help="SVG of atoms and trajectories")
    p.add_argument("--atoms")
    p.add_argument("--names", help="comma-separated atom names (default all)")
    p.add_argument("--trajectory", action="append")
    p.add_argument("--dim", type=int, default=0)
    p.add_argument("--title")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plot)
    return ap


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        ap = build_parser()
        args = ap.parse_args(argv)
    except UsageError as e:
        print(f"fpl: error: {e}", file=err)
        return 2
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args, out)
    except UsageError as e:
        print(f"fpl: error: {e}", file=err)
        return 2
    except (ValueError, RuntimeError, OSError) as e:
        print(f"fpl: error: {e}", file=err)
        return 1


if __name__ == "__main__":
    sys.exit(main())
