"""Command-line front end: ``calabi-glue <subcommand> [flags]``.

Exit status is 0 when every check passes, 1 when any check fails and 2 for
usage or input errors. Reports contain no timestamps, so identical flags and
seed give byte-identical output.
"""
import argparse
import csv
import hashlib
import shlex
import sys
from pathlib import Path

from . import suites
from ._backend import apply_thread_override
from .errors import CalabiGlueError
from .indicial import BRANCHES
from .obstruction import BUILTINS, builtin, load_curvature_data

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _positive_int(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers: {exc}") from exc


def build_parser():
    p = argparse.ArgumentParser(prog="calabi-glue", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--format", choices=("text", "json"), default="text")
        sp.add_argument("--out", type=Path, help="also write the report to this file")
        sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("verify-calabi", help="Calabi metric, deformation o and form Ω suites")
    sp.add_argument("--n", type=int, default=3)
    sp.add_argument("--points", type=_positive_int, default=30, help="sample points in r ∈ [0.5, 5]")
    common(sp)

    sp = sub.add_parser("obstruction", help="obstruction value and wall classification")
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--builtin", choices=BUILTINS)
    src.add_argument("--data", type=Path, help="curvature data file (JSON or YAML)")
    sp.add_argument("--n", type=int, default=3)
    sp.add_argument("--value", type=float, help="curvature c or scalar curvature for builtin models")
    sp.add_argument("--nodes", type=_positive_int, default=1_000_000,
                    help="Monte Carlo nodes for the brute-force oracle (0 skips it)")
    common(sp)

    sp = sub.add_parser("indicial", help="indicial-root tables")
    sp.add_argument("--dim", type=int, required=True, help="dimension m of the hyperbolic space")
    sp.add_argument("--operator", default="all", help=f"comma list from {', '.join(BRANCHES)} or 'all'")
    common(sp)

    sp = sub.add_parser("glue-sweep", help="Einstein-residual decay of the glued metric")
    sp.add_argument("--builtin", choices=BUILTINS, default="constant-curvature")
    sp.add_argument("--n", type=int, default=3)
    sp.add_argument("--value", type=float)
    sp.add_argument("--t", type=_float_list, default=list(suites.GLUE_T), help="comma list of t values")
    sp.add_argument("--positions", type=_float_list, default=[1.0], help="r t^{1/4} sample positions")
    sp.add_argument("--directions", type=int, default=4)
    sp.add_argument("--table", type=Path, help="write the per-t table as CSV")
    common(sp)
    return p


def parse_tolerances(extra):
    """``--tol-<check> VALUE`` or ``--tol-<check>=VALUE`` pairs from unparsed arguments."""
    tols = {}
    it = iter(extra)
    for tok in it:
        if not tok.startswith("--tol-"):
            raise UsageError(f"unrecognized argument {tok!r}")
        key, eq, val = tok[len("--tol-"):].partition("=")
        if not eq:
            val = next(it, None)
            if val is None:
                raise UsageError(f"{tok} needs a value")
        name = key.replace("-", "_")
        if name not in suites.DEFAULT_TOLERANCES:
            raise UsageError(f"unknown check {key!r}; known: {', '.join(sorted(suites.DEFAULT_TOLERANCES))}")
        try:
            tols[name] = float(val)
        except ValueError as exc:
            raise UsageError(f"{tok}: not a number: {val!r}") from exc
    return tols


def _file_digest(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def run(args, tols):
    if args.command == "verify-calabi":
        if args.n < 2:
            raise UsageError("--n must be >= 2")
        rep = suites.calabi_suite(args.n, args.points, args.seed, tols)
    elif args.command == "obstruction":
        if args.builtin:
            if args.n < 2:
                raise UsageError("--n must be >= 2")
            data = builtin(args.builtin, args.n, args.value)
            cfg = {"builtin": args.builtin, "n": args.n, "value": args.value}
        else:
            data = load_curvature_data(args.data)
            cfg = {"data": str(args.data), "data_sha256": _file_digest(args.data)}
        cfg.update(nodes=args.nodes, seed=args.seed, tolerances=tols)
        rep = suites.obstruction_suite(data, args.nodes, args.seed, tols, config=cfg)
    elif args.command == "indicial":
        if args.dim < 3:
            raise UsageError("--dim must be >= 3")
        kinds = None if args.operator == "all" else [k.strip() for k in args.operator.split(",")]
        for k in kinds or ():
            if k not in BRANCHES:
                raise UsageError(f"unknown operator {k!r}; choose from {', '.join(BRANCHES)}")
        rep = suites.indicial_suite(args.dim, kinds, tols)
    else:
        if args.n < 2:
            raise UsageError("--n must be >= 2")
        rep = suites.glue_suite(args.builtin, args.n, args.t, tuple(args.positions), args.directions,
                                args.seed, tols, args.value)
        if args.table:
            rows = rep.results["table"]
            with open(args.table, "w", newline="") as fh:
                w = csv.DictWriter(fh, fieldnames=list(rows[0]))
                w.writeheader()
                for row in rows:
                    w.writerow({k: repr(float(v)) for k, v in row.items()})
    rep.config.setdefault("tolerances", tols)
    return rep


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args, extra = parser.parse_known_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    apply_thread_override()
    try:
        tols = parse_tolerances(extra)
        rep = run(args, tols)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"calabi-glue: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CalabiGlueError, OSError) as exc:
        print(f"calabi-glue: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    rep.command = "calabi-glue " + " ".join(shlex.quote(a) for a in argv)
    text = rep.render(args.format)
    sys.stdout.write(text)
    if args.out:
        args.out.write_text(text)
    return EXIT_OK if rep.passed else EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
