"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
"""
import argparse
import logging
import re
import sys
import time
import warnings
from pathlib import Path

import numpy as np

from .core import factorize, pareto_sweep
from .dataio import (
    RunManifest,
    emit_scatter,
    load_delimited,
    preprocess_ionosphere,
    read_labels,
    read_matrix,
    write_dataset,
    write_result,
)
from .errors import DataError, NumericalError
from .search import SearchConfig

logger = logging.getLogger("tsnmf")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3

_ANGLE = re.compile(r"^\s*([0-9]*\.?[0-9]*)\s*\*?\s*pi\s*(?:/\s*([0-9]*\.?[0-9]+))?\s*$")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def parse_angle(text):
    """Radians from ``"0.7"``, ``"pi"``, ``"pi/4"``, ``"3pi/4"`` or ``"3*pi/4"``."""
    m = _ANGLE.match(text.lower())
    if m:
        num = float(m.group(1)) if m.group(1) else 1.0
        den = float(m.group(2)) if m.group(2) else 1.0
        return num * np.pi / den
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an angle: {text!r}") from None


def parse_angles(text):
    return [parse_angle(t) for t in text.split(",") if t.strip()]


def _add_data_args(p):
    p.add_argument("--input", required=True, type=Path)
    p.add_argument("--k", required=True, type=int)
    p.add_argument("--imax", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--orientation", choices=("rows", "columns"), default="rows")
    p.add_argument("--label-column", type=int, default=None)
    p.add_argument("--delimiter", default=",")
    p.add_argument("--header", action="store_true")
    p.add_argument("--drop-zero-columns", action="store_true")
    p.add_argument("--strict-half-sphere", action="store_true",
                   help="require all points in the Karcher mean's hemisphere")


def build_parser():
    parser = _Parser(prog="tsnmf", description="Tight semi-nonnegative matrix factorization")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("factorize", help="factorize one data set for one spread bound")
    _add_data_args(p)
    p.add_argument("--epsilon", required=True, type=parse_angle)

    p = sub.add_parser("sweep", help="factorize over several spread bounds")
    _add_data_args(p)
    p.add_argument("--epsilons", required=True, type=parse_angles)

    p = sub.add_parser("preprocess-ionosphere", help="apply the Ionosphere preprocessing")
    p.add_argument("--input", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)

    p = sub.add_parser("scatter", help="write h1,h2,label records for a k=2 result")
    p.add_argument("--result", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)
    return parser


def _load(args):
    return load_delimited(args.input, delimiter=args.delimiter, has_header=args.header,
                          label_column=args.label_column, orientation=args.orientation)


def _run_factorize(args, argv):
    ds = _load(args)
    config = SearchConfig(epsilon=args.epsilon, i_max=args.imax, seed=args.seed)
    t0 = time.perf_counter()
    res = factorize(ds.matrix, config, args.k, drop_zero=args.drop_zero_columns,
                    strict=args.strict_half_sphere)
    elapsed = time.perf_counter() - t0
    manifest = write_result(res, args.out, labels=ds.labels, provenance=ds.provenance,
                            argv=argv, timings={"factorize_seconds": elapsed})
    manifest.cwd = str(Path.cwd())
    manifest.write(args.out / "manifest.json")
    logger.info("wrote %s (fit %.6g, spread %.6g)", args.out, res.fit, res.spread)


def _run_sweep(args, argv):
    ds = _load(args)
    config = SearchConfig(epsilon=np.pi, i_max=args.imax, seed=args.seed)
    points = pareto_sweep(ds.matrix, args.k, args.epsilons, config,
                          drop_zero=args.drop_zero_columns, strict=args.strict_half_sphere)
    args.out.mkdir(parents=True, exist_ok=True)
    lines = ["index,epsilon,fit,spread,seed,error\n"]
    failed = 0
    for i, pt in enumerate(points):
        if pt.result is None:
            failed += 1
            lines.append(f"{i},{pt.epsilon:.17g},nan,nan,,{pt.error}\n")
            continue
        res = pt.result
        member = args.out / f"eps_{i:02d}"
        manifest = write_result(res, member, labels=ds.labels,
                                provenance=ds.provenance, argv=argv)
        manifest.cwd = str(Path.cwd())
        manifest.write(member / "manifest.json")
        lines.append(f"{i},{pt.epsilon:.17g},{res.fit:.17g},{res.spread:.17g},"
                     f"{res.config.seed},\n")
    (args.out / "pareto.csv").write_text("".join(lines))
    if failed == len(points):
        raise NumericalError("every sweep member failed")


def _run_preprocess(args, argv):
    raw = load_delimited(args.input, label_column=-1)
    ds = preprocess_ionosphere(raw)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    write_dataset(ds, args.out)
    logger.info("wrote %d points of dimension %d to %s",
                ds.matrix.shape[1], ds.matrix.shape[0], args.out)


def _run_scatter(args, argv):
    H = read_matrix(args.result / "H.csv")
    label_path = args.result / "labels.csv"
    labels = read_labels(label_path) if label_path.exists() else None
    emit_scatter(H, labels, args.out)


_COMMANDS = {
    "factorize": _run_factorize,
    "sweep": _run_sweep,
    "preprocess-ionosphere": _run_preprocess,
    "scatter": _run_scatter,
}


def _record_error(args, argv, exc):
    out = getattr(args, "out", None)
    if out is None or args.command not in ("factorize", "sweep"):
        return
    try:
        out.mkdir(parents=True, exist_ok=True)
        cfg = {"epsilon": getattr(args, "epsilon", None), "i_max": args.imax, "seed": args.seed}
        RunManifest(config=cfg, seed=args.seed, k=args.k, provenance={}, timings={},
                    digests={}, summary={}, argv=argv,
                    error={"type": type(exc).__name__, "message": str(exc)},
                    ).write(out / "manifest.json")
    except OSError:
        pass


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "k", 1) < 1 or getattr(args, "imax", 0) < 0:
        print("tsnmf: error: --k must be >= 1 and --imax >= 0", file=sys.stderr)
        return EXIT_USAGE
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            _COMMANDS[args.command](args, argv)
    except (DataError, OSError) as exc:
        print(f"tsnmf: data error: {exc}", file=sys.stderr)
        _record_error(args, argv, exc)
        return EXIT_DATA
    except ValueError as exc:
        print(f"tsnmf: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"tsnmf: numerical failure: {exc}", file=sys.stderr)
        _record_error(args, argv, exc)
        return EXIT_NUMERIC
    return EXIT_OK


def rerun_from_manifest(manifest_path, out_dir):
    """Repeat the CLI run recorded in a manifest, writing to ``out_dir``."""
    manifest = RunManifest.read(manifest_path)
    if not manifest.argv:
        raise ValueError("manifest does not record a command line")
    argv = [a for a in manifest.argv]
    out_dir = Path(out_dir).resolve()
    base = Path(manifest.cwd) if manifest.cwd else Path.cwd()
    fixed = []
    it = iter(argv)
    for a in it:
        flag, eq, val = a.partition("=")
        if flag in ("--out", "--input"):
            val = val if eq else next(it)
            val = str(out_dir) if flag == "--out" else str(base / val)
            fixed += [flag, val]
        else:
            fixed.append(a)
    return main(fixed)


if __name__ == "__main__":
    sys.exit(main())
