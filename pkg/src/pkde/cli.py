"""Command-line entry point: generate synthetic data, run a detector,
sweep contamination levels, and benchmark timings.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
Outputs are fully computed before any file is written, so a failing run
never leaves a partial output behind.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from . import metrics
from .datasets import SYNTH_KINDS, SynthSpec, gen_synthetic, load_csv, write_csv
from .detector import DETECTOR_IDS, DetectorConfig, detect
from .errors import DataError, InvalidInputError, NumericalError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pkde",
        description="PCA + KDE outlier detection, baselines and evaluation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic labeled dataset")
    p.add_argument("--kind", choices=SYNTH_KINDS, default="gaussian-planted")
    p.add_argument("--n", type=int, default=100, help="number of normal points")
    p.add_argument("--outliers", type=int, default=0, help="planted outliers")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rho", type=float, default=0.5)
    p.add_argument("--distance", type=float, default=10.0)
    p.add_argument("--separation", type=float, default=4.0)
    p.add_argument("--variance-ratio", type=float, default=0.25)
    p.add_argument("-o", "--output", required=True)

    def add_io(p):
        p.add_argument("-i", "--input", required=True, help="input CSV path")
        p.add_argument("--no-header", action="store_true",
                       help="input CSV has no header row")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("-o", "--output", default=None,
                       help="output path (default: stdout)")

    def add_detector_opts(p):
        p.add_argument("--variance-threshold", type=float, default=0.90)
        p.add_argument("--fixed-dim", type=int, default=None)
        p.add_argument("--bandwidth-rule", choices=("scott", "scott-squared"),
                       default="scott")
        p.add_argument("-k", "--neighbors", type=int, default=10,
                       help="k for the kNN-distance and LOF baselines")

    p = sub.add_parser("detect", help="score and label one dataset")
    add_io(p)
    p.add_argument("--label-column", default=None,
                   help="column name or 'last'; dropped from the features")
    p.add_argument("--detector", choices=DETECTOR_IDS, default="pkde")
    p.add_argument("--contamination", type=float, required=True)
    add_detector_opts(p)

    p = sub.add_parser("sweep", help="F1 over a contamination grid")
    add_io(p)
    p.add_argument("--label-column", default="last",
                   help="column name or 'last' (ground truth is required)")
    p.add_argument("--detectors", default=",".join(DETECTOR_IDS),
                   help="comma-separated detector ids")
    p.add_argument("--grid", default=None,
                   help="comma-separated contamination values "
                        "(default 0.01..0.30 step 0.01)")
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--plot-data", default=None,
                   help="also write a long-format (contamination,detector,f1) CSV")
    add_detector_opts(p)

    p = sub.add_parser("bench", help="timing table over datasets x detectors")
    p.add_argument("-i", "--input", action="append", required=True,
                   help="input CSV path; repeat for several datasets")
    p.add_argument("--no-header", action="store_true")
    p.add_argument("--label-column", default=None)
    p.add_argument("--detectors", default=",".join(DETECTOR_IDS))
    p.add_argument("--contamination", type=float, default=0.1)
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("-o", "--output", default=None)

    return parser


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _load(path, args, label_column):
    # Anything wrong with an input file is a data error (exit 2), even when
    # the library reports it as an invalid-input condition.
    try:
        return load_csv(path, has_header=not args.no_header,
                        label_column=label_column)
    except InvalidInputError as exc:
        raise DataError(str(exc)) from exc


def _config(args, contamination: float) -> DetectorConfig:
    return DetectorConfig(
        contamination=contamination,
        variance_threshold=args.variance_threshold,
        fixed_dim=args.fixed_dim,
        bandwidth_rule=args.bandwidth_rule,
        neighbors=args.neighbors,
    )


def _cmd_synth(args) -> int:
    spec = SynthSpec(
        kind=args.kind,
        n_normal=args.n,
        n_outlier=args.outliers,
        dim=args.dim,
        seed=args.seed,
        rho=args.rho,
        distance=args.distance,
        separation=args.separation,
        variance_ratio=args.variance_ratio,
    )
    write_csv(gen_synthetic(spec), args.output)
    return EXIT_OK


def _cmd_detect(args) -> int:
    ds = _load(args.input, args, args.label_column)
    result = detect(args.detector, ds.X, _config(args, args.contamination))
    if args.format == "json":
        text = json.dumps(
            {
                "detector": args.detector,
                "k_used": result.k_used,
                "reduced_dim": result.reduced_dim,
                "fit_time": result.fit_time,
                "score_time": result.score_time,
                "points": [
                    {"index": i, "score": float(s), "label": int(l)}
                    for i, (s, l) in enumerate(zip(result.scores, result.labels))
                ],
            },
            indent=2,
        ) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["index", "score", "label"])
        for i, (s, l) in enumerate(zip(result.scores, result.labels)):
            writer.writerow([i, repr(float(s)), int(l)])
        text = buf.getvalue()
    _emit(text, args.output)
    return EXIT_OK


def _parse_grid(text: str | None) -> list[float]:
    if text is None:
        return metrics.default_grid()
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise InvalidInputError(f"bad --grid value: {text!r}") from None


def _cmd_sweep(args) -> int:
    ds = _load(args.input, args, args.label_column)
    reports = metrics.sweep(
        [d.strip() for d in args.detectors.split(",") if d.strip()],
        ds,
        _parse_grid(args.grid),
        repeats=args.repeats,
        variance_threshold=args.variance_threshold,
        fixed_dim=args.fixed_dim,
        bandwidth_rule=args.bandwidth_rule,
        neighbors=args.neighbors,
    )
    if args.format == "json":
        text = metrics.reports_to_json(reports)
    else:
        text = metrics.reports_to_csv(reports)
    plot_text = None
    if args.plot_data is not None:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["contamination", "detector", "f1"])
        for r in reports:
            writer.writerow([repr(r.contamination), r.detector, repr(r.f1)])
        plot_text = buf.getvalue()
    _emit(text, args.output)
    if plot_text is not None:
        _emit(plot_text, args.plot_data)
    return EXIT_OK


def _cmd_bench(args) -> int:
    names = [d.strip() for d in args.detectors.split(",") if d.strip()]
    rows = []
    for path in args.input:
        ds = _load(path, args, args.label_column)
        cfg = DetectorConfig(contamination=args.contamination)
        row: dict[str, object] = {"dataset": ds.name}
        for name in names:
            totals = []
            for _ in range(args.repeats):
                result = detect(name, ds.X, cfg)
                totals.append(result.fit_time + result.score_time)
            row[name] = sum(totals) / len(totals)
        rows.append(row)
    if args.format == "json":
        text = json.dumps(rows, indent=2) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["dataset"] + names)
        for row in rows:
            writer.writerow([row["dataset"]] + [repr(row[n]) for n in names])
        text = buf.getvalue()
    _emit(text, args.output)
    return EXIT_OK


_COMMANDS = {
    "synth": _cmd_synth,
    "detect": _cmd_detect,
    "sweep": _cmd_sweep,
    "bench": _cmd_bench,
}


def run(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except InvalidInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, FileNotFoundError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
