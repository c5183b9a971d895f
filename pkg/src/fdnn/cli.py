"""Command-line entry points.

Subcommands: simulate (write a synthetic dataset), fit (train a model from
a labeled CSV), predict (apply a saved model), benchmark (replication
study from a config file), inspect (print a model's selection report and
spectrum), report (render figures from a results CSV).

Exit codes: 0 success, 2 usage errors, 3 data/file errors, 4 numerical
failures.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import bench, dataio, dgp, persist, report
from .classifier import HyperGrid, Candidate, default_hyper_grid, fit_fdnn, predict_fdnn_many
from .dnn import TrainConfig
from .grid import make_equispaced_grid
from .errors import (
    DataFormatError,
    DegenerateDataError,
    EmptyClassError,
    FdnnError,
    IncompatibleGridsError,
    InsufficientDataError,
    InvalidArgumentError,
    NumericalFailureError,
)

__all__ = ["main"]

USAGE_ERROR = 2
DATA_ERROR = 3
NUMERICAL_ERROR = 4


def _parse_axes(raw: str) -> list[int]:
    try:
        axes = [int(tok) for tok in raw.split(",") if tok.strip()]
    except ValueError as exc:
        raise InvalidArgumentError(f"bad grid axes {raw!r}: {exc}") from exc
    if not axes:
        raise InvalidArgumentError("grid axes must be a comma-separated list of counts")
    return axes


def _cmd_simulate(args: argparse.Namespace) -> int:
    spec = dgp.standard_spec(args.dgp)
    if args.grid:
        axes = _parse_axes(args.grid)
        grid = make_equispaced_grid(len(axes), axes)
    else:
        grid = bench.default_grid_for(spec.dim)
    samples, _ = dgp.generate(spec, args.n, grid, args.seed)
    dataio.write_dataset(args.out, samples)
    print(f"wrote {args.n} observations from process {args.dgp} to {args.out}")
    return 0


def _train_config(args: argparse.Namespace) -> TrainConfig:
    return TrainConfig(
        learning_rate=args.learning_rate,
        lr_decay=args.lr_decay,
        epochs=args.epochs,
        batch_size=args.batch_size,
        seed=args.train_seed,
    )


def _hyper_from_args(args: argparse.Namespace, n: int, max_truncation: int) -> HyperGrid:
    if not (args.depths or args.widths or args.truncations or args.bounds):
        return default_hyper_grid(n, max_truncation=max_truncation)
    base = default_hyper_grid(n, max_truncation=max_truncation)
    depths = [int(v) for v in args.depths.split(",")] if args.depths else sorted({c.depth for c in base.candidates})
    widths = [int(v) for v in args.widths.split(",")] if args.widths else sorted({c.width for c in base.candidates})
    truncations = (
        [int(v) for v in args.truncations.split(",")]
        if args.truncations
        else sorted({c.truncation for c in base.candidates})
    )
    bounds = [float(v) for v in args.bounds.split(",")] if args.bounds else sorted({c.bound for c in base.candidates})
    return HyperGrid(
        candidates=tuple(
            Candidate(d, j, w, b) for d in depths for j in truncations for w in widths for b in bounds
        )
    )


def _cmd_fit(args: argparse.Namespace) -> int:
    grid, samples = dataio.read_dataset(args.input)
    if any(s.label is None for s in samples):
        raise DataFormatError(f"{args.input}: fit requires every observation to carry a label")
    hyper = _hyper_from_args(args, len(samples), min(len(samples), grid.size))
    model = fit_fdnn(samples, hyper, _train_config(args), split_seed=args.split_seed)
    persist.save_model(model, args.out)
    sel = model.selected
    print(
        f"fitted on {len(samples)} observations; selected depth={sel.depth} truncation={sel.truncation} "
        f"width={sel.width} bound={sel.bound:g}; wrote {args.out}"
    )
    return 0


def _cmd_predict(args: argparse.Namespace) -> int:
    model = persist.load_model(args.model)
    _, samples = dataio.read_dataset(args.input)
    predictions = predict_fdnn_many(model, samples)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write("label\n")
            for label in predictions:
                fh.write(f"{int(label)}\n")
        print(f"wrote {len(predictions)} labels to {args.out}")
    labels = [s.label for s in samples]
    if all(l is not None for l in labels):
        agreement = float(np.mean(predictions == np.array(labels)))
        print(f"agreement with provided labels: {agreement:.4f} ({len(labels)} observations)")
    elif not args.out:
        for label in predictions:
            print(int(label))
    return 0


def _cmd_benchmark(args: argparse.Namespace) -> int:
    cfg = bench.read_config(args.config)
    if args.out:
        cfg = bench.ExperimentConfig(
            **{**{f: getattr(cfg, f) for f in cfg.__dataclass_fields__}, "output": args.out}
        )
    rows = bench.run_benchmark(cfg)
    print(bench.CSV_HEADER)
    for r in rows:
        print(f"{r.dgp},{r.n},{r.method},{r.rate:.6f},{r.se:.6f},{r.runtime_s:.3f}")
    print(f"wrote {len(rows)} rows to {cfg.output}")
    if args.figures:
        for path in report.render_report(cfg.output, Path(cfg.output).parent):
            print(f"wrote {path}")
    return 0


def _cmd_inspect(args: argparse.Namespace) -> int:
    model = persist.load_model(args.model)
    sel = model.selected
    print(f"model: truncation={model.truncation} depth={sel.depth} width={sel.width} bound={sel.bound:g}")
    print("selection report (depth truncation width bound -> holdout error):")
    for rec in model.selection:
        c = rec.candidate
        marker = " *" if c == sel else ""
        print(f"  {c.depth:3d} {c.truncation:3d} {c.width:4d} {c.bound:8g} -> {rec.error:.4f}{marker}")
    print("eigenvalue spectrum:")
    for j, value in enumerate(model.eigensystem.eigenvalues, start=1):
        print(f"  {j:3d}: {value:.6e}")
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    outdir = args.outdir if args.outdir else Path(args.input).parent
    for path in report.render_report(args.input, outdir):
        print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fdnn",
        description="Functional-data classification: simulate, fit, predict, benchmark, inspect, report.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="write a synthetic labeled dataset to CSV")
    p.add_argument("--dgp", type=int, required=True, choices=(1, 2, 3, 4, 5))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--grid", default="", help="points per axis, e.g. '50' or '7,7' (default per process)")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("fit", help="train a model from a labeled CSV dataset")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--split-seed", type=int, default=0)
    p.add_argument("--learning-rate", type=float, default=TrainConfig().learning_rate)
    p.add_argument("--lr-decay", type=float, default=TrainConfig().lr_decay)
    p.add_argument("--epochs", type=int, default=TrainConfig().epochs)
    p.add_argument("--batch-size", type=int, default=TrainConfig().batch_size)
    p.add_argument("--train-seed", type=int, default=TrainConfig().seed)
    p.add_argument("--depths", default="", help="comma list overriding the depth grid")
    p.add_argument("--widths", default="", help="comma list overriding the width grid")
    p.add_argument("--truncations", default="", help="comma list overriding the truncation grid")
    p.add_argument("--bounds", default="", help="comma list overriding the bound grid")
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("predict", help="apply a saved model to a CSV dataset")
    p.add_argument("--model", required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", default="")
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("benchmark", help="run a replication study from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default="", help="override the output CSV path from the config")
    p.add_argument("--figures", action="store_true", help="also render figures next to the CSV")
    p.set_defaults(func=_cmd_benchmark)

    p = sub.add_parser("inspect", help="print a model's selection report and spectrum")
    p.add_argument("--model", required=True)
    p.set_defaults(func=_cmd_inspect)

    p = sub.add_parser("report", help="render figures from a results CSV")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--outdir", default="")
    p.set_defaults(func=_cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvalidArgumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except NumericalFailureError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return NUMERICAL_ERROR
    except (
        DataFormatError,
        IncompatibleGridsError,
        InsufficientDataError,
        EmptyClassError,
        DegenerateDataError,
        FdnnError,
        FileNotFoundError,
        IsADirectoryError,
        PermissionError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DATA_ERROR


if __name__ == "__main__":
    sys.exit(main())
