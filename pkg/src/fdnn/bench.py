"""Seeded replication studies and their delimited outputs.

A benchmark run draws, for every requested training size n and replication
r, a fresh train/test pair with seed base+r, fits the network classifier
plus the QDA and KDE baselines on identical features, and scores all of
them (and the analytic optimal rule, when the data come from a synthetic
process) on the same test draws.  Per-method rates are aggregated into
mean and standard error over replications and written as CSV with header
``dgp,n,method,rate,se,runtime_s``.

Replications form an independent work pool keyed by derived seeds, so
serial and parallel runs produce identical results.  Wall-clock runtimes
are the one nondeterministic column; set ``measure_runtime = false`` in
the config to zero them out when byte-identical outputs are needed.

Experiment configs are flat ``key = value`` text with ``[experiment]``,
``[train]`` and optional ``[hyper]`` sections, parsed strictly: unknown
sections or keys are errors.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .classifier import (
    Candidate,
    HyperGrid,
    default_hyper_grid,
    fit_fdnn,
    fit_npbayes,
    fit_qda,
    misclassification_rate,
    predict_fdnn_many,
    predict_npbayes_many,
    predict_qda_many,
)
from .dataio import read_dataset
from .dgp import bayes_classify_many, generate, standard_spec
from .dnn import TrainConfig
from .errors import DataFormatError, InsufficientDataError, InvalidArgumentError
from .fpca import project_scores
from .grid import SamplingGrid, make_equispaced_grid

__all__ = [
    "ExperimentConfig",
    "ResultRow",
    "ReplicationRecord",
    "read_config",
    "run_replications",
    "aggregate_rows",
    "run_benchmark",
    "write_results_csv",
    "read_results_csv",
]

CSV_HEADER = "dgp,n,method,rate,se,runtime_s"


@dataclass(frozen=True)
class ExperimentConfig:
    """What to run: data source, sizes, replication count and knobs."""

    dgp: int | None = None
    input_path: str | None = None
    sizes: tuple[int, ...] = (40, 100, 200, 400)
    replications: int = 20
    test_size: int = 500
    hyper: HyperGrid | None = None
    train: TrainConfig = field(default_factory=TrainConfig)
    base_seed: int = 20260801
    output: str = "results.csv"
    grid_axes: tuple[int, ...] | None = None
    jobs: int = 1
    measure_runtime: bool = True

    def __post_init__(self) -> None:
        if (self.dgp is None) == (self.input_path is None):
            raise InvalidArgumentError("exactly one of dgp and input_path must be set")
        if self.dgp is not None and self.dgp not in (1, 2, 3, 4, 5):
            raise InvalidArgumentError(f"dgp must be in 1..5, got {self.dgp}")
        if self.input_path is not None and not self.input_path:
            raise InvalidArgumentError("input_path must be nonempty")
        object.__setattr__(self, "sizes", tuple(int(n) for n in self.sizes))
        if not self.sizes or any(n < 10 for n in self.sizes):
            raise InvalidArgumentError("sizes must be positive (>= 10) training sample counts")
        if self.replications < 1:
            raise InvalidArgumentError("replications must be >= 1")
        if self.test_size < 1:
            raise InvalidArgumentError("test_size must be >= 1")
        if not self.output:
            raise InvalidArgumentError("output path must be nonempty")
        if self.grid_axes is not None:
            object.__setattr__(self, "grid_axes", tuple(int(m) for m in self.grid_axes))
        if self.jobs < 1:
            raise InvalidArgumentError("jobs must be >= 1")


@dataclass(frozen=True)
class ReplicationRecord:
    """One method's test rate in one replication."""

    dgp: int
    n: int
    replication: int
    method: str
    rate: float
    runtime_s: float


@dataclass(frozen=True)
class ResultRow:
    """Aggregated rate for one (dgp, n, method) cell."""

    dgp: int
    n: int
    method: str
    rate: float
    se: float
    runtime_s: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.rate <= 1.0:
            raise InvalidArgumentError(f"rate must be in [0,1], got {self.rate}")
        if self.se < 0.0:
            raise InvalidArgumentError(f"standard error must be >= 0, got {self.se}")


def default_grid_for(spec_dim: int) -> SamplingGrid:
    """50 points for 1D data, a 7x7 lattice (49 points) for 2D."""
    return make_equispaced_grid(1, [50]) if spec_dim == 1 else make_equispaced_grid(spec_dim, [7] * spec_dim)


def _experiment_grid(cfg: ExperimentConfig) -> SamplingGrid:
    if cfg.grid_axes is not None:
        return make_equispaced_grid(len(cfg.grid_axes), list(cfg.grid_axes))
    return default_grid_for(standard_spec(cfg.dgp).dim)


def _run_replication(cfg: ExperimentConfig, n: int, rep: int) -> list[ReplicationRecord]:
    """Fit and score every method on the replication's train/test draw."""
    seed = cfg.base_seed + rep
    test_xi = None
    spec = None
    if cfg.dgp is not None:
        spec = standard_spec(cfg.dgp)
        grid = _experiment_grid(cfg)
        samples, xi = generate(spec, n + cfg.test_size, grid, seed)
        train_samples, test_samples = samples[:n], samples[n:]
        test_xi = xi[n:]
        dgp_id = cfg.dgp
    else:
        grid, all_samples = read_dataset(cfg.input_path)
        if any(s.label is None for s in all_samples):
            raise DataFormatError(f"{cfg.input_path}: benchmark input must be fully labeled")
        need = n + cfg.test_size
        if len(all_samples) < need:
            raise InsufficientDataError(
                f"{cfg.input_path}: need {need} observations for n={n} plus test size {cfg.test_size}, "
                f"got {len(all_samples)}"
            )
        perm = np.random.default_rng(seed).permutation(len(all_samples))
        train_samples = [all_samples[i] for i in perm[:n]]
        test_samples = [all_samples[i] for i in perm[n:need]]
        dgp_id = 0

    truth = np.array([s.label for s in test_samples])
    hyper = cfg.hyper if cfg.hyper is not None else default_hyper_grid(n, max_truncation=min(n, grid.size))
    clock = time.perf_counter if cfg.measure_runtime else (lambda: 0.0)
    records = []

    start = clock()
    model = fit_fdnn(train_samples, hyper, cfg.train, split_seed=seed)
    fdnn_rate = misclassification_rate(predict_fdnn_many(model, test_samples), truth)
    records.append(ReplicationRecord(dgp_id, n, rep, "FDNN", fdnn_rate, clock() - start))

    start = clock()
    train_scores = project_scores(train_samples, model.eigensystem, model.truncation)
    test_scores = project_scores(test_samples, model.eigensystem, model.truncation).scores
    qda_rate = misclassification_rate(predict_qda_many(fit_qda(train_scores), test_scores), truth)
    records.append(ReplicationRecord(dgp_id, n, rep, "QD", qda_rate, clock() - start))

    start = clock()
    nb_rate = misclassification_rate(predict_npbayes_many(fit_npbayes(train_scores), test_scores), truth)
    records.append(ReplicationRecord(dgp_id, n, rep, "NB", nb_rate, clock() - start))

    if spec is not None:
        start = clock()
        bayes_rate = misclassification_rate(bayes_classify_many(spec, test_xi), truth)
        records.append(ReplicationRecord(dgp_id, n, rep, "BAYES", bayes_rate, clock() - start))
    return records


def _replication_task(args: tuple[ExperimentConfig, int, int]) -> tuple[int, int, list[ReplicationRecord]]:
    cfg, n, rep = args
    return n, rep, _run_replication(cfg, n, rep)


def run_replications(cfg: ExperimentConfig) -> list[ReplicationRecord]:
    """All per-replication records, in deterministic (size, replication) order."""
    tasks = [(cfg, n, rep) for n in cfg.sizes for rep in range(cfg.replications)]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            keyed = {(n, rep): recs for n, rep, recs in pool.map(_replication_task, tasks)}
        results = [keyed[(n, rep)] for _, n, rep in tasks]
    else:
        results = [_run_replication(cfg, n, rep) for _, n, rep in tasks]
    return [rec for recs in results for rec in recs]


def aggregate_rows(records: list[ReplicationRecord]) -> list[ResultRow]:
    """Mean rate, standard error (sd/sqrt(R)) and mean runtime per cell."""
    cells: dict[tuple[int, int, str], list[ReplicationRecord]] = {}
    for rec in records:
        cells.setdefault((rec.dgp, rec.n, rec.method), []).append(rec)
    rows = []
    for (dgp_id, n, method), recs in sorted(cells.items()):
        rates = np.array([r.rate for r in sorted(recs, key=lambda r: r.replication)])
        se = float(rates.std(ddof=1) / np.sqrt(rates.size)) if rates.size > 1 else 0.0
        runtime = float(np.mean([r.runtime_s for r in recs]))
        rows.append(ResultRow(dgp_id, n, method, float(rates.mean()), se, runtime))
    return rows


def run_benchmark(cfg: ExperimentConfig) -> list[ResultRow]:
    """Run the replication study and write the aggregated CSV to cfg.output."""
    rows = aggregate_rows(run_replications(cfg))
    write_results_csv(rows, cfg.output)
    return rows


def write_results_csv(rows: list[ResultRow], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(CSV_HEADER + "\n")
        for r in rows:
            fh.write(f"{r.dgp},{r.n},{r.method},{r.rate!r},{r.se!r},{r.runtime_s!r}\n")


def read_results_csv(path: str | Path) -> list[ResultRow]:
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise DataFormatError(f"{path}:1: expected header {CSV_HEADER!r}")
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split(",")
        if len(fields) != 6:
            raise DataFormatError(f"{path}:{lineno}: expected 6 fields, got {len(fields)}")
        try:
            rows.append(
                ResultRow(
                    dgp=int(fields[0]),
                    n=int(fields[1]),
                    method=fields[2],
                    rate=float(fields[3]),
                    se=float(fields[4]),
                    runtime_s=float(fields[5]),
                )
            )
        except (ValueError, InvalidArgumentError) as exc:
            raise DataFormatError(f"{path}:{lineno}: {exc}") from exc
    return rows


_EXPERIMENT_KEYS = {
    "dgp",
    "input",
    "sizes",
    "replications",
    "test_size",
    "base_seed",
    "output",
    "grid",
    "jobs",
    "measure_runtime",
}
_TRAIN_KEYS = {"learning_rate", "lr_decay", "epochs", "batch_size", "seed", "init_scale"}
_HYPER_KEYS = {"depths", "widths", "truncations", "bounds"}


def _parse_bool(raw: str, where: str) -> bool:
    if raw.lower() in ("true", "yes", "1"):
        return True
    if raw.lower() in ("false", "no", "0"):
        return False
    raise DataFormatError(f"{where}: expected true/false, got {raw!r}")


def _parse_int_list(raw: str, where: str) -> tuple[int, ...]:
    try:
        values = tuple(int(tok.strip()) for tok in raw.split(",") if tok.strip())
    except ValueError as exc:
        raise DataFormatError(f"{where}: bad integer list ({exc})") from exc
    if not values:
        raise DataFormatError(f"{where}: empty list")
    return values


def _parse_float_list(raw: str, where: str) -> tuple[float, ...]:
    try:
        values = tuple(float(tok.strip()) for tok in raw.split(",") if tok.strip())
    except ValueError as exc:
        raise DataFormatError(f"{where}: bad number list ({exc})") from exc
    if not values:
        raise DataFormatError(f"{where}: empty list")
    return values


def read_config(path: str | Path) -> ExperimentConfig:
    """Parse a flat key = value config file, rejecting unknown keys."""
    path = Path(path)
    sections: dict[str, dict[str, tuple[str, int]]] = {"experiment": {}, "train": {}, "hyper": {}}
    current: str | None = None
    for lineno, raw_line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if name not in sections:
                raise DataFormatError(f"{path}:{lineno}: unknown section [{name}]")
            current = name
            continue
        head, sep, tail = line.partition("=")
        if not sep:
            raise DataFormatError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        if current is None:
            raise DataFormatError(f"{path}:{lineno}: key outside any section")
        key = head.strip()
        known = {"experiment": _EXPERIMENT_KEYS, "train": _TRAIN_KEYS, "hyper": _HYPER_KEYS}[current]
        if key not in known:
            raise DataFormatError(f"{path}:{lineno}: unknown key {key!r} in [{current}]")
        if key in sections[current]:
            raise DataFormatError(f"{path}:{lineno}: duplicate key {key!r} in [{current}]")
        sections[current][key] = (tail.strip(), lineno)

    def where(section: str, key: str) -> str:
        return f"{path}:{sections[section][key][1]}"

    exp = sections["experiment"]
    kwargs: dict = {}
    if "dgp" in exp:
        try:
            kwargs["dgp"] = int(exp["dgp"][0])
        except ValueError as exc:
            raise DataFormatError(f"{where('experiment', 'dgp')}: bad integer ({exc})") from exc
    if "input" in exp:
        kwargs["input_path"] = exp["input"][0]
    if "dgp" not in exp and "input" not in exp:
        raise DataFormatError(f"{path}: config must set either 'dgp' or 'input' in [experiment]")
    if "sizes" in exp:
        kwargs["sizes"] = _parse_int_list(exp["sizes"][0], where("experiment", "sizes"))
    for key, name in (("replications", "replications"), ("test_size", "test_size"), ("base_seed", "base_seed"), ("jobs", "jobs")):
        if key in exp:
            try:
                kwargs[name] = int(exp[key][0])
            except ValueError as exc:
                raise DataFormatError(f"{where('experiment', key)}: bad integer ({exc})") from exc
    if "output" in exp:
        kwargs["output"] = exp["output"][0]
    if "grid" in exp:
        kwargs["grid_axes"] = _parse_int_list(exp["grid"][0], where("experiment", "grid"))
    if "measure_runtime" in exp:
        kwargs["measure_runtime"] = _parse_bool(exp["measure_runtime"][0], where("experiment", "measure_runtime"))

    train_kwargs: dict = {}
    tr = sections["train"]
    for key, cast in (
        ("learning_rate", float),
        ("lr_decay", float),
        ("epochs", int),
        ("batch_size", int),
        ("seed", int),
        ("init_scale", float),
    ):
        if key in tr:
            try:
                train_kwargs[key] = cast(tr[key][0])
            except ValueError as exc:
                raise DataFormatError(f"{where('train', key)}: bad value ({exc})") from exc
    try:
        kwargs["train"] = TrainConfig(**train_kwargs)
    except InvalidArgumentError as exc:
        raise DataFormatError(f"{path}: [train] {exc}") from exc

    hyp = sections["hyper"]
    if hyp:
        missing = _HYPER_KEYS - set(hyp)
        if missing:
            raise DataFormatError(f"{path}: [hyper] requires all of {sorted(_HYPER_KEYS)}, missing {sorted(missing)}")
        depths = _parse_int_list(hyp["depths"][0], where("hyper", "depths"))
        truncations = _parse_int_list(hyp["truncations"][0], where("hyper", "truncations"))
        widths = _parse_int_list(hyp["widths"][0], where("hyper", "widths"))
        bounds = _parse_float_list(hyp["bounds"][0], where("hyper", "bounds"))
        candidates = tuple(
            Candidate(depth, j, width, bound)
            for depth in depths
            for j in truncations
            for width in widths
            for bound in bounds
        )
        kwargs["hyper"] = HyperGrid(candidates=candidates)

    try:
        return ExperimentConfig(**kwargs)
    except InvalidArgumentError as exc:
        raise DataFormatError(f"{path}: {exc}") from exc
