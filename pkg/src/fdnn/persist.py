"""Self-describing flat text persistence for fitted models.

Layout (fixed field order, so files are diffable):

    fdnn model v1
    [grid]
    dim, points_per_axis, axis_<k> (one per axis), weights
    [eigensystem]
    components, mean_function, eigenvalues, eigenfunction_<j> (one per component)
    [network]
    input_dim, depth, widths, bound,
    weight_0, shift_1, weight_1, ..., shift_<L>, weight_<L>
    [selection]
    selected, candidates, candidate_<i> (one per candidate)

Every number is written with full round-trip precision (repr).  Matrices
are flattened row-major; candidate lines read
``depth truncation width bound error`` (``selected`` omits the error).
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .classifier import Candidate, FDNNModel, SelectionRecord
from .dnn import NetworkParams
from .errors import DataFormatError, FdnnError
from .fpca import EigenSystem
from .grid import SamplingGrid

__all__ = ["save_model", "load_model"]

_MAGIC = "fdnn model v1"


def _fmt_vector(values) -> str:
    return " ".join(repr(float(v)) for v in np.asarray(values).reshape(-1))


def save_model(model: FDNNModel, path: str | Path) -> None:
    """Write a fitted model to the flat text format."""
    eig = model.eigensystem
    grid = eig.grid
    lines = [_MAGIC, "[grid]", f"dim = {grid.dim}"]
    lines.append("points_per_axis = " + " ".join(str(m) for m in grid.points_per_axis))
    for k, coords in enumerate(grid.coordinates):
        lines.append(f"axis_{k} = " + _fmt_vector(coords))
    lines.append("weights = " + _fmt_vector(grid.weights))

    lines.append("[eigensystem]")
    lines.append(f"components = {eig.count}")
    lines.append("mean_function = " + _fmt_vector(eig.mean_function))
    lines.append("eigenvalues = " + _fmt_vector(eig.eigenvalues))
    for j in range(eig.count):
        lines.append(f"eigenfunction_{j} = " + _fmt_vector(eig.eigenfunctions[j]))

    params = model.params
    lines.append("[network]")
    lines.append(f"input_dim = {params.input_dim}")
    lines.append(f"depth = {params.depth}")
    lines.append("widths = " + " ".join(str(w.shape[0]) for w in params.weights[:-1]))
    lines.append(f"bound = {params.bound!r}")
    lines.append("weight_0 = " + _fmt_vector(params.weights[0]))
    for l in range(1, params.depth + 1):
        lines.append(f"shift_{l} = " + _fmt_vector(params.shifts[l - 1]))
        lines.append(f"weight_{l} = " + _fmt_vector(params.weights[l]))

    lines.append("[selection]")
    sel = model.selected
    lines.append(f"selected = {sel.depth} {sel.truncation} {sel.width} {sel.bound!r}")
    lines.append(f"candidates = {len(model.selection)}")
    for i, rec in enumerate(model.selection):
        c = rec.candidate
        lines.append(f"candidate_{i} = {c.depth} {c.truncation} {c.width} {c.bound!r} {rec.error!r}")

    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


class _Reader:
    """Sequential key = value reader with path:line error context."""

    def __init__(self, path: Path):
        self.path = path
        self.lines = path.read_text(encoding="utf-8").splitlines()
        self.pos = 0

    def fail(self, message: str) -> DataFormatError:
        return DataFormatError(f"{self.path}:{self.pos}: {message}")

    def next_line(self) -> str:
        if self.pos >= len(self.lines):
            self.pos = len(self.lines)
            raise DataFormatError(f"{self.path}:{self.pos + 1}: unexpected end of file")
        line = self.lines[self.pos]
        self.pos += 1
        return line.strip()

    def expect(self, literal: str) -> None:
        line = self.next_line()
        if line != literal:
            raise self.fail(f"expected {literal!r}, got {line!r}")

    def value(self, key: str) -> str:
        line = self.next_line()
        head, sep, tail = line.partition("=")
        if not sep or head.strip() != key:
            raise self.fail(f"expected key {key!r}, got {line!r}")
        return tail.strip()

    def ints(self, key: str) -> list[int]:
        try:
            return [int(tok) for tok in self.value(key).split()]
        except ValueError as exc:
            raise self.fail(f"bad integer list for {key}: {exc}") from exc

    def floats(self, key: str) -> np.ndarray:
        try:
            return np.array([float(tok) for tok in self.value(key).split()])
        except ValueError as exc:
            raise self.fail(f"bad number list for {key}: {exc}") from exc

    def int_scalar(self, key: str) -> int:
        vals = self.ints(key)
        if len(vals) != 1:
            raise self.fail(f"expected one integer for {key}")
        return vals[0]

    def float_scalar(self, key: str) -> float:
        vals = self.floats(key)
        if vals.size != 1:
            raise self.fail(f"expected one number for {key}")
        return float(vals[0])


def load_model(path: str | Path) -> FDNNModel:
    """Read a model written by save_model."""
    reader = _Reader(Path(path))
    reader.expect(_MAGIC)
    try:
        reader.expect("[grid]")
        dim = reader.int_scalar("dim")
        counts = reader.ints("points_per_axis")
        coords = [reader.floats(f"axis_{k}") for k in range(dim)]
        weights = reader.floats("weights")
        grid = SamplingGrid(dim=dim, points_per_axis=tuple(counts), coordinates=tuple(coords), weights=weights)

        reader.expect("[eigensystem]")
        components = reader.int_scalar("components")
        mean_function = reader.floats("mean_function")
        eigenvalues = reader.floats("eigenvalues")
        funcs = np.stack([reader.floats(f"eigenfunction_{j}") for j in range(components)])
        eig = EigenSystem(grid=grid, eigenvalues=eigenvalues, eigenfunctions=funcs, mean_function=mean_function)

        reader.expect("[network]")
        input_dim = reader.int_scalar("input_dim")
        depth = reader.int_scalar("depth")
        widths = reader.ints("widths")
        if len(widths) != depth:
            raise reader.fail(f"expected {depth} widths, got {len(widths)}")
        bound = reader.float_scalar("bound")
        sizes = [input_dim, *widths, 1]
        weight_arrays = []
        shift_arrays = []
        flat = reader.floats("weight_0")
        weight_arrays.append(flat.reshape(sizes[1], sizes[0]))
        for l in range(1, depth + 1):
            shift_arrays.append(reader.floats(f"shift_{l}"))
            weight_arrays.append(reader.floats(f"weight_{l}").reshape(sizes[l + 1], sizes[l]))
        params = NetworkParams(weights=tuple(weight_arrays), shifts=tuple(shift_arrays), bound=bound)

        reader.expect("[selection]")
        sel_tok = reader.value("selected").split()
        if len(sel_tok) != 4:
            raise reader.fail("selected must read 'depth truncation width bound'")
        selected = Candidate(int(sel_tok[0]), int(sel_tok[1]), int(sel_tok[2]), float(sel_tok[3]))
        count = reader.int_scalar("candidates")
        records = []
        for i in range(count):
            tok = reader.value(f"candidate_{i}").split()
            if len(tok) != 5:
                raise reader.fail("candidate must read 'depth truncation width bound error'")
            records.append(
                SelectionRecord(Candidate(int(tok[0]), int(tok[1]), int(tok[2]), float(tok[3])), float(tok[4]))
            )
        return FDNNModel(
            eigensystem=eig,
            truncation=input_dim,
            params=params,
            selection=tuple(records),
            selected=selected,
        )
    except DataFormatError:
        raise
    except (FdnnError, ValueError) as exc:
        raise reader.fail(str(exc)) from exc
