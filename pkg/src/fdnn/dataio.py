"""CSV dataset format.

First line:   ``# grid d=<d> axes=<m1,...,md>``
Other lines:  one observation each, N comma-separated values in row-major
grid order, optionally followed by a label column (+1 or -1).

The header describes an equispaced midpoint grid (the package convention);
datasets on custom grids need the grid carried separately.  Values are
written with full round-trip precision.
"""

from __future__ import annotations

import re
from pathlib import Path
from typing import Sequence

from .errors import DataFormatError, InvalidArgumentError
from .grid import FunctionalObservation, SamplingGrid, grids_equal, make_equispaced_grid

__all__ = ["read_dataset", "write_dataset"]

_HEADER_RE = re.compile(r"^#\s*grid\s+d=(\d+)\s+axes=([0-9,]+)\s*$")


def write_dataset(path: str | Path, samples: Sequence[FunctionalObservation]) -> None:
    """Write observations (all on one grid) to the CSV dataset format."""
    if not samples:
        raise InvalidArgumentError("cannot write an empty dataset")
    grid = samples[0].grid
    for s in samples[1:]:
        if not grids_equal(grid, s.grid):
            raise InvalidArgumentError("all observations in a dataset must share one grid")
    axes = ",".join(str(m) for m in grid.points_per_axis)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# grid d={grid.dim} axes={axes}\n")
        for s in samples:
            fields = [repr(float(v)) for v in s.values]
            if s.label is not None:
                fields.append(str(s.label))
            fh.write(",".join(fields) + "\n")


def read_dataset(path: str | Path) -> tuple[SamplingGrid, list[FunctionalObservation]]:
    """Read a CSV dataset, reconstructing its midpoint grid from the header."""
    path = Path(path)
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise DataFormatError(f"{path}:1: empty file, expected a '# grid ...' header")
    m = _HEADER_RE.match(lines[0])
    if m is None:
        raise DataFormatError(f"{path}:1: malformed header {lines[0]!r}, expected '# grid d=<d> axes=<m1,...>'")
    dim = int(m.group(1))
    axes = [int(a) for a in m.group(2).split(",") if a]
    if len(axes) != dim:
        raise DataFormatError(f"{path}:1: header declares d={dim} but lists {len(axes)} axis counts")
    try:
        grid = make_equispaced_grid(dim, axes)
    except InvalidArgumentError as exc:
        raise DataFormatError(f"{path}:1: {exc}") from exc

    samples: list[FunctionalObservation] = []
    n = grid.size
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split(",")
        if len(fields) not in (n, n + 1):
            raise DataFormatError(
                f"{path}:{lineno}: expected {n} values plus optional label, got {len(fields)} fields"
            )
        label: int | None = None
        if len(fields) == n + 1:
            raw = fields[-1].strip()
            if raw not in ("1", "+1", "-1"):
                raise DataFormatError(f"{path}:{lineno}: label must be +1 or -1, got {raw!r}")
            label = int(raw)
            fields = fields[:-1]
        try:
            values = [float(v) for v in fields]
        except ValueError as exc:
            raise DataFormatError(f"{path}:{lineno}: non-numeric value ({exc})") from exc
        samples.append(FunctionalObservation(grid=grid, values=values, label=label))
    if not samples:
        raise DataFormatError(f"{path}:2: dataset contains no observations")
    return grid, samples
