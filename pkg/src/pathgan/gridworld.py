"""Occupancy-grid world model.

Holds the binary map of public-access cells, binary path frames over that
map, the (source, destination) class table, trajectory synthesis that stands
in for crowd-sourced walking data, and the deviation safety score used to
judge generated paths.

Coordinate convention: a cell is ``(x, y)`` where ``x`` is the row index
(vertical, 0 at the top) and ``y`` is the column index (horizontal). CSV
files are row-major: line ``x``, field ``y``.
"""

from __future__ import annotations

import csv
import io
from collections import deque
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import (
    EmptyMap,
    InvalidSpec,
    MalformedCsv,
    ShapeMismatch,
    Unreachable,
)

Cell = tuple[int, int]

# 4-connectivity: N, S, W, E
NEIGHBOR_OFFSETS: tuple[Cell, ...] = ((-1, 0), (1, 0), (0, -1), (0, 1))

DEFAULT_ROWS = 19
DEFAULT_COLS = 13


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _check_binary(arr: np.ndarray, what: str) -> None:
    if not np.isin(arr, (0, 1)).all():
        bad = arr[~np.isin(arr, (0, 1))].flat[0]
        raise MalformedCsv(f"{what} entries must be 0 or 1, found {bad!r}")


@dataclass(eq=False, frozen=True)
class GridMap:
    """Binary occupancy matrix; entry 1 marks a public-access cell."""

    cells: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.cells)
        if arr.ndim != 2:
            raise ShapeMismatch(f"map must be 2-D, got shape {arr.shape}")
        _check_binary(arr, "map")
        arr = arr.astype(np.uint8)
        if not arr.any():
            raise EmptyMap("map has no public-access cell")
        arr.flags.writeable = False
        object.__setattr__(self, "cells", arr)

    @property
    def rows(self) -> int:
        return self.cells.shape[0]

    @property
    def cols(self) -> int:
        return self.cells.shape[1]

    @property
    def public_count(self) -> int:
        return int(self.cells.sum())

    def in_bounds(self, cell: Cell) -> bool:
        x, y = cell
        return 0 <= x < self.rows and 0 <= y < self.cols

    def is_public(self, cell: Cell) -> bool:
        return self.in_bounds(cell) and self.cells[cell] == 1

    def public_cells(self) -> list[Cell]:
        return [tuple(c) for c in np.argwhere(self.cells == 1)]


@dataclass(eq=False, frozen=True)
class PathFrame:
    """Binary matrix with the same shape as its map; 1 marks a path cell."""

    cells: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.cells)
        if arr.ndim != 2:
            raise ShapeMismatch(f"frame must be 2-D, got shape {arr.shape}")
        _check_binary(arr, "frame")
        arr = arr.astype(np.uint8)
        arr.flags.writeable = False
        object.__setattr__(self, "cells", arr)

    @property
    def rows(self) -> int:
        return self.cells.shape[0]

    @property
    def cols(self) -> int:
        return self.cells.shape[1]

    def set_cells(self) -> list[Cell]:
        return [tuple(c) for c in np.argwhere(self.cells == 1)]

    def count(self) -> int:
        return int(self.cells.sum())

    def __eq__(self, other) -> bool:
        return isinstance(other, PathFrame) and np.array_equal(self.cells, other.cells)


def frame_from_cells(cells: Iterable[Cell], rows: int, cols: int) -> PathFrame:
    arr = np.zeros((rows, cols), dtype=np.uint8)
    for x, y in cells:
        arr[x, y] = 1
    return PathFrame(arr)


@dataclass(frozen=True)
class PathClassEntry:
    """One (source, destination) coding of the class table."""

    class_id: int
    source: Cell
    destination: Cell


@dataclass(frozen=True)
class PathClassTable:
    """Ordered class codings; ids must be contiguous from 0."""

    entries: tuple[PathClassEntry, ...]

    def __post_init__(self):
        entries = tuple(self.entries)
        ids = [e.class_id for e in entries]
        if ids != list(range(len(entries))):
            raise InvalidSpec(f"class ids must be contiguous from 0, got {ids}")
        object.__setattr__(self, "entries", entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[PathClassEntry]:
        return iter(self.entries)

    def entry(self, class_id: int) -> PathClassEntry:
        if not 0 <= class_id < len(self.entries):
            raise InvalidSpec(
                f"unknown class {class_id}; valid classes are 0..{len(self.entries) - 1}"
            )
        return self.entries[class_id]

    def check_on_map(self, grid: GridMap) -> None:
        """Raise InvalidSpec unless every endpoint is a public cell."""
        for e in self.entries:
            for name, cell in (("source", e.source), ("destination", e.destination)):
                if not grid.is_public(cell):
                    raise InvalidSpec(
                        f"class {e.class_id} {name} {cell} is not a public cell"
                    )


@dataclass(eq=False)
class PathDataset:
    """Labeled path frames drawn from one map and class table."""

    frames: list[PathFrame]
    labels: list[int]
    class_table: PathClassTable

    def __post_init__(self):
        if len(self.frames) != len(self.labels):
            raise ShapeMismatch(
                f"{len(self.frames)} frames but {len(self.labels)} labels"
            )
        for i, label in enumerate(self.labels):
            entry = self.class_table.entry(label)
            f = self.frames[i]
            if f.cells[entry.source] != 1 or f.cells[entry.destination] != 1:
                raise InvalidSpec(
                    f"frame {i} does not mark the endpoints of its class {label}"
                )

    def __len__(self) -> int:
        return len(self.frames)

    def frame_matrix(self, dtype=np.float64) -> np.ndarray:
        """All frames flattened row-major into an (n, rows*cols) 0/1 matrix."""
        return np.stack([f.cells.reshape(-1) for f in self.frames]).astype(dtype)

    def signed_matrix(self, dtype=np.float64) -> np.ndarray:
        """Frames in the signed encoding used for training: 0 -> -1, 1 -> +1."""
        return self.frame_matrix(dtype) * 2.0 - 1.0

    def label_array(self) -> np.ndarray:
        return np.asarray(self.labels, dtype=np.int64)


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of checking one frame against the map and a class entry."""

    endpoints_present: bool
    connected: bool
    inside_map: bool
    missing_endpoints: int
    component_count: int
    outside_cells: int

    @property
    def ok(self) -> bool:
        return self.endpoints_present and self.connected and self.inside_map


# ---------------------------------------------------------------------------
# CSV I/O
# ---------------------------------------------------------------------------

def _read_binary_csv(source, what: str) -> np.ndarray:
    """Parse a headerless CSV of 0/1 integers into a 2-D uint8 array."""
    if isinstance(source, (str, Path)):
        with open(source, "r", newline="") as fh:
            return _read_binary_csv(fh, what)
    if isinstance(source, (bytes, bytearray)):
        return _read_binary_csv(io.StringIO(source.decode("utf-8")), what)
    if hasattr(source, "read") and isinstance(source.read(0), bytes):
        source = io.TextIOWrapper(source, encoding="utf-8")

    rows: list[list[int]] = []
    for lineno, line in enumerate(csv.reader(source), start=1):
        if not line:
            continue
        try:
            values = [int(v) for v in line]
        except ValueError as exc:
            raise MalformedCsv(f"{what} line {lineno}: non-integer entry") from exc
        rows.append(values)
    if not rows:
        raise MalformedCsv(f"{what}: no rows")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise MalformedCsv(f"{what}: ragged rows (expected width {width})")
    arr = np.asarray(rows, dtype=np.int64)
    _check_binary(arr, what)
    return arr.astype(np.uint8)


def load_map(source) -> GridMap:
    """Load an occupancy map from a CSV path, text stream, or bytes."""
    return GridMap(_read_binary_csv(source, "map"))


def read_path_frame(source, grid: GridMap | None = None) -> PathFrame:
    """Read one path frame; if a map is given the shapes must agree."""
    arr = _read_binary_csv(source, "frame")
    if grid is not None and arr.shape != grid.cells.shape:
        raise ShapeMismatch(
            f"frame shape {arr.shape} does not match map shape {grid.cells.shape}"
        )
    return PathFrame(arr)


def write_path_frame(frame: PathFrame, dest) -> None:
    """Write a frame as rows of comma-separated 0/1 integers."""
    text = "".join(",".join(str(v) for v in row) + "\n" for row in frame.cells)
    if isinstance(dest, (str, Path)):
        with open(dest, "w", newline="") as fh:
            fh.write(text)
    else:
        dest.write(text)


def read_class_table(source, grid: GridMap | None = None) -> PathClassTable:
    """Read a class table CSV with header ``class,x1,y1,x2,y2``."""
    if isinstance(source, (str, Path)):
        with open(source, "r", newline="") as fh:
            return read_class_table(fh, grid)
    reader = csv.reader(source)
    try:
        header = next(reader)
    except StopIteration:
        raise MalformedCsv("class table: empty file") from None
    if [h.strip() for h in header] != ["class", "x1", "y1", "x2", "y2"]:
        raise MalformedCsv(f"class table: unexpected header {header}")
    entries = []
    for lineno, line in enumerate(reader, start=2):
        if not line:
            continue
        try:
            cid, x1, y1, x2, y2 = (int(v) for v in line)
        except ValueError as exc:
            raise MalformedCsv(f"class table line {lineno}: expected 5 integers") from exc
        entries.append(PathClassEntry(cid, (x1, y1), (x2, y2)))
    table = PathClassTable(tuple(entries))
    if grid is not None:
        table.check_on_map(grid)
    return table


def write_class_table(table: PathClassTable, dest) -> None:
    text = "class,x1,y1,x2,y2\n" + "".join(
        f"{e.class_id},{e.source[0]},{e.source[1]},{e.destination[0]},{e.destination[1]}\n"
        for e in table.entries
    )
    if isinstance(dest, (str, Path)):
        with open(dest, "w", newline="") as fh:
            fh.write(text)
    else:
        dest.write(text)


def default_map() -> GridMap:
    """The packaged 19x13 library floor map."""
    data = resources.files("pathgan.data").joinpath("library_map.csv").read_text()
    return load_map(io.StringIO(data))


def default_class_table(grid: GridMap | None = None) -> PathClassTable:
    """The packaged 6-class source/destination coding."""
    data = resources.files("pathgan.data").joinpath("path_classes.csv").read_text()
    return read_class_table(io.StringIO(data), grid)


# ---------------------------------------------------------------------------
# Geometry
# ---------------------------------------------------------------------------

def neighbors4(cell: Cell, rows: int, cols: int) -> list[Cell]:
    x, y = cell
    out = []
    for dx, dy in NEIGHBOR_OFFSETS:
        nx, ny = x + dx, y + dy
        if 0 <= nx < rows and 0 <= ny < cols:
            out.append((nx, ny))
    return out


def bfs_distances(grid: GridMap, source: Cell) -> np.ndarray:
    """4-connected BFS distance over public cells; -1 where unreachable."""
    if not grid.is_public(source):
        raise InvalidSpec(f"source {source} is not a public cell")
    dist = np.full((grid.rows, grid.cols), -1, dtype=np.int64)
    dist[source] = 0
    queue = deque([source])
    while queue:
        cur = queue.popleft()
        d = dist[cur] + 1
        for nbr in neighbors4(cur, grid.rows, grid.cols):
            if grid.cells[nbr] == 1 and dist[nbr] < 0:
                dist[nbr] = d
                queue.append(nbr)
    return dist


def component_labels(mask: np.ndarray) -> tuple[np.ndarray, int]:
    """Label 4-connected components of a boolean mask.

    Returns (labels, count) where labels holds 0 for background and
    1..count per component, numbered in row-major discovery order.
    """
    mask = np.asarray(mask, dtype=bool)
    rows, cols = mask.shape
    labels = np.zeros((rows, cols), dtype=np.int64)
    count = 0
    for x in range(rows):
        for y in range(cols):
            if mask[x, y] and labels[x, y] == 0:
                count += 1
                queue = deque([(x, y)])
                labels[x, y] = count
                while queue:
                    cur = queue.popleft()
                    for nbr in neighbors4(cur, rows, cols):
                        if mask[nbr] and labels[nbr] == 0:
                            labels[nbr] = count
                            queue.append(nbr)
    return labels, count


# ---------------------------------------------------------------------------
# Core operations
# ---------------------------------------------------------------------------

def validate_path_frame(
    frame: PathFrame, grid: GridMap, entry: PathClassEntry
) -> ValidationReport:
    """Check endpoint presence, 4-connectivity, and containment in public area."""
    if frame.cells.shape != grid.cells.shape:
        raise ShapeMismatch(
            f"frame shape {frame.cells.shape} vs map shape {grid.cells.shape}"
        )
    missing = int(frame.cells[entry.source] != 1) + int(
        frame.cells[entry.destination] != 1
    )
    outside = int((frame.cells & (1 - grid.cells)).sum())
    _, n_components = component_labels(frame.cells == 1)
    return ValidationReport(
        endpoints_present=missing == 0,
        connected=n_components == 1,
        inside_map=outside == 0,
        missing_endpoints=missing,
        component_count=n_components,
        outside_cells=outside,
    )


def deviation_score(frame: PathFrame, grid: GridMap) -> float:
    """Fraction of path cells that stray outside the public area.

    score = (|G| - |G intersect B|) / |B| with G the set of path cells and
    B the public cells; 0 means the path is entirely inside the safe area.
    """
    if frame.cells.shape != grid.cells.shape:
        raise ShapeMismatch(
            f"frame shape {frame.cells.shape} vs map shape {grid.cells.shape}"
        )
    b = grid.public_count
    if b < 1:
        raise EmptyMap("map has no public-access cell")
    g = int(frame.cells.sum())
    g_in_b = int((frame.cells & grid.cells).sum())
    return (g - g_in_b) / b


def synthesize_trajectory(
    grid: GridMap,
    entry: PathClassEntry,
    seed,
    detour_rate: float = 0.0,
) -> PathFrame:
    """Emulate one crowd-sourced trajectory for a class entry.

    Walks a BFS-shortest route from source to destination, breaking ties
    uniformly at random among equal-distance predecessors; then, with
    probability ``detour_rate`` per path cell, marks one extra adjacent
    public cell as a local detour. Deterministic for a fixed seed.
    """
    rng = _as_rng(seed)
    for name, cell in (("source", entry.source), ("destination", entry.destination)):
        if not grid.is_public(cell):
            raise InvalidSpec(f"{name} {cell} is not a public cell")
    dist = bfs_distances(grid, entry.source)
    if dist[entry.destination] < 0:
        raise Unreachable(
            f"no public route from {entry.source} to {entry.destination}"
        )

    path = [entry.destination]
    cur = entry.destination
    while cur != entry.source:
        d = dist[cur]
        preds = [
            nbr
            for nbr in neighbors4(cur, grid.rows, grid.cols)
            if grid.cells[nbr] == 1 and dist[nbr] == d - 1
        ]
        cur = preds[rng.integers(len(preds))]
        path.append(cur)
    path.reverse()

    cells = set(path)
    if detour_rate > 0:
        for cell in path:
            if rng.random() < detour_rate:
                options = [
                    nbr
                    for nbr in neighbors4(cell, grid.rows, grid.cols)
                    if grid.cells[nbr] == 1 and nbr not in cells
                ]
                if options:
                    cells.add(options[rng.integers(len(options))])

    frame = frame_from_cells(cells, grid.rows, grid.cols)
    report = validate_path_frame(frame, grid, entry)
    if not report.ok:  # detours only ever add public neighbors, so this holds
        raise RuntimeError(f"synthesized frame failed validation: {report}")
    return frame


def build_dataset(
    grid: GridMap,
    table: PathClassTable,
    samples_per_class: int = 52,
    seed: int = 0,
    detour_rate: float = 0.1,
) -> PathDataset:
    """Synthesize a balanced labeled dataset; deterministic per seed."""
    table.check_on_map(grid)
    frames: list[PathFrame] = []
    labels: list[int] = []
    for entry in table:
        for i in range(samples_per_class):
            child = np.random.default_rng(
                np.random.SeedSequence(seed, spawn_key=(entry.class_id, i))
            )
            try:
                frame = synthesize_trajectory(grid, entry, child, detour_rate)
            except (Unreachable, InvalidSpec) as exc:
                raise type(exc)(f"class {entry.class_id}: {exc}") from exc
            frames.append(frame)
            labels.append(entry.class_id)
    return PathDataset(frames, labels, table)
