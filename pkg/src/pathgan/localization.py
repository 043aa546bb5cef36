"""RSSI-fingerprint localization.

Simulates beacon signal strength with a log-distance path-loss model,
builds labeled fingerprint datasets, and predicts (x, y) grid coordinates
with two independent per-coordinate k-NN models (one model per output
label, trained on the same data). Evaluation reports the CDF of Euclidean
distance error.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    EmptySet,
    InvalidPosition,
    MalformedCsv,
    ShapeMismatch,
    TooFewSamples,
)
from .gridworld import Cell, GridMap

DEFAULT_BEACON_COUNT = 13
MISSING_RSSI = -200.0
BEACON_UUID = "f7826da6-4fa2-4e98-8024-bc5b71e0893e"


@dataclass(frozen=True)
class Beacon:
    uuid: str
    major: int
    minor: int
    cell: Cell

    @property
    def identifier(self) -> str:
        return f"{self.uuid}-{self.major}-{self.minor}"


@dataclass(frozen=True)
class BeaconLayout:
    beacons: tuple[Beacon, ...]

    def __post_init__(self):
        ids = [b.identifier for b in self.beacons]
        if len(set(ids)) != len(ids):
            raise ValueError("beacon identifiers must be unique")

    def __len__(self) -> int:
        return len(self.beacons)

    def positions(self) -> np.ndarray:
        return np.asarray([b.cell for b in self.beacons], dtype=np.float64)

    def check_on_map(self, grid: GridMap) -> None:
        for b in self.beacons:
            if not grid.is_public(b.cell):
                raise InvalidPosition(f"beacon {b.identifier} at {b.cell} not public")


def default_beacon_layout(grid: GridMap, count: int = DEFAULT_BEACON_COUNT) -> BeaconLayout:
    """Spread beacons over the public area by greedy farthest-point placement.

    Deterministic: starts at the public cell nearest the map centroid, then
    repeatedly adds the public cell farthest from all chosen beacons (ties
    break row-major).
    """
    cells = grid.public_cells()
    if count > len(cells):
        raise InvalidPosition(f"cannot place {count} beacons on {len(cells)} cells")
    pts = np.asarray(cells, dtype=np.float64)
    centroid = pts.mean(axis=0)
    chosen = [int(np.argmin(((pts - centroid) ** 2).sum(axis=1)))]
    min_d2 = ((pts - pts[chosen[0]]) ** 2).sum(axis=1)
    while len(chosen) < count:
        nxt = int(np.argmax(min_d2))
        chosen.append(nxt)
        min_d2 = np.minimum(min_d2, ((pts - pts[nxt]) ** 2).sum(axis=1))
    beacons = tuple(
        Beacon(BEACON_UUID, 1, i + 1, cells[idx]) for i, idx in enumerate(chosen)
    )
    return BeaconLayout(beacons)


@dataclass(frozen=True)
class PropagationParams:
    """Log-distance path loss: power at 1 cell, exponent, shadowing sigma (dB)."""

    reference_power: float = -60.0
    exponent: float = 1.8
    sigma: float = 2.0

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")


@dataclass(frozen=True)
class FingerprintSample:
    rssi: np.ndarray
    label: Cell


@dataclass(eq=False)
class FingerprintDataset:
    """RSSI rows (n, beacons) with integer (x, y) labels (n, 2)."""

    rssi: np.ndarray
    labels: np.ndarray
    layout: BeaconLayout

    def __post_init__(self):
        if self.rssi.shape[0] != self.labels.shape[0]:
            raise ShapeMismatch("rssi and labels row counts differ")
        if self.rssi.shape[1] != len(self.layout):
            raise ShapeMismatch(
                f"{self.rssi.shape[1]} rssi columns for {len(self.layout)} beacons"
            )

    def __len__(self) -> int:
        return self.rssi.shape[0]

    def sample(self, i: int) -> FingerprintSample:
        return FingerprintSample(self.rssi[i], (int(self.labels[i, 0]), int(self.labels[i, 1])))


def _clean_rssi(layout: BeaconLayout, position: Cell, params: PropagationParams) -> np.ndarray:
    d = np.sqrt(((layout.positions() - np.asarray(position, dtype=np.float64)) ** 2).sum(axis=1))
    d = np.maximum(d, 1.0)
    return params.reference_power - 10.0 * params.exponent * np.log10(d)


def simulate_rssi(
    grid: GridMap,
    layout: BeaconLayout,
    position: Cell,
    params: PropagationParams = PropagationParams(),
    seed=0,
) -> FingerprintSample:
    """One noisy fingerprint at a public cell; deterministic per seed."""
    if not grid.is_public(position):
        raise InvalidPosition(f"position {position} is not a public cell")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    noise = rng.standard_normal(len(layout)) * params.sigma
    return FingerprintSample(_clean_rssi(layout, position, params) + noise, tuple(position))


def build_fingerprint_dataset(
    grid: GridMap,
    layout: BeaconLayout,
    samples: int = 1420,
    params: PropagationParams = PropagationParams(),
    seed: int = 0,
) -> FingerprintDataset:
    """Sample positions uniformly over public cells and simulate readings.

    The same seed yields the same positions and the same underlying unit
    noise regardless of sigma, so noise level sweeps are paired.
    """
    if samples < 1:
        raise TooFewSamples("need at least one sample")
    layout.check_on_map(grid)
    rng = np.random.default_rng(seed)
    cells = np.asarray(grid.public_cells(), dtype=np.int64)
    picks = rng.integers(0, len(cells), size=samples)
    unit_noise = rng.standard_normal((samples, len(layout)))
    positions = cells[picks]
    clean = np.stack([_clean_rssi(layout, tuple(p), params) for p in positions])
    return FingerprintDataset(clean + params.sigma * unit_noise, positions, layout)


# ---------------------------------------------------------------------------
# CSV I/O (header b1..bN,x,y; readings as integers, -200 marks missing)
# ---------------------------------------------------------------------------

def write_fingerprints(dataset: FingerprintDataset, dest) -> None:
    n_beacons = len(dataset.layout)
    header = ",".join(f"b{i + 1}" for i in range(n_beacons)) + ",x,y\n"
    lines = [header]
    rounded = np.rint(dataset.rssi).astype(np.int64)
    for row, (x, y) in zip(rounded, dataset.labels):
        lines.append(",".join(str(int(v)) for v in row) + f",{int(x)},{int(y)}\n")
    text = "".join(lines)
    if isinstance(dest, (str, Path)):
        with open(dest, "w", newline="") as fh:
            fh.write(text)
    else:
        dest.write(text)


def read_fingerprints(source, layout: BeaconLayout) -> FingerprintDataset:
    if isinstance(source, (str, Path)):
        with open(source, "r", newline="") as fh:
            return read_fingerprints(fh, layout)
    n_beacons = len(layout)
    reader = csv.reader(source)
    try:
        header = next(reader)
    except StopIteration:
        raise MalformedCsv("fingerprints: empty file") from None
    expected = [f"b{i + 1}" for i in range(n_beacons)] + ["x", "y"]
    if [h.strip() for h in header] != expected:
        raise MalformedCsv(
            f"fingerprints: expected {n_beacons} rssi columns plus x,y; got {header}"
        )
    rssi_rows, label_rows = [], []
    for lineno, line in enumerate(reader, start=2):
        if not line:
            continue
        if len(line) != n_beacons + 2:
            raise MalformedCsv(f"fingerprints line {lineno}: wrong field count")
        try:
            values = [float(v) for v in line]
        except ValueError as exc:
            raise MalformedCsv(f"fingerprints line {lineno}: non-numeric entry") from exc
        rssi_rows.append(values[:n_beacons])
        label_rows.append([int(values[-2]), int(values[-1])])
    if not rssi_rows:
        raise MalformedCsv("fingerprints: no data rows")
    return FingerprintDataset(
        np.asarray(rssi_rows, dtype=np.float64),
        np.asarray(label_rows, dtype=np.int64),
        layout,
    )


# ---------------------------------------------------------------------------
# Per-coordinate k-NN (binary relevance: one independent model per label)
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class KnnCoordinateModel:
    """Inverse-distance weighted k-NN vote over one coordinate's values."""

    features: np.ndarray
    values: np.ndarray
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.k > self.features.shape[0]:
            raise TooFewSamples(
                f"k={self.k} exceeds the {self.features.shape[0]} training samples"
            )

    def predict(self, queries: np.ndarray) -> np.ndarray:
        q = np.asarray(queries, dtype=np.float64)
        single = q.ndim == 1
        if single:
            q = q[None, :]
        if q.shape[1] != self.features.shape[1]:
            raise ShapeMismatch(
                f"query width {q.shape[1]} != fingerprint width {self.features.shape[1]}"
            )
        d2 = ((q[:, None, :] - self.features[None, :, :]) ** 2).sum(axis=2)
        order = np.argsort(d2, axis=1, kind="stable")[:, : self.k]
        out = np.empty(q.shape[0], dtype=np.int64)
        for i in range(q.shape[0]):
            top = order[i]
            dist = np.sqrt(d2[i, top])
            if dist[0] == 0.0:
                # exact fingerprint matches outvote everything else
                votes_from = top[dist == 0.0]
                weights = np.ones(votes_from.size)
            else:
                votes_from = top
                weights = 1.0 / dist
            tally: dict[int, float] = {}
            for j, w in zip(votes_from, weights):
                val = int(self.values[j])
                tally[val] = tally.get(val, 0.0) + float(w)
            # highest total weight wins; ties break toward the smaller value
            out[i] = min(sorted(tally), key=lambda v: (-tally[v], v))
        return out[0:1][0] if single else out


@dataclass(eq=False)
class Localizer:
    model_x: KnnCoordinateModel
    model_y: KnnCoordinateModel
    k: int


def train_localizer(
    dataset: FingerprintDataset,
    split: float = 0.7,
    k: int = 3,
    seed: int = 0,
) -> tuple[Localizer, FingerprintDataset]:
    """Random split, then one independent k-NN model per coordinate."""
    n = len(dataset)
    if n < 10:
        raise TooFewSamples(f"need at least 10 samples, got {n}")
    if not 0.0 < split < 1.0:
        raise ValueError("split fraction must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    n_train = int(round(split * n))
    if n_train == 0 or n_train == n:
        raise TooFewSamples(f"split {split} leaves one side empty")
    if k > n_train:
        raise TooFewSamples(f"k={k} exceeds the {n_train} training samples")
    train, test = np.sort(perm[:n_train]), np.sort(perm[n_train:])
    # each model copies its inputs so the two stay physically independent
    loc = Localizer(
        model_x=KnnCoordinateModel(
            dataset.rssi[train].copy(), dataset.labels[train, 0].copy(), k
        ),
        model_y=KnnCoordinateModel(
            dataset.rssi[train].copy(), dataset.labels[train, 1].copy(), k
        ),
        k=k,
    )
    test_ds = FingerprintDataset(
        dataset.rssi[test], dataset.labels[test], dataset.layout
    )
    return loc, test_ds


def localize(loc: Localizer, rssi: np.ndarray) -> Cell:
    """Predict (x, y) for one fingerprint, one coordinate per model."""
    x = loc.model_x.predict(rssi)
    y = loc.model_y.predict(rssi)
    return int(x), int(y)


def localize_batch(loc: Localizer, rssi: np.ndarray) -> np.ndarray:
    xs = loc.model_x.predict(rssi)
    ys = loc.model_y.predict(rssi)
    return np.stack([xs, ys], axis=1)


@dataclass(frozen=True)
class CdfResult:
    """Sorted (error, cumulative fraction) points plus the mean error."""

    points: tuple[tuple[float, float], ...]
    mean_error: float

    def fraction_within(self, error: float) -> float:
        frac = 0.0
        for e, f in self.points:
            if e <= error:
                frac = f
            else:
                break
        return frac


def distance_error_cdf(
    loc: Localizer, test: FingerprintDataset, cell_size: float = 1.0
) -> CdfResult:
    """Euclidean distance error per test sample, sorted into a CDF."""
    if len(test) == 0:
        raise EmptySet("empty test split")
    predicted = localize_batch(loc, test.rssi)
    errors = np.sqrt(((predicted - test.labels) ** 2).sum(axis=1)) * cell_size
    errors = np.sort(errors)
    n = errors.size
    points = tuple((float(e), (i + 1) / n) for i, e in enumerate(errors))
    return CdfResult(points, float(errors.mean()))


def write_cdf(result: CdfResult, dest) -> None:
    """CDF CSV: ``error,cum_fraction``."""
    text = "error,cum_fraction\n" + "".join(
        f"{e:.6f},{f:.6f}\n" for e, f in result.points
    )
    if isinstance(dest, (str, Path)):
        with open(dest, "w", newline="") as fh:
            fh.write(text)
    else:
        dest.write(text)
