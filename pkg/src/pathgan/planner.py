"""Generate-and-classify path planning.

Draws frames from the generator until the classifier confirms the requested
(source, destination) class, with a bounded attempt budget. Also provides
post-hoc cleanup (keep the largest public connected component) and waypoint
extraction so the cell matrix becomes a followable route.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import (
    AttemptsExhausted,
    EmptyAfterDenoise,
    IncompatibleModels,
    InvalidRequest,
    MissingEndpoint,
    NotConnected,
    ShapeMismatch,
)
from .gan import GanModel, generate_frame
from .gridworld import (
    Cell,
    GridMap,
    PathClassEntry,
    PathClassTable,
    PathFrame,
    component_labels,
    deviation_score,
    neighbors4,
)
from .pathclassifier import PathClassifier, classify


@dataclass(frozen=True)
class PathRequest:
    """What to plan: a class id, an endpoint pair, or both (they must agree)."""

    class_id: int | None = None
    source: Cell | None = None
    destination: Cell | None = None
    max_attempts: int = 1000
    denoise: bool = False

    def __post_init__(self):
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")
        if self.class_id is None and (self.source is None or self.destination is None):
            raise InvalidRequest("specify a class id or both endpoints")

    def resolve(self, table: PathClassTable) -> PathClassEntry:
        by_endpoints = None
        if self.source is not None and self.destination is not None:
            matches = [
                e
                for e in table
                if e.source == tuple(self.source)
                and e.destination == tuple(self.destination)
            ]
            if not matches:
                raise InvalidRequest(
                    f"no class codes {self.source} -> {self.destination}"
                )
            by_endpoints = matches[0]
        if self.class_id is None:
            return by_endpoints
        entry = table.entry(self.class_id)
        if by_endpoints is not None and by_endpoints.class_id != entry.class_id:
            raise InvalidRequest(
                f"class {self.class_id} codes {entry.source} -> {entry.destination}, "
                f"not {self.source} -> {self.destination}"
            )
        return entry


@dataclass(frozen=True)
class PlanResult:
    frame: PathFrame
    attempts_used: int
    classifier_confidence: float
    deviation: float
    ordered_waypoints: tuple[Cell, ...] | None = None


def denoise(frame: PathFrame, grid: GridMap) -> PathFrame:
    """Keep only the largest 4-connected component of public path cells.

    The result never marks a non-public cell, so its deviation score is 0.
    Ties between equal-sized components break toward the first one found in
    row-major order. Idempotent on already-clean frames.
    """
    if frame.cells.shape != grid.cells.shape:
        raise ShapeMismatch(
            f"frame shape {frame.cells.shape} vs map shape {grid.cells.shape}"
        )
    mask = (frame.cells & grid.cells).astype(bool)
    if not mask.any():
        raise EmptyAfterDenoise("no path cell lies in the public area")
    labels, count = component_labels(mask)
    sizes = np.bincount(labels.reshape(-1), minlength=count + 1)
    keep = int(sizes[1:].argmax()) + 1
    return PathFrame((labels == keep).astype(np.uint8))


def extract_waypoints(frame: PathFrame, entry: PathClassEntry) -> tuple[Cell, ...]:
    """Shortest source-to-destination route inside the frame's set cells.

    Consecutive waypoints are 4-adjacent and no cell repeats.
    """
    cells = frame.cells
    for name, cell in (("source", entry.source), ("destination", entry.destination)):
        if not (
            0 <= cell[0] < frame.rows and 0 <= cell[1] < frame.cols and cells[cell] == 1
        ):
            raise MissingEndpoint(f"frame does not mark the {name} cell {cell}")

    prev: dict[Cell, Cell] = {}
    seen = {entry.source}
    queue = deque([entry.source])
    while queue:
        cur = queue.popleft()
        if cur == entry.destination:
            break
        for nbr in neighbors4(cur, frame.rows, frame.cols):
            if cells[nbr] == 1 and nbr not in seen:
                seen.add(nbr)
                prev[nbr] = cur
                queue.append(nbr)
    if entry.destination not in seen:
        raise NotConnected(
            f"no route from {entry.source} to {entry.destination} within the frame"
        )
    route = [entry.destination]
    while route[-1] != entry.source:
        route.append(prev[route[-1]])
    return tuple(reversed(route))


def plan_path(
    gan: GanModel,
    classifier: PathClassifier,
    grid: GridMap,
    request: PathRequest,
    seed: int = 0,
) -> PlanResult:
    """Rejection-sample the generator until the classifier confirms the class.

    Each attempt draws fresh noise, generates a frame, and classifies the
    raw generator output; a draw is accepted when the argmax class equals
    the request. With ``request.denoise`` the accepted frame is cleaned
    first (an attempt whose cleanup leaves nothing is rejected and the loop
    continues). Deterministic per seed. Raises AttemptsExhausted after
    ``max_attempts`` draws without an accepted frame.
    """
    frame_dim = grid.rows * grid.cols
    if gan.frame_dim != frame_dim or classifier.frame_dim != frame_dim:
        raise IncompatibleModels(
            f"map has {frame_dim} cells but generator outputs {gan.frame_dim} "
            f"and classifier expects {classifier.frame_dim}"
        )
    entry = request.resolve(classifier.class_table)

    rng = np.random.default_rng(seed)
    for attempt in range(1, request.max_attempts + 1):
        z = rng.uniform(-1.0, 1.0, size=gan.noise_dim)
        frame, raw = generate_frame(gan, z)
        predicted, probs = classify(classifier, raw)
        if predicted != entry.class_id:
            continue
        if request.denoise:
            try:
                frame = denoise(frame, grid)
            except EmptyAfterDenoise:
                continue
        try:
            waypoints = extract_waypoints(frame, entry)
        except (MissingEndpoint, NotConnected):
            waypoints = None
        return PlanResult(
            frame=frame,
            attempts_used=attempt,
            classifier_confidence=float(probs[entry.class_id]),
            deviation=deviation_score(frame, grid),
            ordered_waypoints=waypoints,
        )
    raise AttemptsExhausted(
        f"no class-{entry.class_id} frame in {request.max_attempts} attempts",
        attempts=request.max_attempts,
    )
