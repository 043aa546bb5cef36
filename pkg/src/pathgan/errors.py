"""Exception types shared across the package.

Every domain failure raises a subclass of PathGanError so callers (and the
CLI) can separate usage mistakes from typed domain errors.
"""


class PathGanError(Exception):
    """Base class for all pathgan domain errors."""


# --- grid / CSV handling ---

class MalformedCsv(PathGanError):
    """CSV input is ragged, non-numeric, or violates the expected domain."""


class EmptyMap(PathGanError):
    """Occupancy map contains no public-access cell."""


class ShapeMismatch(PathGanError):
    """Two grid/array operands do not have compatible shapes."""


class Unreachable(PathGanError):
    """No 4-connected public route exists between the requested endpoints."""


class InvalidSpec(PathGanError):
    """A source/destination endpoint does not lie on a public cell."""


# --- neural engine ---

class NonFiniteInput(PathGanError):
    """A forward pass received NaN or Inf values."""


class InvalidTarget(PathGanError):
    """Loss targets are not binary labels / one-hot rows as required."""


class NonFiniteLoss(PathGanError):
    """Training produced a NaN/Inf loss; the last finite model state is kept."""


# --- datasets and training ---

class EmptyDataset(PathGanError):
    """Training was asked to run on an empty dataset."""


class EmptyClass(PathGanError):
    """A path class has too few samples to train/split on."""


class DegenerateSplit(PathGanError):
    """A train/test split left some class with no samples on one side."""


class EmptySet(PathGanError):
    """An evaluation set is empty."""


# --- planning ---

class AttemptsExhausted(PathGanError):
    """The generate-and-classify loop hit its attempt cap without a match."""

    def __init__(self, message: str, attempts: int = 0):
        super().__init__(message)
        self.attempts = attempts


class IncompatibleModels(PathGanError):
    """Generator/classifier/map dimensions do not agree."""


class InvalidRequest(PathGanError):
    """A plan request is ambiguous or contradicts the class table."""


class NotConnected(PathGanError):
    """A frame's set cells contain no route between the endpoints."""


class MissingEndpoint(PathGanError):
    """A frame does not mark one of the required endpoint cells."""


class EmptyAfterDenoise(PathGanError):
    """Denoising removed every cell (nothing of the frame lies in public area)."""


# --- localization ---

class InvalidPosition(PathGanError):
    """A position is outside the map or not in the public-access area."""


class TooFewSamples(PathGanError):
    """Not enough fingerprint samples to train/split the localizer."""
