"""GAN-based path planning on occupancy grids, plus RSSI fingerprint localization.

The package is organized around the pipeline stages:

- :mod:`pathgan.gridworld` — maps, path frames, trajectory synthesis,
  deviation safety score
- :mod:`pathgan.neuralcore` — dense networks, backprop, losses, Adam,
  gradient checking, checkpoints
- :mod:`pathgan.gan` — generator/discriminator construction and training
- :mod:`pathgan.pathclassifier` — the 6-class path classifier
- :mod:`pathgan.planner` — generate-and-classify planning, denoising,
  waypoints
- :mod:`pathgan.localization` — beacon simulation and k-NN fingerprinting
- :mod:`pathgan.cli` — command-line pipeline harness
"""

from . import errors
from .gan import (
    GanModel,
    GanTrainConfig,
    build_gan,
    discriminate,
    generate_frame,
    load_gan,
    save_gan,
    train_gan,
)
from .gridworld import (
    GridMap,
    PathClassEntry,
    PathClassTable,
    PathDataset,
    PathFrame,
    build_dataset,
    default_class_table,
    default_map,
    deviation_score,
    load_map,
    read_class_table,
    read_path_frame,
    synthesize_trajectory,
    validate_path_frame,
    write_path_frame,
)
from .localization import (
    BeaconLayout,
    FingerprintDataset,
    Localizer,
    PropagationParams,
    build_fingerprint_dataset,
    default_beacon_layout,
    distance_error_cdf,
    localize,
    simulate_rssi,
    train_localizer,
)
from .pathclassifier import (
    PathClassifier,
    classify,
    error_rate,
    train_classifier,
)
from .planner import (
    PathRequest,
    PlanResult,
    denoise,
    extract_waypoints,
    plan_path,
)

__version__ = "0.1.0"
