"""Generator/discriminator pair for path frames.

The generator maps a 100-dim noise vector to a signed frame vector through
tanh layers; the discriminator scores a frame's realness through sigmoid
layers. Training alternates one discriminator update (real labeled 1, fake
labeled 0) and one generator update per mini-batch. Frames are handled in
the signed encoding (0 -> -1, 1 -> +1) so real data lives in the tanh
output range; binarization thresholds the raw output at 0.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import neuralcore as nc
from .errors import EmptyDataset, NonFiniteLoss, ShapeMismatch
from .gridworld import GridMap, PathDataset, PathFrame

NOISE_DIM = 100
GENERATOR_HIDDEN = (256, 512, 1024)
DISCRIMINATOR_HIDDEN = (512, 256)

GENERATOR_OBJECTIVES = ("nonsaturating", "minimax")


@dataclass(eq=False)
class GanModel:
    """Trained or untrained generator/discriminator pair over one map shape."""

    generator: nc.MlpNetwork
    discriminator: nc.MlpNetwork
    rows: int
    cols: int
    noise_dim: int = NOISE_DIM
    training_log: list[tuple[int, float, float, float]] = field(default_factory=list)
    snapshots: dict[int, "GanModel"] = field(default_factory=dict)

    def __post_init__(self):
        if self.generator.in_dim != self.noise_dim:
            raise ShapeMismatch(
                f"generator input {self.generator.in_dim} != noise dim {self.noise_dim}"
            )
        if self.generator.out_dim != self.frame_dim:
            raise ShapeMismatch(
                f"generator output {self.generator.out_dim} != frame dim {self.frame_dim}"
            )
        if self.discriminator.in_dim != self.frame_dim:
            raise ShapeMismatch(
                f"discriminator input {self.discriminator.in_dim} != frame dim "
                f"{self.frame_dim}"
            )

    @property
    def frame_dim(self) -> int:
        return self.rows * self.cols

    @property
    def dtype(self) -> np.dtype:
        return self.generator.dtype

    def copy(self) -> "GanModel":
        return GanModel(
            self.generator.copy(),
            self.discriminator.copy(),
            self.rows,
            self.cols,
            self.noise_dim,
            training_log=list(self.training_log),
        )


@dataclass(frozen=True)
class GanTrainConfig:
    """Adversarial training schedule; one epoch is one pass over the dataset."""

    epochs: int
    batch_size: int = 32
    seed: int = 0
    generator_objective: str = "nonsaturating"
    learning_rate: float = 2e-4
    beta1: float = 0.5
    beta2: float = 0.999
    eps_clip: float = 1e-7
    snapshot_epochs: tuple[int, ...] = ()

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.generator_objective not in GENERATOR_OBJECTIVES:
            raise ValueError(
                f"generator_objective must be one of {GENERATOR_OBJECTIVES}"
            )


def build_gan(
    grid: GridMap,
    seed: int = 0,
    dtype=np.float64,
    generator_hidden_activation: str = "tanh",
    discriminator_hidden_activation: str = "sigmoid",
) -> GanModel:
    """Construct the pair at the standard layer widths for this map.

    Hidden widths are fixed (256/512/1024 generator, 512/256 discriminator);
    the generator output and discriminator input match the map's cell count.
    Initialization is Glorot-uniform, deterministic per seed.
    """
    frame_dim = grid.rows * grid.cols
    g_sizes = (NOISE_DIM, *GENERATOR_HIDDEN, frame_dim)
    d_sizes = (frame_dim, *DISCRIMINATOR_HIDDEN, 1)
    gen = nc.mlp_network(
        g_sizes,
        [generator_hidden_activation] * len(GENERATOR_HIDDEN) + ["tanh"],
        seed=seed,
        dtype=dtype,
    )
    # Offset the discriminator stream so the two nets never share draws.
    disc = nc.mlp_network(
        d_sizes,
        [discriminator_hidden_activation] * len(DISCRIMINATOR_HIDDEN) + ["sigmoid"],
        seed=seed + 1,
        dtype=dtype,
    )
    return GanModel(gen, disc, grid.rows, grid.cols)


def signed_encoding(frame: PathFrame, dtype=np.float64) -> np.ndarray:
    """Flatten a binary frame to the signed (-1/+1) vector fed to the nets."""
    return frame.cells.reshape(-1).astype(dtype) * 2.0 - 1.0


def binarize(raw: np.ndarray, rows: int, cols: int) -> PathFrame:
    """Threshold a raw generator output at 0 (the tanh midpoint)."""
    return PathFrame((np.asarray(raw).reshape(rows, cols) > 0).astype(np.uint8))


def _draw_noise(rng: np.random.Generator, n: int, dim: int, dtype) -> np.ndarray:
    return rng.uniform(-1.0, 1.0, size=(n, dim)).astype(dtype)


def _discriminator_step(
    model: GanModel,
    adam: nc.AdamState,
    real: np.ndarray,
    fake: np.ndarray,
    loss_spec: nc.LossSpec,
) -> tuple[float, float]:
    """One Adam step on D: real rows labeled 1, fake rows labeled 0."""
    batch = np.concatenate([real, fake])
    labels = np.zeros((batch.shape[0], 1), dtype=model.dtype)
    labels[: real.shape[0]] = 1.0
    fp = nc.forward(model.discriminator, batch)
    loss, grad = nc.loss_and_grad(loss_spec, fp.output, labels)
    if not np.isfinite(loss):
        raise NonFiniteLoss(f"discriminator loss became {loss}")
    accuracy = float(np.mean((fp.output > 0.5) == (labels > 0.5)))
    grads, _ = nc._backprop(model.discriminator, fp, grad)
    nc.adam_step(adam, model.discriminator, grads)
    return loss, accuracy


def _generator_step(
    model: GanModel,
    adam: nc.AdamState,
    z: np.ndarray,
    objective: str,
    loss_spec: nc.LossSpec,
) -> float:
    """One Adam step on G through a frozen D.

    nonsaturating: minimize -mean log D(G(z)) (labels-are-real BCE);
    minimax: minimize mean log(1 - D(G(z))) as literally stated.
    """
    fp_g = nc.forward(model.generator, z)
    fp_d = nc.forward(model.discriminator, fp_g.output)
    p = fp_d.output
    eps = loss_spec.eps_clip
    pc = np.clip(p, eps, 1.0 - eps)
    if objective == "nonsaturating":
        loss = -float(np.mean(np.log(pc)))
        dloss_dp = (-1.0 / pc) / p.size
    else:
        loss = float(np.mean(np.log(1.0 - pc)))
        dloss_dp = (-1.0 / (1.0 - pc)) / p.size
    if not np.isfinite(loss):
        raise NonFiniteLoss(f"generator loss became {loss}")
    _, dx = nc._backprop(
        model.discriminator, fp_d, dloss_dp.astype(model.dtype),
        param_grads=False, input_grad=True,
    )
    grads, _ = nc._backprop(model.generator, fp_g, dx)
    nc.adam_step(adam, model.generator, grads)
    return loss


def train_gan(
    model: GanModel, dataset: PathDataset, cfg: GanTrainConfig
) -> GanModel:
    """Run the adversarial loop; deterministic per seed.

    Per iteration: draw a noise batch and a real batch, update D on the
    combined labeled batch, draw fresh noise, update G. Appends
    (step, d_loss, g_loss, d_accuracy) to the training log each iteration
    and snapshots a deep copy of the model after each epoch listed in
    ``cfg.snapshot_epochs``.
    """
    if len(dataset) == 0:
        raise EmptyDataset("cannot train on an empty dataset")
    x_real = dataset.signed_matrix(model.dtype)
    if x_real.shape[1] != model.frame_dim:
        raise ShapeMismatch(
            f"dataset frame width {x_real.shape[1]} != model frame dim "
            f"{model.frame_dim}"
        )
    n = x_real.shape[0]
    m = cfg.batch_size
    iterations_per_epoch = -(-n // m)
    rng = np.random.default_rng(cfg.seed)
    loss_spec = nc.LossSpec("binary_crossentropy", cfg.eps_clip)
    adam_d = nc.AdamState.for_network(
        model.discriminator, cfg.learning_rate, cfg.beta1, cfg.beta2
    )
    adam_g = nc.AdamState.for_network(
        model.generator, cfg.learning_rate, cfg.beta1, cfg.beta2
    )
    wanted_snapshots = set(cfg.snapshot_epochs)

    step = len(model.training_log)
    for epoch in range(1, cfg.epochs + 1):
        for _ in range(iterations_per_epoch):
            z = _draw_noise(rng, m, model.noise_dim, model.dtype)
            idx = rng.choice(n, size=min(m, n), replace=m > n)
            fake = nc.forward(model.generator, z).output
            d_loss, d_acc = _discriminator_step(
                model, adam_d, x_real[idx], fake, loss_spec
            )
            z2 = _draw_noise(rng, m, model.noise_dim, model.dtype)
            g_loss = _generator_step(
                model, adam_g, z2, cfg.generator_objective, loss_spec
            )
            step += 1
            model.training_log.append((step, d_loss, g_loss, d_acc))
        if epoch in wanted_snapshots:
            model.snapshots[epoch] = model.copy()
    return model


def generate_frame(
    model: GanModel, z: np.ndarray | None = None, seed: int | None = None
) -> tuple[PathFrame, np.ndarray]:
    """Map one noise vector to a (binary frame, raw output) pair.

    Pass either an explicit noise vector or a seed from which one is drawn
    uniformly over (-1, 1). Deterministic per z.
    """
    if z is None:
        if seed is None:
            raise ValueError("provide either z or seed")
        z = np.random.default_rng(seed).uniform(-1.0, 1.0, size=model.noise_dim)
    z = np.asarray(z, dtype=model.dtype)
    if z.shape != (model.noise_dim,):
        raise ShapeMismatch(f"z must have shape ({model.noise_dim},), got {z.shape}")
    raw = nc.forward(model.generator, z[None, :]).output[0]
    return binarize(raw, model.rows, model.cols), raw


def discriminate(model: GanModel, sample) -> float | np.ndarray:
    """Probability that a frame (or batch of raw vectors) is real.

    Binary PathFrames are mapped to the signed encoding first; ndarray
    inputs are taken as already-encoded raw vectors. A 2-D input returns
    one probability per row.
    """
    if isinstance(sample, PathFrame):
        x = signed_encoding(sample, model.dtype)
    else:
        x = np.asarray(sample, dtype=model.dtype)
    batched = x.ndim == 2
    if not batched:
        x = x[None, :]
    if x.shape[1] != model.frame_dim:
        raise ShapeMismatch(
            f"sample width {x.shape[1]} != frame dim {model.frame_dim}"
        )
    p = nc.forward(model.discriminator, x).output[:, 0]
    return p if batched else float(p[0])


# ---------------------------------------------------------------------------
# Persistence
# ---------------------------------------------------------------------------

def save_gan(model: GanModel, dest, extra: dict | None = None) -> None:
    payload = {
        "format_version": np.asarray(nc.CHECKPOINT_FORMAT_VERSION),
        "rows": np.asarray(model.rows),
        "cols": np.asarray(model.cols),
        "noise_dim": np.asarray(model.noise_dim),
        "training_log": np.asarray(model.training_log, dtype=np.float64).reshape(
            -1, 4
        ),
    }
    payload.update(nc.network_arrays(model.generator, "g_"))
    payload.update(nc.network_arrays(model.discriminator, "d_"))
    for key, value in (extra or {}).items():
        payload[f"meta_{key}"] = np.asarray(value)
    if isinstance(dest, (str, Path)):
        Path(dest).parent.mkdir(parents=True, exist_ok=True)
    np.savez(dest, **payload)


def load_gan(source) -> GanModel:
    with np.load(source, allow_pickle=False) as data:
        version = int(data["format_version"])
        if version != nc.CHECKPOINT_FORMAT_VERSION:
            raise ValueError(f"unsupported checkpoint version {version}")
        log = [
            (int(s), float(d), float(g), float(a)) for s, d, g, a in data["training_log"]
        ]
        return GanModel(
            nc.network_from_arrays(data, "g_"),
            nc.network_from_arrays(data, "d_"),
            rows=int(data["rows"]),
            cols=int(data["cols"]),
            noise_dim=int(data["noise_dim"]),
            training_log=log,
        )


def write_training_log(log: Sequence[tuple[int, float, float, float]], dest) -> None:
    """Training log CSV: ``step,d_loss,g_loss,d_acc``."""
    text = "step,d_loss,g_loss,d_acc\n" + "".join(
        f"{int(s)},{d:.6f},{g:.6f},{a:.6f}\n" for s, d, g, a in log
    )
    if isinstance(dest, (str, Path)):
        with open(dest, "w", newline="") as fh:
            fh.write(text)
    else:
        dest.write(text)
