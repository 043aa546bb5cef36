"""Minimal dense feed-forward network engine.

Implements exactly what the rest of the package needs: batched forward
passes, hand-derived backpropagation, binary/categorical crossentropy,
bias-corrected Adam, a finite-difference gradient checker, and a bitwise
round-trip checkpoint container. No autograd, no convolutions.

Conventions: a batch is a row-major (n, features) float array; layer
weights are stored (out, in) so a layer computes ``a @ W.T + b``. The
reference dtype is float64; float32 is supported by building networks with
``dtype=np.float32``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidTarget, NonFiniteInput, NonFiniteLoss, ShapeMismatch

ACTIVATIONS = ("identity", "tanh", "sigmoid", "softmax", "leaky_relu")
LEAKY_SLOPE = 0.2

CHECKPOINT_FORMAT_VERSION = 1


# ---------------------------------------------------------------------------
# Activations
# ---------------------------------------------------------------------------

def _sigmoid(z: np.ndarray) -> np.ndarray:
    # Split by sign so exp never overflows.
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _softmax(z: np.ndarray) -> np.ndarray:
    shifted = z - z.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def apply_activation(name: str, z: np.ndarray) -> np.ndarray:
    if name == "identity":
        return z.copy()
    if name == "tanh":
        return np.tanh(z)
    if name == "sigmoid":
        return _sigmoid(z)
    if name == "softmax":
        return _softmax(z)
    if name == "leaky_relu":
        return np.where(z > 0, z, LEAKY_SLOPE * z)
    raise ValueError(f"unknown activation {name!r}")


def _activation_grad_from_post(name: str, a: np.ndarray) -> np.ndarray:
    """Elementwise d(act)/d(pre) expressed through the post-activation value.

    Valid for every supported activation except softmax, whose Jacobian is
    not diagonal and is handled separately.
    """
    if name == "identity":
        return np.ones_like(a)
    if name == "tanh":
        return 1.0 - a * a
    if name == "sigmoid":
        return a * (1.0 - a)
    if name == "leaky_relu":
        # leaky_relu is sign-preserving, so post > 0 iff pre > 0
        return np.where(a > 0, 1.0, LEAKY_SLOPE).astype(a.dtype)
    raise ValueError(f"no elementwise gradient for activation {name!r}")


def _softmax_vjp(a: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Vector-Jacobian product of row-wise softmax: a * (g - sum(g*a))."""
    dot = (g * a).sum(axis=1, keepdims=True)
    return a * (g - dot)


# ---------------------------------------------------------------------------
# Network structure
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class DenseLayer:
    """Fully-connected layer: weights (out, in), biases (out,)."""

    weights: np.ndarray
    biases: np.ndarray
    activation: str

    def __post_init__(self):
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")
        if self.weights.ndim != 2 or self.biases.ndim != 1:
            raise ShapeMismatch("weights must be 2-D and biases 1-D")
        if self.weights.shape[0] != self.biases.shape[0]:
            raise ShapeMismatch(
                f"weights {self.weights.shape} vs biases {self.biases.shape}"
            )

    @property
    def in_dim(self) -> int:
        return self.weights.shape[1]

    @property
    def out_dim(self) -> int:
        return self.weights.shape[0]


@dataclass(eq=False)
class MlpNetwork:
    """Stack of dense layers; softmax may appear only on the last layer."""

    layers: list[DenseLayer]

    def __post_init__(self):
        if not self.layers:
            raise ValueError("network needs at least one layer")
        for k in range(len(self.layers) - 1):
            if self.layers[k].out_dim != self.layers[k + 1].in_dim:
                raise ShapeMismatch(
                    f"layer {k} out={self.layers[k].out_dim} but layer {k + 1} "
                    f"in={self.layers[k + 1].in_dim}"
                )
            if self.layers[k].activation == "softmax":
                raise ValueError("softmax is only allowed on the final layer")

    @property
    def in_dim(self) -> int:
        return self.layers[0].in_dim

    @property
    def out_dim(self) -> int:
        return self.layers[-1].out_dim

    @property
    def dtype(self) -> np.dtype:
        return self.layers[0].weights.dtype

    def parameter_count(self) -> int:
        return sum(l.weights.size + l.biases.size for l in self.layers)

    def copy(self) -> "MlpNetwork":
        return MlpNetwork(
            [
                DenseLayer(l.weights.copy(), l.biases.copy(), l.activation)
                for l in self.layers
            ]
        )

    def all_finite(self) -> bool:
        return all(
            np.isfinite(l.weights).all() and np.isfinite(l.biases).all()
            for l in self.layers
        )


def mlp_network(
    layer_sizes,
    activations,
    seed: int = 0,
    dtype=np.float64,
) -> MlpNetwork:
    """Build a network with Glorot-uniform weights and zero biases.

    ``layer_sizes`` lists the widths including the input, e.g.
    ``(247, 256, 6)`` with ``activations=("tanh", "softmax")``.
    """
    sizes = list(layer_sizes)
    acts = list(activations)
    if len(acts) != len(sizes) - 1:
        raise ValueError(
            f"{len(sizes)} widths need {len(sizes) - 1} activations, got {len(acts)}"
        )
    rng = np.random.default_rng(seed)
    layers = []
    for (fan_in, fan_out), act in zip(zip(sizes, sizes[1:]), acts):
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        w = rng.uniform(-bound, bound, size=(fan_out, fan_in)).astype(dtype)
        b = np.zeros(fan_out, dtype=dtype)
        layers.append(DenseLayer(w, b, act))
    return MlpNetwork(layers)


# ---------------------------------------------------------------------------
# Forward / backward
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class ForwardPass:
    """Everything backward needs: the input and per-layer pre/post activations."""

    inputs: np.ndarray
    pre_activations: list[np.ndarray]
    post_activations: list[np.ndarray]

    @property
    def output(self) -> np.ndarray:
        return self.post_activations[-1]


def forward(net: MlpNetwork, batch: np.ndarray) -> ForwardPass:
    """Run a batch through the network, keeping intermediate activations."""
    x = np.asarray(batch)
    if x.ndim != 2:
        raise ShapeMismatch(f"batch must be 2-D (n, features), got shape {x.shape}")
    if x.shape[1] != net.in_dim:
        raise ShapeMismatch(f"batch width {x.shape[1]} != input width {net.in_dim}")
    if not np.isfinite(x).all():
        raise NonFiniteInput("batch contains NaN/Inf")
    x = x.astype(net.dtype, copy=False)

    pre, post = [], []
    a = x
    for layer in net.layers:
        z = a @ layer.weights.T
        z += layer.biases
        a = apply_activation(layer.activation, z)
        pre.append(z)
        post.append(a)
    return ForwardPass(x, pre, post)


@dataclass(eq=False)
class LayerGrads:
    """Per-layer parameter gradients, shaped like the layer's parameters."""

    weights: np.ndarray
    biases: np.ndarray


def _backprop(
    net: MlpNetwork,
    fp: ForwardPass,
    loss_grad: np.ndarray,
    *,
    param_grads: bool = True,
    input_grad: bool = False,
) -> tuple[list[LayerGrads] | None, np.ndarray | None]:
    """Shared reverse pass; the training loops use the partial variants."""
    g = np.asarray(loss_grad)
    if g.shape != fp.output.shape:
        raise ShapeMismatch(
            f"loss gradient shape {g.shape} != output shape {fp.output.shape}"
        )
    g = g.astype(net.dtype, copy=False)

    grads: list[LayerGrads] = []
    for k in range(len(net.layers) - 1, -1, -1):
        layer = net.layers[k]
        a = fp.post_activations[k]
        if layer.activation == "softmax":
            gz = _softmax_vjp(a, g)
        else:
            gz = g * _activation_grad_from_post(layer.activation, a)
        if param_grads:
            a_prev = fp.post_activations[k - 1] if k > 0 else fp.inputs
            grads.append(LayerGrads(gz.T @ a_prev, gz.sum(axis=0)))
        if k > 0 or input_grad:
            g = gz @ layer.weights
    grads.reverse()
    return (grads if param_grads else None), (g if input_grad else None)


def backward(
    net: MlpNetwork, activations: ForwardPass, loss_grad: np.ndarray
) -> list[LayerGrads]:
    """Backpropagate a loss gradient to per-parameter gradients."""
    grads, _ = _backprop(net, activations, loss_grad)
    return grads


# ---------------------------------------------------------------------------
# Losses
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LossSpec:
    """Crossentropy family with a probability clamp keeping logs finite."""

    kind: str = "binary_crossentropy"
    eps_clip: float = 1e-7

    def __post_init__(self):
        if self.kind not in ("binary_crossentropy", "categorical_crossentropy"):
            raise ValueError(f"unknown loss kind {self.kind!r}")
        if not 0.0 < self.eps_clip < 0.5:
            raise ValueError("eps_clip must lie in (0, 0.5)")


def loss_and_grad(
    spec: LossSpec, predictions: np.ndarray, targets: np.ndarray
) -> tuple[float, np.ndarray]:
    """Scalar loss plus its gradient w.r.t. the predictions.

    Predictions are clamped to [eps_clip, 1 - eps_clip] before any log; the
    gradient is evaluated at the clamped values, so it stays finite even for
    predictions of exactly 0 or 1.
    """
    p = np.asarray(predictions)
    t = np.asarray(targets)
    if p.shape != t.shape:
        raise ShapeMismatch(f"predictions {p.shape} vs targets {t.shape}")

    eps = spec.eps_clip
    pc = np.clip(p, eps, 1.0 - eps)

    if spec.kind == "binary_crossentropy":
        if not np.isin(t, (0, 1)).all():
            raise InvalidTarget("binary targets must be 0 or 1")
        loss = -float(np.mean(t * np.log(pc) + (1.0 - t) * np.log(1.0 - pc)))
        grad = (pc - t) / (pc * (1.0 - pc)) / p.size
        return loss, grad.astype(p.dtype, copy=False)

    # categorical: one row per sample, rows one-hot
    if p.ndim != 2:
        raise ShapeMismatch("categorical loss expects (n, classes) arrays")
    if not np.isin(t, (0, 1)).all() or not np.array_equal(
        t.sum(axis=1), np.ones(t.shape[0])
    ):
        raise InvalidTarget("categorical targets must be one-hot rows")
    n = p.shape[0]
    loss = -float((t * np.log(pc)).sum() / n)
    grad = -(t / pc) / n
    return loss, grad.astype(p.dtype, copy=False)


# ---------------------------------------------------------------------------
# Adam
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class AdamState:
    """Bias-corrected Adam moments mirroring a network's parameters."""

    m: list[LayerGrads]
    v: list[LayerGrads]
    step: int = 0
    learning_rate: float = 2e-4
    beta1: float = 0.5
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def for_network(
        cls,
        net: MlpNetwork,
        learning_rate: float = 2e-4,
        beta1: float = 0.5,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ) -> "AdamState":
        zeros = lambda l: LayerGrads(
            np.zeros_like(l.weights), np.zeros_like(l.biases)
        )
        return cls(
            m=[zeros(l) for l in net.layers],
            v=[zeros(l) for l in net.layers],
            learning_rate=learning_rate,
            beta1=beta1,
            beta2=beta2,
            eps=eps,
        )


def adam_step(
    state: AdamState, net: MlpNetwork, grads: list[LayerGrads]
) -> tuple[AdamState, MlpNetwork]:
    """One in-place Adam update; returns the (mutated) state and network."""
    if len(grads) != len(net.layers):
        raise ShapeMismatch(f"{len(grads)} gradients for {len(net.layers)} layers")
    state.step += 1
    t = state.step
    b1, b2 = state.beta1, state.beta2
    c1 = 1.0 - b1**t
    c2 = 1.0 - b2**t
    lr = state.learning_rate
    for layer, g, m, v in zip(net.layers, grads, state.m, state.v):
        for param, gp, mp, vp in (
            (layer.weights, g.weights, m.weights, v.weights),
            (layer.biases, g.biases, m.biases, v.biases),
        ):
            if gp.shape != param.shape:
                raise ShapeMismatch(
                    f"gradient shape {gp.shape} vs parameter shape {param.shape}"
                )
            mp *= b1
            mp += (1.0 - b1) * gp
            vp *= b2
            vp += (1.0 - b2) * gp * gp
            param -= lr * (mp / c1) / (np.sqrt(vp / c2) + state.eps)
    return state, net


# ---------------------------------------------------------------------------
# Gradient checking
# ---------------------------------------------------------------------------

def gradient_check(
    net: MlpNetwork,
    batch: np.ndarray,
    targets: np.ndarray,
    loss,
    h: float = 1e-5,
    sample_size: int = 150,
    seed: int = 0,
) -> float:
    """Max relative error between backprop and central finite differences.

    ``loss`` is a LossSpec or any callable ``(predictions, targets) ->
    (scalar, grad)``. A random subsample of parameters is perturbed by
    +-h; the relative error uses max(|analytic|, |numeric|, 1e-8) as the
    denominator.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    if isinstance(loss, LossSpec):
        spec = loss
        loss_fn = lambda p, t: loss_and_grad(spec, p, t)
    else:
        loss_fn = loss

    fp = forward(net, batch)
    _, loss_grad = loss_fn(fp.output, targets)
    analytic = backward(net, fp, loss_grad)

    params = []
    for k, layer in enumerate(net.layers):
        params.append((k, "weights", layer.weights, analytic[k].weights))
        params.append((k, "biases", layer.biases, analytic[k].biases))

    total = sum(p[2].size for p in params)
    rng = np.random.default_rng(seed)
    picked = rng.choice(total, size=min(sample_size, total), replace=False)

    offsets = np.cumsum([0] + [p[2].size for p in params])
    worst = 0.0
    for flat in np.sort(picked):
        slot = int(np.searchsorted(offsets, flat, side="right") - 1)
        _, _, arr, ana = params[slot]
        idx = np.unravel_index(flat - offsets[slot], arr.shape)
        orig = arr[idx]
        arr[idx] = orig + h
        up, _ = loss_fn(forward(net, batch).output, targets)
        arr[idx] = orig - h
        down, _ = loss_fn(forward(net, batch).output, targets)
        arr[idx] = orig
        numeric = (up - down) / (2.0 * h)
        a = float(ana[idx])
        err = abs(a - numeric) / max(abs(a), abs(numeric), 1e-8)
        worst = max(worst, err)
    return worst


# ---------------------------------------------------------------------------
# Checkpoints
# ---------------------------------------------------------------------------

def network_arrays(net: MlpNetwork, prefix: str = "") -> dict[str, np.ndarray]:
    """Flatten a network into named arrays for the npz container."""
    out: dict[str, np.ndarray] = {
        f"{prefix}layer_count": np.asarray(len(net.layers)),
        f"{prefix}activations": np.asarray([l.activation for l in net.layers]),
    }
    for i, layer in enumerate(net.layers):
        out[f"{prefix}weights_{i}"] = layer.weights
        out[f"{prefix}biases_{i}"] = layer.biases
    return out


def network_from_arrays(data, prefix: str = "") -> MlpNetwork:
    count = int(data[f"{prefix}layer_count"])
    acts = [str(a) for a in data[f"{prefix}activations"]]
    layers = [
        DenseLayer(data[f"{prefix}weights_{i}"], data[f"{prefix}biases_{i}"], acts[i])
        for i in range(count)
    ]
    return MlpNetwork(layers)


def save_network(net: MlpNetwork, dest, extra: dict | None = None) -> None:
    """Write a checkpoint; ``extra`` entries are stored under ``meta_`` keys."""
    payload = {"format_version": np.asarray(CHECKPOINT_FORMAT_VERSION)}
    payload.update(network_arrays(net))
    for key, value in (extra or {}).items():
        payload[f"meta_{key}"] = np.asarray(value)
    if isinstance(dest, (str, Path)):
        Path(dest).parent.mkdir(parents=True, exist_ok=True)
    np.savez(dest, **payload)


def load_network(source) -> tuple[MlpNetwork, dict[str, np.ndarray]]:
    """Read a checkpoint back; returns the network and any ``extra`` payload."""
    with np.load(source, allow_pickle=False) as data:
        version = int(data["format_version"])
        if version != CHECKPOINT_FORMAT_VERSION:
            raise ValueError(f"unsupported checkpoint version {version}")
        net = network_from_arrays(data)
        meta = {
            key[len("meta_"):]: data[key] for key in data.files if key.startswith("meta_")
        }
    return net, meta
