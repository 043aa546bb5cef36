"""Six-class path classifier.

A small softmax network labels a path frame with its (source, destination)
class. It consumes the same signed encoding the GAN trains on, so raw
generator outputs can be classified directly without binarization loss.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import neuralcore as nc
from .errors import DegenerateSplit, EmptyClass, EmptySet, ShapeMismatch
from .gan import signed_encoding
from .gridworld import PathClassTable, PathDataset, PathFrame

CLASSIFIER_HIDDEN = 256


@dataclass(frozen=True)
class ClassifierConfig:
    batch_size: int = 10
    epochs: int = 200
    split: float = 0.7
    seed: int = 0
    learning_rate: float = 2e-4
    beta1: float = 0.5
    beta2: float = 0.999


@dataclass(eq=False)
class PathClassifier:
    net: nc.MlpNetwork
    class_table: PathClassTable
    config: ClassifierConfig

    def __post_init__(self):
        if self.net.out_dim != len(self.class_table):
            raise ShapeMismatch(
                f"network outputs {self.net.out_dim} classes but table has "
                f"{len(self.class_table)}"
            )

    @property
    def frame_dim(self) -> int:
        return self.net.in_dim


@dataclass(eq=False)
class LabeledSplit:
    """Held-out (or training) samples in the encoding the classifier eats."""

    features: np.ndarray
    labels: np.ndarray
    indices: np.ndarray

    def __len__(self) -> int:
        return self.features.shape[0]


def stratified_split(
    labels: np.ndarray, split: float, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Per-class random split keeping proportions within one sample.

    Raises DegenerateSplit if any class ends up empty on either side.
    """
    if not 0.0 < split < 1.0:
        raise ValueError("split fraction must lie in (0, 1)")
    train_idx, test_idx = [], []
    for cls in np.unique(labels):
        members = np.flatnonzero(labels == cls)
        if members.size == 0:
            raise EmptyClass(f"class {cls} has no samples")
        perm = rng.permutation(members)
        n_train = int(round(split * members.size))
        if n_train == 0 or n_train == members.size:
            raise DegenerateSplit(
                f"split {split} leaves class {cls} empty on one side "
                f"({n_train} of {members.size} in train)"
            )
        train_idx.append(perm[:n_train])
        test_idx.append(perm[n_train:])
    return np.sort(np.concatenate(train_idx)), np.sort(np.concatenate(test_idx))


def train_classifier(
    dataset: PathDataset,
    batch_size: int = 10,
    epochs: int = 200,
    split: float = 0.7,
    seed: int = 0,
    learning_rate: float = 2e-4,
    beta1: float = 0.5,
    beta2: float = 0.999,
    dtype=np.float64,
) -> tuple[PathClassifier, LabeledSplit]:
    """Train on a stratified split; returns the model and the held-out split."""
    labels = dataset.label_array()
    counts = np.bincount(labels, minlength=len(dataset.class_table))
    for cls, count in enumerate(counts):
        if count < 2:
            raise EmptyClass(f"class {cls} has {count} samples; need at least 2")

    rng = np.random.default_rng(seed)
    train_idx, test_idx = stratified_split(labels, split, rng)

    x_all = dataset.signed_matrix(dtype)
    n_classes = len(dataset.class_table)
    x_train, y_train = x_all[train_idx], labels[train_idx]
    one_hot = np.zeros((y_train.size, n_classes), dtype=dtype)
    one_hot[np.arange(y_train.size), y_train] = 1.0

    net = nc.mlp_network(
        (x_all.shape[1], CLASSIFIER_HIDDEN, n_classes),
        ("tanh", "softmax"),
        seed=seed,
        dtype=dtype,
    )
    adam = nc.AdamState.for_network(net, learning_rate, beta1, beta2)
    loss_spec = nc.LossSpec("categorical_crossentropy")

    n_train = x_train.shape[0]
    for _ in range(epochs):
        order = rng.permutation(n_train)
        for start in range(0, n_train, batch_size):
            sel = order[start : start + batch_size]
            fp = nc.forward(net, x_train[sel])
            _, grad = nc.loss_and_grad(loss_spec, fp.output, one_hot[sel])
            grads = nc.backward(net, fp, grad)
            nc.adam_step(adam, net, grads)

    config = ClassifierConfig(batch_size, epochs, split, seed, learning_rate, beta1, beta2)
    classifier = PathClassifier(net, dataset.class_table, config)
    test = LabeledSplit(x_all[test_idx], labels[test_idx], test_idx)
    return classifier, test


def _as_feature_rows(classifier: PathClassifier, sample) -> np.ndarray:
    if isinstance(sample, PathFrame):
        x = signed_encoding(sample, classifier.net.dtype)[None, :]
    else:
        x = np.asarray(sample, dtype=classifier.net.dtype)
        if x.ndim == 1:
            x = x[None, :]
    if x.shape[1] != classifier.frame_dim:
        raise ShapeMismatch(
            f"sample width {x.shape[1]} != classifier input {classifier.frame_dim}"
        )
    return x


def class_probabilities(classifier: PathClassifier, samples) -> np.ndarray:
    """Softmax probabilities, one row per sample."""
    x = _as_feature_rows(classifier, samples)
    return nc.forward(classifier.net, x).output


def classify(classifier: PathClassifier, sample) -> tuple[int, np.ndarray]:
    """Argmax class and the full probability vector for one frame/vector."""
    probs = class_probabilities(classifier, sample)[0]
    return int(np.argmax(probs)), probs


def error_rate(classifier: PathClassifier, split) -> float:
    """Fraction misclassified over a LabeledSplit or an (X, labels) pair."""
    if isinstance(split, LabeledSplit):
        features, labels = split.features, split.labels
    else:
        features, labels = split
        features = np.asarray(features)
        labels = np.asarray(labels)
    if len(labels) == 0:
        raise EmptySet("cannot evaluate on an empty set")
    probs = class_probabilities(classifier, features)
    predicted = probs.argmax(axis=1)
    return float(np.mean(predicted != labels))
