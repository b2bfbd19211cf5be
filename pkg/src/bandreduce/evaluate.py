"""Stratified splitting, brute-force kNN, and agreement metrics.

The confusion matrix is a plain K x K integer array with actual classes on
rows and predicted classes on columns; kappa and overall accuracy are
computed from its marginals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    BadShapeError,
    ClassTooSmallError,
    DegenerateMatrixError,
    EmptyMatrixError,
    EmptyTrainSetError,
    LabelOutOfRangeError,
    LengthMismatchError,
    ShapeMismatchError,
)


@dataclass(frozen=True)
class SplitSpec:
    """Per-class stratified split: ceil(fraction * count) training samples."""

    train_fraction: float = 0.30
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 < self.train_fraction < 1.0:
            raise BadShapeError(f"train fraction {self.train_fraction} not in (0, 1)")


def split(labels: np.ndarray, spec: SplitSpec) -> tuple[np.ndarray, np.ndarray]:
    """Split labeled pixel indices into disjoint train and test sets.

    Unlabeled pixels (label 0) are excluded. Each class contributes
    ceil(fraction * count) training samples, at least one. Deterministic for
    a given seed.
    """
    labels = np.asarray(labels, dtype=np.int64)
    rng = np.random.default_rng(spec.seed)
    train: list[np.ndarray] = []
    test: list[np.ndarray] = []
    for cls in range(1, int(labels.max(initial=0)) + 1):
        idx = np.flatnonzero(labels == cls)
        if idx.size < 2:
            raise ClassTooSmallError(f"class {cls} has only {idx.size} labeled samples")
        n_train = max(1, math.ceil(spec.train_fraction * idx.size))
        perm = rng.permutation(idx)
        train.append(perm[:n_train])
        test.append(perm[n_train:])
    if not train:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    return np.sort(np.concatenate(train)), np.sort(np.concatenate(test))


def knn_classify(
    train_features: np.ndarray,
    train_labels: np.ndarray,
    test_features: np.ndarray,
    k_neighbors: int,
) -> np.ndarray:
    """Euclidean majority vote over the k nearest training rows.

    Tie chain: equal votes go to the class with the smaller summed neighbor
    distance, then the lower class id; equal distances during neighbor
    selection go to the lower training index.
    """
    train_features = np.asarray(train_features, dtype=np.float64)
    test_features = np.asarray(test_features, dtype=np.float64)
    train_labels = np.asarray(train_labels, dtype=np.int64)
    if train_features.size == 0 or train_labels.size == 0:
        raise EmptyTrainSetError("no training samples")
    if train_features.ndim != 2 or test_features.ndim != 2:
        raise ShapeMismatchError("feature matrices must be 2-D")
    if train_features.shape[1] != test_features.shape[1]:
        raise ShapeMismatchError(
            f"train width {train_features.shape[1]} != test width {test_features.shape[1]}"
        )
    if train_features.shape[0] != train_labels.shape[0]:
        raise LengthMismatchError(
            f"{train_features.shape[0]} training rows for {train_labels.shape[0]} labels"
        )
    if not 1 <= k_neighbors <= train_features.shape[0]:
        raise BadShapeError(
            f"k={k_neighbors} not in 1..{train_features.shape[0]}"
        )

    sq = np.maximum(
        np.sum(test_features**2, axis=1)[:, None]
        - 2.0 * test_features @ train_features.T
        + np.sum(train_features**2, axis=1)[None, :],
        0.0,
    )
    dist = np.sqrt(sq)
    # Stable sort keeps lower train indices first on exact distance ties.
    nearest = np.argsort(dist, axis=1, kind="stable")[:, :k_neighbors]

    predictions = np.empty(test_features.shape[0], dtype=np.int64)
    for i in range(test_features.shape[0]):
        neighbor_labels = train_labels[nearest[i]]
        neighbor_dists = dist[i, nearest[i]]
        votes: dict[int, int] = {}
        sums: dict[int, float] = {}
        for lbl, d in zip(neighbor_labels, neighbor_dists):
            votes[int(lbl)] = votes.get(int(lbl), 0) + 1
            sums[int(lbl)] = sums.get(int(lbl), 0.0) + float(d)
        best = max(votes.values())
        candidates = [c for c, v in votes.items() if v == best]
        candidates.sort(key=lambda c: (sums[c], c))
        predictions[i] = candidates[0]
    return predictions


def confusion(actual: np.ndarray, predicted: np.ndarray, n_classes: int) -> np.ndarray:
    """K x K counts, rows = actual class, columns = predicted class."""
    actual = np.asarray(actual, dtype=np.int64)
    predicted = np.asarray(predicted, dtype=np.int64)
    if actual.shape != predicted.shape:
        raise LengthMismatchError(
            f"{actual.size} actual labels vs {predicted.size} predictions"
        )
    for name, arr in (("actual", actual), ("predicted", predicted)):
        if arr.size and (arr.min() < 1 or arr.max() > n_classes):
            raise LabelOutOfRangeError(f"{name} labels outside 1..{n_classes}")
    cm = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(cm, (actual - 1, predicted - 1), 1)
    return cm


def kappa(cm: np.ndarray) -> float:
    """Chance-corrected agreement between rows and columns of the counts.

    (n * sum(diagonal) - sum(row_k * col_k)) / (n^2 - sum(row_k * col_k)),
    which is 1 for perfect agreement and 0 when agreement matches chance.
    """
    cm = np.asarray(cm, dtype=np.int64)
    n = int(cm.sum())
    if n == 0:
        raise EmptyMatrixError("confusion matrix holds no samples")
    diag = int(np.trace(cm))
    marginal = int(cm.sum(axis=1) @ cm.sum(axis=0))
    denominator = n * n - marginal
    if denominator == 0:
        raise DegenerateMatrixError("marginal product equals n^2, kappa undefined")
    return (n * diag - marginal) / denominator


def overall_accuracy(cm: np.ndarray) -> float:
    """Fraction of correctly classified samples."""
    cm = np.asarray(cm, dtype=np.int64)
    n = int(cm.sum())
    if n == 0:
        raise EmptyMatrixError("confusion matrix holds no samples")
    return int(np.trace(cm)) / n


def per_class_accuracy(cm: np.ndarray) -> np.ndarray:
    """Diagonal over row sums; classes with no actual samples score 0."""
    cm = np.asarray(cm, dtype=np.int64)
    row_sums = cm.sum(axis=1)
    return np.divide(
        np.diag(cm), row_sums, out=np.zeros(cm.shape[0]), where=row_sums > 0
    )


def evaluate_features(
    features: np.ndarray,
    labels: np.ndarray,
    split_spec: SplitSpec,
    k_neighbors: int,
) -> dict:
    """Split, classify, and score one feature matrix; returns a report dict."""
    features = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if features.shape[0] != labels.shape[0]:
        raise LengthMismatchError(
            f"{features.shape[0]} feature rows for {labels.shape[0]} labels"
        )
    train_idx, test_idx = split(labels, split_spec)
    n_classes = int(labels.max(initial=0))
    predicted = knn_classify(features[train_idx], labels[train_idx], features[test_idx], k_neighbors)
    cm = confusion(labels[test_idx], predicted, n_classes)
    class_range = range(1, n_classes + 1)
    return {
        "confusion": cm.tolist(),
        "kappa": kappa(cm),
        "overall_accuracy": overall_accuracy(cm),
        "per_class_accuracy": per_class_accuracy(cm).tolist(),
        "train_sizes": {str(c): int(np.sum(labels[train_idx] == c)) for c in class_range},
        "test_sizes": {str(c): int(np.sum(labels[test_idx] == c)) for c in class_range},
        "n_train": int(train_idx.size),
        "n_test": int(test_idx.size),
        "split_seed": split_spec.seed,
        "train_fraction": split_spec.train_fraction,
        "knn_k": k_neighbors,
    }


def write_features_csv(path: str | Path, features: np.ndarray, labels: np.ndarray) -> None:
    """One pixel per row: feature columns then the label column last."""
    features = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if features.shape[0] != labels.shape[0]:
        raise LengthMismatchError(
            f"{features.shape[0]} feature rows for {labels.shape[0]} labels"
        )
    header = ",".join(f"f{i}" for i in range(features.shape[1])) + ",label"
    lines = [header]
    for row, label in zip(features, labels):
        lines.append(",".join(format(v, ".17g") for v in row) + f",{int(label)}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_features_csv(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of write_features_csv."""
    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].endswith(",label"):
        raise BadShapeError(f"{path} is not a feature export (missing label column)")
    features = []
    labels = []
    for line in lines[1:]:
        parts = line.split(",")
        features.append([float(v) for v in parts[:-1]])
        labels.append(int(parts[-1]))
    return np.asarray(features, dtype=np.float64), np.asarray(labels, dtype=np.int64)
