"""Principal component baseline for spectral reduction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadKError, ConvergenceError, ShapeMismatchError


@dataclass
class PcaModel:
    """Mean vector, orthonormal component rows, and their eigenvalues.

    Components are ordered by non-increasing eigenvalue; each row's
    largest-magnitude entry is positive so fits are reproducible.
    """

    mean: np.ndarray
    components: np.ndarray
    eigenvalues: np.ndarray

    def transform(self, data: np.ndarray) -> np.ndarray:
        return pca_transform(self, data)


def pca_fit(data: np.ndarray, k: int) -> PcaModel:
    """Top-k eigenvectors of the sample covariance of mean-centered data.

    Covariance uses 1/(P-1) normalization. Trailing zero eigenvalues from
    rank-deficient data are tolerated.
    """
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2:
        raise ShapeMismatchError("data must be a pixels-by-bands matrix")
    n, width = data.shape
    if n < 2:
        raise BadKError(f"need at least 2 rows to estimate covariance, got {n}")
    if not 1 <= k <= min(n, width):
        raise BadKError(f"k={k} not in 1..{min(n, width)}")
    mean = data.mean(axis=0)
    centered = data - mean
    cov = centered.T @ centered / (n - 1)
    try:
        eigenvalues, eigenvectors = np.linalg.eigh(cov)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigendecomposition failed: {exc}") from exc
    order = np.argsort(eigenvalues, kind="stable")[::-1][:k]
    components = eigenvectors[:, order].T.copy()
    for row in components:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0
    return PcaModel(mean=mean, components=components, eigenvalues=eigenvalues[order].copy())


def pca_transform(model: PcaModel, data: np.ndarray) -> np.ndarray:
    """Project rows onto the components: (data - mean) @ components.T."""
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2 or data.shape[1] != model.mean.shape[0]:
        raise ShapeMismatchError(
            f"data width {data.shape[-1] if data.ndim else '?'} != model width {model.mean.shape[0]}"
        )
    return (data - model.mean) @ model.components.T
