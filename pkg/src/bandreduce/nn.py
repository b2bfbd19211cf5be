"""Dense affine layers, losses, input corruption, backprop, and minibatch SGD.

Batches are row-major: a batch of n vectors of width d is an (n, d) matrix.
All gradients are exact analytic derivatives of the batch-mean loss, so
learning rates transfer across batch sizes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import (
    BadNoiseFractionError,
    BadShapeError,
    DomainError,
    LossActivationMismatchError,
    NonFiniteError,
    NonFiniteLossError,
    ShapeMismatchError,
)

ACTIVATIONS = ("sigmoid", "linear")
LOSSES = ("squared", "cross_entropy")
MODES = ("batch", "stochastic")
NOISE_KINDS = ("masking", "gaussian")

# Keeps sigmoid outputs strictly inside (0,1) so log terms never see 0 or 1.
SIGMOID_CLAMP = 1e-12

# Per-epoch mean reconstruction error, one entry per epoch run.
EpochTrace = list[float]


@dataclass
class LayerParams:
    """One affine layer: ``activation(x @ weight.T + bias)``.

    ``weight`` is out_dim x in_dim, ``bias`` has out_dim entries.
    """

    weight: np.ndarray
    bias: np.ndarray
    activation: str = "sigmoid"

    def __post_init__(self) -> None:
        self.weight = np.asarray(self.weight, dtype=np.float64)
        self.bias = np.asarray(self.bias, dtype=np.float64)
        if self.weight.ndim != 2 or self.bias.ndim != 1:
            raise BadShapeError("weight must be 2-D and bias 1-D")
        if self.bias.shape[0] != self.weight.shape[0]:
            raise BadShapeError(
                f"bias length {self.bias.shape[0]} != weight rows {self.weight.shape[0]}"
            )
        if self.activation not in ACTIVATIONS:
            raise BadShapeError(f"unknown activation {self.activation!r}")
        if not (np.all(np.isfinite(self.weight)) and np.all(np.isfinite(self.bias))):
            raise NonFiniteError("layer parameters must be finite")

    @property
    def in_dim(self) -> int:
        return self.weight.shape[1]

    @property
    def out_dim(self) -> int:
        return self.weight.shape[0]


@dataclass(frozen=True)
class TrainConfig:
    """Knobs for denoising autoencoder training.

    ``mode="batch"`` averages gradients over minibatches of ``batch_size``
    rows (set batch_size >= data size for full-batch updates);
    ``mode="stochastic"`` adapts to one row at a time. ``noise_fraction`` is
    the masking probability for ``noise_kind="masking"`` or the additive
    noise standard deviation for ``noise_kind="gaussian"``. ``widths``, when
    given, fixes the hidden layer schedule of the stacked model.
    """

    noise_fraction: float = 0.1
    learning_rate: float = 0.01
    init_scale: float = 0.1
    epochs: int = 225
    batch_size: int = 32
    loss: str = "squared"
    mode: str = "batch"
    seed: int = 0
    noise_kind: str = "masking"
    widths: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.noise_fraction <= 1.0:
            raise BadNoiseFractionError(f"noise fraction {self.noise_fraction} not in [0, 1]")
        if self.learning_rate <= 0:
            raise BadShapeError(f"learning rate must be positive, got {self.learning_rate}")
        if self.init_scale <= 0:
            raise BadShapeError(f"init scale must be positive, got {self.init_scale}")
        if self.epochs < 1:
            raise BadShapeError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise BadShapeError(f"batch size must be >= 1, got {self.batch_size}")
        if self.loss not in LOSSES:
            raise BadShapeError(f"unknown loss {self.loss!r}")
        if self.mode not in MODES:
            raise BadShapeError(f"unknown mode {self.mode!r}")
        if self.noise_kind not in NOISE_KINDS:
            raise BadShapeError(f"unknown noise kind {self.noise_kind!r}")
        if self.widths is not None:
            widths = tuple(int(w) for w in self.widths)
            if not widths or any(w < 1 for w in widths):
                raise BadShapeError(f"layer widths must be positive, got {self.widths}")
            object.__setattr__(self, "widths", widths)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return np.clip(out, SIGMOID_CLAMP, 1.0 - SIGMOID_CLAMP)


def _activate(z: np.ndarray, activation: str) -> np.ndarray:
    return _sigmoid(z) if activation == "sigmoid" else z


def _activation_grad(a: np.ndarray, activation: str) -> np.ndarray:
    # Derivative in terms of the activation value itself.
    return a * (1.0 - a) if activation == "sigmoid" else np.ones_like(a)


def forward(layer: LayerParams, x: np.ndarray) -> np.ndarray:
    """Apply one layer to a batch of row vectors."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != layer.in_dim:
        raise ShapeMismatchError(
            f"input width {x.shape[-1] if x.ndim else '?'} != layer in_dim {layer.in_dim}"
        )
    return _activate(x @ layer.weight.T + layer.bias, layer.activation)


def forward_all(layers: list[LayerParams], x: np.ndarray) -> list[np.ndarray]:
    """Activations of every layer in order, starting with the input batch."""
    acts = [np.asarray(x, dtype=np.float64)]
    for layer in layers:
        acts.append(forward(layer, acts[-1]))
    return acts


def corrupt(
    x: np.ndarray,
    noise_fraction: float,
    rng: np.random.Generator,
    noise_kind: str = "masking",
) -> np.ndarray:
    """Stochastically corrupt a batch.

    Masking noise zeroes each scalar independently with the given
    probability; gaussian noise adds N(0, fraction^2) perturbations.
    """
    if not 0.0 <= noise_fraction <= 1.0:
        raise BadNoiseFractionError(f"noise fraction {noise_fraction} not in [0, 1]")
    x = np.asarray(x, dtype=np.float64)
    if noise_kind == "gaussian":
        return x + rng.normal(0.0, noise_fraction, size=x.shape)
    if noise_kind != "masking":
        raise BadShapeError(f"unknown noise kind {noise_kind!r}")
    return x * (rng.random(x.shape) >= noise_fraction)


def loss_squared(x: np.ndarray, z: np.ndarray) -> float:
    """Mean over the batch of the squared Euclidean reconstruction distance."""
    x = np.asarray(x, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    if x.shape != z.shape:
        raise ShapeMismatchError(f"shapes {x.shape} and {z.shape} differ")
    return float(np.mean(np.sum((x - z) ** 2, axis=-1)))


def loss_cross_entropy(x: np.ndarray, z: np.ndarray) -> float:
    """Mean over the batch of the elementwise binary cross entropy.

    ``x`` must lie in [0, 1]; ``z`` is clamped away from 0 and 1 before the
    logs so saturated reconstructions cannot produce infinities.
    """
    x = np.asarray(x, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    if x.shape != z.shape:
        raise ShapeMismatchError(f"shapes {x.shape} and {z.shape} differ")
    if np.any(x < 0.0) or np.any(x > 1.0):
        raise DomainError("cross entropy targets must lie in [0, 1]")
    zc = np.clip(z, SIGMOID_CLAMP, 1.0 - SIGMOID_CLAMP)
    per_row = -np.sum(x * np.log(zc) + (1.0 - x) * np.log(1.0 - zc), axis=-1)
    return float(np.mean(per_row))


def batch_loss(x: np.ndarray, z: np.ndarray, loss: str) -> float:
    if loss == "squared":
        return loss_squared(x, z)
    if loss == "cross_entropy":
        return loss_cross_entropy(x, z)
    raise BadShapeError(f"unknown loss {loss!r}")


def reconstruction_error(layers: list[LayerParams], data: np.ndarray, loss: str) -> float:
    """Loss of the network's clean forward pass against the data itself."""
    return batch_loss(data, forward_all(layers, data)[-1], loss)


def backward(
    layers: list[LayerParams],
    x_corrupted: np.ndarray,
    x_clean: np.ndarray,
    loss: str = "squared",
) -> list[tuple[np.ndarray, np.ndarray]]:
    """Exact gradients of the batch-mean loss for every weight and bias.

    The network runs on the corrupted batch while the loss compares against
    the clean batch, which is the denoising training signal. Cross entropy
    requires a sigmoid output layer.
    """
    x_corrupted = np.asarray(x_corrupted, dtype=np.float64)
    x_clean = np.asarray(x_clean, dtype=np.float64)
    if x_corrupted.shape != x_clean.shape:
        raise ShapeMismatchError(
            f"corrupted shape {x_corrupted.shape} != clean shape {x_clean.shape}"
        )
    if not layers:
        raise BadShapeError("network has no layers")
    for prev, nxt in zip(layers, layers[1:]):
        if nxt.in_dim != prev.out_dim:
            raise ShapeMismatchError(
                f"layer widths do not chain: {prev.out_dim} -> {nxt.in_dim}"
            )
    if x_clean.shape[1] != layers[-1].out_dim:
        raise ShapeMismatchError(
            f"target width {x_clean.shape[1]} != output width {layers[-1].out_dim}"
        )
    if loss == "cross_entropy" and layers[-1].activation != "sigmoid":
        raise LossActivationMismatchError(
            "cross entropy requires a sigmoid output layer"
        )

    acts = forward_all(layers, x_corrupted)
    n = x_corrupted.shape[0]
    output = acts[-1]
    if loss == "cross_entropy":
        # Sigmoid and cross entropy cancel to this at the pre-activation.
        delta = (output - x_clean) / n
    else:
        delta = (2.0 / n) * (output - x_clean) * _activation_grad(output, layers[-1].activation)

    grads: list[tuple[np.ndarray, np.ndarray]] = [None] * len(layers)  # type: ignore[list-item]
    for i in range(len(layers) - 1, -1, -1):
        grads[i] = (delta.T @ acts[i], delta.sum(axis=0))
        if i > 0:
            delta = (delta @ layers[i].weight) * _activation_grad(acts[i], layers[i - 1].activation)
    return grads


def sgd_step(
    layers: list[LayerParams],
    grads: list[tuple[np.ndarray, np.ndarray]],
    learning_rate: float,
) -> list[LayerParams]:
    """One gradient descent update; returns a new layer list."""
    if len(grads) != len(layers):
        raise ShapeMismatchError(f"{len(grads)} gradients for {len(layers)} layers")
    updated = []
    for layer, (dw, db) in zip(layers, grads):
        if dw.shape != layer.weight.shape or db.shape != layer.bias.shape:
            raise ShapeMismatchError(
                f"gradient shapes {dw.shape}/{db.shape} do not match layer "
                f"{layer.weight.shape}/{layer.bias.shape}"
            )
        updated.append(
            LayerParams(
                weight=layer.weight - learning_rate * dw,
                bias=layer.bias - learning_rate * db,
                activation=layer.activation,
            )
        )
    return updated


def init_layer(
    rng: np.random.Generator,
    in_dim: int,
    out_dim: int,
    activation: str,
    init_scale: float,
) -> LayerParams:
    """Gaussian weights scaled by init_scale, zero biases."""
    return LayerParams(
        weight=rng.normal(size=(out_dim, in_dim)) * init_scale,
        bias=np.zeros(out_dim),
        activation=activation,
    )


def _batches(order: np.ndarray, batch_size: int) -> Iterator[np.ndarray]:
    for start in range(0, order.size, batch_size):
        yield order[start : start + batch_size]


def train_epochs(
    layers: list[LayerParams],
    data: np.ndarray,
    config: TrainConfig,
    rng: np.random.Generator | None = None,
) -> tuple[list[LayerParams], EpochTrace]:
    """Run corrupt/forward/backward/update epochs over shuffled minibatches.

    After each epoch the trace records the mean reconstruction error of the
    current network on the full clean data, so the last entry is the final
    model's reconstruction error. Deterministic given the config seed (or an
    explicit generator).
    """
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2 or data.shape[0] < 1:
        raise BadShapeError(f"training data must be a non-empty 2-D batch, got {data.shape}")
    if rng is None:
        rng = np.random.default_rng(config.seed)
    batch_size = 1 if config.mode == "stochastic" else config.batch_size
    trace: EpochTrace = []
    for epoch in range(config.epochs):
        order = rng.permutation(data.shape[0])
        for idx in _batches(order, batch_size):
            clean = data[idx]
            noisy = corrupt(clean, config.noise_fraction, rng, config.noise_kind)
            grads = backward(layers, noisy, clean, config.loss)
            layers = sgd_step(layers, grads, config.learning_rate)
        epoch_error = reconstruction_error(layers, data, config.loss)
        if not np.isfinite(epoch_error):
            raise NonFiniteLossError(
                f"non-finite reconstruction error at epoch {epoch + 1}: {epoch_error}"
            )
        trace.append(epoch_error)
    return layers, trace
