"""Stacked denoising autoencoders for spectral band reduction.

The pipeline per segment: greedy layer-wise pretraining of the encoder
stack, assembly of a mirrored decoder with transposed (tied) weights, then
end-to-end denoising fine-tuning of the whole stack. A fitted model holds
one such network per spatial segment, all sharing the same layer widths, so
the reduced representation has the same width and meaning everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cube import HyperCube, SegmentPlan, center_columns, make_segments
from .errors import BadShapeError, SegmentCoverageError, ShapeMismatchError
from .nn import (
    EpochTrace,
    LayerParams,
    TrainConfig,
    forward,
    init_layer,
    train_epochs,
)


def decoder_activation(loss: str) -> str:
    """Squared loss pairs with an affine decoder, cross entropy with sigmoid."""
    return "sigmoid" if loss == "cross_entropy" else "linear"


@dataclass
class StackedNetwork:
    """Encoder layers down to the code width, decoder layers mirroring back."""

    encoder_layers: list[LayerParams]
    decoder_layers: list[LayerParams]

    def __post_init__(self) -> None:
        if not self.encoder_layers or len(self.decoder_layers) != len(self.encoder_layers):
            raise ShapeMismatchError("encoder and decoder must hold the same layer count")
        chain = self.encoder_layers + self.decoder_layers
        for prev, nxt in zip(chain, chain[1:]):
            if nxt.in_dim != prev.out_dim:
                raise ShapeMismatchError(
                    f"layer widths do not chain: {prev.out_dim} -> {nxt.in_dim}"
                )

    @property
    def code_dim(self) -> int:
        return self.encoder_layers[-1].out_dim

    @property
    def input_dim(self) -> int:
        return self.encoder_layers[0].in_dim

    @property
    def widths(self) -> tuple[int, ...]:
        return tuple(layer.out_dim for layer in self.encoder_layers)

    @property
    def layers(self) -> list[LayerParams]:
        return self.encoder_layers + self.decoder_layers

    def encode(self, data: np.ndarray) -> np.ndarray:
        """Forward pass through the encoder only; rows become code vectors."""
        acts = np.asarray(data, dtype=np.float64)
        for layer in self.encoder_layers:
            acts = forward(layer, acts)
        return acts

    def reconstruct(self, data: np.ndarray) -> np.ndarray:
        acts = self.encode(data)
        for layer in self.decoder_layers:
            acts = forward(layer, acts)
        return acts


def train_single_ae(
    data: np.ndarray,
    hidden_dim: int,
    config: TrainConfig,
    rng: np.random.Generator | None = None,
) -> tuple[LayerParams, LayerParams, EpochTrace]:
    """Train one denoising autoencoder; returns encoder, decoder, and trace.

    Weights start as Gaussian draws scaled by ``config.init_scale`` with zero
    biases; the decoder is trained freely (tying happens at assembly). The
    trace's last entry is the final reconstruction error.
    """
    data = np.asarray(data, dtype=np.float64)
    if hidden_dim < 1:
        raise BadShapeError(f"hidden dim must be >= 1, got {hidden_dim}")
    if rng is None:
        rng = np.random.default_rng(config.seed)
    in_dim = data.shape[1]
    layers = [
        init_layer(rng, in_dim, hidden_dim, "sigmoid", config.init_scale),
        init_layer(rng, hidden_dim, in_dim, decoder_activation(config.loss), config.init_scale),
    ]
    layers, trace = train_epochs(layers, data, config, rng)
    return layers[0], layers[1], trace


def greedy_pretrain(
    data: np.ndarray,
    widths: list[int] | tuple[int, ...],
    config: TrainConfig,
    rng: np.random.Generator | None = None,
) -> tuple[list[LayerParams], list[EpochTrace]]:
    """Train encoder layers one at a time, each on the clean output below.

    Corruption applies only at the layer currently being trained; the frozen
    stack underneath feeds uncorrupted activations upward. Returns the
    encoder stack and one trace per layer (last entries are the per-layer
    final errors).
    """
    if not widths:
        raise BadShapeError("at least one hidden width is required")
    if rng is None:
        rng = np.random.default_rng(config.seed)
    stack: list[LayerParams] = []
    traces: list[EpochTrace] = []
    current = np.asarray(data, dtype=np.float64)
    for width in widths:
        encoder, _, trace = train_single_ae(current, width, config, rng)
        stack.append(encoder)
        traces.append(trace)
        current = forward(encoder, current)
    return stack, traces


def assemble_stack(
    encoder_stack: list[LayerParams],
    input_dim: int,
    loss: str = "squared",
) -> StackedNetwork:
    """Mirror the encoder into a decoder with transposed, tied weights.

    Decoder layer i reuses the bias of the encoder layer producing the same
    width, except the outermost decoder layer whose bias is zero. Every
    decoder layer's activation follows the loss kind: affine throughout for
    the squared loss, squashed throughout for cross entropy.
    """
    if not encoder_stack:
        raise ShapeMismatchError("encoder stack is empty")
    if encoder_stack[0].in_dim != input_dim:
        raise ShapeMismatchError(
            f"first encoder expects width {encoder_stack[0].in_dim}, data has {input_dim}"
        )
    depth = len(encoder_stack)
    decoder: list[LayerParams] = []
    for i in range(1, depth + 1):
        mirror = encoder_stack[depth - i]
        is_outermost = i == depth
        decoder.append(
            LayerParams(
                weight=mirror.weight.T.copy(),
                bias=np.zeros(input_dim) if is_outermost else encoder_stack[depth - i - 1].bias.copy(),
                activation=decoder_activation(loss),
            )
        )
    return StackedNetwork(
        encoder_layers=[
            LayerParams(weight=l.weight.copy(), bias=l.bias.copy(), activation=l.activation)
            for l in encoder_stack
        ],
        decoder_layers=decoder,
    )


def fine_tune(
    network: StackedNetwork,
    data: np.ndarray,
    config: TrainConfig,
    rng: np.random.Generator | None = None,
) -> tuple[StackedNetwork, EpochTrace]:
    """End-to-end denoising backprop through encoder and decoder.

    Weight ties are not re-enforced: encoder and decoder weights diverge
    freely from their transposed starting point.
    """
    if rng is None:
        rng = np.random.default_rng(config.seed)
    depth = len(network.encoder_layers)
    layers, trace = train_epochs(network.layers, data, config, rng)
    return StackedNetwork(encoder_layers=layers[:depth], decoder_layers=layers[depth:]), trace


def default_widths(n_bands: int, n_keep: int, depth: int = 4) -> tuple[int, ...]:
    """Hidden layer schedule ending at the target band count.

    Four layers use the {L, 3k, 2k, k} schedule; other depths interpolate
    geometrically between the band count and the target.
    """
    if n_keep < 1 or depth < 1:
        raise BadShapeError(f"need positive target width and depth, got k={n_keep} depth={depth}")
    if depth == 4:
        return (n_bands, 3 * n_keep, 2 * n_keep, n_keep)
    if depth == 1:
        return (n_keep,)
    ratio = n_keep / n_bands
    widths = [max(1, round(n_bands * ratio ** (i / (depth - 1)))) for i in range(depth)]
    widths[-1] = n_keep
    return tuple(widths)


@dataclass
class SdaeModel:
    """Per-segment stacked networks plus the normalization that fed them.

    All segments share identical layer widths so codes are the same width
    everywhere; each segment's network saw only its own pixel rows.
    """

    plan: SegmentPlan
    networks: list[StackedNetwork]
    means: list[np.ndarray]
    pretrain_traces: list[list[EpochTrace]]
    finetune_traces: list[EpochTrace]
    config: TrainConfig
    k: int = field(default=0)

    def __post_init__(self) -> None:
        s = self.plan.count
        if not (len(self.networks) == len(self.means) == s):
            raise SegmentCoverageError(
                f"{len(self.networks)} networks / {len(self.means)} means for {s} segments"
            )
        widths = {net.widths for net in self.networks}
        if len(widths) != 1:
            raise ShapeMismatchError(f"segments disagree on layer widths: {widths}")
        if self.k == 0:
            self.k = self.networks[0].code_dim

    @property
    def n_bands(self) -> int:
        return self.networks[0].input_dim

    def transform(self, cube: HyperCube) -> np.ndarray:
        """Encode every pixel with its segment's network, in original order.

        Each segment's stored band means are subtracted before encoding, the
        same normalization the segment was trained under.
        """
        if cube.n_pixels != self.plan.total:
            raise SegmentCoverageError(
                f"cube has {cube.n_pixels} pixels, plan covers {self.plan.total}"
            )
        if cube.n_bands != self.n_bands:
            raise ShapeMismatchError(
                f"cube has {cube.n_bands} bands, model trained on {self.n_bands}"
            )
        codes = np.empty((cube.n_pixels, self.k))
        for (start, stop), net, mean in zip(self.plan.ranges, self.networks, self.means):
            codes[start:stop] = net.encode(cube.data[start:stop] - mean)
        return codes


def fit_sdae(cube: HyperCube, k: int, segments: int, config: TrainConfig) -> SdaeModel:
    """Fit the segmented (or with segments=1, whole-cube) reduction model.

    Every segment runs the same pipeline on its own pixel rows: zero-mean
    normalization, greedy pretraining, tied assembly, fine-tuning. Segment
    seeds derive from the master seed as seed + segment index, so results
    per segment are independent of every other segment yet reproducible.
    """
    if k < 1:
        raise BadShapeError(f"target band count must be >= 1, got {k}")
    widths = config.widths if config.widths is not None else default_widths(cube.n_bands, k)
    if widths[-1] != k:
        raise BadShapeError(f"width schedule {widths} must end at the target band count {k}")
    plan = make_segments(cube.n_pixels, segments)
    networks: list[StackedNetwork] = []
    means: list[np.ndarray] = []
    pretrain_traces: list[list[EpochTrace]] = []
    finetune_traces: list[EpochTrace] = []
    for index, (start, stop) in enumerate(plan.ranges):
        rng = np.random.default_rng(config.seed + index)
        centered, mean = center_columns(cube.data[start:stop])
        stack, traces = greedy_pretrain(centered, widths, config, rng)
        network = assemble_stack(stack, cube.n_bands, config.loss)
        network, finetune_trace = fine_tune(network, centered, config, rng)
        networks.append(network)
        means.append(mean)
        pretrain_traces.append(traces)
        finetune_traces.append(finetune_trace)
    return SdaeModel(
        plan=plan,
        networks=networks,
        means=means,
        pretrain_traces=pretrain_traces,
        finetune_traces=finetune_traces,
        config=config,
        k=k,
    )
