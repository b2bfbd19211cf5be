"""Model serialization: one JSON envelope for both reduction methods.

Floats are written with 17 significant digits so deserialized parameters
reproduce the originals exactly.
"""

from __future__ import annotations

from pathlib import Path

import json
import numpy as np

from .cube import SegmentPlan
from .errors import BadHeaderError
from .nn import LayerParams, TrainConfig
from .pca import PcaModel
from .sdae import SdaeModel, StackedNetwork


def dumps(obj) -> str:
    """JSON text with full-precision decimal floats, stable key order."""
    return _emit(obj, indent=0)


def _emit(obj, indent: int) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{inner}"{key}": {_emit(value, indent + 1)}' for key, value in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        parts = [_emit(value, indent + 1) for value in obj]
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(parts) + "]"
        return "[\n" + ",\n".join(inner + p for p in parts) + "\n" + pad + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (np.floating, float)):
        return format(float(obj), ".17g")
    if isinstance(obj, (np.integer, int)):
        return str(int(obj))
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _layer_to_dict(layer: LayerParams) -> dict:
    return {
        "activation": layer.activation,
        "in_dim": layer.in_dim,
        "out_dim": layer.out_dim,
        "weight": layer.weight.ravel(order="C").tolist(),
        "bias": layer.bias.tolist(),
    }


def _layer_from_dict(doc: dict) -> LayerParams:
    return LayerParams(
        weight=np.asarray(doc["weight"], dtype=np.float64).reshape(doc["out_dim"], doc["in_dim"]),
        bias=np.asarray(doc["bias"], dtype=np.float64),
        activation=doc["activation"],
    )


def _network_to_dict(net: StackedNetwork) -> dict:
    return {
        "encoder": [_layer_to_dict(l) for l in net.encoder_layers],
        "decoder": [_layer_to_dict(l) for l in net.decoder_layers],
    }


def _network_from_dict(doc: dict) -> StackedNetwork:
    return StackedNetwork(
        encoder_layers=[_layer_from_dict(l) for l in doc["encoder"]],
        decoder_layers=[_layer_from_dict(l) for l in doc["decoder"]],
    )


def _config_to_dict(config: TrainConfig) -> dict:
    return {
        "noise_fraction": config.noise_fraction,
        "learning_rate": config.learning_rate,
        "init_scale": config.init_scale,
        "epochs": config.epochs,
        "batch_size": config.batch_size,
        "loss": config.loss,
        "mode": config.mode,
        "seed": config.seed,
        "noise_kind": config.noise_kind,
        "widths": None if config.widths is None else list(config.widths),
    }


def _config_from_dict(doc: dict) -> TrainConfig:
    widths = doc.get("widths")
    return TrainConfig(
        noise_fraction=doc["noise_fraction"],
        learning_rate=doc["learning_rate"],
        init_scale=doc["init_scale"],
        epochs=doc["epochs"],
        batch_size=doc["batch_size"],
        loss=doc["loss"],
        mode=doc["mode"],
        seed=doc["seed"],
        noise_kind=doc.get("noise_kind", "masking"),
        widths=None if widths is None else tuple(widths),
    )


def sdae_to_dict(model: SdaeModel) -> dict:
    return {
        "kind": "udae",
        "k": model.k,
        "segments": {
            "count": model.plan.count,
            "ranges": [list(r) for r in model.plan.ranges],
        },
        "networks": [_network_to_dict(net) for net in model.networks],
        "means": [m.tolist() for m in model.means],
        "pretrain_traces": model.pretrain_traces,
        "finetune_traces": model.finetune_traces,
        "config": _config_to_dict(model.config),
    }


def sdae_from_dict(doc: dict) -> SdaeModel:
    plan = SegmentPlan(
        count=doc["segments"]["count"],
        ranges=tuple(tuple(r) for r in doc["segments"]["ranges"]),
    )
    return SdaeModel(
        plan=plan,
        networks=[_network_from_dict(n) for n in doc["networks"]],
        means=[np.asarray(m, dtype=np.float64) for m in doc["means"]],
        pretrain_traces=doc["pretrain_traces"],
        finetune_traces=doc["finetune_traces"],
        config=_config_from_dict(doc["config"]),
        k=doc["k"],
    )


def pca_to_dict(model: PcaModel) -> dict:
    return {
        "kind": "pca",
        "k": model.components.shape[0],
        "mean": model.mean.tolist(),
        "components": [row.tolist() for row in model.components],
        "eigenvalues": model.eigenvalues.tolist(),
    }


def pca_from_dict(doc: dict) -> PcaModel:
    return PcaModel(
        mean=np.asarray(doc["mean"], dtype=np.float64),
        components=np.asarray(doc["components"], dtype=np.float64),
        eigenvalues=np.asarray(doc["eigenvalues"], dtype=np.float64),
    )


def save_model(model: SdaeModel | PcaModel, path: str | Path) -> None:
    doc = sdae_to_dict(model) if isinstance(model, SdaeModel) else pca_to_dict(model)
    Path(path).write_text(dumps(doc) + "\n")


def load_model(path: str | Path) -> SdaeModel | PcaModel:
    doc = json.loads(Path(path).read_text())
    kind = doc.get("kind")
    if kind == "udae":
        return sdae_from_dict(doc)
    if kind == "pca":
        return pca_from_dict(doc)
    raise BadHeaderError(f"unknown model kind {kind!r} in {path}")
