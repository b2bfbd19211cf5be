"""Unsupervised spectral band reduction for hyperspectral image cubes.

Reduces each pixel's spectrum to a small code with stacked denoising
autoencoders, trained on the whole cube or per spatial segment, and
evaluates the codes with a kNN classifier, kappa and overall accuracy, and
a PCA baseline.
"""

from .cube import (
    BandMask,
    GroundTruth,
    HyperCube,
    SegmentPlan,
    apply_band_mask,
    load_cube,
    load_ground_truth,
    make_segments,
    normalize_zero_mean,
    save_cube,
    save_ground_truth,
    synth_cube,
)
from .evaluate import (
    SplitSpec,
    confusion,
    evaluate_features,
    kappa,
    knn_classify,
    overall_accuracy,
    per_class_accuracy,
    split,
)
from .nn import (
    EpochTrace,
    LayerParams,
    TrainConfig,
    backward,
    corrupt,
    forward,
    loss_cross_entropy,
    loss_squared,
    sgd_step,
    train_epochs,
)
from .pca import PcaModel, pca_fit, pca_transform
from .sdae import (
    SdaeModel,
    StackedNetwork,
    assemble_stack,
    default_widths,
    fine_tune,
    fit_sdae,
    greedy_pretrain,
    train_single_ae,
)

__version__ = "0.1.0"

__all__ = [
    "BandMask",
    "GroundTruth",
    "HyperCube",
    "SegmentPlan",
    "apply_band_mask",
    "load_cube",
    "load_ground_truth",
    "make_segments",
    "normalize_zero_mean",
    "save_cube",
    "save_ground_truth",
    "synth_cube",
    "SplitSpec",
    "confusion",
    "evaluate_features",
    "kappa",
    "knn_classify",
    "overall_accuracy",
    "per_class_accuracy",
    "split",
    "EpochTrace",
    "LayerParams",
    "TrainConfig",
    "backward",
    "corrupt",
    "forward",
    "loss_cross_entropy",
    "loss_squared",
    "sgd_step",
    "train_epochs",
    "PcaModel",
    "pca_fit",
    "pca_transform",
    "SdaeModel",
    "StackedNetwork",
    "assemble_stack",
    "default_widths",
    "fine_tune",
    "fit_sdae",
    "greedy_pretrain",
    "train_single_ae",
    "__version__",
]
