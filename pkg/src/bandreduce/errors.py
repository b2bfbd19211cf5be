"""Exception types raised by the band reduction toolkit."""


class BandReduceError(ValueError):
    """Base class for all toolkit errors."""


# cube loading and geometry

class BadHeaderError(BandReduceError):
    """Sidecar header is missing, malformed, or inconsistent."""


class SizeMismatchError(BandReduceError):
    """Raw data file length does not match the header's shape product."""


class NonFiniteError(BandReduceError):
    """NaN or Inf encountered where finite values are required."""


class BadShapeError(BandReduceError):
    """Array dimensions are inconsistent with the requested construction."""


class IndexOutOfRangeError(BandReduceError):
    """A band index falls outside the valid 1..L range."""


class InvalidSegmentCountError(BandReduceError):
    """Segment count is below 1 or exceeds the pixel count."""


class LengthMismatchError(BandReduceError):
    """Two per-pixel sequences disagree in length."""


class NonContiguousClassesError(BandReduceError):
    """Labeled class ids are not exactly 1..K."""


# network training

class ShapeMismatchError(BandReduceError):
    """Matrix or vector shapes do not chain."""


class BadNoiseFractionError(BandReduceError):
    """Corruption fraction outside [0, 1]."""


class DomainError(BandReduceError):
    """Input values outside the domain required by the loss."""


class LossActivationMismatchError(BandReduceError):
    """Loss kind is incompatible with the output layer activation."""


class NonFiniteLossError(BandReduceError):
    """Training produced a NaN or Inf loss."""


class SegmentCoverageError(BandReduceError):
    """Pixel rows do not line up with the model's segment plan."""


# evaluation

class ClassTooSmallError(BandReduceError):
    """A class has too few labeled samples to split."""


class EmptyTrainSetError(BandReduceError):
    """Classification requested with no training samples."""


class LabelOutOfRangeError(BandReduceError):
    """A label is outside 1..K."""


class DegenerateMatrixError(BandReduceError):
    """Confusion matrix marginals make the kappa denominator zero."""


class EmptyMatrixError(BandReduceError):
    """Confusion matrix holds no samples."""


# pca baseline

class BadKError(BandReduceError):
    """Requested component count is out of range."""


class ConvergenceError(BandReduceError):
    """Eigendecomposition failed to converge."""
