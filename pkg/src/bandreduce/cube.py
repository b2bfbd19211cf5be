"""Hyperspectral cube I/O, validation, normalization, masking, and segmentation.

A cube is stored on disk as a raw little-endian float32 file in
band-interleaved-by-pixel order (all bands of pixel 0, then all bands of
pixel 1, ...) next to a JSON sidecar header with keys ``rows``, ``cols``,
``bands``, ``dtype``, ``byteorder``. In memory it is a dense pixels-by-bands
float64 matrix.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    BadHeaderError,
    BadShapeError,
    IndexOutOfRangeError,
    InvalidSegmentCountError,
    LengthMismatchError,
    NonContiguousClassesError,
    NonFiniteError,
    SizeMismatchError,
)

HEADER_KEYS = ("rows", "cols", "bands", "dtype", "byteorder")


@dataclass(frozen=True)
class HyperCube:
    """A hyperspectral image flattened to a pixels-by-bands matrix.

    ``data[p, l]`` is the reflectance of pixel ``p`` in band ``l``; pixels are
    row-major over the ``rows x cols`` spatial grid. ``wavelengths``, when
    present, gives the band-center wavelength in nm for each column and must
    be strictly increasing.
    """

    data: np.ndarray
    rows: int
    cols: int
    wavelengths: np.ndarray | None = None

    def __post_init__(self) -> None:
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim != 2 or data.shape[0] < 1 or data.shape[1] < 1:
            raise BadShapeError(f"cube data must be a non-empty 2-D matrix, got shape {data.shape}")
        if self.rows * self.cols != data.shape[0]:
            raise BadShapeError(
                f"rows*cols = {self.rows * self.cols} does not match pixel count {data.shape[0]}"
            )
        if not np.all(np.isfinite(data)):
            raise NonFiniteError("cube contains NaN or Inf values")
        object.__setattr__(self, "data", data)
        if self.wavelengths is not None:
            wl = np.asarray(self.wavelengths, dtype=np.float64)
            if wl.shape != (data.shape[1],):
                raise BadShapeError(
                    f"wavelengths has {wl.size} entries for {data.shape[1]} bands"
                )
            if np.any(np.diff(wl) <= 0):
                raise BadShapeError("wavelengths must be strictly increasing")
            object.__setattr__(self, "wavelengths", wl)

    @property
    def n_pixels(self) -> int:
        return self.data.shape[0]

    @property
    def n_bands(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class GroundTruth:
    """Per-pixel class labels, 0 meaning unlabeled, 1..K the classes."""

    labels: np.ndarray
    class_names: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        labels = np.asarray(self.labels, dtype=np.int64)
        if labels.ndim != 1:
            raise BadShapeError("labels must be a flat per-pixel vector")
        object.__setattr__(self, "labels", labels)
        present = np.unique(labels[labels != 0])
        if np.any(labels < 0) or (present.size and not np.array_equal(present, np.arange(1, present.size + 1))):
            raise NonContiguousClassesError(
                f"labeled class ids must be contiguous 1..K, got {present.tolist()}"
            )
        if self.class_names is not None and len(self.class_names) != present.size:
            raise BadShapeError(
                f"{len(self.class_names)} class names for {present.size} classes"
            )

    @property
    def n_classes(self) -> int:
        return int(self.labels.max(initial=0))

    def class_counts(self) -> np.ndarray:
        """Number of labeled pixels per class, index 0 holding class 1."""
        return np.bincount(self.labels, minlength=self.n_classes + 1)[1:]


@dataclass(frozen=True)
class BandMask:
    """Sorted, unique, 1-based band indices to discard."""

    removed: tuple[int, ...]

    def __post_init__(self) -> None:
        removed = tuple(int(i) for i in self.removed)
        if any(i < 1 for i in removed):
            raise IndexOutOfRangeError(f"band indices are 1-based, got {removed}")
        if len(set(removed)) != len(removed) or list(removed) != sorted(removed):
            raise IndexOutOfRangeError("band indices must be unique and sorted")
        object.__setattr__(self, "removed", removed)

    @classmethod
    def from_ranges(cls, text: str) -> "BandMask":
        """Parse a mask like ``"108-112,154-167,224"`` into indices."""
        indices: list[int] = []
        for part in text.split(","):
            part = part.strip()
            if not part:
                continue
            if "-" in part:
                lo, hi = part.split("-", 1)
                indices.extend(range(int(lo), int(hi) + 1))
            else:
                indices.append(int(part))
        return cls(tuple(sorted(set(indices))))


@dataclass(frozen=True)
class SegmentPlan:
    """Disjoint, contiguous, half-open pixel ranges covering exactly 0..P."""

    count: int
    ranges: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if self.count < 1 or len(self.ranges) != self.count:
            raise InvalidSegmentCountError(
                f"plan declares {self.count} segments but holds {len(self.ranges)} ranges"
            )
        cursor = 0
        sizes = []
        for start, stop in self.ranges:
            if start != cursor or stop <= start:
                raise InvalidSegmentCountError(
                    f"ranges must be contiguous non-empty intervals, got {self.ranges}"
                )
            sizes.append(stop - start)
            cursor = stop
        if max(sizes) - min(sizes) > 1:
            raise InvalidSegmentCountError(f"segment sizes {sizes} differ by more than 1")

    @property
    def total(self) -> int:
        return self.ranges[-1][1]


def load_cube(path: str | Path, header: str | Path) -> HyperCube:
    """Load a raw float32 cube described by its JSON sidecar header.

    Fails rather than truncates: the file length must equal
    rows*cols*bands*4 bytes exactly.
    """
    try:
        meta = json.loads(Path(header).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise BadHeaderError(f"cannot read header {header}: {exc}") from exc
    if not isinstance(meta, dict):
        raise BadHeaderError("header must be a JSON object")
    missing = [k for k in HEADER_KEYS if k not in meta]
    unknown = [k for k in meta if k not in HEADER_KEYS and k != "wavelengths"]
    if missing or unknown:
        raise BadHeaderError(f"header keys missing={missing} unknown={unknown}")
    if meta["dtype"] != "float32":
        raise BadHeaderError(f"unsupported dtype {meta['dtype']!r}, expected 'float32'")
    if meta["byteorder"] != "little":
        raise BadHeaderError(f"unsupported byteorder {meta['byteorder']!r}, expected 'little'")
    try:
        rows, cols, bands = int(meta["rows"]), int(meta["cols"]), int(meta["bands"])
    except (TypeError, ValueError) as exc:
        raise BadHeaderError(f"non-integer dimensions in header: {exc}") from exc
    if rows < 1 or cols < 1 or bands < 1:
        raise BadHeaderError(f"dimensions must be positive, got {rows}x{cols}x{bands}")

    expected = rows * cols * bands * 4
    actual = Path(path).stat().st_size
    if actual != expected:
        raise SizeMismatchError(
            f"{path} holds {actual} bytes, header implies {expected}"
        )
    raw = np.fromfile(path, dtype="<f4").astype(np.float64)
    if not np.all(np.isfinite(raw)):
        raise NonFiniteError(f"{path} contains NaN or Inf samples")
    wavelengths = meta.get("wavelengths")
    return HyperCube(
        data=raw.reshape(rows * cols, bands),
        rows=rows,
        cols=cols,
        wavelengths=None if wavelengths is None else np.asarray(wavelengths, dtype=np.float64),
    )


def save_cube(cube: HyperCube, path: str | Path, header: str | Path) -> None:
    """Write a cube as raw little-endian float32 plus its JSON header."""
    Path(path).write_bytes(np.ascontiguousarray(cube.data, dtype="<f4").tobytes())
    meta: dict = {
        "rows": cube.rows,
        "cols": cube.cols,
        "bands": cube.n_bands,
        "dtype": "float32",
        "byteorder": "little",
    }
    if cube.wavelengths is not None:
        meta["wavelengths"] = [float(w) for w in cube.wavelengths]
    Path(header).write_text(json.dumps(meta, indent=2) + "\n")


def apply_band_mask(cube: HyperCube, mask: BandMask) -> HyperCube:
    """Drop the masked bands, keeping the remaining ones in original order."""
    if not mask.removed:
        return cube
    if mask.removed[-1] > cube.n_bands:
        raise IndexOutOfRangeError(
            f"mask index {mask.removed[-1]} exceeds band count {cube.n_bands}"
        )
    keep = np.setdiff1d(np.arange(cube.n_bands), np.asarray(mask.removed) - 1)
    return HyperCube(
        data=cube.data[:, keep],
        rows=cube.rows,
        cols=cube.cols,
        wavelengths=None if cube.wavelengths is None else cube.wavelengths[keep],
    )


def center_columns(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Subtract each column's mean; returns (centered matrix, means)."""
    means = matrix.mean(axis=0)
    return matrix - means, means


def normalize_zero_mean(cube: HyperCube) -> tuple[HyperCube, np.ndarray]:
    """Translate every band to zero mean; the returned means invert exactly."""
    centered, means = center_columns(cube.data)
    shifted = HyperCube(
        data=centered, rows=cube.rows, cols=cube.cols, wavelengths=cube.wavelengths
    )
    return shifted, means


def make_segments(pixel_count: int, segment_count: int) -> SegmentPlan:
    """Partition 0..P into S contiguous ranges whose sizes differ by at most 1.

    The remainder is spread over the leading segments; S=1 yields the single
    full range (non-segmented mode).
    """
    if segment_count < 1 or segment_count > pixel_count:
        raise InvalidSegmentCountError(
            f"segment count {segment_count} not in 1..{pixel_count}"
        )
    base, extra = divmod(pixel_count, segment_count)
    ranges = []
    start = 0
    for i in range(segment_count):
        stop = start + base + (1 if i < extra else 0)
        ranges.append((start, stop))
        start = stop
    return SegmentPlan(count=segment_count, ranges=tuple(ranges))


def synth_cube(
    classes: int,
    pixels_per_class: list[int],
    bands: int,
    intrinsic_dim: int,
    noise_sd: float,
    seed: int,
    nonlinear: bool = False,
) -> tuple[HyperCube, GroundTruth]:
    """Generate a labeled cube whose spectra live on a low-dimensional manifold.

    Each class is a fixed point in an ``intrinsic_dim``-dimensional latent
    space, pushed through one shared random bands-by-latent linear map, plus
    iid Gaussian noise per pixel. With ``nonlinear`` the latent point passes
    through an elementwise logistic squash before mixing. Deterministic for a
    given seed.
    """
    if classes < 1 or len(pixels_per_class) != classes or any(n < 1 for n in pixels_per_class):
        raise BadShapeError(
            f"need one positive pixel count per class, got {pixels_per_class} for {classes} classes"
        )
    if bands < 1 or intrinsic_dim < 1 or intrinsic_dim > bands:
        raise BadShapeError(
            f"intrinsic dim {intrinsic_dim} must be in 1..{bands}"
        )
    if noise_sd < 0:
        raise BadShapeError(f"noise sd must be non-negative, got {noise_sd}")
    rng = np.random.default_rng(seed)
    mixing = rng.normal(size=(bands, intrinsic_dim)) / math.sqrt(intrinsic_dim)
    centers = rng.normal(size=(classes, intrinsic_dim))
    if nonlinear:
        centers = 1.0 / (1.0 + np.exp(-centers))
    blocks = []
    labels = []
    for c in range(classes):
        n = pixels_per_class[c]
        clean = mixing @ centers[c]
        blocks.append(clean + rng.normal(0.0, noise_sd, size=(n, bands)))
        labels.append(np.full(n, c + 1, dtype=np.int64))
    data = np.vstack(blocks)
    cube = HyperCube(data=data, rows=data.shape[0], cols=1)
    return cube, GroundTruth(labels=np.concatenate(labels))


def load_ground_truth(path: str | Path, expected_pixels: int | None = None) -> GroundTruth:
    """Read one integer label per pixel from a single-column CSV."""
    labels = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            labels.append(int(line))
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: {line!r} is not an integer label") from exc
    arr = np.asarray(labels, dtype=np.int64)
    if expected_pixels is not None and arr.size != expected_pixels:
        raise LengthMismatchError(
            f"{path} holds {arr.size} labels for {expected_pixels} pixels"
        )
    return GroundTruth(labels=arr)


def save_ground_truth(gt: GroundTruth, path: str | Path) -> None:
    """Write labels as a single-column CSV in row-major pixel order."""
    Path(path).write_text("\n".join(str(int(v)) for v in gt.labels) + "\n")
