"""Core volumetric data model: volumes, labels, orientation, and metrics.

All transforms in this package operate on `Volume` / `LabelVolume` pairs.
Both types are immutable after construction (arrays are marked read-only)
and every operation returns a new object, so instances can be shared
freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConstantVolumeError,
    NonInvertibleAffineError,
    ObliqueAffineError,
    ShapeMismatchError,
)

# Axis labels for the positive/negative ends of each world axis, RAS+
# convention: +x Right, +y Anterior, +z Superior.
_POS_CODES = "RAS"
_NEG_CODES = "LPI"

_COS_45 = np.cos(np.pi / 4.0)


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Volume:
    """A 3D scalar grid with voxel spacing and a voxel-to-world affine.

    data is row-major with dimensions (nx, ny, nz). Values are stored in
    float32 by default; float64 is permitted for frequency-domain results
    that need the extra precision. intensity_range records the original
    (min, max) captured by normalize_intensity, or None if the volume has
    not been normalized.
    """

    data: np.ndarray
    spacing: tuple = (1.0, 1.0, 1.0)
    affine: np.ndarray = field(default_factory=lambda: np.eye(4))
    intensity_range: tuple | None = None

    def __post_init__(self):
        data = np.asarray(self.data)
        if data.ndim != 3:
            raise ValueError(f"volume data must be 3D, got {data.ndim}D")
        if min(data.shape) < 1:
            raise ValueError(f"every dimension must be >= 1, got {data.shape}")
        if data.dtype not in (np.float32, np.float64):
            data = data.astype(np.float32)
        if not np.all(np.isfinite(data)):
            raise ValueError("volume data contains NaN or Inf")
        affine = np.asarray(self.affine, dtype=np.float64)
        if affine.shape != (4, 4):
            raise ValueError(f"affine must be 4x4, got {affine.shape}")
        object.__setattr__(self, "data", _freeze(data))
        object.__setattr__(self, "spacing", tuple(float(s) for s in self.spacing))
        object.__setattr__(self, "affine", _freeze(affine))

    @property
    def shape(self) -> tuple:
        return self.data.shape

    def with_data(self, data: np.ndarray) -> "Volume":
        """New volume with replaced voxel data, same geometry."""
        return Volume(data, self.spacing, self.affine, self.intensity_range)


@dataclass(frozen=True)
class LabelVolume:
    """Integer segmentation grid aligned voxel-for-voxel with a Volume."""

    data: np.ndarray
    spacing: tuple = (1.0, 1.0, 1.0)
    affine: np.ndarray = field(default_factory=lambda: np.eye(4))

    def __post_init__(self):
        data = np.asarray(self.data)
        if data.ndim != 3:
            raise ValueError(f"label data must be 3D, got {data.ndim}D")
        if not np.issubdtype(data.dtype, np.integer):
            raise ValueError(f"label data must be integer, got {data.dtype}")
        if data.size and data.min() < 0:
            raise ValueError("labels must be non-negative")
        affine = np.asarray(self.affine, dtype=np.float64)
        object.__setattr__(self, "data", _freeze(data))
        object.__setattr__(self, "spacing", tuple(float(s) for s in self.spacing))
        object.__setattr__(self, "affine", _freeze(affine))

    @property
    def shape(self) -> tuple:
        return self.data.shape

    def with_data(self, data: np.ndarray) -> "LabelVolume":
        return LabelVolume(data, self.spacing, self.affine)

    def label_set(self) -> set:
        return set(int(v) for v in np.unique(self.data))


@dataclass(frozen=True)
class Orientation:
    """Three-letter axis code (one of the 48 permutation/flip codes)."""

    code: str

    @classmethod
    def from_affine(cls, affine: np.ndarray) -> "Orientation":
        return cls(orientation_code(affine))

    @property
    def is_ras(self) -> bool:
        return self.code == "RAS"


def _dominant_axes(affine: np.ndarray):
    """Per voxel axis: (world axis index, sign) of its dominant direction.

    Raises NonInvertibleAffineError / ObliqueAffineError per the reorientation
    contract: each column must point within 45 degrees of a distinct world
    axis, otherwise reorientation would require resampling.
    """
    rot = np.asarray(affine, dtype=np.float64)[:3, :3]
    if abs(np.linalg.det(rot)) < 1e-12:
        raise NonInvertibleAffineError("affine determinant is zero")
    axes = []
    signs = []
    for j in range(3):
        col = rot[:, j]
        unit = col / np.linalg.norm(col)
        i = int(np.argmax(np.abs(unit)))
        if abs(unit[i]) <= _COS_45 + 1e-9:
            raise ObliqueAffineError(
                f"voxel axis {j} is more than 45 degrees from any world axis"
            )
        axes.append(i)
        signs.append(1 if unit[i] > 0 else -1)
    if sorted(axes) != [0, 1, 2]:
        raise ObliqueAffineError("voxel axes do not map to distinct world axes")
    return axes, signs


def orientation_code(affine: np.ndarray) -> str:
    """Derive the 3-letter orientation code (e.g. RAS, LPS) from an affine."""
    axes, signs = _dominant_axes(affine)
    code = [""] * 3
    for j in range(3):
        code[j] = _POS_CODES[axes[j]] if signs[j] > 0 else _NEG_CODES[axes[j]]
    return "".join(code)


def reorient_to_ras(v: Volume, labels: LabelVolume | None = None):
    """Permute/flip the voxel grid so the affine becomes RAS-dominant.

    No interpolation happens: voxel values are only rearranged, and the
    affine is updated so world coordinates are preserved exactly. When a
    LabelVolume is passed it is permuted identically and a
    (Volume, LabelVolume) pair is returned.
    """
    axes, signs = _dominant_axes(v.affine)
    # perm[world_axis] = voxel axis whose dominant direction is world_axis
    perm = [axes.index(i) for i in range(3)]
    flips = [signs[perm[i]] < 0 for i in range(3)]

    def rearrange(data):
        out = np.transpose(data, perm)
        for ax in range(3):
            if flips[ax]:
                out = np.flip(out, axis=ax)
        return np.ascontiguousarray(out)

    # voxel-index map from new grid to old grid: old = P @ new + t
    mapping = np.eye(4)
    rot = np.zeros((3, 3))
    t = np.zeros(3)
    new_shape = [v.shape[perm[i]] for i in range(3)]
    for i in range(3):
        s = -1.0 if flips[i] else 1.0
        rot[perm[i], i] = s
        if flips[i]:
            t[perm[i]] = new_shape[i] - 1
    mapping[:3, :3] = rot
    mapping[:3, 3] = t
    new_affine = v.affine @ mapping
    new_spacing = tuple(v.spacing[perm[i]] for i in range(3))

    out = Volume(rearrange(v.data), new_spacing, new_affine, v.intensity_range)
    if labels is None:
        return out
    if labels.shape != v.shape:
        raise ShapeMismatchError(
            f"labels {labels.shape} do not match volume {v.shape}"
        )
    out_labels = LabelVolume(rearrange(labels.data), new_spacing, new_affine)
    return out, out_labels


def normalize_intensity(v: Volume) -> Volume:
    """Map intensities affinely onto [0, 1], recording the original range.

    Raises ConstantVolumeError when max == min.
    """
    lo = float(v.data.min())
    hi = float(v.data.max())
    if hi == lo:
        raise ConstantVolumeError(f"volume is constant at {lo}")
    data = ((v.data - np.float32(lo)) / np.float32(hi - lo)).astype(np.float32)
    return Volume(data, v.spacing, v.affine, intensity_range=(lo, hi))


def rescale_unit(data: np.ndarray) -> np.ndarray:
    """Min-max rescale an array to [0, 1]; constant input degrades to clipping."""
    lo = float(data.min())
    hi = float(data.max())
    if hi > lo:
        return (data - lo) / (hi - lo)
    return np.clip(data, 0.0, 1.0)


def dice_coefficient(a: LabelVolume, b: LabelVolume, label: int) -> float:
    """Dice overlap 2|A&B| / (|A|+|B|) for one label; 1.0 when both empty."""
    if a.shape != b.shape:
        raise ShapeMismatchError(f"{a.shape} vs {b.shape}")
    ma = a.data == label
    mb = b.data == label
    na = int(np.count_nonzero(ma))
    nb = int(np.count_nonzero(mb))
    if na + nb == 0:
        return 1.0
    inter = int(np.count_nonzero(ma & mb))
    return 2.0 * inter / (na + nb)


def volume_stats(v: Volume) -> dict:
    """Exact sample statistics over all voxels (float64 accumulation)."""
    data = v.data
    mean = float(np.mean(data, dtype=np.float64))
    std = float(np.std(data, dtype=np.float64))
    lo = float(data.min())
    hi = float(data.max())
    span = (lo, hi) if hi > lo else (lo, lo + 1.0)
    hist, edges = np.histogram(data, bins=256, range=span)
    return {
        "mean": mean,
        "std": std,
        "min": lo,
        "max": hi,
        "histogram": hist,
        "bin_edges": edges,
    }
