"""Spatial transforms: rigid rotation and elastic deformation.

Both are implemented as backward warps: for every output voxel we compute
the source coordinate in the input volume and interpolate there. Images
use trilinear interpolation, label maps use nearest neighbour with ties
broken upward (floor(c + 0.5)), and coordinates that land outside the
volume read as zero / background.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BadShapeError, NegativeSigmaError, ShapeMismatchError
from .rng import SeededRng
from .volume import LabelVolume, Volume


# --- interpolation ---------------------------------------------------------


def sample_trilinear(data: np.ndarray, coords: np.ndarray) -> np.ndarray:
    """Sample `data` at fractional coordinates, zero outside the volume.

    coords has shape (3,) + out_shape; the result has out_shape and dtype
    float64 regardless of input dtype.
    """
    src = data.astype(np.float64, copy=False)
    nx, ny, nz = src.shape
    x, y, z = coords.astype(np.float64, copy=False)

    x0 = np.floor(x)
    y0 = np.floor(y)
    z0 = np.floor(z)
    fx = x - x0
    fy = y - y0
    fz = z - z0
    x0 = x0.astype(np.int64)
    y0 = y0.astype(np.int64)
    z0 = z0.astype(np.int64)

    out = np.zeros(x.shape, dtype=np.float64)
    for dx in (0, 1):
        wx = fx if dx else 1.0 - fx
        xi = x0 + dx
        okx = (xi >= 0) & (xi < nx)
        for dy in (0, 1):
            wy = fy if dy else 1.0 - fy
            yi = y0 + dy
            oky = (yi >= 0) & (yi < ny)
            for dz in (0, 1):
                wz = fz if dz else 1.0 - fz
                zi = z0 + dz
                ok = okx & oky & (zi >= 0) & (zi < nz)
                vals = src[
                    np.clip(xi, 0, nx - 1),
                    np.clip(yi, 0, ny - 1),
                    np.clip(zi, 0, nz - 1),
                ]
                out += np.where(ok, wx * wy * wz * vals, 0.0)
    return out


def sample_nearest(data: np.ndarray, coords: np.ndarray) -> np.ndarray:
    """Nearest-neighbour sampling with half-voxel ties rounded up."""
    nx, ny, nz = data.shape
    idx = np.floor(coords.astype(np.float64, copy=False) + 0.5).astype(np.int64)
    xi, yi, zi = idx
    ok = (xi >= 0) & (xi < nx) & (yi >= 0) & (yi < ny) & (zi >= 0) & (zi < nz)
    vals = data[
        np.clip(xi, 0, nx - 1),
        np.clip(yi, 0, ny - 1),
        np.clip(zi, 0, nz - 1),
    ]
    return np.where(ok, vals, np.zeros((), dtype=data.dtype))


def resample(v: Volume, mapping, interp: str = "trilinear") -> Volume:
    """Backward-warp a volume: out[x] = interpolate(v, mapping(x)).

    `mapping` is either a (3,) + shape array of source coordinates or a
    callable receiving the identity coordinate grid and returning one.
    The identity mapping with trilinear interpolation is bit-exact.
    """
    if callable(mapping):
        coords = np.asarray(mapping(_source_grid(v.shape)), dtype=np.float64)
    else:
        coords = np.asarray(mapping, dtype=np.float64)
    if coords.shape != (3,) + v.shape:
        raise BadShapeError(
            f"mapping must produce (3,) + {v.shape}, got {coords.shape}"
        )
    if interp == "trilinear":
        return v.with_data(sample_trilinear(v.data, coords).astype(np.float32))
    if interp == "nearest":
        return v.with_data(sample_nearest(v.data, coords))
    raise ValueError(f"interp must be 'trilinear' or 'nearest', got {interp!r}")


# --- rigid rotation --------------------------------------------------------


@dataclass(frozen=True)
class RotationParams:
    angles_deg: tuple   # (about x, about y, about z)


def rotation_matrix(angles_deg) -> np.ndarray:
    """Forward map R = Rz @ Ry @ Rx for intrinsic x, y, z angles in degrees."""
    ax, ay, az = (math.radians(float(a)) for a in angles_deg)
    cx, sx = math.cos(ax), math.sin(ax)
    cy, sy = math.cos(ay), math.sin(ay)
    cz, sz = math.cos(az), math.sin(az)
    rx = np.array([[1, 0, 0], [0, cx, -sx], [0, sx, cx]], dtype=np.float64)
    ry = np.array([[cy, 0, sy], [0, 1, 0], [-sy, 0, cy]], dtype=np.float64)
    rz = np.array([[cz, -sz, 0], [sz, cz, 0], [0, 0, 1]], dtype=np.float64)
    return rz @ ry @ rx


def _source_grid(shape) -> np.ndarray:
    axes = [np.arange(n, dtype=np.float64) for n in shape]
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=0)


def rotate(v: Volume, params: RotationParams, labels: LabelVolume = None):
    """Rotate about the volume center (shape - 1) / 2, same grid out.

    Returns the rotated volume, or a (volume, labels) pair when a label
    map rides along; labels are warped with the identical mapping but
    nearest-neighbour interpolation.
    """
    if labels is not None and labels.shape != v.shape:
        raise ShapeMismatchError(
            f"labels shape {labels.shape} != volume shape {v.shape}"
        )
    angles = tuple(float(a) for a in params.angles_deg)
    if len(angles) != 3:
        raise BadShapeError(f"need three angles, got {params.angles_deg!r}")
    if angles == (0.0, 0.0, 0.0):
        return v if labels is None else (v, labels)

    center = (np.asarray(v.shape, dtype=np.float64) - 1.0) / 2.0
    rinv = rotation_matrix(angles).T   # orthogonal: inverse is transpose
    grid = _source_grid(v.shape)
    rel = grid - center[:, None, None, None]
    src = np.einsum("ab,b...->a...", rinv, rel) + center[:, None, None, None]

    out = v.with_data(sample_trilinear(v.data, src).astype(np.float32))
    if labels is None:
        return out
    warped = sample_nearest(labels.data, src)
    return out, LabelVolume(
        data=warped, spacing=labels.spacing, affine=labels.affine
    )


# --- elastic deformation ---------------------------------------------------


def gaussian_kernel1d(sigma: float) -> np.ndarray:
    """Normalized Gaussian taps truncated at radius int(4*sigma + 0.5)."""
    sigma = float(sigma)
    if not (sigma > 0.0) or not math.isfinite(sigma):
        raise NegativeSigmaError(f"kernel sigma must be finite and > 0, got {sigma}")
    radius = int(4.0 * sigma + 0.5)
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-0.5 * (x / sigma) ** 2)
    return k / k.sum()


def smooth_gaussian(data: np.ndarray, sigma: float) -> np.ndarray:
    """Separable Gaussian blur over the three spatial axes.

    Boundaries are reflect-padded so the smoothed field keeps its scale
    near the edges instead of decaying toward zero. Equivalent to one
    dense 3D convolution over the fully padded array; the separable form
    just factors it into three cheap passes.
    """
    out = data.astype(np.float64, copy=True)
    kernel = gaussian_kernel1d(sigma)
    spatial = tuple(range(out.ndim - 3, out.ndim))
    for axis in spatial:
        out = _convolve_axis(out, kernel, axis)
    return out


def _convolve_axis(data: np.ndarray, kernel: np.ndarray, axis: int) -> np.ndarray:
    radius = (len(kernel) - 1) // 2
    pad = [(0, 0)] * data.ndim
    pad[axis] = (radius, radius)
    padded = np.pad(data, pad, mode="reflect")
    n = data.shape[axis]
    out = np.zeros_like(data)
    index = [slice(None)] * data.ndim
    for i, w in enumerate(kernel):
        index[axis] = slice(i, i + n)
        out += w * padded[tuple(index)]
    return out


def generate_displacement_field(
    shape, kernel_sigma: float, alpha: float, rng: SeededRng
) -> np.ndarray:
    """Random displacement field: U(-1, 1) noise, blurred, scaled by alpha.

    Returns (3,) + shape float64 voxel displacements. The blur normalizes
    to unit kernel sum, so effective displacements come out far smaller
    than alpha; measured magnitudes at the default ranges are in the docs.
    """
    if len(shape) != 3 or any(int(n) < 1 for n in shape):
        raise BadShapeError(f"need three positive extents, got {shape!r}")
    alpha = float(alpha)
    if alpha < 0.0 or not math.isfinite(alpha):
        raise NegativeSigmaError(f"alpha must be finite and >= 0, got {alpha}")
    noise = rng.uniform(-1.0, 1.0, size=(3,) + tuple(int(n) for n in shape))
    if alpha == 0.0:
        return np.zeros_like(noise)
    return smooth_gaussian(noise, kernel_sigma) * alpha


def elastic_deform(v: Volume, field: np.ndarray, labels: LabelVolume = None):
    """Warp by a displacement field: out[x] = interpolate(v, x + field[x]).

    Trilinear for the image, nearest for labels, zero padding outside.
    An all-zero field returns the inputs unchanged.
    """
    if labels is not None and labels.shape != v.shape:
        raise ShapeMismatchError(
            f"labels shape {labels.shape} != volume shape {v.shape}"
        )
    field = np.asarray(field, dtype=np.float64)
    if field.shape != (3,) + v.shape:
        raise ShapeMismatchError(
            f"field shape {field.shape} does not match volume shape {v.shape}"
        )
    if not field.any():
        return v if labels is None else (v, labels)

    src = _source_grid(v.shape) + field
    out = v.with_data(sample_trilinear(v.data, src).astype(np.float32))
    if labels is None:
        return out
    warped = sample_nearest(labels.data, src)
    return out, LabelVolume(
        data=warped, spacing=labels.spacing, affine=labels.affine
    )
