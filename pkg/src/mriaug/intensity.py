"""Voxel intensity transforms: Gaussian noise and smooth bias fields.

All operate on normalized volumes in [0, 1]. Noise draws use float64
internally and the result is clamped back to [0, 1] unless the caller
asks for the raw values (useful when measuring noise statistics).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BadShapeError, NegativeSigmaError
from .rng import SeededRng
from .volume import Volume, rescale_unit


def _check_sigma(sigma: float) -> float:
    sigma = float(sigma)
    if not math.isfinite(sigma) or sigma < 0.0:
        raise NegativeSigmaError(f"sigma must be finite and >= 0, got {sigma}")
    return sigma


def additive_gaussian_noise(
    v: Volume, sigma: float, rng: SeededRng, clamp: bool = True
) -> Volume:
    """out = v + n with n ~ N(0, sigma^2), independent per voxel."""
    sigma = _check_sigma(sigma)
    if sigma == 0.0:
        return v
    noise = rng.normal(sigma, size=v.shape)
    out = v.data.astype(np.float64) + noise
    if clamp:
        np.clip(out, 0.0, 1.0, out=out)
    return v.with_data(out.astype(np.float32))


def multiplicative_noise(
    v: Volume, sigma: float, rng: SeededRng, clamp: bool = True
) -> Volume:
    """out = v * (1 + n) with n ~ N(0, sigma^2).

    Scales fluctuations by local intensity, so bright voxels jitter more.
    """
    sigma = _check_sigma(sigma)
    if sigma == 0.0:
        return v
    noise = rng.normal(sigma, size=v.shape)
    out = v.data.astype(np.float64) * (1.0 + noise)
    if clamp:
        np.clip(out, 0.0, 1.0, out=out)
    return v.with_data(out.astype(np.float32))


@dataclass(frozen=True)
class BiasFieldParams:
    center: tuple      # voxel coordinates, may be fractional
    scale: float       # Gaussian falloff in voxels
    amplitude: float   # peak gain above 1.0


def generate_bias_field(shape: tuple, params: BiasFieldParams) -> np.ndarray:
    """Multiplicative gain field, >= 1 everywhere, peaking at the center.

    field(x) = exp(a * g(x)) with g(x) = exp(-||x - c||^2 / (2 scale^2)),
    a unit-height Gaussian bump: the maximum gain exp(a) sits at the voxel
    nearest the center and the field decays smoothly toward 1. The exp
    wrapper keeps the field positive for any amplitude.
    """
    if len(shape) != 3 or any(int(n) < 1 for n in shape):
        raise BadShapeError(f"need three positive extents, got {shape!r}")
    if not (float(params.scale) > 0.0):
        raise BadShapeError(f"scale must be positive, got {params.scale}")
    if float(params.amplitude) < 0.0:
        raise BadShapeError(f"amplitude must be >= 0, got {params.amplitude}")
    if len(params.center) != 3:
        raise BadShapeError(f"center must have three coordinates, got {params.center!r}")
    for c, n in zip(params.center, shape):
        if not (0.0 <= float(c) <= n - 1.0):
            raise BadShapeError(
                f"center {tuple(params.center)} outside grid of shape {tuple(shape)}"
            )

    two_s2 = 2.0 * float(params.scale) ** 2
    axes = [
        ((np.arange(n, dtype=np.float64) - float(c)) ** 2)
        for n, c in zip(shape, params.center)
    ]
    # separable: ||x-c||^2 = dx^2 + dy^2 + dz^2
    d2 = (
        axes[0][:, None, None] + axes[1][None, :, None] + axes[2][None, None, :]
    )
    return np.exp(float(params.amplitude) * np.exp(-d2 / two_s2))


def bias_field(v: Volume, params: BiasFieldParams, renormalize: bool = True) -> Volume:
    """Multiply by a smooth gain field, then rescale back into [0, 1]."""
    if float(params.amplitude) == 0.0:
        return v
    field = generate_bias_field(v.shape, params)
    out = v.data.astype(np.float64) * field
    if renormalize:
        out = rescale_unit(out)
    return v.with_data(out.astype(np.float32))
