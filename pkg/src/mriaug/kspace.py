"""Frequency-domain machinery and k-space artifact simulation.

The forward transform is the plain unnormalized 3D DFT; the inverse
carries the 1/N factor and returns the complex magnitude, matching how
scanners reconstruct magnitude images. Gibbs ringing truncates the outer
band of centered k-space along one axis; motion ghosting attenuates every
n-th plane, which in image space superimposes n shifted copies of the
anatomy at spacing L/n.

Both artifact operations are deterministic. Unit parameters (a cutoff
retaining every frequency, a weighting factor of 1) return the input
volume unchanged rather than paying for a roundtrip.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BadCutoffError, BadFactorError, BadNError
from .volume import Volume, rescale_unit

_AXIS_NAMES = {"x": 0, "y": 1, "z": 2}


def _axis_index(axis) -> int:
    if isinstance(axis, str):
        try:
            return _AXIS_NAMES[axis.lower()]
        except KeyError:
            raise ValueError(f"axis must be one of x, y, z, got {axis!r}") from None
    axis = int(axis)
    if axis not in (0, 1, 2):
        raise ValueError(f"axis must be 0, 1 or 2, got {axis}")
    return axis


@dataclass(frozen=True)
class KSpace:
    """Unshifted 3D spectrum (DC at index (0,0,0)) plus source geometry."""

    data: np.ndarray
    spacing: tuple
    affine: np.ndarray

    @property
    def shape(self) -> tuple:
        return self.data.shape

    def centered(self) -> np.ndarray:
        """Copy with DC moved to the array center (for truncation logic)."""
        return np.fft.fftshift(self.data)


def frequency_indices(length: int) -> np.ndarray:
    """Signed frequency index per unshifted position: 0, 1, .., -2, -1.

    Even lengths assign the Nyquist bin the negative index -length/2.
    """
    idx = np.arange(length)
    half = (length - 1) // 2
    return np.where(idx <= half, idx, idx - length)


def fft3(v: Volume) -> KSpace:
    """Forward 3D DFT, unnormalized (the inverse carries 1/N)."""
    spectrum = np.fft.fftn(v.data.astype(np.float64))
    return KSpace(data=spectrum, spacing=v.spacing, affine=v.affine)


def ifft3(k: KSpace) -> Volume:
    """Inverse 3D DFT with 1/N normalization; returns the magnitude image.

    Keeps float64 so spectral edits can be verified at full precision;
    downstream consumers cast to storage precision themselves.
    """
    image = np.abs(np.fft.ifftn(k.data))
    return Volume(data=image, spacing=k.spacing, affine=k.affine)


def gibbs_ringing(
    v: Volume, cutoff: int, axis, renormalize: bool = True
) -> Volume:
    """Truncate high frequencies along one axis, keeping the central band.

    The cutoff is quoted against a 256-sample axis and rescaled to the
    actual length L as k' = round(cutoff * L / 256); centered entries with
    |frequency index| > k'/2 are zeroed. A band covering the whole axis
    returns the input unchanged.
    """
    axis = _axis_index(axis)
    cutoff = int(cutoff)
    if cutoff < 1:
        raise BadCutoffError(f"cutoff must be >= 1, got {cutoff}")
    length = v.shape[axis]
    effective = int(math.floor(cutoff * length / 256.0 + 0.5))
    if effective < 1:
        raise BadCutoffError(
            f"cutoff {cutoff} leaves no frequencies on an axis of length {length}"
        )
    if effective >= length:
        return v

    freq = frequency_indices(length)
    keep = (np.abs(freq) <= effective / 2.0).astype(np.float64)
    shape = [1, 1, 1]
    shape[axis] = length
    spectrum = np.fft.fftn(v.data.astype(np.float64)) * keep.reshape(shape)
    out = np.abs(np.fft.ifftn(spectrum))
    if renormalize:
        out = rescale_unit(out)
    return v.with_data(out.astype(np.float32))


def motion_ghosting(
    v: Volume, n: int, factor: float, axis, renormalize: bool = True
) -> Volume:
    """Attenuate every n-th k-space plane along one axis by `factor`.

    The comb modulation superimposes n copies of the anatomy spaced L/n
    apart, each ghost carrying relative amplitude (1 - factor) / n.
    """
    axis = _axis_index(axis)
    n = int(n)
    factor = float(factor)
    if n < 2:
        raise BadNError(f"n must be >= 2, got {n}")
    if not (0.0 < factor <= 1.0):
        raise BadFactorError(f"factor must lie in (0, 1], got {factor}")
    if factor == 1.0:
        return v

    length = v.shape[axis]
    weights = np.ones(length, dtype=np.float64)
    weights[::n] = factor
    shape = [1, 1, 1]
    shape[axis] = length
    spectrum = np.fft.fftn(v.data.astype(np.float64)) * weights.reshape(shape)
    out = np.abs(np.fft.ifftn(spectrum))
    if renormalize:
        out = rescale_unit(out)
    return v.with_data(out.astype(np.float32))
