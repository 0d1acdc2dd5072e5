"""Synthetic phantoms: analytic shapes rasterized onto a voxel grid.

Stand-ins for real anatomy in tests and demos. Rasterization tests each
voxel center against the analytic shape with no anti-aliasing, so label
counts are exactly reproducible across platforms. Overlapping structures
resolve by list order: later entries overwrite earlier ones.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, SpecOutOfBoundsError
from .volume import LabelVolume, Volume

_KINDS = ("sphere", "ellipsoid", "box")


@dataclass(frozen=True)
class Structure:
    kind: str
    center: tuple
    radii: tuple          # per-axis half-extents, in voxels
    intensity: float
    label: int

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ConfigError(f"unknown structure shape {self.kind!r}")
        if len(self.center) != 3 or len(self.radii) != 3:
            raise ConfigError("center and radii must each have three entries")
        if any(r <= 0 for r in self.radii):
            raise ConfigError(f"radii must be positive, got {self.radii}")
        if not (0.0 <= self.intensity <= 1.0):
            raise ConfigError(f"intensity {self.intensity} outside [0, 1]")
        if int(self.label) < 1:
            raise ConfigError(f"label must be a positive integer, got {self.label}")


@dataclass(frozen=True)
class PhantomSpec:
    shape: tuple = (64, 64, 64)
    background: float = 0.0
    structures: tuple = field(default_factory=tuple)
    gradient_axis: int = 2
    gradient_amplitude: float = 0.0   # 0 disables the background ramp

    def __post_init__(self):
        if len(self.shape) != 3 or any(int(n) < 1 for n in self.shape):
            raise ConfigError(f"shape must be three positive extents, got {self.shape}")
        if not (0.0 <= self.background <= 1.0):
            raise ConfigError(f"background {self.background} outside [0, 1]")
        if self.gradient_axis not in (0, 1, 2):
            raise ConfigError("gradient_axis must be 0, 1 or 2")
        if self.gradient_amplitude < 0.0:
            raise ConfigError("gradient_amplitude must be >= 0")
        labels = [s.label for s in self.structures]
        if len(labels) != len(set(labels)):
            raise ConfigError(f"structure labels must be unique, got {labels}")
        for s in self.structures:
            for c, r, n in zip(s.center, s.radii, self.shape):
                if c - r < 0.0 or c + r > n - 1.0:
                    raise SpecOutOfBoundsError(
                        f"structure label={s.label} extends outside the "
                        f"{tuple(self.shape)} grid: center={s.center} radii={s.radii}"
                    )

    def to_dict(self) -> dict:
        d = {
            "shape": list(self.shape),
            "background": self.background,
            "structures": [
                {
                    "shape": s.kind,
                    "center": list(s.center),
                    "radii": list(s.radii),
                    "intensity": s.intensity,
                    "label": s.label,
                }
                for s in self.structures
            ],
        }
        if self.gradient_amplitude > 0.0:
            d["gradient"] = {
                "axis": self.gradient_axis,
                "amplitude": self.gradient_amplitude,
            }
        return d

    def to_json(self, indent=2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, d: dict) -> "PhantomSpec":
        try:
            structures = tuple(
                Structure(
                    kind=str(s["shape"]),
                    center=tuple(float(x) for x in s["center"]),
                    radii=_radii(s["radii"]),
                    intensity=float(s["intensity"]),
                    label=int(s["label"]),
                )
                for s in d.get("structures", [])
            )
            grad = d.get("gradient", {})
            return cls(
                shape=tuple(int(n) for n in d.get("shape", (64, 64, 64))),
                background=float(d.get("background", 0.0)),
                structures=structures,
                gradient_axis=int(grad.get("axis", 2)),
                gradient_amplitude=float(grad.get("amplitude", 0.0)),
            )
        except (TypeError, ValueError, KeyError) as e:
            raise ConfigError(f"malformed phantom spec: {e}") from e

    @classmethod
    def from_json(cls, text: str) -> "PhantomSpec":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"phantom spec is not valid JSON: {e}") from e
        return cls.from_dict(d)


def _radii(r) -> tuple:
    if isinstance(r, (int, float)):
        return (float(r),) * 3
    return tuple(float(x) for x in r)


def build_phantom(spec: PhantomSpec):
    """Rasterize a spec into an image volume and its label map.

    The image starts at the background level (plus the optional linear
    ramp), then each structure paints its intensity and label over any
    voxel whose center falls inside the analytic shape.
    """
    shape = tuple(int(n) for n in spec.shape)
    image = np.full(shape, spec.background, dtype=np.float64)
    labels = np.zeros(shape, dtype=np.int32)

    if spec.gradient_amplitude > 0.0:
        n = shape[spec.gradient_axis]
        ramp = np.linspace(0.0, spec.gradient_amplitude, n)
        view = [1, 1, 1]
        view[spec.gradient_axis] = n
        image = image + ramp.reshape(view)

    coords = np.meshgrid(
        *[np.arange(n, dtype=np.float64) for n in shape], indexing="ij"
    )
    for s in spec.structures:
        mask = _inside(s, coords)
        image[mask] = s.intensity
        labels[mask] = s.label

    np.clip(image, 0.0, 1.0, out=image)
    affine = np.eye(4)
    return (
        Volume(data=image.astype(np.float32), spacing=(1.0, 1.0, 1.0), affine=affine),
        LabelVolume(data=labels, spacing=(1.0, 1.0, 1.0), affine=affine),
    )


def _inside(s: Structure, coords) -> np.ndarray:
    dx = [c - ci for c, ci in zip(coords, s.center)]
    if s.kind == "box":
        return (
            (np.abs(dx[0]) <= s.radii[0])
            & (np.abs(dx[1]) <= s.radii[1])
            & (np.abs(dx[2]) <= s.radii[2])
        )
    # sphere is an ellipsoid with equal radii
    q = sum((d / r) ** 2 for d, r in zip(dx, s.radii))
    return q <= 1.0
