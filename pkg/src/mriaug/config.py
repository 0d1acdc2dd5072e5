"""Augmentation configuration: parameter ranges, probabilities, magnitudes.

Ranges stored in a config are the level-3 baselines. Magnitude levels 1..5
scale each range multiplicatively around the transform's identity point
(the parameter value at which the transform does nothing): 0 for noise
sigmas, bias amplitude, rotation angles and displacement alpha; 1.0 for
the ghosting factor; full retention (256 on the reference axis) for the
ringing cutoff. The scale ladder is {0.25, 0.5, 1.0, 1.5, 2.0}, so level 3
reproduces the baselines exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace

from .errors import BadLevelError, BadTransformIdError, ConfigError

SCHEMA_VERSION = 1

# canonical transform order; also the fixed application order in a pipeline
TRANSFORMS = (
    "rotation",
    "elastic",
    "bias_field",
    "ringing",
    "ghosting",
    "additive_noise",
    "multiplicative_noise",
)

MAGNITUDE_FACTORS = {1: 0.25, 2: 0.5, 3: 1.0, 4: 1.5, 5: 2.0}

# reference axis length the ringing cutoff range presumes
RINGING_REFERENCE_LENGTH = 256


@dataclass(frozen=True)
class NoiseConfig:
    mu: float = 0.0
    sigma_range: tuple = (0.0, 0.0001)


@dataclass(frozen=True)
class BiasFieldConfig:
    amplitude_range: tuple = (0.0, 0.5)
    scale_range: tuple = (16.0, 64.0)   # Gaussian falloff, in voxels


@dataclass(frozen=True)
class RotationConfig:
    degree_range: tuple = (-30.0, 30.0)


@dataclass(frozen=True)
class ElasticConfig:
    kernel_sigma_range: tuple = (20.0, 30.0)   # voxels
    alpha_range: tuple = (200.0, 600.0)


@dataclass(frozen=True)
class RingingConfig:
    cutoff_range: tuple = (96, 128)


@dataclass(frozen=True)
class GhostingConfig:
    n_range: tuple = (2, 10)
    factor_range: tuple = (0.85, 0.95)


@dataclass(frozen=True)
class AugmentationConfig:
    """Every knob the sampler reads, JSON-serializable and immutable."""

    p_aug: float = 1.0 / 3.0
    p_overrides: dict = field(default_factory=dict)
    magnitude_level: int = 3
    additive_noise: NoiseConfig = field(default_factory=NoiseConfig)
    multiplicative_noise: NoiseConfig = field(
        default_factory=lambda: NoiseConfig(sigma_range=(0.0, 0.001))
    )
    bias_field: BiasFieldConfig = field(default_factory=BiasFieldConfig)
    rotation: RotationConfig = field(default_factory=RotationConfig)
    elastic: ElasticConfig = field(default_factory=ElasticConfig)
    ringing: RingingConfig = field(default_factory=RingingConfig)
    ghosting: GhostingConfig = field(default_factory=GhostingConfig)

    def __post_init__(self):
        self.validate()

    def validate(self):
        def check_prob(name, p):
            if not (0.0 <= p <= 1.0):
                raise ConfigError(f"{name}={p} outside [0, 1]")

        def check_range(name, r, integer=False):
            lo, hi = r
            if not (lo <= hi):
                raise ConfigError(f"{name}={r} has lo > hi")
            if integer and math.floor(hi) < math.ceil(lo):
                raise ConfigError(f"{name}={r} contains no integer")

        check_prob("p_aug", self.p_aug)
        for name, p in self.p_overrides.items():
            if name not in TRANSFORMS:
                raise ConfigError(f"unknown transform in p_overrides: {name}")
            check_prob(f"p_overrides[{name}]", p)
        if self.magnitude_level not in MAGNITUDE_FACTORS:
            raise ConfigError(f"magnitude_level={self.magnitude_level} not in 1..5")
        for noise, label in (
            (self.additive_noise, "additive_noise"),
            (self.multiplicative_noise, "multiplicative_noise"),
        ):
            if noise.mu != 0.0:
                raise ConfigError(f"{label}.mu must be 0 (zero-mean noise model)")
            check_range(f"{label}.sigma_range", noise.sigma_range)
            if noise.sigma_range[0] < 0:
                raise ConfigError(f"{label}.sigma_range must be non-negative")
        check_range("bias_field.amplitude_range", self.bias_field.amplitude_range)
        check_range("bias_field.scale_range", self.bias_field.scale_range)
        if self.bias_field.scale_range[0] <= 0:
            raise ConfigError("bias_field.scale_range must be positive")
        check_range("rotation.degree_range", self.rotation.degree_range)
        check_range("elastic.kernel_sigma_range", self.elastic.kernel_sigma_range)
        if self.elastic.kernel_sigma_range[0] <= 0:
            raise ConfigError("elastic.kernel_sigma_range must be positive")
        check_range("elastic.alpha_range", self.elastic.alpha_range)
        if self.elastic.alpha_range[0] < 0:
            raise ConfigError("elastic.alpha_range must be non-negative")
        check_range("ringing.cutoff_range", self.ringing.cutoff_range, integer=True)
        if self.ringing.cutoff_range[0] < 1:
            raise ConfigError("ringing cutoff must be >= 1")
        check_range("ghosting.n_range", self.ghosting.n_range, integer=True)
        if self.ghosting.n_range[0] < 2:
            raise ConfigError("ghosting n must be >= 2")
        check_range("ghosting.factor_range", self.ghosting.factor_range)
        lo, hi = self.ghosting.factor_range
        if not (0.0 < lo and hi <= 1.0):
            raise ConfigError("ghosting factor_range must lie in (0, 1]")

    def probability(self, transform: str) -> float:
        if transform not in TRANSFORMS:
            raise BadTransformIdError(transform)
        return self.p_overrides.get(transform, self.p_aug)

    def with_level(self, level: int) -> "AugmentationConfig":
        if level not in MAGNITUDE_FACTORS:
            raise BadLevelError(f"level {level} not in 1..5")
        return replace(self, magnitude_level=level)

    def with_probability(self, p_aug: float, overrides=None) -> "AugmentationConfig":
        return replace(
            self,
            p_aug=p_aug,
            p_overrides=dict(overrides) if overrides is not None else {},
        )

    def solo(self, transform: str) -> "AugmentationConfig":
        """Config applying exactly one transform with probability 1."""
        if transform not in TRANSFORMS:
            raise BadTransformIdError(transform)
        overrides = {t: 0.0 for t in TRANSFORMS if t != transform}
        overrides[transform] = 1.0
        return replace(self, p_aug=0.0, p_overrides=overrides)

    # --- effective (magnitude-scaled) ranges -----------------------------

    def scaled_sigma_range(self, which: str) -> tuple:
        base = (
            self.additive_noise if which == "additive_noise"
            else self.multiplicative_noise
        ).sigma_range
        return _scale_about(base, 0.0, self._factor())

    def scaled_amplitude_range(self) -> tuple:
        return _scale_about(self.bias_field.amplitude_range, 0.0, self._factor())

    def scaled_degree_range(self) -> tuple:
        return _scale_about(self.rotation.degree_range, 0.0, self._factor())

    def scaled_alpha_range(self) -> tuple:
        return _scale_about(self.elastic.alpha_range, 0.0, self._factor())

    def scaled_cutoff_range(self) -> tuple:
        return _scale_cutoff(self.ringing.cutoff_range, self._factor())

    def scaled_factor_range(self) -> tuple:
        return _scale_ghost_factor(self.ghosting.factor_range, self._factor())

    def _factor(self) -> float:
        return MAGNITUDE_FACTORS[self.magnitude_level]

    # --- JSON -------------------------------------------------------------

    def to_dict(self) -> dict:
        d = {
            "schema_version": SCHEMA_VERSION,
            "p_aug": self.p_aug,
            "magnitude_level": self.magnitude_level,
            "transforms": {
                "additive_noise": asdict(self.additive_noise),
                "multiplicative_noise": asdict(self.multiplicative_noise),
                "bias_field": asdict(self.bias_field),
                "rotation": asdict(self.rotation),
                "elastic": asdict(self.elastic),
                "ringing": asdict(self.ringing),
                "ghosting": asdict(self.ghosting),
            },
        }
        if self.p_overrides:
            d["p_overrides"] = dict(self.p_overrides)
        return _listify(d)

    def to_json(self, indent=2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "AugmentationConfig":
        if not isinstance(d, dict):
            raise ConfigError(f"config must be an object, got {type(d).__name__}")
        version = d.get("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise ConfigError(f"unsupported schema_version {version}")
        try:
            t = d.get("transforms", {})
            return cls(
                p_aug=float(d.get("p_aug", 1.0 / 3.0)),
                p_overrides={
                    str(k): float(v) for k, v in d.get("p_overrides", {}).items()
                },
                magnitude_level=int(d.get("magnitude_level", 3)),
                additive_noise=_noise_from(t.get("additive_noise"), (0.0, 0.0001)),
                multiplicative_noise=_noise_from(
                    t.get("multiplicative_noise"), (0.0, 0.001)
                ),
                bias_field=_sub_from(BiasFieldConfig, t.get("bias_field")),
                rotation=_sub_from(RotationConfig, t.get("rotation")),
                elastic=_sub_from(ElasticConfig, t.get("elastic")),
                ringing=_sub_from(RingingConfig, t.get("ringing")),
                ghosting=_sub_from(GhostingConfig, t.get("ghosting")),
            )
        except (TypeError, ValueError, KeyError) as e:
            raise ConfigError(f"malformed config: {e}") from e

    @classmethod
    def from_json(cls, text: str) -> "AugmentationConfig":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"config is not valid JSON: {e}") from e
        return cls.from_dict(d)


def _noise_from(d, default_range) -> NoiseConfig:
    if d is None:
        return NoiseConfig(sigma_range=default_range)
    return NoiseConfig(
        mu=float(d.get("mu", 0.0)),
        sigma_range=tuple(float(x) for x in d.get("sigma_range", default_range)),
    )


def _sub_from(cls, d):
    if d is None:
        return cls()
    kwargs = {}
    for name, default in ((f.name, f.default) for f in cls.__dataclass_fields__.values()):
        if name in d:
            val = d[name]
            if isinstance(val, (list, tuple)):
                val = tuple(type(default[0])(x) for x in val) if default else tuple(val)
            kwargs[name] = val
    return cls(**kwargs)


def _listify(obj):
    if isinstance(obj, dict):
        return {k: _listify(v) for k, v in obj.items()}
    if isinstance(obj, tuple):
        return [_listify(v) for v in obj]
    return obj


def _scale_about(r: tuple, anchor: float, f: float) -> tuple:
    lo, hi = r
    return (anchor + (lo - anchor) * f, anchor + (hi - anchor) * f)


def _scale_ghost_factor(r: tuple, f: float) -> tuple:
    # strength is distance from 1; low levels move toward 1 (weaker)
    lo, hi = _scale_about(r, 1.0, f)
    return (min(max(lo, 1e-6), 1.0), min(max(hi, 1e-6), 1.0))


def _scale_cutoff(r: tuple, f: float) -> tuple:
    # severity is the reciprocal of the retained band: halving the cutoff
    # doubles the truncation zoom. Cutoffs past the reference length are
    # legal and act as no-ops, so weak levels degrade toward identity.
    lo = max(1, int(round(float(r[0]) / f)))
    hi = max(lo, int(round(float(r[1]) / f)))
    return (lo, hi)


# (transform/parameter id, level) -> scaled range; level 3 = the defaults
_PRESET_IDS = {
    "additive_noise": lambda c: c.scaled_sigma_range("additive_noise"),
    "multiplicative_noise": lambda c: c.scaled_sigma_range("multiplicative_noise"),
    "bias_field": lambda c: c.scaled_amplitude_range(),
    "rotation": lambda c: c.scaled_degree_range(),
    "elastic": lambda c: c.scaled_alpha_range(),
    "ringing": lambda c: c.scaled_cutoff_range(),
    "ghosting": lambda c: c.scaled_factor_range(),
    "ghosting_factor": lambda c: c.scaled_factor_range(),
}


def magnitude_preset(transform_id: str, level: int) -> tuple:
    """Magnitude-level parameter range for a transform's primary knob.

    Level 3 returns the default range; other levels scale it around the
    transform's identity point per the module docstring.
    """
    if level not in MAGNITUDE_FACTORS:
        raise BadLevelError(f"level {level} not in 1..5")
    if transform_id not in _PRESET_IDS:
        raise BadTransformIdError(transform_id)
    config = AugmentationConfig(magnitude_level=level)
    return _PRESET_IDS[transform_id](config)
