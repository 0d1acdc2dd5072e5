"""Transform scheduling and concrete parameter sampling.

A plan is the full record of one augmentation: which transforms fired,
in canonical order, with every parameter pinned to a concrete value.
Stochastic transforms (noise, elastic) additionally record the 64-bit
sub-seed that generated their random field, so replaying a plan needs
no access to the generator that produced it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .config import TRANSFORMS, AugmentationConfig, SCHEMA_VERSION
from .errors import BadTransformIdError, ConfigError
from .rng import SeededRng


@dataclass(frozen=True)
class PlanStep:
    transform: str
    params: dict

    def __post_init__(self):
        if self.transform not in TRANSFORMS:
            raise BadTransformIdError(self.transform)


@dataclass(frozen=True)
class AugmentationPlan:
    """Ordered record of transforms applied to one sample."""

    seed: int
    shape: tuple
    steps: tuple = field(default_factory=tuple)

    def transform_ids(self) -> tuple:
        return tuple(s.transform for s in self.steps)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "seed": int(self.seed),
            "shape": list(self.shape),
            "steps": [
                {"transform": s.transform, "params": _jsonable(s.params)}
                for s in self.steps
            ],
        }

    def to_json(self, indent=2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, d: dict) -> "AugmentationPlan":
        if not isinstance(d, dict):
            raise ConfigError(f"plan must be an object, got {type(d).__name__}")
        version = d.get("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise ConfigError(f"unsupported schema_version {version}")
        try:
            steps = tuple(
                PlanStep(transform=s["transform"], params=dict(s["params"]))
                for s in d.get("steps", [])
            )
            return cls(
                seed=int(d["seed"]),
                shape=tuple(int(x) for x in d["shape"]),
                steps=steps,
            )
        except (TypeError, ValueError, KeyError) as e:
            raise ConfigError(f"malformed plan: {e}") from e

    @classmethod
    def from_json(cls, text: str) -> "AugmentationPlan":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"plan is not valid JSON: {e}") from e
        return cls.from_dict(d)


def _jsonable(params: dict) -> dict:
    out = {}
    for k, v in params.items():
        if hasattr(v, "item"):           # numpy scalar
            v = v.item()
        elif isinstance(v, (list, tuple)):
            v = [x.item() if hasattr(x, "item") else x for x in v]
        out[k] = v
    return out


def schedule(config: AugmentationConfig, rng: SeededRng) -> tuple:
    """Decide which transforms fire, one Bernoulli draw per transform.

    Draws happen in canonical order for every transform regardless of its
    probability, so the stream stays aligned across configs that differ
    only in p values.
    """
    u = rng.uniform(0.0, 1.0, size=len(TRANSFORMS))
    return tuple(
        t for t, x in zip(TRANSFORMS, u) if x < config.probability(t)
    )


def sample_params(
    config: AugmentationConfig,
    transform_ids,
    rng: SeededRng,
    shape: tuple,
    seed: int = 0,
) -> AugmentationPlan:
    """Draw concrete parameters for the given transforms.

    `shape` pins the volume geometry the plan targets; the bias field
    center is drawn in voxel coordinates of that shape. Parameters are
    drawn in canonical transform order with a fixed draw order inside
    each transform, so identical (config, rng state) pairs always give
    identical plans.
    """
    ids = tuple(transform_ids)
    for t in ids:
        if t not in TRANSFORMS:
            raise BadTransformIdError(t)
    if len(shape) != 3 or any(int(s) < 1 for s in shape):
        raise ConfigError(f"shape must be three positive extents, got {shape!r}")
    shape = tuple(int(s) for s in shape)

    steps = []
    for t in TRANSFORMS:
        if t not in ids:
            continue
        steps.append(PlanStep(transform=t, params=_draw(t, config, rng, shape)))
    return AugmentationPlan(seed=int(seed), shape=shape, steps=tuple(steps))


def sample_plan(
    config: AugmentationConfig, rng: SeededRng, shape: tuple, seed: int = 0
) -> AugmentationPlan:
    """schedule() + sample_params() on the same stream."""
    return sample_params(config, schedule(config, rng), rng, shape, seed=seed)


def _draw(t: str, config: AugmentationConfig, rng: SeededRng, shape: tuple) -> dict:
    if t == "rotation":
        lo, hi = config.scaled_degree_range()
        return {"angles_deg": [float(rng.uniform(lo, hi)) for _ in range(3)]}
    if t == "elastic":
        slo, shi = config.elastic.kernel_sigma_range
        alo, ahi = config.scaled_alpha_range()
        return {
            "kernel_sigma": float(rng.uniform(slo, shi)),
            "alpha": float(rng.uniform(alo, ahi)),
            "field_seed": int(rng.seed64()),
        }
    if t == "bias_field":
        alo, ahi = config.scaled_amplitude_range()
        slo, shi = config.bias_field.scale_range
        center = [float(rng.uniform(0.0, n - 1.0)) for n in shape]
        return {
            "center": center,
            "scale": float(rng.uniform(slo, shi)),
            "amplitude": float(rng.uniform(alo, ahi)),
        }
    if t == "ringing":
        lo, hi = config.scaled_cutoff_range()
        return {"cutoff": int(rng.integer(lo, hi)), "axis": int(rng.choice3())}
    if t == "ghosting":
        nlo, nhi = config.ghosting.n_range
        flo, fhi = config.scaled_factor_range()
        return {
            "n": int(rng.integer(nlo, nhi)),
            "factor": float(rng.uniform(flo, fhi)),
            "axis": int(rng.choice3()),
        }
    if t == "additive_noise":
        lo, hi = config.scaled_sigma_range("additive_noise")
        return {"sigma": float(rng.uniform(lo, hi)), "noise_seed": int(rng.seed64())}
    if t == "multiplicative_noise":
        lo, hi = config.scaled_sigma_range("multiplicative_noise")
        return {"sigma": float(rng.uniform(lo, hi)), "noise_seed": int(rng.seed64())}
    raise BadTransformIdError(t)
