"""End-to-end augmentation: schedule, sample, execute, replay.

A pipeline applies the seven transforms in one fixed order (rotation,
elastic, bias field, ringing, ghosting, additive noise, multiplicative
noise), mirroring acquisition physics: pose and anatomy first, then
field and readout artifacts, then measurement noise. The order is part
of the serialized form so saved configs stay self-describing.

apply() and replay() share one execution path over the plan, which is
what makes replays bit-identical: every random quantity is either a
concrete parameter in the plan or regenerated from a recorded sub-seed.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .config import TRANSFORMS, AugmentationConfig
from .errors import (
    ConfigError,
    NotRasOrientedError,
    PlanShapeMismatchError,
    ShapeMismatchError,
)
from .intensity import (
    BiasFieldParams,
    additive_gaussian_noise,
    bias_field,
    multiplicative_noise,
)
from .kspace import gibbs_ringing, motion_ghosting
from .rng import SeededRng, derive_stream
from .sampling import AugmentationPlan, sample_params, schedule
from .spatial import (
    RotationParams,
    elastic_deform,
    generate_displacement_field,
    rotate,
)
from .volume import LabelVolume, Volume, orientation_code


@dataclass(frozen=True)
class Sample:
    image: Volume
    labels: LabelVolume = None
    id: str = ""

    def __post_init__(self):
        if self.labels is not None and self.labels.shape != self.image.shape:
            raise ShapeMismatchError(
                f"labels {self.labels.shape} do not match image {self.image.shape}"
            )


@dataclass(frozen=True)
class Pipeline:
    config: AugmentationConfig
    order: tuple = TRANSFORMS

    def __post_init__(self):
        if tuple(self.order) != TRANSFORMS:
            raise ConfigError(
                "transform order is fixed; got "
                f"{tuple(self.order)!r}, expected {TRANSFORMS!r}"
            )

    def apply(self, sample: Sample, seed: int):
        """Augment one sample; returns (augmented sample, plan).

        The image must be RAS-oriented and normalized to [0, 1]; spatial
        transforms co-transform the label map, everything else leaves it
        untouched.
        """
        _check_input(sample)
        rng = SeededRng(int(seed))
        chosen = schedule(self.config, rng)
        plan = sample_params(
            self.config, chosen, rng, sample.image.shape, seed=int(seed)
        )
        return _execute(plan, sample), plan

    def apply_batch(self, samples, base_seed: int, workers: int = 1):
        """Augment a batch; item i is seeded with a hash of (base_seed, i).

        Seeding is positional, so a permuted input list gives identically
        permuted outputs. Failures are captured per item and the rest of
        the batch still runs.
        """
        base_seed = int(base_seed)
        workers = max(1, int(workers))

        def one(indexed):
            i, s = indexed
            seed = derive_stream(base_seed, i)
            try:
                out, plan = self.apply(s, seed)
                return BatchResult(id=s.id, sample=out, plan=plan)
            except Exception as e:  # noqa: BLE001 - per-item isolation
                return BatchResult(id=s.id, error=e)

        items = list(enumerate(samples))
        if workers == 1:
            return [one(it) for it in items]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, items))

    def replay(self, plan: AugmentationPlan, sample: Sample) -> Sample:
        """Re-run a recorded plan; bit-identical to the apply() that made it."""
        _check_input(sample)
        if sample.image.shape != plan.shape:
            raise PlanShapeMismatchError(
                f"plan was recorded for shape {plan.shape}, "
                f"sample has {sample.image.shape}"
            )
        return _execute(plan, sample)

    def to_dict(self) -> dict:
        d = self.config.to_dict()
        d["order"] = list(self.order)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Pipeline":
        order = tuple(d.get("order", TRANSFORMS))
        return cls(config=AugmentationConfig.from_dict(d), order=order)


@dataclass(frozen=True)
class BatchResult:
    id: str
    sample: Sample = None
    plan: AugmentationPlan = None
    error: Exception = None

    @property
    def ok(self) -> bool:
        return self.error is None


def _check_input(sample: Sample):
    code = orientation_code(sample.image.affine)
    if code != "RAS":
        raise NotRasOrientedError(f"expected RAS-oriented input, got {code}")
    data = sample.image.data
    lo = float(data.min())
    hi = float(data.max())
    if not (np.isfinite(lo) and np.isfinite(hi)) or lo < 0.0 or hi > 1.0:
        raise ValueError(
            f"image must be normalized to [0, 1], has range [{lo}, {hi}]"
        )


def _execute(plan: AugmentationPlan, sample: Sample) -> Sample:
    image = sample.image
    labels = sample.labels
    for step in plan.steps:
        p = step.params
        t = step.transform
        if t == "rotation":
            params = RotationParams(angles_deg=tuple(p["angles_deg"]))
            if labels is None:
                image = rotate(image, params)
            else:
                image, labels = rotate(image, params, labels)
        elif t == "elastic":
            field = generate_displacement_field(
                image.shape,
                p["kernel_sigma"],
                p["alpha"],
                SeededRng(p["field_seed"]),
            )
            if labels is None:
                image = elastic_deform(image, field)
            else:
                image, labels = elastic_deform(image, field, labels)
        elif t == "bias_field":
            params = BiasFieldParams(
                center=tuple(p["center"]),
                scale=p["scale"],
                amplitude=p["amplitude"],
            )
            image = bias_field(image, params)
        elif t == "ringing":
            image = gibbs_ringing(image, p["cutoff"], p["axis"])
        elif t == "ghosting":
            image = motion_ghosting(image, p["n"], p["factor"], p["axis"])
        elif t == "additive_noise":
            image = additive_gaussian_noise(
                image, p["sigma"], SeededRng(p["noise_seed"])
            )
        elif t == "multiplicative_noise":
            image = multiplicative_noise(
                image, p["sigma"], SeededRng(p["noise_seed"])
            )
        else:
            raise ConfigError(f"plan contains unknown transform {t!r}")
    return Sample(image=image, labels=labels, id=sample.id)
