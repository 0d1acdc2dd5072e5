"""Deterministic 3D MRI augmentation: k-space artifacts, bias fields,
spatial transforms, and the sampling machinery that drives them."""

__version__ = "0.1.0"

from .config import (
    SCHEMA_VERSION,
    TRANSFORMS,
    AugmentationConfig,
    magnitude_preset,
)
from .errors import AugmentError, NiftiError
from .intensity import (
    BiasFieldParams,
    additive_gaussian_noise,
    bias_field,
    generate_bias_field,
    multiplicative_noise,
)
from .kspace import KSpace, fft3, gibbs_ringing, ifft3, motion_ghosting
from .nifti import NiftiHeader, parse_header, read_nifti, write_nifti
from .phantom import PhantomSpec, Structure, build_phantom
from .pipeline import BatchResult, Pipeline, Sample
from .rng import SeededRng, derive_stream
from .sampling import AugmentationPlan, PlanStep, sample_params, sample_plan, schedule
from .spatial import (
    RotationParams,
    elastic_deform,
    generate_displacement_field,
    resample,
    rotate,
    rotation_matrix,
    smooth_gaussian,
)
from .volume import (
    LabelVolume,
    Orientation,
    Volume,
    dice_coefficient,
    normalize_intensity,
    orientation_code,
    reorient_to_ras,
    volume_stats,
)

__all__ = [
    "SCHEMA_VERSION",
    "TRANSFORMS",
    "AugmentationConfig",
    "AugmentationPlan",
    "AugmentError",
    "BatchResult",
    "BiasFieldParams",
    "KSpace",
    "LabelVolume",
    "NiftiError",
    "NiftiHeader",
    "Orientation",
    "PhantomSpec",
    "Pipeline",
    "PlanStep",
    "RotationParams",
    "Sample",
    "SeededRng",
    "Structure",
    "Volume",
    "additive_gaussian_noise",
    "bias_field",
    "build_phantom",
    "derive_stream",
    "dice_coefficient",
    "elastic_deform",
    "fft3",
    "generate_bias_field",
    "generate_displacement_field",
    "gibbs_ringing",
    "ifft3",
    "magnitude_preset",
    "motion_ghosting",
    "multiplicative_noise",
    "normalize_intensity",
    "orientation_code",
    "parse_header",
    "read_nifti",
    "resample",
    "reorient_to_ras",
    "rotate",
    "rotation_matrix",
    "sample_params",
    "sample_plan",
    "schedule",
    "smooth_gaussian",
    "volume_stats",
    "write_nifti",
]
