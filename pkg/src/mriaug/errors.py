"""Exception taxonomy shared by all modules."""


class AugmentError(Exception):
    """Base class for every error raised by this package."""


# --- volume / orientation ---

class NonInvertibleAffineError(AugmentError):
    """Affine matrix is singular (determinant 0)."""


class ObliqueAffineError(AugmentError):
    """No voxel axis is within 45 degrees of a world axis; refusing to
    reorient without resampling."""


class ConstantVolumeError(AugmentError):
    """Intensity normalization is undefined when max == min."""


class ShapeMismatchError(AugmentError):
    """Two grids that must share dimensions do not."""


class NotRasOrientedError(AugmentError):
    """Pipeline input must be RAS-oriented before spatial transforms."""


# --- NIfTI I/O ---

class NiftiError(AugmentError):
    """Base class for NIfTI read/write failures."""


class BadMagicError(NiftiError):
    """Header magic is not 'n+1\\0' or 'ni1\\0' (or the file is NIfTI-2)."""


class BadSizeError(NiftiError):
    """Header buffer shorter than the 348 bytes NIfTI-1 requires."""


class UnsupportedDatatypeError(NiftiError):
    """Datatype code outside the supported set {2, 4, 8, 16, 64, 512}."""


class UnsupportedDimensionalityError(NiftiError):
    """dim[0] != 3; only scalar 3D volumes are handled."""


class TruncatedFileError(NiftiError):
    """File ends before the voxel data it declares."""


class GzipDecodeError(NiftiError):
    """Gzip stream is corrupt."""


class LossyDatatypeError(NiftiError):
    """Float data would be quantized to an integer datatype without the
    explicit opt-in."""


# --- parameter sampling ---

class BadLevelError(AugmentError):
    """Magnitude level outside 1..5."""


class BadTransformIdError(AugmentError):
    """Unknown transform identifier."""


class ConfigError(AugmentError):
    """Augmentation config fails validation or does not parse."""


# --- transforms ---

class NegativeSigmaError(AugmentError):
    """Noise standard deviation must be >= 0."""


class BadShapeError(AugmentError):
    """Field/volume shape is invalid for the requested operation."""


class BadCutoffError(AugmentError):
    """Effective k-space cutoff fell below 1 sample."""


class BadNError(AugmentError):
    """Ghosting period n must be >= 2."""


class BadFactorError(AugmentError):
    """Ghosting factor must lie in (0, 1]."""


# --- pipeline / CLI ---

class PlanShapeMismatchError(AugmentError):
    """Recorded plan does not fit the sample it is replayed on."""


class BadSliceIndexError(AugmentError):
    """Preview slice index outside the volume."""


class SpecOutOfBoundsError(AugmentError):
    """Phantom structure extends outside the grid."""
