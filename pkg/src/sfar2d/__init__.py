"""Sparse 2D spectrum recovery from randomly under-sampled data."""

from .errors import (
    CapacityError,
    DomainError,
    IllConditionedError,
    InvariantError,
    OverdeterminationError,
    ShapeError,
)
from .recon import (
    CoefficientSet,
    ReconParams,
    ReconstructionResult,
    least_squares_recover,
    reconstruct_field,
    sfar2d_iterative,
    sfar2d_single,
    subtract_contribution,
)
from .sampling import Measurements, SampleSupport, extract, full_support, sampling_ratio, uniform_support
from .signal_model import (
    Component,
    Field,
    GridDims,
    NoiseParams,
    SignalModel,
    add_external_noise,
    mixed_model,
    random_model,
    synthesize,
)
from .spectral import (
    FrequencySupport,
    NoiseStats,
    Spectrum,
    ThresholdParams,
    detect_support,
    detection_threshold,
    estimate_energy,
    full_dft,
    inverse_dft,
    missing_sample_variance,
    noise_stats,
    partial_dft,
)

__version__ = "0.1.0"
