from .curves import CurveBin, SeparabilityCurve, find_crossings
from .enums import Ensemble, Metric, Proposal, SequenceKind
from .estimator import (
    absolute_separability_probability,
    ansatz_dispersion,
    curve_based_probability,
    estimate_curve,
    estimate_sigma_at,
    separability_probability,
)
from .fitting import LinearFit, fit_segment
from .jumps import JumpReport, detect_jumps
from .measures import MeasureSpec, density_weight, importance_weight, normalization_oracle
from .qmat import (
    DensityMatrix,
    GroupElement,
    Spectrum,
    conjugate_spectrum,
    eigenvalues_sym,
    partial_transpose,
)
from .sampling import (
    FixedCSlice,
    SequenceSource,
    dirichlet_simplex,
    haar_group_element,
    next_point,
    spectrum_with_concurrence,
)
from .separability import (
    SepVerdict,
    is_absolutely_separable,
    is_separable,
    maximal_concurrence,
    werner_state,
)

__all__ = [
    "CurveBin",
    "DensityMatrix",
    "Ensemble",
    "FixedCSlice",
    "GroupElement",
    "JumpReport",
    "LinearFit",
    "MeasureSpec",
    "Metric",
    "Proposal",
    "SepVerdict",
    "SeparabilityCurve",
    "SequenceKind",
    "SequenceSource",
    "Spectrum",
    "absolute_separability_probability",
    "ansatz_dispersion",
    "conjugate_spectrum",
    "curve_based_probability",
    "density_weight",
    "detect_jumps",
    "dirichlet_simplex",
    "eigenvalues_sym",
    "estimate_curve",
    "estimate_sigma_at",
    "find_crossings",
    "fit_segment",
    "haar_group_element",
    "importance_weight",
    "is_absolutely_separable",
    "is_separable",
    "maximal_concurrence",
    "next_point",
    "normalization_oracle",
    "partial_transpose",
    "separability_probability",
    "spectrum_with_concurrence",
    "werner_state",
]
