from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial

import numpy as np

from .curves import CurveBin, SeparabilityCurve
from .enums import Ensemble, Metric, Proposal, SequenceKind
from .exceptions import InvalidInputError, SingularWeightError
from .measures import Estimate, MeasureSpec, log_importance_weights, self_normalized_mean
from .sampling import (
    DEFAULT_MAX_REJECTS,
    FixedCSlice,
    SequenceSource,
    derive_seed,
    simplex_batch,
    spectra_with_concurrence,
)
from .separability import concurrence_gaps, concurrences, count_separable
from .workers import map_units

DEFAULT_BINS = 500
DEFAULT_SPECTRA_PER_BIN = 40
DEFAULT_GROUP_SAMPLES = 250
DEFAULT_N_LAMBDA = 20_000
DEFAULT_PROB_GROUP_SAMPLES = 100
CHUNK_SIZE = 1_000

# sub-stream keys passed to derive_seed
LAMBDA_STREAM = 0x1A
HAAR_STREAM = 0x2B
SLICE_STREAM = 0x3C

HS_COMPLEX_TARGET = 8.0 / 33.0
HS_REAL_TARGET = 8.0 / 17.0
BURES_COMPLEX_TARGET = 1680.0 * (math.sqrt(2.0) - 1.0) / math.pi**8
BURES_REAL_TARGET = 0.212152

HS_COMPLEX_ABSEP = 0.00365826
HS_REAL_ABSEP = 0.0348338
BURES_COMPLEX_ABSEP = 0.000161792

_TARGETS = {
    (Metric.HS, 2): HS_COMPLEX_TARGET,
    (Metric.HS, 1): HS_REAL_TARGET,
    (Metric.BURES, 2): BURES_COMPLEX_TARGET,
    (Metric.BURES, 1): BURES_REAL_TARGET,
}

_ABSEP_TARGETS = {
    (Metric.HS, 2): HS_COMPLEX_ABSEP,
    (Metric.HS, 1): HS_REAL_ABSEP,
    (Metric.BURES, 2): BURES_COMPLEX_ABSEP,
}


def separability_target(spec: MeasureSpec) -> float | None:
    """The conjectured (or best published) separability probability for a measure, if known."""
    return _TARGETS.get((spec.metric, spec.beta))


def absolute_separability_target(spec: MeasureSpec) -> float | None:
    """The reference absolute-separability probability for a measure, if known."""
    return _ABSEP_TARGETS.get((spec.metric, spec.beta))


@dataclass(frozen=True)
class AnsatzDispersion:
    """How much the separable fraction varies between spectra sharing the same C.

    Attributes:
      c (float): The slice value.
      mean (float): The mean per-spectrum separable fraction.
      between_variance (float): The empirical variance of the per-spectrum fractions.
      binomial_variance (float): The variance binomial noise alone would produce.
    """

    c: float
    mean: float
    between_variance: float
    binomial_variance: float

    @property
    def excess_ratio(self) -> float:
        """between_variance / binomial_variance; values well above 1 mean σ depends on more than C."""
        if self.binomial_variance == 0.0:
            return 1.0 if self.between_variance == 0.0 else math.inf
        return self.between_variance / self.binomial_variance


def estimate_sigma_at(
    c: float,
    ensemble: Ensemble,
    n_spectra: int,
    n_group: int,
    src: SequenceSource,
    slice_src: SequenceSource | None = None,
    max_rejects: int = DEFAULT_MAX_REJECTS,
) -> CurveBin:
    """Estimates σ(c) as the separable fraction of n_spectra x n_group conjugated states.

    Args:
      c (float):
        The maximal concurrence in (0, 1).

      ensemble (Ensemble):
        The ensemble.

      n_spectra (int):
        The number of fixed-C spectra.

      n_group (int):
        The number of Haar group elements per spectrum.

      src (SequenceSource):
        The source of the group elements.

      slice_src (SequenceSource | None, optional):
        The source of the fixed-C spectra. Defaults to a pseudo-random stream seeded from `src`.

      max_rejects (int, optional):
        The rejection budget per spectrum. Defaults to DEFAULT_MAX_REJECTS.

    Raises:
        InfeasibleSliceError: If a spectrum cannot be found within max_rejects draws.

    Returns:
        CurveBin: The bin.
    """
    counts = _orbit_fractions(c, ensemble, n_spectra, n_group, src, slice_src, max_rejects)
    return CurveBin.from_counts(c, n_spectra * n_group, int(counts.sum()))


def estimate_curve(
    ensemble: Ensemble,
    bin_count: int = DEFAULT_BINS,
    n_spectra: int = DEFAULT_SPECTRA_PER_BIN,
    n_group: int = DEFAULT_GROUP_SAMPLES,
    seed: int = 0,
    *,
    kind: SequenceKind = SequenceKind.SOBOL,
    workers: int = 1,
    progress: bool = False,
    max_rejects: int = DEFAULT_MAX_REJECTS,
) -> SeparabilityCurve:
    """Estimates σ(C) at the midpoints k/bin_count, k = 1..bin_count-1.

    Bin k draws its group elements from the counter range starting at 1 + (k-1)·n_spectra·n_group
    of a single run-wide stream, and its spectra from a stream seeded by (seed, k).

    Returns:
        SeparabilityCurve: The curve, one bin per midpoint.
    """
    if bin_count < 2:
        raise InvalidInputError(f"A curve needs bin_count >= 2. Received {bin_count}.")
    _check_positive(n_spectra=n_spectra, n_group=n_group)

    unit = partial(
        _curve_bin,
        ensemble=ensemble,
        bin_count=bin_count,
        n_spectra=n_spectra,
        n_group=n_group,
        seed=seed,
        kind=kind,
        max_rejects=max_rejects,
    )
    ks = list(range(1, bin_count))
    label = f"σ(C) {ensemble.name.lower()}"
    bins = map_units(unit, ks, workers=workers, progress=progress, desc=label, chunksize=4)

    return SeparabilityCurve(ensemble, tuple(bins), bin_count, seed, n_spectra, n_group)


def separability_probability(
    spec: MeasureSpec,
    ensemble: Ensemble,
    n_lambda: int = DEFAULT_N_LAMBDA,
    n_group: int = DEFAULT_PROB_GROUP_SAMPLES,
    seed: int = 0,
    *,
    kind: SequenceKind = SequenceKind.SOBOL,
    proposal: Proposal | None = None,
    workers: int = 1,
    progress: bool = False,
) -> Estimate:
    """Self-normalised importance estimate of the separability probability under a measure.

    Each proposal spectrum is weighted by the measure's eigenvalue density over the proposal
    density, and scored by its separable fraction over n_group Haar conjugations.

    Args:
        spec (MeasureSpec): The measure.
        ensemble (Ensemble): The ensemble, which must match spec.beta.
        n_lambda (int, optional): The number of spectra. Defaults to DEFAULT_N_LAMBDA.
        n_group (int, optional): Group elements per spectrum. Defaults to DEFAULT_PROB_GROUP_SAMPLES.
        seed (int, optional): The run seed. Defaults to 0.
        kind (SequenceKind, optional): The point sequence. Defaults to SequenceKind.SOBOL.
        proposal (Proposal | None, optional): Defaults to the proposal matched to the metric.
        workers (int, optional): The number of processes. Defaults to 1.
        progress (bool, optional): Whether to show a progress bar. Defaults to False.

    Raises:
        InvalidInputError: If the ensemble does not match the measure.
        SingularWeightError: If the Bures metric is paired with the uniform proposal.

    Returns:
        Estimate: The probability and its delta-method standard error.
    """
    _check_ensemble(spec, ensemble)
    _check_positive(n_lambda=n_lambda, n_group=n_group)
    proposal = _resolve_proposal(spec, proposal)

    unit = partial(
        _probability_chunk,
        spec=spec,
        ensemble=ensemble,
        n_lambda=n_lambda,
        n_group=n_group,
        seed=seed,
        kind=kind,
        proposal=proposal,
    )
    starts = list(range(0, n_lambda, CHUNK_SIZE))
    chunks = map_units(unit, starts, workers=workers, progress=progress, desc=f"P_sep {spec}")
    log_w = np.concatenate([chunk[0] for chunk in chunks])
    values = np.concatenate([chunk[1] for chunk in chunks])
    return self_normalized_mean(log_w, values)


def curve_based_probability(
    curve: SeparabilityCurve,
    spec: MeasureSpec,
    n_lambda: int = DEFAULT_N_LAMBDA,
    seed: int = 0,
    *,
    kind: SequenceKind = SequenceKind.SOBOL,
    proposal: Proposal | None = None,
) -> Estimate:
    """Separability probability with σ̂(C(λ)) read off a curve instead of Haar sampling.

    Raises:
        InvalidInputError: If the curve's ensemble does not match the measure.
    """
    if curve.ensemble is not None:
        _check_ensemble(spec, curve.ensemble)
    _check_positive(n_lambda=n_lambda)
    proposal = _resolve_proposal(spec, proposal)

    lambdas, log_w = _weighted_spectra(spec, proposal, kind, seed, 0, n_lambda)
    values = curve.interpolate(concurrences(lambdas))
    return self_normalized_mean(log_w, values)


def absolute_separability_probability(
    spec: MeasureSpec,
    n_lambda: int = DEFAULT_N_LAMBDA,
    seed: int = 0,
    *,
    kind: SequenceKind = SequenceKind.SOBOL,
    proposal: Proposal | None = None,
) -> Estimate:
    """The weighted fraction of spectra whose whole orbit is separable (C = 0)."""
    _check_positive(n_lambda=n_lambda)
    proposal = _resolve_proposal(spec, proposal)

    lambdas, log_w = _weighted_spectra(spec, proposal, kind, seed, 0, n_lambda)
    return self_normalized_mean(log_w, (concurrence_gaps(lambdas) <= 0.0).astype(float))


def ansatz_dispersion(
    ensemble: Ensemble,
    c: float,
    n_spectra: int = 30,
    n_group: int = 100,
    seed: int = 0,
    *,
    kind: SequenceKind = SequenceKind.SOBOL,
    max_rejects: int = DEFAULT_MAX_REJECTS,
) -> AnsatzDispersion:
    """Compares the spread of per-spectrum separable fractions at fixed C with binomial noise.

    Args:
        ensemble (Ensemble): The ensemble.
        c (float): The slice value.
        n_spectra (int, optional): At least 30 spectra. Defaults to 30.
        n_group (int, optional): At least 100 group elements per spectrum. Defaults to 100.
        seed (int, optional): The run seed. Defaults to 0.
        kind (SequenceKind, optional): The point sequence. Defaults to SequenceKind.SOBOL.
        max_rejects (int, optional): The rejection budget per spectrum. Defaults to DEFAULT_MAX_REJECTS.

    Returns:
        AnsatzDispersion: The between-spectrum and binomial variances.
    """
    if n_spectra < 30 or n_group < 100:
        message = (
            "ansatz_dispersion needs n_spectra >= 30 and n_group >= 100. "
            f"Received {n_spectra} and {n_group}."
        )
        raise InvalidInputError(message)

    src = SequenceSource(kind, ensemble.gaussians_per_element, derive_seed(seed, HAAR_STREAM))
    slice_src = SequenceSource(SequenceKind.PSEUDO, 2, derive_seed(seed, SLICE_STREAM))
    fractions = _orbit_fractions(c, ensemble, n_spectra, n_group, src, slice_src, max_rejects) / n_group

    mean = float(fractions.mean())
    return AnsatzDispersion(c, mean, float(fractions.var(ddof=1)), mean * (1.0 - mean) / n_group)


def _orbit_fractions(
    c: float,
    ensemble: Ensemble,
    n_spectra: int,
    n_group: int,
    src: SequenceSource,
    slice_src: SequenceSource | None,
    max_rejects: int,
) -> np.ndarray:
    _check_positive(n_spectra=n_spectra, n_group=n_group)
    slice_ = FixedCSlice(c, max_rejects)
    if slice_src is None:
        slice_src = SequenceSource(SequenceKind.PSEUDO, 2, derive_seed(src.seed, src.counter))

    lambdas = spectra_with_concurrence(slice_, slice_src, n_spectra)
    return count_separable(lambdas, src, ensemble, n_group)


def _curve_bin(
    k: int,
    *,
    ensemble: Ensemble,
    bin_count: int,
    n_spectra: int,
    n_group: int,
    seed: int,
    kind: SequenceKind,
    max_rejects: int,
) -> CurveBin:
    counter = 1 + (k - 1) * n_spectra * n_group
    src = SequenceSource(kind, ensemble.gaussians_per_element, derive_seed(seed, HAAR_STREAM), counter)
    slice_src = SequenceSource(SequenceKind.PSEUDO, 2, derive_seed(derive_seed(seed, SLICE_STREAM), k))
    return estimate_sigma_at(k / bin_count, ensemble, n_spectra, n_group, src, slice_src, max_rejects)


def _weighted_spectra(
    spec: MeasureSpec, proposal: Proposal, kind: SequenceKind, seed: int, start: int, count: int
) -> tuple[np.ndarray, np.ndarray]:
    src = SequenceSource(kind, 2 * spec.n, derive_seed(seed, LAMBDA_STREAM), counter=1 + start)
    lambdas, _, _ = simplex_batch(src, proposal, count, spec.n)
    return lambdas, log_importance_weights(spec, lambdas, proposal)


def _probability_chunk(
    start: int,
    *,
    spec: MeasureSpec,
    ensemble: Ensemble,
    n_lambda: int,
    n_group: int,
    seed: int,
    kind: SequenceKind,
    proposal: Proposal,
) -> tuple[np.ndarray, np.ndarray]:
    count = min(CHUNK_SIZE, n_lambda - start)
    lambdas, log_w = _weighted_spectra(spec, proposal, kind, seed, start, count)

    haar_seed = derive_seed(seed, HAAR_STREAM)
    src = SequenceSource(kind, ensemble.gaussians_per_element, haar_seed, counter=1 + start * n_group)
    counts = count_separable(lambdas, src, ensemble, n_group)
    return log_w, counts / n_group


def _resolve_proposal(spec: MeasureSpec, proposal: Proposal | None) -> Proposal:
    if proposal is None:
        return Proposal.for_metric(spec.metric)
    if spec.metric is Metric.BURES and proposal is Proposal.UNIFORM:
        message = "Bures weights need the BURES_ADAPTED proposal; the uniform proposal is singular."
        raise SingularWeightError(message)
    return proposal


def _check_ensemble(spec: MeasureSpec, ensemble: Ensemble) -> None:
    if ensemble.beta != spec.beta:
        message = f"The {ensemble.name} ensemble has β={ensemble.beta} but the measure is {spec}."
        raise InvalidInputError(message)


def _check_positive(**counts: int) -> None:
    for name, value in counts.items():
        if value < 1:
            raise InvalidInputError(f"{name} must be positive. Received {value}.")
