from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import integrate  # type: ignore

from .enums import Ensemble, Metric, Proposal
from .exceptions import InvalidInputError, SingularWeightError
from .qmat import Spectrum
from .sampling import SequenceSource, proposal_log_normalizer, simplex_batch

SINGULAR_EIGENVALUE_TOL = 1e-14
QUADRATURE_TOL = 1e-10


class Estimate(NamedTuple):
    """A Monte Carlo estimate and its standard error."""

    value: float
    stderr: float


@dataclass(frozen=True)
class MeasureSpec:
    """A volume measure on the density matrices, restricted to the eigenvalue simplex.

    Attributes:
      metric (Metric):
        Hilbert-Schmidt or Bures.

      beta (int, optional):
        The Dyson index: 1 for real, 2 for complex states. Defaults to 2.

      alpha (float, optional):
        The exponent parameter; 1 for generic nondegenerate states. Defaults to 1.

      n (int, optional):
        The number of eigenvalues. Defaults to 4.
    """

    metric: Metric
    beta: int = 2
    alpha: float = 1.0
    n: int = 4

    def __post_init__(self) -> None:
        if self.beta not in (1, 2):
            raise InvalidInputError(f"Dyson index must be 1 or 2. Received {self.beta}.")
        if self.n not in (2, 3, 4):
            raise InvalidInputError(f"Dimension must be 2, 3 or 4. Received {self.n}.")
        if not self.alpha > 0:
            raise InvalidInputError(f"alpha must be positive. Received {self.alpha}.")

    @property
    def ensemble(self) -> Ensemble:
        return Ensemble.from_beta(self.beta)

    @property
    def lambda_exponent(self) -> float:
        """The exponent of the Π λ_i factor of the density."""
        return self.alpha - 1.0 if self.metric is Metric.HS else self.alpha - 1.5

    def __str__(self) -> str:
        return f"{self.metric.name}(beta={self.beta}, alpha={self.alpha:g}, n={self.n})"


def log_density_weights(spec: MeasureSpec, lambdas: np.ndarray) -> np.ndarray:
    """Log of the unnormalised eigenvalue density for each row of `lambdas`.

    HS:    Π λ_i^(α-1) · Π_{i<j} |λ_i - λ_j|^β
    Bures: Π λ_i^(α-3/2) · [Π_{i<j} (λ_i - λ_j)² / (λ_i + λ_j)]^(β/2)

    Bures rows with a zero eigenvalue are singular and map to +inf.

    Args:
        spec (MeasureSpec): The measure.
        lambdas (np.ndarray): Spectra as rows (any order).

    Returns:
        np.ndarray: The log-weights.
    """
    lambdas = np.atleast_2d(lambdas)
    log_w = _log_pair_term(spec, lambdas) + _log_lambda_term(spec.lambda_exponent, lambdas)
    if spec.metric is Metric.BURES:
        log_w = np.where(np.any(lambdas <= 0.0, axis=1), np.inf, log_w)
    return log_w


def log_importance_weights(spec: MeasureSpec, lambdas: np.ndarray, proposal: Proposal) -> np.ndarray:
    """Log of density / proposal density for each row of `lambdas`.

    The Π λ_i exponents of the measure and the proposal are combined before taking logs,
    so the λ^(-1/2) factors of the Bures measure cancel exactly against the Bures-adapted proposal.

    Args:
        spec (MeasureSpec): The measure.
        lambdas (np.ndarray): Spectra as rows.
        proposal (Proposal): The proposal the rows were drawn from.

    Raises:
        SingularWeightError: If Bures rows drawn from the uniform proposal touch the boundary.

    Returns:
        np.ndarray: The log-weights.
    """
    lambdas = np.atleast_2d(lambdas)
    if spec.metric is Metric.BURES and proposal is Proposal.UNIFORM:
        if np.any(lambdas < SINGULAR_EIGENVALUE_TOL):
            message = (
                "Bures weights are singular on the simplex boundary. Use the BURES_ADAPTED proposal."
            )
            raise SingularWeightError(message)

    proposal_exponent = -0.5 if proposal is Proposal.BURES_ADAPTED else 0.0
    exponent = spec.lambda_exponent - proposal_exponent
    log_norm = proposal_log_normalizer(proposal, spec.n)

    return _log_pair_term(spec, lambdas) + _log_lambda_term(exponent, lambdas) - log_norm


def density_weight(spec: MeasureSpec, s: Spectrum) -> float:
    """The eigenvalue density of the measure at a spectrum (no delta constraint, no constant).

    Args:
        spec (MeasureSpec): The measure.
        s (Spectrum): The spectrum.

    Returns:
        float: The weight; +inf for Bures spectra with a zero eigenvalue.
    """
    _check_length(spec, s)
    return float(np.exp(log_density_weights(spec, s.values)[0]))


def importance_weight(spec: MeasureSpec, s: Spectrum, proposal: Proposal) -> float:
    """density_weight divided by the proposal density at s.

    Args:
        spec (MeasureSpec): The measure.
        s (Spectrum): The spectrum.
        proposal (Proposal): The proposal.

    Returns:
        float: The importance weight.
    """
    _check_length(spec, s)
    return float(np.exp(log_importance_weights(spec, s.values, proposal)[0]))


def normalization_oracle(spec: MeasureSpec) -> float:
    """1/C_2 for a single qubit by adaptive quadrature over λ1 = x, λ2 = 1 - x.

    The Bures endpoint singularities x^(-1/2) and (1-x)^(-1/2) are handled by algebraic
    weight functions on each half of [0, 1].

    Args:
        spec (MeasureSpec): A measure with n = 2 and alpha = 1.

    Raises:
        NotImplementedError: For n > 2 or alpha != 1.

    Returns:
        float: The normalisation integral.
    """
    if spec.n != 2 or spec.alpha != 1.0:
        raise NotImplementedError("Normalisation oracles are only available for n=2 and alpha=1.")

    beta = spec.beta

    def gap(x: float) -> float:
        return abs(2.0 * x - 1.0) ** beta

    if spec.metric is Metric.HS:
        left, _ = integrate.quad(gap, 0.0, 0.5, epsabs=QUADRATURE_TOL, epsrel=QUADRATURE_TOL)
        right, _ = integrate.quad(gap, 0.5, 1.0, epsabs=QUADRATURE_TOL, epsrel=QUADRATURE_TOL)
        return float(left + right)

    left, _ = integrate.quad(
        lambda x: gap(x) / math.sqrt(1.0 - x),
        0.0,
        0.5,
        weight="alg",
        wvar=(-0.5, 0.0),
        epsabs=QUADRATURE_TOL,
        epsrel=QUADRATURE_TOL,
    )
    right, _ = integrate.quad(
        lambda x: gap(x) / math.sqrt(x),
        0.5,
        1.0,
        weight="alg",
        wvar=(0.0, -0.5),
        epsabs=QUADRATURE_TOL,
        epsrel=QUADRATURE_TOL,
    )
    return float(left + right)


def estimate_normalization(
    spec: MeasureSpec, proposal: Proposal, src: SequenceSource, n_samples: int
) -> Estimate:
    """Importance-sampling estimate of 1/C_n: the mean of the normalised importance weights.

    Args:
        spec (MeasureSpec): The measure.
        proposal (Proposal): The proposal.
        src (SequenceSource): The source, of dimension at least 2n.
        n_samples (int): The number of proposal draws.

    Returns:
        Estimate: The estimate and its standard error.
    """
    lambdas, _, _ = simplex_batch(src, proposal, n_samples, spec.n)
    weights = np.exp(log_importance_weights(spec, lambdas, proposal))
    return Estimate(float(weights.mean()), float(weights.std(ddof=1) / math.sqrt(n_samples)))


def self_normalized_mean(log_weights: np.ndarray, values: np.ndarray) -> Estimate:
    """The ratio Σ w f / Σ w with a delta-method standard error.

    Weights are exponentiated after subtracting their maximum.

    Args:
        log_weights (np.ndarray): Log importance weights.
        values (np.ndarray): The integrand values f.

    Returns:
        Estimate: The ratio estimate and its standard error.
    """
    finite = np.isfinite(log_weights)
    if not np.any(finite):
        raise InvalidInputError("All importance weights vanish; the estimate is undefined.")

    weights = np.exp(log_weights - np.max(log_weights[finite]))
    weights[~finite] = 0.0
    total = weights.sum()
    ratio = float(np.sum(weights * values) / total)
    variance = float(np.sum(weights**2 * (values - ratio) ** 2)) / total**2
    return Estimate(ratio, math.sqrt(variance))


def _check_length(spec: MeasureSpec, s: Spectrum) -> None:
    if len(s) != spec.n:
        raise InvalidInputError(f"{spec} expects {spec.n} eigenvalues. Received {len(s)}.")


def _log_pair_term(spec: MeasureSpec, lambdas: np.ndarray) -> np.ndarray:
    n = lambdas.shape[1]
    total = np.zeros(lambdas.shape[0])
    with np.errstate(divide="ignore", invalid="ignore"):
        for i in range(n):
            for j in range(i + 1, n):
                log_gap = np.log(np.abs(lambdas[:, i] - lambdas[:, j]))
                if spec.metric is Metric.HS:
                    total += spec.beta * log_gap
                else:
                    total += 0.5 * spec.beta * (2.0 * log_gap - np.log(lambdas[:, i] + lambdas[:, j]))
    return np.where(np.isnan(total), -np.inf, total)


def _log_lambda_term(exponent: float, lambdas: np.ndarray) -> np.ndarray:
    if exponent == 0.0:
        return np.zeros(lambdas.shape[0])
    with np.errstate(divide="ignore"):
        return exponent * np.log(lambdas).sum(axis=1)
