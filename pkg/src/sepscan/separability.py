from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numba import njit  # type: ignore

from .enums import Ensemble
from .exceptions import InvalidInputError
from .qmat import (
    NEGATIVE_EIGENVALUE_TOL,
    DensityMatrix,
    Spectrum,
    _conjugate,
    _jacobi_eigenvalues,
    _partial_transpose,
    partial_transpose,
)
from .sampling import SequenceSource, _check_counter, _haar_element

BELL_PHI_PLUS = np.array([1.0, 0.0, 0.0, 1.0]) / np.sqrt(2.0)


@dataclass(frozen=True)
class SepVerdict:
    """The PPT verdict on a two-qubit state.

    Attributes:
      separable (bool):
        Whether the partial transpose is positive semidefinite (within -1e-10).

      min_pt_eigenvalue (float):
        The smallest eigenvalue of the partial transpose.
    """

    separable: bool
    min_pt_eigenvalue: float

    def __bool__(self) -> bool:
        return self.separable


def is_separable(m: DensityMatrix) -> SepVerdict:
    """Decides separability by the Peres-Horodecki criterion, which is exact for two qubits.

    Args:
        m (DensityMatrix): A 4x4 state.

    Returns:
        SepVerdict: The verdict and the smallest eigenvalue of the partial transpose.
    """
    pt = partial_transpose(m).astype(np.complex128)
    smallest = float(_jacobi_eigenvalues(pt)[-1])
    return SepVerdict(smallest >= -NEGATIVE_EIGENVALUE_TOL, smallest)


def maximal_concurrence(s: Spectrum | Sequence[float] | np.ndarray) -> float:
    """The largest concurrence on the spectral orbit: max(0, λ1 - λ3 - 2√(λ2 λ4)).

    Args:
        s (Spectrum | Sequence[float] | np.ndarray): Four descending eigenvalues.

    Raises:
        InvalidInputError: If raw values are not four descending eigenvalues.

    Returns:
        float: The maximal concurrence in [0, 1].
    """
    values = _ordered_four(s)
    return max(0.0, _concurrence_gap(values))


def is_absolutely_separable(s: Spectrum | Sequence[float] | np.ndarray) -> bool:
    """Whether every state on the spectral orbit is separable: λ1 - λ3 - 2√(λ2 λ4) ≤ 0."""
    return _concurrence_gap(_ordered_four(s)) <= 0.0


def concurrence_gaps(lambdas: np.ndarray) -> np.ndarray:
    """λ1 - λ3 - 2√(λ2 λ4) for every row of an array of descending spectra."""
    lambdas = np.atleast_2d(lambdas)
    return lambdas[:, 0] - lambdas[:, 2] - 2.0 * np.sqrt(lambdas[:, 1] * lambdas[:, 3])


def concurrences(lambdas: np.ndarray) -> np.ndarray:
    """maximal_concurrence for every row of an array of descending spectra."""
    return np.maximum(concurrence_gaps(lambdas), 0.0)


def werner_state(w: float, ensemble: Ensemble = Ensemble.COMPLEX) -> DensityMatrix:
    """The Werner family w |Φ+⟩⟨Φ+| + (1 - w) I/4, separable exactly when w ≤ 1/3.

    Args:
        w (float): The mixing weight in [0, 1].
        ensemble (Ensemble, optional): The ensemble tag. Defaults to Ensemble.COMPLEX.

    Raises:
        InvalidInputError: If w lies outside [0, 1].

    Returns:
        DensityMatrix: The state.
    """
    if not 0.0 <= w <= 1.0:
        raise InvalidInputError(f"The Werner weight must lie in [0, 1]. Received {w}.")

    rho = w * np.outer(BELL_PHI_PLUS, BELL_PHI_PLUS) + (1.0 - w) * np.eye(4) / 4.0
    return DensityMatrix(rho, ensemble)


def count_separable(
    lambdas: np.ndarray, src: SequenceSource, ensemble: Ensemble, n_group: int
) -> np.ndarray:
    """Conjugates each spectrum by n_group Haar group elements and counts separable verdicts.

    Group elements are drawn from `src` in row order, so the counts depend only on the
    source state and the spectra.

    Args:
        lambdas (np.ndarray): Spectra as rows.
        src (SequenceSource): The source for the group elements. Its counter is advanced.
        ensemble (Ensemble): The ensemble.
        n_group (int): Group elements per spectrum.

    Returns:
        np.ndarray: The number of separable verdicts for each spectrum.
    """
    needed = ensemble.gaussians_per_element
    if src.dimension < needed:
        message = f"Haar sampling of the {ensemble.name} ensemble needs {needed} dimensions."
        raise InvalidInputError(message)
    if n_group < 1:
        raise InvalidInputError(f"n_group must be positive. Received {n_group}.")

    real = ensemble is Ensemble.REAL
    _check_counter(src.kind, src.counter)
    counts, counter = _orbit_counts(
        src.code,
        src.seed_u64,
        src.shift,
        src.counter,
        src.dimension,
        np.ascontiguousarray(np.atleast_2d(lambdas), dtype=np.float64),
        n_group,
        real,
    )
    _check_counter(src.kind, counter - 1)
    src.counter = counter
    return counts


def _ordered_four(s: Spectrum | Sequence[float] | np.ndarray) -> np.ndarray:
    if isinstance(s, Spectrum):
        values = s.values
    else:
        values = np.asarray(s, dtype=float).ravel()
        if values.size != 4 or np.any(np.diff(values) > 0.0):
            raise InvalidInputError(f"Expected four descending eigenvalues. Received {values.tolist()}.")
    if len(values) != 4:
        raise InvalidInputError(f"Maximal concurrence needs four eigenvalues. Received {len(values)}.")
    return values


def _concurrence_gap(values: np.ndarray) -> float:
    return float(values[0] - values[2] - 2.0 * np.sqrt(values[1] * values[3]))


@njit(cache=True)
def _is_separable_kernel(rho: np.ndarray) -> bool:
    pt = _partial_transpose(rho)
    return _jacobi_eigenvalues(pt)[-1] >= -NEGATIVE_EIGENVALUE_TOL


@njit(cache=True)
def _orbit_counts(
    code: int,
    seed: np.uint64,
    shift: np.ndarray,
    counter: int,
    dimension: int,
    lambdas: np.ndarray,
    n_group: int,
    real: bool,
) -> tuple[np.ndarray, int]:
    counts = np.zeros(lambdas.shape[0], dtype=np.int64)
    for i in range(lambdas.shape[0]):
        for _ in range(n_group):
            u, counter = _haar_element(code, seed, shift, counter, dimension, real)
            if _is_separable_kernel(_conjugate(lambdas[i], u)):
                counts[i] += 1
    return counts, counter
