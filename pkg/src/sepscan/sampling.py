from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numba import njit  # type: ignore

from .enums import Ensemble, Proposal, SequenceKind
from .exceptions import ConfigurationError, InfeasibleSliceError, InvalidInputError
from .qmat import GroupElement, Spectrum
from .sobol import DIRECTIONS, MAX_DIMENSION, _sobol_into

SOBOL = 0
PSEUDO = 1

MAX_COUNTER = 2**32 - 1
DEFAULT_MAX_REJECTS = 100_000
DEGENERACY_TOL = 1e-12

_GOLDEN_INT = 0x9E3779B97F4A7C15
_GOLDEN = np.uint64(_GOLDEN_INT)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_S11 = np.uint64(11)
_S27 = np.uint64(27)
_S30 = np.uint64(30)
_S31 = np.uint64(31)
_INV_2_53 = 2.0**-53


class SequenceSource:
    """A counter-addressed stream of points in [0, 1)^dimension.

    The point emitted for a given (kind, dimension, seed, counter) is always the same, so
    disjoint counter ranges can be handed to different workers without changing results.
    A source is mutable (its counter advances) and should have a single owner.
    """

    __slots__ = ["kind", "dimension", "seed", "counter", "_shift"]

    def __init__(self, kind: SequenceKind, dimension: int, seed: int = 0, counter: int = 1) -> None:
        """Initialises a new instance of a SequenceSource.

        Args:
          kind (SequenceKind):
            SOBOL for the low-discrepancy sequence, PSEUDO for the counter-based hash generator.

          dimension (int):
            The number of coordinates per point.

          seed (int, optional):
            A 64-bit seed. For Sobol points, seed 0 gives the plain sequence and any other seed
            applies a seed-derived digital shift. Defaults to 0.

          counter (int, optional):
            Index of the next point. Sobol points are indexed from 1. Defaults to 1.

        Raises:
            ConfigurationError: If the dimension exceeds the direction number table.
        """
        if dimension < 1:
            raise ConfigurationError(f"Sequence dimension must be positive. Received {dimension}.")
        if kind is SequenceKind.SOBOL and dimension > MAX_DIMENSION:
            message = f"Sobol points support up to {MAX_DIMENSION} dimensions. Requested {dimension}."
            raise ConfigurationError(message)

        self.kind = kind
        self.dimension = dimension
        self.seed = int(seed) % 2**64
        self.counter = int(counter)
        self._shift = _digital_shift(self.seed, dimension) if kind is SequenceKind.SOBOL else None

    @property
    def code(self) -> int:
        return SOBOL if self.kind is SequenceKind.SOBOL else PSEUDO

    @property
    def shift(self) -> np.ndarray:
        if self._shift is None:
            return np.zeros(self.dimension, dtype=np.int64)
        return self._shift

    @property
    def seed_u64(self) -> np.uint64:
        return np.uint64(self.seed)

    def next_point(self) -> np.ndarray:
        """Emits the point at the current counter and advances the counter by one.

        Returns:
            np.ndarray: The point in [0, 1)^dimension.
        """
        _check_counter(self.kind, self.counter)
        out = np.empty(self.dimension)
        _point_into(self.code, self.seed_u64, self.shift, self.counter, out)
        self.counter += 1
        return out

    def points(self, n: int) -> np.ndarray:
        """Emits the next n points as the rows of an array.

        Args:
            n (int): The number of points.

        Returns:
            np.ndarray: An array of shape (n, dimension).
        """
        _check_counter(self.kind, self.counter + n - 1)
        out = _fill_points(self.code, self.seed_u64, self.shift, self.counter, n, self.dimension)
        self.counter += n
        return out

    def __repr__(self) -> str:
        kind = self.kind.name
        state = f"seed={self.seed}, counter={self.counter}"
        return f"SequenceSource(kind={kind}, dim={self.dimension}, {state})"


@dataclass(frozen=True)
class FixedCSlice:
    """The set of spectra sharing the maximal concurrence c."""

    c: float
    max_rejects: int = DEFAULT_MAX_REJECTS

    def __post_init__(self) -> None:
        if not 0.0 < self.c < 1.0:
            message = f"The maximal concurrence of a slice must lie in (0, 1). Received {self.c}."
            raise InvalidInputError(message)
        if self.max_rejects < 1:
            raise InvalidInputError(f"max_rejects must be positive. Received {self.max_rejects}.")

    @property
    def box(self) -> tuple[float, float]:
        """Upper bounds of the (λ2, λ4) proposal box.

        Every feasible point satisfies (√λ2 + √λ4)² ≤ 1 - c, so the box
        [0, min(½, 1-c)] x [0, min(¼, (1-c)/4)] contains the whole slice.
        """
        return min(0.5, 1.0 - self.c), min(0.25, (1.0 - self.c) / 4.0)


class SimplexSample(NamedTuple):
    spectrum: Spectrum
    density: float


def derive_seed(seed: int, key: int) -> int:
    """Derives an independent 64-bit seed for a sub-stream (a bin, a chunk, a role).

    Args:
        seed (int): The run seed.
        key (int): The sub-stream key.

    Returns:
        int: The derived seed.
    """
    inner = int(_mix64(_wrap(int(key) * _GOLDEN_INT)))
    return int(_mix64(_wrap(int(seed) ^ inner)))


def next_point(src: SequenceSource) -> np.ndarray:
    """See SequenceSource.next_point."""
    return src.next_point()


def haar_group_element(src: SequenceSource, ensemble: Ensemble) -> GroupElement:
    """Draws a Haar-distributed 4x4 unitary (complex) or special orthogonal (real) matrix.

    One sequence point is mapped to Gaussians by Box-Muller, arranged into a Ginibre matrix
    and orthonormalised by a QR decomposition whose triangular factor has a positive diagonal.
    Rank-deficient draws are skipped in favour of the next point.

    Args:
        src (SequenceSource): The source, of dimension at least 32 (complex) or 16 (real).
        ensemble (Ensemble): The ensemble.

    Returns:
        GroupElement: The group element.
    """
    needed = ensemble.gaussians_per_element
    if src.dimension < needed:
        message = f"Haar sampling of the {ensemble.name} ensemble needs {needed} dimensions."
        raise ConfigurationError(message)

    _check_counter(src.kind, src.counter)
    real = ensemble is Ensemble.REAL
    q, counter = _haar_element(src.code, src.seed_u64, src.shift, src.counter, src.dimension, real)
    src.counter = counter
    return GroupElement(q, ensemble)


def dirichlet_simplex(src: SequenceSource, concentration: Proposal, n: int = 4) -> SimplexSample:
    """Draws a spectrum from the uniform or Bures-adapted Dirichlet proposal.

    UNIFORM is Dirichlet(1,...,1) via normalised exponentials; BURES_ADAPTED is
    Dirichlet(½,...,½) via normalised squared Gaussians.

    Args:
        src (SequenceSource): The source, of dimension at least 2n.
        concentration (Proposal): The proposal.
        n (int, optional): The number of eigenvalues. Defaults to 4.

    Returns:
        SimplexSample: The sorted spectrum and the (normalised) proposal density at it.
    """
    lambdas, log_density, _ = simplex_batch(src, concentration, 1, n)
    return SimplexSample(Spectrum(lambdas[0]), float(np.exp(log_density[0])))


def simplex_batch(
    src: SequenceSource, concentration: Proposal, n_samples: int, n: int = 4
) -> tuple[np.ndarray, np.ndarray, int]:
    """Draws many proposal spectra at once.

    Args:
        src (SequenceSource): The source, of dimension at least 2n.
        concentration (Proposal): The proposal.
        n_samples (int): The number of spectra.
        n (int, optional): The number of eigenvalues. Defaults to 4.

    Returns:
        tuple[np.ndarray, np.ndarray, int]:
            The (n_samples, n) descending spectra, their log proposal densities and the
            number of sequence points consumed.
    """
    if n not in (2, 3, 4):
        raise InvalidInputError(f"Simplex sampling supports 2 to 4 eigenvalues. Requested {n}.")
    if src.dimension < 2 * n:
        raise ConfigurationError(f"Simplex sampling of {n} eigenvalues needs {2 * n} dimensions.")

    bures = concentration is Proposal.BURES_ADAPTED
    start = src.counter
    lambdas, counter = _simplex_batch(
        src.code, src.seed_u64, src.shift, start, n_samples, n, src.dimension, bures
    )
    _check_counter(src.kind, counter - 1)
    src.counter = counter
    return lambdas, proposal_log_density(concentration, lambdas), counter - start


def proposal_log_density(concentration: Proposal, lambdas: np.ndarray) -> np.ndarray:
    """Normalised log-density of a Dirichlet proposal with respect to Lebesgue measure on the simplex.

    Args:
        concentration (Proposal): The proposal.
        lambdas (np.ndarray): Spectra as rows.

    Returns:
        np.ndarray: The log-density of each row.
    """
    n = lambdas.shape[-1]
    log_norm = proposal_log_normalizer(concentration, n)
    if concentration is Proposal.UNIFORM:
        return np.full(lambdas.shape[:-1], log_norm)

    with np.errstate(divide="ignore"):
        return log_norm - 0.5 * np.log(lambdas).sum(axis=-1)


def proposal_log_normalizer(concentration: Proposal, n: int) -> float:
    """Log of the constant in front of Π λ_i^(a-1) in the Dirichlet(a,...,a) density."""
    if concentration is Proposal.UNIFORM:
        return math.lgamma(n)
    return math.lgamma(n / 2.0) - n * math.lgamma(0.5)


def spectrum_with_concurrence(slice_: FixedCSlice, src: SequenceSource) -> Spectrum:
    """Draws a spectrum whose maximal concurrence equals the slice value c.

    (λ2, λ4) are drawn uniformly from the slice's proposal box, then
    λ1 = (s + d)/2 and λ3 = (s - d)/2 with d = c + 2√(λ2 λ4) and s = 1 - λ2 - λ4.
    Draws violating λ1 ≥ λ2 ≥ λ3 ≥ λ4 ≥ 0 are rejected.

    Args:
        slice_ (FixedCSlice): The slice.
        src (SequenceSource): The source, of dimension at least 2.

    Raises:
        InfeasibleSliceError: If max_rejects consecutive draws are rejected.

    Returns:
        Spectrum: The spectrum.
    """
    lambdas = spectra_with_concurrence(slice_, src, 1)
    return Spectrum(lambdas[0])


def spectra_with_concurrence(slice_: FixedCSlice, src: SequenceSource, n_spectra: int) -> np.ndarray:
    """Draws n_spectra spectra of the slice as the rows of an array. See spectrum_with_concurrence."""
    if src.dimension < 2:
        raise ConfigurationError("Fixed-C sampling needs at least 2 dimensions.")

    b2, b4 = slice_.box
    lambdas, counter, attempts = _slice_batch(
        src.code,
        src.seed_u64,
        src.shift,
        src.counter,
        src.dimension,
        n_spectra,
        slice_.c,
        b2,
        b4,
        slice_.max_rejects,
    )
    src.counter = counter
    if attempts > 0:
        raise InfeasibleSliceError(slice_.c, attempts)
    _check_counter(src.kind, counter - 1)
    return lambdas


def _wrap(value: int) -> np.uint64:
    return np.uint64(value % 2**64)


def _check_counter(kind: SequenceKind, counter: int) -> None:
    if kind is SequenceKind.SOBOL and not 1 <= counter <= MAX_COUNTER:
        message = f"Sobol counter {counter} outside the supported range [1, {MAX_COUNTER}]."
        raise ConfigurationError(message)


def _digital_shift(seed: int, dimension: int) -> np.ndarray:
    shift = np.zeros(dimension, dtype=np.int64)
    if seed == 0:
        return shift
    for j in range(dimension):
        shift[j] = int(_mix64(_wrap(seed + (j + 1) * _GOLDEN_INT))) >> 32
    return shift


@njit(cache=True)
def _mix64(z: np.uint64) -> np.uint64:
    """The splitmix64 finaliser."""
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    return z ^ (z >> _S31)


@njit(cache=True)
def _point_into(code: int, seed: np.uint64, shift: np.ndarray, counter: int, out: np.ndarray) -> None:
    if code == SOBOL:
        _sobol_into(DIRECTIONS, shift, counter, out)
        return

    key = _mix64(seed ^ _mix64(np.uint64(counter) * _GOLDEN))
    for j in range(out.shape[0]):
        bits = _mix64(key + np.uint64(j + 1) * _GOLDEN) >> _S11
        out[j] = bits * _INV_2_53


@njit(cache=True)
def _fill_points(
    code: int, seed: np.uint64, shift: np.ndarray, start: int, n: int, dimension: int
) -> np.ndarray:
    out = np.empty((n, dimension))
    for i in range(n):
        _point_into(code, seed, shift, start + i, out[i])
    return out


@njit(cache=True)
def _box_muller_into(u: np.ndarray, gaussians: np.ndarray) -> None:
    """Pairs of uniforms (u1, u2) become pairs of standard Gaussians. 1 - u1 lies in (0, 1]."""
    for i in range(gaussians.shape[0] // 2):
        radius = np.sqrt(-2.0 * np.log(1.0 - u[2 * i]))
        angle = 2.0 * np.pi * u[2 * i + 1]
        gaussians[2 * i] = radius * np.cos(angle)
        gaussians[2 * i + 1] = radius * np.sin(angle)


@njit(cache=True)
def _orthonormalise(z: np.ndarray) -> tuple[np.ndarray, bool]:
    """Householder QR of z with the phases of diag(R) moved into Q, so the implied R has a
    positive real diagonal. A near-zero pivot marks the draw as rank deficient."""
    n = z.shape[0]
    q, r = np.linalg.qr(z)
    q = np.ascontiguousarray(q)
    for j in range(n):
        size = abs(r[j, j])
        if size < DEGENERACY_TOL:
            return q, False
        phase = r[j, j] / size
        for k in range(n):
            q[k, j] *= phase
    return q, True


@njit(cache=True)
def _det_real(m: np.ndarray) -> float:
    """Determinant of a small real matrix by Gaussian elimination with partial pivoting."""
    a = m.copy()
    n = a.shape[0]
    det = 1.0
    for col in range(n):
        pivot = col
        for row in range(col + 1, n):
            if abs(a[row, col]) > abs(a[pivot, col]):
                pivot = row
        if a[pivot, col] == 0.0:
            return 0.0
        if pivot != col:
            for k in range(n):
                tmp = a[col, k]
                a[col, k] = a[pivot, k]
                a[pivot, k] = tmp
            det = -det
        det *= a[col, col]
        for row in range(col + 1, n):
            factor = a[row, col] / a[col, col]
            for k in range(col, n):
                a[row, k] -= factor * a[col, k]
    return det


@njit(cache=True)
def _haar_from_uniforms(u: np.ndarray, real: bool) -> tuple[np.ndarray, bool]:
    n = 4
    count = 16 if real else 32
    gaussians = np.empty(count)
    _box_muller_into(u, gaussians)

    z = np.empty((n, n), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            k = n * i + j
            if real:
                z[i, j] = gaussians[k]
            else:
                z[i, j] = (gaussians[2 * k] + 1j * gaussians[2 * k + 1]) / np.sqrt(2.0)

    q, ok = _orthonormalise(z)
    if ok and real:
        if _det_real(q.real.copy()) < 0.0:
            for k in range(n):
                q[k, n - 1] = -q[k, n - 1]
    return q, ok


@njit(cache=True)
def _haar_element(
    code: int, seed: np.uint64, shift: np.ndarray, counter: int, dimension: int, real: bool
) -> tuple[np.ndarray, int]:
    """Draws one group element, skipping degenerate points. Returns it and the next counter."""
    u = np.empty(dimension)
    while True:
        _point_into(code, seed, shift, counter, u)
        counter += 1
        q, ok = _haar_from_uniforms(u, real)
        if ok:
            return q, counter


@njit(cache=True)
def _simplex_batch(
    code: int,
    seed: np.uint64,
    shift: np.ndarray,
    start: int,
    n_samples: int,
    n: int,
    dimension: int,
    bures: bool,
) -> tuple[np.ndarray, int]:
    lambdas = np.empty((n_samples, n))
    u = np.empty(dimension)
    raw = np.empty(n)
    gaussians = np.empty(2 * n)
    counter = start
    i = 0
    while i < n_samples:
        _point_into(code, seed, shift, counter, u)
        counter += 1
        if bures:
            _box_muller_into(u[: 2 * n], gaussians)
            for k in range(n):
                # cosine branch only: one Gaussian per uniform pair
                raw[k] = gaussians[2 * k] ** 2
        else:
            for k in range(n):
                raw[k] = -np.log(1.0 - u[k])
        total = raw.sum()
        if total <= 0.0:
            continue
        ordered = np.sort(raw / total)[::-1]
        for k in range(n):
            lambdas[i, k] = ordered[k]
        i += 1
    return lambdas, counter


@njit(cache=True)
def _solve_slice(c: float, l2: float, l4: float, out: np.ndarray) -> bool:
    d = c + 2.0 * np.sqrt(l2 * l4)
    s = 1.0 - l2 - l4
    l1 = 0.5 * (s + d)
    l3 = 0.5 * (s - d)
    out[0] = l1
    out[1] = l2
    out[2] = l3
    out[3] = l4
    return l1 >= l2 and l2 >= l3 and l3 >= l4 and l4 >= 0.0


@njit(cache=True)
def _slice_batch(
    code: int,
    seed: np.uint64,
    shift: np.ndarray,
    start: int,
    dimension: int,
    n_spectra: int,
    c: float,
    b2: float,
    b4: float,
    max_rejects: int,
) -> tuple[np.ndarray, int, int]:
    """Rejection sampling of the fixed-C slice. The last value is nonzero on failure (attempt count)."""
    lambdas = np.empty((n_spectra, 4))
    u = np.empty(dimension)
    out = np.empty(4)
    counter = start
    for i in range(n_spectra):
        rejects = 0
        while True:
            _point_into(code, seed, shift, counter, u)
            counter += 1
            if _solve_slice(c, u[0] * b2, u[1] * b4, out):
                break
            rejects += 1
            if rejects >= max_rejects:
                return lambdas, counter, rejects
        for k in range(4):
            lambdas[i, k] = out[k]
    return lambdas, counter, 0
