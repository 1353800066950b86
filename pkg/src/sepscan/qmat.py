from __future__ import annotations

from typing import Iterable, Iterator

import numpy as np
from numba import njit  # type: ignore

from .enums import Ensemble
from .exceptions import InvalidInputError

NEGATIVE_EIGENVALUE_TOL = 1e-10
SPECTRUM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-12
OFF_DIAGONAL_TOL = 1e-14
MAX_SWEEPS = 50


class Spectrum:
    """The eigenvalues of a density matrix, stored in descending order.

    Slightly negative entries (round-off down to -1e-12) are clamped to zero.
    """

    __slots__ = ["values"]

    def __init__(self, values: Iterable[float] | np.ndarray) -> None:
        """Initialises a new instance of a Spectrum.

        Args:
            values (Iterable[float] | np.ndarray): The eigenvalues in any order.

        Raises:
            InvalidInputError: If the values are not a valid probability vector.
        """
        raw = values if isinstance(values, np.ndarray) else list(values)
        array = np.asarray(raw, dtype=float).ravel()

        if array.size not in (2, 3, 4):
            raise InvalidInputError(f"A spectrum has 2 to 4 eigenvalues, not {array.size}.")
        if not np.all(np.isfinite(array)) or np.any(array < -SPECTRUM_TOL):
            raise InvalidInputError(f"Eigenvalues must be nonnegative. Received {array.tolist()}.")

        array = np.clip(array, 0.0, None)
        if abs(array.sum() - 1.0) > SPECTRUM_TOL:
            raise InvalidInputError(f"Eigenvalues must sum to 1. Received sum {array.sum()!r}.")

        ordered = np.sort(array)[::-1].copy()
        ordered.flags.writeable = False
        self.values = ordered

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self) -> Iterator[float]:
        return iter(float(v) for v in self.values)

    def __getitem__(self, i: int) -> float:
        return float(self.values[i])

    def __eq__(self, obj: object) -> bool:
        return isinstance(obj, Spectrum) and bool(np.array_equal(self.values, obj.values))

    def __hash__(self) -> int:
        return hash(self.values.tobytes())

    def __repr__(self) -> str:
        inner = ", ".join(f"{v:.6g}" for v in self.values)
        return f"Spectrum({inner})"


class DensityMatrix:
    """A two-qubit (or single-qubit) density matrix tagged with its ensemble."""

    __slots__ = ["entries", "ensemble"]

    def __init__(self, entries: np.ndarray, ensemble: Ensemble, validate: bool = True) -> None:
        """Initialises a new instance of a DensityMatrix.

        Args:
          entries (np.ndarray):
            The square matrix. Real ensembles store float64, complex ensembles complex128.

          ensemble (Ensemble):
            The ensemble the state belongs to.

          validate (bool, optional):
            Whether to check Hermiticity, unit trace and positivity. Defaults to True.

        Raises:
            InvalidInputError: If validation is requested and fails.
        """
        dtype = np.float64 if ensemble is Ensemble.REAL else np.complex128
        if ensemble is Ensemble.REAL and np.iscomplexobj(entries):
            if np.max(np.abs(np.imag(entries)), initial=0.0) > HERMITIAN_TOL:
                raise InvalidInputError("A real-ensemble density matrix must have real entries.")
            entries = np.real(entries)

        matrix = np.array(entries, dtype=dtype)
        if validate:
            _check_density_matrix(matrix)

        matrix.flags.writeable = False
        self.entries = matrix
        self.ensemble = ensemble

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def spectrum(self) -> Spectrum:
        """Re-diagonalises the matrix.

        Returns:
            Spectrum: The eigenvalues of the state.
        """
        return Spectrum(eigenvalues_sym(self.entries))

    def __repr__(self) -> str:
        return f"DensityMatrix(dim={self.dim}, ensemble={self.ensemble.name})"


class GroupElement:
    """A 4x4 unitary (complex ensemble) or special orthogonal (real ensemble) matrix."""

    __slots__ = ["matrix", "ensemble"]

    def __init__(self, matrix: np.ndarray, ensemble: Ensemble, validate: bool = True) -> None:
        if ensemble is Ensemble.REAL:
            matrix = np.array(np.real(matrix), dtype=np.float64)
        else:
            matrix = np.array(matrix, dtype=np.complex128)

        if validate:
            n = matrix.shape[0]
            deviation = np.max(np.abs(matrix @ matrix.conj().T - np.eye(n)))
            if deviation > UNITARY_TOL:
                raise InvalidInputError(f"Matrix is not unitary (max deviation {deviation:.3e}).")
            if ensemble is Ensemble.REAL and abs(np.linalg.det(matrix) - 1.0) > UNITARY_TOL:
                raise InvalidInputError("A real-ensemble group element must have determinant +1.")

        matrix.flags.writeable = False
        self.matrix = matrix
        self.ensemble = ensemble

    def __repr__(self) -> str:
        return f"GroupElement(ensemble={self.ensemble.name})"


def conjugate_spectrum(s: Spectrum, u: GroupElement) -> DensityMatrix:
    """Places a spectrum on its spectral orbit: returns U diag(λ) U†.

    Args:
        s (Spectrum): The eigenvalues.
        u (GroupElement): The unitary or orthogonal matrix.

    Returns:
        DensityMatrix: The conjugated state, in the ensemble of the group element.
    """
    if len(s) != u.matrix.shape[0]:
        message = f"Spectrum of length {len(s)} cannot conjugate a {u.matrix.shape} matrix."
        raise InvalidInputError(message)

    rho = _conjugate(np.array(s.values, dtype=np.float64), u.matrix.astype(np.complex128))
    return DensityMatrix(rho, u.ensemble, validate=False)


def eigenvalues_sym(m: np.ndarray) -> np.ndarray:
    """Eigenvalues of a Hermitian (or real symmetric) 2x2 or 4x4 matrix by cyclic Jacobi rotations.

    Args:
        m (np.ndarray): The matrix.

    Raises:
        InvalidInputError: If the matrix is not square of size 2 or 4, or not Hermitian within 1e-10.

    Returns:
        np.ndarray: The real eigenvalues in descending order.
    """
    matrix = np.asarray(m)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] not in (2, 4):
        raise InvalidInputError(f"Expected a 2x2 or 4x4 matrix. Received shape {matrix.shape}.")

    asymmetry = np.max(np.abs(matrix - matrix.conj().T))
    if asymmetry > NEGATIVE_EIGENVALUE_TOL:
        raise InvalidInputError(f"Matrix is not Hermitian (max asymmetry {asymmetry:.3e}).")

    return _jacobi_eigenvalues(np.ascontiguousarray(matrix, dtype=np.complex128))


def partial_transpose(m: DensityMatrix | np.ndarray) -> np.ndarray:
    """Transposes the second qubit: entry (2a+b, 2c+d) moves to (2a+d, 2c+b).

    Args:
        m (DensityMatrix | np.ndarray): A 4x4 two-qubit matrix.

    Returns:
        np.ndarray: The partially transposed matrix (same dtype as the input).
    """
    entries = m.entries if isinstance(m, DensityMatrix) else np.asarray(m)
    if entries.shape != (4, 4):
        raise InvalidInputError(f"Partial transpose needs a 4x4 matrix. Received shape {entries.shape}.")
    return _partial_transpose(np.array(entries, order="C"))


def _check_density_matrix(matrix: np.ndarray) -> None:
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] not in (2, 4):
        raise InvalidInputError(f"A density matrix is 2x2 or 4x4. Received shape {matrix.shape}.")

    asymmetry = np.max(np.abs(matrix - matrix.conj().T))
    if asymmetry > HERMITIAN_TOL:
        raise InvalidInputError(f"Density matrix is not Hermitian (max asymmetry {asymmetry:.3e}).")

    trace = np.trace(matrix).real
    if abs(trace - 1.0) > HERMITIAN_TOL:
        raise InvalidInputError(f"Density matrix must have unit trace. Received {trace!r}.")

    smallest = eigenvalues_sym(matrix)[-1]
    if smallest < -NEGATIVE_EIGENVALUE_TOL:
        message = f"Density matrix is not positive semidefinite (eigenvalue {smallest:.3e})."
        raise InvalidInputError(message)


@njit(cache=True)
def _conjugate(lambdas: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Computes U diag(λ) U† and symmetrises the result so it is exactly Hermitian."""
    n = u.shape[0]
    rho = np.zeros((n, n), dtype=np.complex128)
    for i in range(n):
        for j in range(i, n):
            value = 0j
            for k in range(n):
                value += u[i, k] * lambdas[k] * np.conj(u[j, k])
            rho[i, j] = value
    for i in range(n):
        rho[i, i] = rho[i, i].real
        for j in range(i + 1, n):
            rho[j, i] = np.conj(rho[i, j])
    return rho


@njit(cache=True)
def _partial_transpose(m: np.ndarray) -> np.ndarray:
    out = np.empty_like(m)
    for a in range(2):
        for b in range(2):
            for c in range(2):
                for d in range(2):
                    out[2 * a + d, 2 * c + b] = m[2 * a + b, 2 * c + d]
    return out


@njit(cache=True)
def _jacobi_rotate(a: np.ndarray, p: int, q: int) -> None:
    """Annihilates a[p, q] of a Hermitian matrix in place with a 2x2 unitary rotation.

    The rotation is diag(1, e^-iφ) followed by the real Jacobi rotation, where φ is the
    phase of a[p, q].
    """
    apq = a[p, q]
    magnitude = abs(apq)
    if magnitude < 1e-300:
        return

    phase = np.conj(apq / magnitude)
    theta = (a[q, q].real - a[p, p].real) / (2.0 * magnitude)
    if abs(theta) > 1e150:
        t = 0.5 / theta
    else:
        t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
        if theta < 0.0:
            t = -t
    c = 1.0 / np.sqrt(t * t + 1.0)
    s = t * c

    g_pp = c + 0j
    g_pq = s + 0j
    g_qp = -s * phase
    g_qq = c * phase

    n = a.shape[0]
    for k in range(n):
        a_kp = a[k, p]
        a_kq = a[k, q]
        a[k, p] = a_kp * g_pp + a_kq * g_qp
        a[k, q] = a_kp * g_pq + a_kq * g_qq
    for k in range(n):
        a_pk = a[p, k]
        a_qk = a[q, k]
        a[p, k] = np.conj(g_pp) * a_pk + np.conj(g_qp) * a_qk
        a[q, k] = np.conj(g_pq) * a_pk + np.conj(g_qq) * a_qk

    a[p, q] = 0.0
    a[q, p] = 0.0
    a[p, p] = a[p, p].real
    a[q, q] = a[q, q].real


@njit(cache=True)
def _jacobi_eigenvalues(matrix: np.ndarray) -> np.ndarray:
    """Cyclic Jacobi sweeps until the off-diagonal Frobenius norm is at most 1e-14."""
    a = matrix.copy()
    n = a.shape[0]

    for _ in range(MAX_SWEEPS):
        off = 0.0
        for p in range(n):
            for q in range(p + 1, n):
                off += abs(a[p, q]) ** 2
        if np.sqrt(2.0 * off) <= OFF_DIAGONAL_TOL:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                _jacobi_rotate(a, p, q)

    eigenvalues = np.empty(n)
    for i in range(n):
        eigenvalues[i] = a[i, i].real
    return np.sort(eigenvalues)[::-1].copy()
