import numpy as np
import pytest

from sepscan.enums import Ensemble, Proposal, SequenceKind
from sepscan.exceptions import InvalidInputError
from sepscan.qmat import DensityMatrix, Spectrum
from sepscan.sampling import SequenceSource, simplex_batch
from sepscan.separability import (
    _is_separable_kernel,
    concurrence_gaps,
    concurrences,
    count_separable,
    is_absolutely_separable,
    is_separable,
    maximal_concurrence,
    werner_state,
)


def haar_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


class TestIsSeparable:
    def test_werner_boundary_on_a_fine_grid(self) -> None:
        # Arrange
        grid = np.linspace(0.0, 1.0, 201)

        # Act
        verdicts = [bool(is_separable(werner_state(float(w)))) for w in grid]

        # Assert
        assert verdicts == [w <= 1.0 / 3.0 + 1e-9 for w in grid]

    def test_werner_half_has_known_partial_transpose_eigenvalue(self) -> None:
        # Act
        verdict = is_separable(werner_state(0.5))

        # Assert
        assert not verdict
        assert verdict.min_pt_eigenvalue == pytest.approx(-0.125, abs=1e-12)

    def test_bell_state_is_entangled(self) -> None:
        # Act
        verdict = is_separable(werner_state(1.0, Ensemble.REAL))

        # Assert
        assert not verdict.separable
        assert verdict.min_pt_eigenvalue == pytest.approx(-0.5, abs=1e-12)

    def test_product_state_is_separable(self) -> None:
        # Arrange
        a = np.diag([0.7, 0.3])
        b = np.array([[0.5, 0.2], [0.2, 0.5]])

        # Act
        verdict = is_separable(DensityMatrix(np.kron(a, b), Ensemble.REAL))

        # Assert
        assert verdict.separable

    def test_kernel_agrees_with_wrapper(self) -> None:
        # Arrange
        rho = werner_state(0.3).entries.astype(np.complex128)

        # Act + Assert
        assert _is_separable_kernel.py_func(rho)

    def test_verdict_is_invariant_under_local_unitaries(self) -> None:
        # Arrange
        rng = np.random.default_rng(17)
        states = [werner_state(0.34).entries.astype(np.complex128)]
        for _ in range(99):
            u = haar_unitary(rng, 4)
            rho = u @ np.diag(rng.dirichlet(np.ones(4))) @ u.conj().T
            states.append((rho + rho.conj().T) / 2.0)
        products = [np.kron(haar_unitary(rng, 2), haar_unitary(rng, 2)) for _ in states]

        # Act
        before = [is_separable(DensityMatrix(rho, Ensemble.COMPLEX)) for rho in states]
        after = [
            is_separable(DensityMatrix(v @ rho @ v.conj().T, Ensemble.COMPLEX))
            for v, rho in zip(products, states)
        ]

        # Assert
        assert [b.separable for b in before] == [a.separable for a in after]
        assert [a.min_pt_eigenvalue for a in after] == pytest.approx(
            [b.min_pt_eigenvalue for b in before], abs=1e-10
        )
        assert 0 < sum(b.separable for b in before) < len(states)

    def test_werner_raises_outside_unit_interval(self) -> None:
        # Act + Assert
        with pytest.raises(InvalidInputError):
            werner_state(1.5)


class TestMaximalConcurrence:
    def test_pure_state(self) -> None:
        # Act + Assert
        assert maximal_concurrence(Spectrum([1.0, 0.0, 0.0, 0.0])) == 1.0

    def test_maximally_mixed_state(self) -> None:
        # Act + Assert
        assert maximal_concurrence(Spectrum([0.25] * 4)) == 0.0

    def test_formula(self) -> None:
        # Arrange
        values = [0.625, 0.2, 0.125, 0.05]

        # Act
        c = maximal_concurrence(values)

        # Assert
        assert c == pytest.approx(0.3)

    def test_raises_for_ascending_raw_values(self) -> None:
        # Act + Assert
        with pytest.raises(InvalidInputError):
            maximal_concurrence([0.1, 0.2, 0.3, 0.4])

    def test_raises_for_single_qubit_spectrum(self) -> None:
        # Act + Assert
        with pytest.raises(InvalidInputError):
            maximal_concurrence(Spectrum([0.5, 0.5]))

    def test_vectorised_forms_agree(self) -> None:
        # Arrange
        lambdas = np.array([[0.625, 0.2, 0.125, 0.05], [0.25, 0.25, 0.25, 0.25]])

        # Act
        gaps = concurrence_gaps(lambdas)
        values = concurrences(lambdas)

        # Assert
        assert gaps == pytest.approx([0.3, -0.5])
        assert values == pytest.approx([0.3, 0.0])


class TestAbsoluteSeparability:
    def test_maximally_mixed_is_absolutely_separable(self) -> None:
        # Act + Assert
        assert is_absolutely_separable(Spectrum([0.25] * 4))

    def test_pure_state_is_not(self) -> None:
        # Act + Assert
        assert not is_absolutely_separable(Spectrum([1.0, 0.0, 0.0, 0.0]))

    @pytest.mark.parametrize("ensemble", list(Ensemble))
    def test_zero_concurrence_orbits_have_no_entangled_states(self, ensemble: Ensemble) -> None:
        # Arrange
        src = SequenceSource(SequenceKind.PSEUDO, 8, seed=12)
        lambdas, _, _ = simplex_batch(src, Proposal.UNIFORM, 20_000)
        absolute = lambdas[concurrence_gaps(lambdas) <= 0.0][:20]
        haar = SequenceSource(SequenceKind.SOBOL, ensemble.gaussians_per_element, seed=12)

        # Act
        counts = count_separable(absolute, haar, ensemble, 200)

        # Assert
        assert absolute.shape[0] > 0
        assert np.all(counts == 200)

    @pytest.mark.slow
    @pytest.mark.parametrize("ensemble", list(Ensemble))
    def test_zero_concurrence_orbits_at_scale(self, ensemble: Ensemble) -> None:
        # Arrange
        rng = np.random.default_rng(21)
        mixed = np.sort(0.3 * rng.dirichlet(np.ones(4), size=1000) + 0.175, axis=1)[:, ::-1]
        lambdas = np.ascontiguousarray(mixed)
        haar = SequenceSource(SequenceKind.PSEUDO, ensemble.gaussians_per_element, seed=21)

        # Act
        counts = count_separable(lambdas, haar, ensemble, 100)

        # Assert
        assert np.all(concurrence_gaps(lambdas) < 0.0)
        assert counts.sum() == 100_000


class TestCountSeparable:
    def test_pure_state_orbit_is_entangled(self) -> None:
        # Arrange
        lambdas = np.array([[1.0, 0.0, 0.0, 0.0]])
        src = SequenceSource(SequenceKind.PSEUDO, 32, seed=3)

        # Act
        counts = count_separable(lambdas, src, Ensemble.COMPLEX, 500)

        # Assert
        assert counts[0] < 500

    def test_advances_the_source(self) -> None:
        # Arrange
        lambdas = np.full((3, 4), 0.25)
        src = SequenceSource(SequenceKind.PSEUDO, 16, seed=3)

        # Act
        counts = count_separable(lambdas, src, Ensemble.REAL, 10)

        # Assert
        assert counts.tolist() == [10, 10, 10]
        assert src.counter >= 31

    def test_is_deterministic(self) -> None:
        # Arrange
        lambdas = np.array([[0.5, 0.3, 0.15, 0.05], [0.7, 0.2, 0.1, 0.0]])

        a = SequenceSource(SequenceKind.SOBOL, 32, seed=8)
        b = SequenceSource(SequenceKind.SOBOL, 32, seed=8)

        # Act
        first = count_separable(lambdas, a, Ensemble.COMPLEX, 50)
        second = count_separable(lambdas, b, Ensemble.COMPLEX, 50)

        # Assert
        assert np.array_equal(first, second)

    def test_raises_for_too_few_dimensions(self) -> None:
        # Arrange
        src = SequenceSource(SequenceKind.PSEUDO, 16)

        # Act + Assert
        with pytest.raises(InvalidInputError):
            count_separable(np.full((1, 4), 0.25), src, Ensemble.COMPLEX, 1)
