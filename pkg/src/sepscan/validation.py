from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .enums import Ensemble, Metric, Proposal, SequenceKind
from .estimator import estimate_curve
from .measures import MeasureSpec, estimate_normalization, normalization_oracle
from .qmat import DensityMatrix, Spectrum, conjugate_spectrum, eigenvalues_sym, partial_transpose
from .sampling import (
    FixedCSlice,
    SequenceSource,
    haar_group_element,
    simplex_batch,
    spectra_with_concurrence,
)
from .separability import concurrences, count_separable, is_separable, werner_state
from .views import CheckResult, ValidationReporter

VALIDATION_SEED = 20_240_601

Check = Callable[[], CheckResult]


@dataclass
class Validator:
    """Runs the property suite with fixed seeds."""

    reporter: ValidationReporter
    workers: int = 2

    def run(self) -> list[CheckResult]:
        checks: list[Check] = [
            check_sobol_prefix,
            check_werner_boundary,
            check_werner_pt_eigenvalue,
            check_partial_transpose_involution,
            check_spectrum_preservation,
            check_haar_complex,
            check_haar_real,
            check_fixed_c_identity,
            check_absolute_separability,
            check_normalization_oracles,
            check_normalization_estimates,
            self.check_determinism,
        ]

        results: list[CheckResult] = []
        for check in checks:
            try:
                result = check()
            except Exception as exc:  # a crashing check is a failed check
                name = check.__name__.removeprefix("check_")
                result = CheckResult(name, False, f"{type(exc).__name__}: {exc}")
            self.reporter.display(result)
            results.append(result)

        self.reporter.summarise(results)
        return results

    def check_determinism(self) -> CheckResult:
        """Small curves agree bit-for-bit across repeated runs and worker counts."""
        first = estimate_curve(Ensemble.REAL, 8, 3, 10, VALIDATION_SEED)
        second = estimate_curve(Ensemble.REAL, 8, 3, 10, VALIDATION_SEED)
        parallel = estimate_curve(Ensemble.REAL, 8, 3, 10, VALIDATION_SEED, workers=self.workers)
        passed = first.bins == second.bins == parallel.bins
        return CheckResult("determinism", passed, f"workers=1 vs workers={self.workers}")


def check_sobol_prefix() -> CheckResult:
    src = SequenceSource(SequenceKind.SOBOL, 1)
    points = src.points(3)[:, 0].tolist()
    return CheckResult("sobol_prefix", points == [0.5, 0.75, 0.25], f"{points}")


def check_werner_boundary() -> CheckResult:
    grid = np.linspace(0.0, 1.0, 201)
    verdicts = [bool(is_separable(werner_state(float(w)))) for w in grid]
    mismatches = [w for w, separable in zip(grid, verdicts) if separable != (w <= 1.0 / 3.0 + 1e-9)]
    return CheckResult("werner_boundary", not mismatches, f"{len(mismatches)} mismatches on 201 points")


def check_werner_pt_eigenvalue() -> CheckResult:
    verdict = is_separable(werner_state(0.5))
    passed = not verdict.separable and abs(verdict.min_pt_eigenvalue + 0.125) < 1e-12
    return CheckResult("werner_pt_eigenvalue", passed, f"min eigenvalue {verdict.min_pt_eigenvalue:.3e}")


def check_partial_transpose_involution() -> CheckResult:
    states = _random_states(Ensemble.COMPLEX, 100)
    passed = all(np.array_equal(partial_transpose(partial_transpose(m)), m.entries) for m in states)
    return CheckResult("pt_involution", passed, "100 random states")


def check_spectrum_preservation() -> CheckResult:
    src = SequenceSource(SequenceKind.PSEUDO, 32, VALIDATION_SEED)
    lambdas, _, _ = simplex_batch(src, Proposal.UNIFORM, 200)
    worst = 0.0
    for row in lambdas:
        s = Spectrum(row)
        rho = conjugate_spectrum(s, haar_group_element(src, Ensemble.COMPLEX))
        worst = max(worst, float(np.max(np.abs(eigenvalues_sym(rho.entries) - s.values))))
    return CheckResult("spectrum_preservation", worst <= 1e-10, f"max deviation {worst:.2e}")


def check_haar_complex() -> CheckResult:
    src = SequenceSource(SequenceKind.SOBOL, 32, VALIDATION_SEED)
    worst = 0.0
    for _ in range(500):
        u = haar_group_element(src, Ensemble.COMPLEX).matrix
        worst = max(worst, float(np.max(np.abs(u @ u.conj().T - np.eye(4)))))
    return CheckResult("haar_unitary", worst <= 1e-12, f"max deviation {worst:.2e}")


def check_haar_real() -> CheckResult:
    src = SequenceSource(SequenceKind.SOBOL, 16, VALIDATION_SEED)
    worst = 0.0
    for _ in range(500):
        u = haar_group_element(src, Ensemble.REAL).matrix
        worst = max(worst, abs(float(np.linalg.det(u)) - 1.0))
    return CheckResult("haar_special_orthogonal", worst <= 1e-10, f"max |det - 1| {worst:.2e}")


def check_fixed_c_identity() -> CheckResult:
    worst = 0.0
    for c in (0.1, 0.3, 0.5, 0.7, 0.9):
        src = SequenceSource(SequenceKind.PSEUDO, 2, VALIDATION_SEED)
        lambdas = spectra_with_concurrence(FixedCSlice(c), src, 200)
        worst = max(worst, float(np.max(np.abs(concurrences(lambdas) - c))))
    return CheckResult("fixed_c_identity", worst <= 1e-10, f"max |C - c| {worst:.2e}")


def check_absolute_separability() -> CheckResult:
    src = SequenceSource(SequenceKind.PSEUDO, 8, VALIDATION_SEED)
    lambdas, _, _ = simplex_batch(src, Proposal.UNIFORM, 20_000)
    absolute = lambdas[concurrences(lambdas) <= 0.0][:100]
    haar = SequenceSource(SequenceKind.SOBOL, 32, VALIDATION_SEED)
    counts = count_separable(absolute, haar, Ensemble.COMPLEX, 100)
    entangled = int(absolute.shape[0] * 100 - counts.sum())
    detail = f"{entangled} entangled of {absolute.shape[0] * 100} conjugations"
    return CheckResult("absolute_separability", entangled == 0 and absolute.shape[0] > 0, detail)


def check_normalization_oracles() -> CheckResult:
    expected = {
        MeasureSpec(Metric.HS, beta=2, n=2): (1.0 / 3.0, 1e-10),
        MeasureSpec(Metric.HS, beta=1, n=2): (0.5, 1e-10),
        MeasureSpec(Metric.BURES, beta=2, n=2): (math.pi / 2.0, 1e-8),
    }
    errors = {str(spec): abs(normalization_oracle(spec) - v) for spec, (v, _) in expected.items()}
    passed = all(errors[str(spec)] <= tol for spec, (_, tol) in expected.items())
    return CheckResult("normalization_oracles", passed, f"max error {max(errors.values()):.1e}")


def check_normalization_estimates() -> CheckResult:
    worst = 0.0
    for metric in Metric:
        for beta in (1, 2):
            spec = MeasureSpec(metric, beta=beta, n=2)
            src = SequenceSource(SequenceKind.SOBOL, 4, VALIDATION_SEED)
            estimate = estimate_normalization(spec, Proposal.for_metric(metric), src, 100_000)
            worst = max(worst, abs(estimate.value - normalization_oracle(spec)) / estimate.stderr)
    return CheckResult("normalization_estimates", worst <= 3.0, f"max deviation {worst:.2f} se")


def _random_states(ensemble: Ensemble, n: int) -> list[DensityMatrix]:
    src = SequenceSource(SequenceKind.PSEUDO, ensemble.gaussians_per_element, VALIDATION_SEED)
    lambdas, _, _ = simplex_batch(src, Proposal.UNIFORM, n)
    return [conjugate_spectrum(Spectrum(row), haar_group_element(src, ensemble)) for row in lambdas]
