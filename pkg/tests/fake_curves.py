import math
from typing import Callable, Sequence

import numpy as np

from sepscan.curves import CurveBin, SeparabilityCurve
from sepscan.enums import Ensemble


def curve_from_values(
    c: Sequence[float] | np.ndarray,
    sigma: Sequence[float] | np.ndarray,
    n_trials: int,
    ensemble: Ensemble | None = None,
    bin_count: int | None = None,
) -> SeparabilityCurve:
    """Builds a curve from σ̂ values and a common trial count, rounding to whole verdict counts."""
    bins = tuple(
        CurveBin(
            float(x),
            n_trials,
            int(round(s * n_trials)),
            float(s),
            math.sqrt(max(float(s) * (1.0 - float(s)), 0.0) / n_trials),
        )
        for x, s in zip(c, sigma)
    )
    return SeparabilityCurve(ensemble, bins, bin_count or len(bins) + 1)


def load_test_curve(
    sigma: Callable[[np.ndarray], np.ndarray],
    bin_count: int = 100,
    n_trials: int = 10_000,
    ensemble: Ensemble = Ensemble.COMPLEX,
    noise: float = 0.0,
    seed: int = 0,
) -> SeparabilityCurve:
    c = np.arange(1, bin_count) / bin_count
    values = sigma(c)
    if noise > 0.0:
        values = values + np.random.default_rng(seed).normal(0.0, noise, size=c.size)
    return curve_from_values(c, np.clip(values, 0.0, 1.0), n_trials, ensemble, bin_count)


def load_binomial_curve(
    sigma: Callable[[np.ndarray], np.ndarray],
    bin_count: int = 500,
    n_trials: int = 10_000,
    seed: int = 0,
) -> SeparabilityCurve:
    """Binomial verdict counts around the given σ, as a sampler would report them."""
    c = np.arange(1, bin_count) / bin_count
    counts = np.random.default_rng(seed).binomial(n_trials, np.clip(sigma(c), 0.0, 1.0))
    return curve_from_values(c, counts / n_trials, n_trials, Ensemble.COMPLEX, bin_count)


def load_step_curve(bin_count: int = 100, noise: float = 0.002) -> SeparabilityCurve:
    """A sloped curve that halves at C = 1/2."""

    def sigma(c: np.ndarray) -> np.ndarray:
        line = 0.8 - 0.4 * c
        return np.where(c < 0.5, line, 0.5 * line)

    return load_test_curve(sigma, bin_count, noise=noise)
