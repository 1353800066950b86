from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Any, Sequence

import numpy as np

from .curves import SeparabilityCurve
from .exceptions import InvalidInputError

MIN_FIT_BINS = 5
EDGE_TOL = 1e-12


@dataclass(frozen=True)
class LinearFit:
    """σ̂(C) ≈ intercept + slope·C on [a, b], fitted with inverse-variance weights."""

    a: float
    b: float
    intercept: float
    slope: float
    rms_residual: float
    excluded_bins: tuple[float, ...]
    n_bins: int
    intercept_stderr: float
    slope_stderr: float

    def predict(self, c: float | np.ndarray) -> np.ndarray:
        return self.intercept + self.slope * np.asarray(c, dtype=float)

    def to_dict(self) -> dict[str, Any]:
        values = asdict(self)
        values["excluded_bins"] = list(self.excluded_bins)
        return values


def fit_segment(
    curve: SeparabilityCurve, a: float, b: float, excluded: Sequence[float] = ()
) -> LinearFit:
    """Weighted least-squares line through the bins of a curve segment.

    Bins within half a bin width of an excluded c are dropped. Weights are 1/stderr²; bins
    with zero stderr get the smallest positive stderr of the segment, and a segment without
    any positive stderr is fitted unweighted with residual-scaled parameter errors.

    Args:
        curve (SeparabilityCurve): The curve.
        a (float): The lower end of the interval.
        b (float): The upper end of the interval.
        excluded (Sequence[float], optional): c values (spikes) to leave out. Defaults to ().

    Raises:
        InvalidInputError: If b ≤ a or fewer than five bins remain.

    Returns:
        LinearFit: The fitted line.
    """
    if not b > a:
        raise InvalidInputError(f"The fit interval needs b > a. Received [{a}, {b}].")

    c = curve.c
    sigma = curve.sigma
    stderr = curve.stderr

    inside = (c >= a - EDGE_TOL) & (c <= b + EDGE_TOL)
    dropped = np.zeros_like(inside)
    for value in excluded:
        dropped |= np.abs(c - value) <= 0.5 * curve.width + EDGE_TOL
    usable = inside & ~dropped

    n = int(usable.sum())
    if n < MIN_FIT_BINS:
        message = f"A segment fit needs at least {MIN_FIT_BINS} bins in [{a}, {b}]. Found {n}."
        raise InvalidInputError(message)

    x, y, se = c[usable], sigma[usable], stderr[usable]
    positive = se[se > 0.0]
    inverse_variance = positive.size > 0
    if inverse_variance:
        weights = 1.0 / np.maximum(se, positive.min()) ** 2
    else:
        weights = np.ones(n)

    design = np.column_stack([np.ones(n), x])
    root_w = np.sqrt(weights)
    (intercept, slope), *_ = np.linalg.lstsq(design * root_w[:, None], y * root_w, rcond=None)

    residuals = y - (intercept + slope * x)
    chi2 = float(np.sum(weights * residuals**2))
    covariance = np.linalg.inv(design.T @ (design * weights[:, None]))
    if not inverse_variance:
        covariance *= chi2 / (n - 2)

    return LinearFit(
        a=a,
        b=b,
        intercept=float(intercept),
        slope=float(slope),
        rms_residual=math.sqrt(chi2 / weights.sum()),
        excluded_bins=tuple(float(v) for v in c[inside & dropped]),
        n_bins=n,
        intercept_stderr=math.sqrt(covariance[0, 0]),
        slope_stderr=math.sqrt(covariance[1, 1]),
    )
