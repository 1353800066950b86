from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Iterator

import numpy as np

from .curves import SeparabilityCurve
from .exceptions import InvalidInputError

MIN_BINS = 50
MAD_SCALE = 1.4826
DEFAULT_Z_THRESHOLD = 6.0
SIDE_BINS = 5


@dataclass(frozen=True)
class Jump:
    """A discontinuity candidate between two adjacent bins.

    Attributes:
      c_location (float):
        The midpoint of the first bin to the right of the flagged difference.

      robust_z (float):
        The robust z-score of the flagged first difference.

      left_mean (float):
        The mean σ̂ over up to five bins ending at the jump.

      right_mean (float):
        The mean σ̂ over up to five bins starting at the jump.
    """

    c_location: float
    robust_z: float
    left_mean: float
    right_mean: float

    @property
    def magnitude(self) -> float:
        """|left - right| relative to the smaller side."""
        smaller = min(self.left_mean, self.right_mean)
        if smaller <= 0.0:
            return math.inf
        return abs(self.left_mean - self.right_mean) / smaller

    @property
    def relative_drop(self) -> float:
        """(left - right) / left."""
        if self.left_mean == 0.0:
            return math.nan
        return (self.left_mean - self.right_mean) / self.left_mean


@dataclass(frozen=True)
class JumpReport:
    jumps: tuple[Jump, ...]
    threshold: float
    standardised: bool = False

    def __len__(self) -> int:
        return len(self.jumps)

    def __iter__(self) -> Iterator[Jump]:
        return iter(self.jumps)

    def near(self, c: float, tolerance: float) -> Jump | None:
        """The strongest reported jump within `tolerance` of c, if any."""
        close = [jump for jump in self.jumps if abs(jump.c_location - c) <= tolerance]
        return max(close, key=lambda jump: abs(jump.robust_z)) if close else None

    def to_dict(self) -> dict[str, Any]:
        """Flat record: one list per jump attribute, in increasing c."""
        return {
            "threshold": self.threshold,
            "standardised": self.standardised,
            "n_jumps": len(self.jumps),
            "c_locations": [jump.c_location for jump in self.jumps],
            "robust_z": [jump.robust_z for jump in self.jumps],
            "left_means": [jump.left_mean for jump in self.jumps],
            "right_means": [jump.right_mean for jump in self.jumps],
            "magnitudes": [jump.magnitude for jump in self.jumps],
            "relative_drops": [jump.relative_drop for jump in self.jumps],
        }


def detect_jumps(
    curve: SeparabilityCurve,
    z_threshold: float = DEFAULT_Z_THRESHOLD,
    side_bins: int = SIDE_BINS,
    *,
    standardised: bool = False,
) -> JumpReport:
    """Flags discontinuities of σ̂ with robust z-scores of its first differences.

    With d_k = σ̂_{k+1} - σ̂_k, z_k = (d_k - median(d)) / (1.4826·MAD(d)). Every run of
    consecutive bins with |z| ≥ z_threshold is reported once, at its largest |z|. A zero MAD
    falls back to the standard deviation of d; a flat curve reports nothing.

    Args:
      curve (SeparabilityCurve):
        The curve, with at least 50 bins.

      z_threshold (float, optional):
        The flagging threshold. Defaults to 6.

      side_bins (int, optional):
        Bins averaged on each side of a jump. Defaults to 5.

      standardised (bool, optional):
        Divides every d_k by √(se_k² + se_{k+1}²) before scoring, so steep but smooth
        stretches with large binomial noise are not flagged. Differences with zero standard
        error use the smallest positive one. Defaults to False.

    Raises:
        InvalidInputError: If the curve has fewer than 50 bins.

    Returns:
        JumpReport: The jumps in increasing c.
    """
    if len(curve) < MIN_BINS:
        raise InvalidInputError(f"Jump detection needs at least {MIN_BINS} bins. Received {len(curve)}.")

    sigma = curve.sigma
    c = curve.c
    d = np.diff(sigma)
    if standardised:
        d = d / _difference_stderr(curve.stderr)

    centre = np.median(d)
    scale = MAD_SCALE * np.median(np.abs(d - centre))
    if scale == 0.0:
        scale = float(np.std(d))
    if scale == 0.0:
        return JumpReport((), z_threshold, standardised)

    z = (d - centre) / scale
    flagged = np.abs(z) >= z_threshold

    jumps: list[Jump] = []
    for start, stop in _runs(flagged):
        i = start + int(np.argmax(np.abs(z[start:stop])))
        left = sigma[max(0, i + 1 - side_bins) : i + 1]
        right = sigma[i + 1 : i + 1 + side_bins]
        jumps.append(Jump(float(c[i + 1]), float(z[i]), float(left.mean()), float(right.mean())))

    return JumpReport(tuple(jumps), z_threshold, standardised)


def _difference_stderr(stderr: np.ndarray) -> np.ndarray:
    se = np.sqrt(stderr[:-1] ** 2 + stderr[1:] ** 2)
    positive = se[se > 0.0]
    if positive.size == 0:
        return np.ones_like(se)
    return np.where(se > 0.0, se, positive.min())


def _runs(mask: np.ndarray) -> list[tuple[int, int]]:
    """[start, stop) index pairs of the runs of True in a boolean array."""
    padded = np.concatenate(([False], mask, [False])).astype(np.int8)
    edges = np.flatnonzero(np.diff(padded))
    return [(int(a), int(b)) for a, b in zip(edges[::2], edges[1::2])]
