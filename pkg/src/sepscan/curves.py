from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterator, Protocol

import numpy as np
from scipy import stats  # type: ignore

from .enums import Ensemble
from .exceptions import CurveFormatError, InvalidInputError

HEADER = "c,sigma,n,separable,stderr"
CROSSING_SIGNIFICANCE = 2.0
TRIVIAL_TOL = 1e-12


class __Printer(Protocol):
    def text(self, value: str) -> None:
        ...  # pragma: no cover


@dataclass(frozen=True)
class CurveBin:
    """The separable fraction observed at one value of the maximal concurrence.

    Attributes:
      c_mid (float):
        The bin midpoint in (0, 1).

      n_trials (int):
        The number of conjugated states tested.

      n_separable (int):
        The number of separable verdicts.

      sigma_hat (float):
        The estimate of σ(c), normally n_separable / n_trials.

      stderr (float):
        The binomial standard error √(σ̂(1-σ̂)/n_trials).
    """

    c_mid: float
    n_trials: int
    n_separable: int
    sigma_hat: float
    stderr: float

    def __post_init__(self) -> None:
        if not 0.0 < self.c_mid < 1.0:
            raise InvalidInputError(f"Bin midpoints lie in (0, 1). Received {self.c_mid}.")
        if not 0.0 <= self.sigma_hat <= 1.0:
            raise InvalidInputError(f"σ̂ must lie in [0, 1]. Received {self.sigma_hat}.")
        if not self.stderr >= 0.0:
            raise InvalidInputError(f"Standard errors are nonnegative. Received {self.stderr}.")

    @classmethod
    def from_counts(cls, c_mid: float, n_trials: int, n_separable: int) -> CurveBin:
        """Builds a bin from its verdict counts.

        Args:
            c_mid (float): The bin midpoint.
            n_trials (int): The number of verdicts.
            n_separable (int): The number of separable verdicts.

        Returns:
            CurveBin: The bin.
        """
        if n_trials < 1 or not 0 <= n_separable <= n_trials:
            raise InvalidInputError(f"Invalid counts: {n_separable} separable of {n_trials}.")
        sigma = n_separable / n_trials
        return cls(c_mid, n_trials, n_separable, sigma, math.sqrt(sigma * (1.0 - sigma) / n_trials))

    def to_row(self) -> str:
        counts = f"{self.n_trials},{self.n_separable}"
        return f"{self.c_mid:.17g},{self.sigma_hat:.17g},{counts},{self.stderr:.17g}"


@dataclass(frozen=True)
class SeparabilityCurve:
    """Binned estimates of σ(C) for one ensemble."""

    ensemble: Ensemble | None
    bins: tuple[CurveBin, ...]
    bin_count: int
    seed: int | None = None
    n_spectra: int | None = None
    n_group: int | None = None
    metadata: dict[str, str] = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        if not self.bins:
            raise InvalidInputError("A separability curve needs at least one bin.")
        c = np.array([b.c_mid for b in self.bins])
        if np.any(np.diff(c) <= 0.0):
            raise InvalidInputError("Curve bins must be strictly increasing in c.")

    def __len__(self) -> int:
        return len(self.bins)

    def __iter__(self) -> Iterator[CurveBin]:
        return iter(self.bins)

    @property
    def c(self) -> np.ndarray:
        return np.array([b.c_mid for b in self.bins])

    @property
    def sigma(self) -> np.ndarray:
        return np.array([b.sigma_hat for b in self.bins])

    @property
    def stderr(self) -> np.ndarray:
        return np.array([b.stderr for b in self.bins])

    @property
    def width(self) -> float:
        """The bin spacing."""
        return 1.0 / self.bin_count

    def interpolate(self, c: float | np.ndarray) -> np.ndarray:
        """Linear interpolation of σ̂, anchored at σ(0) = 1 and held flat beyond the last bin.

        Args:
            c (float | np.ndarray): Maximal concurrence values in [0, 1].

        Returns:
            np.ndarray: The interpolated σ̂ values.
        """
        xs = np.concatenate(([0.0], self.c))
        ys = np.concatenate(([1.0], self.sigma))
        values = np.interp(np.asarray(c, dtype=float), xs, ys)
        return np.where(np.asarray(c) <= 0.0, 1.0, values)

    def derivative(self) -> np.ndarray:
        """dσ̂/dC per bin: centred differences inside, one-sided at the ends."""
        if len(self.bins) < 2:
            return np.zeros(len(self.bins))
        return np.gradient(self.sigma, self.c)

    def spearman(self) -> float:
        """The Spearman rank correlation of σ̂ against c."""
        rho, _ = stats.spearmanr(self.c, self.sigma)
        return float(rho)

    def window(self, a: float, b: float) -> SeparabilityCurve:
        """The sub-curve of bins with a ≤ c_mid ≤ b.

        Raises:
            InvalidInputError: If no bin falls inside the window.
        """
        inside = tuple(bin_ for bin_ in self.bins if a <= bin_.c_mid <= b)
        if not inside:
            raise InvalidInputError(f"No bins inside the window [{a}, {b}].")
        return SeparabilityCurve(
            self.ensemble,
            inside,
            self.bin_count,
            self.seed,
            self.n_spectra,
            self.n_group,
            dict(self.metadata),
        )

    def header_lines(self) -> list[str]:
        values: dict[str, Any] = {
            "ensemble": self.ensemble.name.lower() if self.ensemble else None,
            "bin_count": self.bin_count,
            "seed": self.seed,
            "n_spectra": self.n_spectra,
            "n_group": self.n_group,
        }
        values.update({k: v for k, v in self.metadata.items() if k not in values})
        return [f"# {k}={v}" for k, v in values.items() if v is not None]

    def to_csv_string(self, include_metadata: bool = True) -> str:
        lines = self.header_lines() if include_metadata else []
        lines.append(HEADER)
        lines.extend(bin_.to_row() for bin_ in self.bins)
        return "\n".join(lines) + "\n"

    def to_csv(self, path: str, include_metadata: bool = True) -> None:
        self._write_to_file(path, self.to_csv_string(include_metadata))

    @staticmethod
    def _write_to_file(path: str, content: str) -> None:  # pragma: no cover
        with open(path, "w", newline="\n") as f:
            f.write(content)

    @classmethod
    def read_csv(cls, path: str) -> SeparabilityCurve:
        try:
            with open(path, "r") as file:
                raw_content = file.read()
        except OSError as exc:
            raise CurveFormatError(f"Cannot read curve file {path}: {exc.strerror}.") from exc

        return cls.from_csv(raw_content)

    @classmethod
    def from_csv(cls, raw_content: str) -> SeparabilityCurve:
        """Parses the curve CSV format: optional `# key=value` lines, the header, then one row per bin.

        Args:
            raw_content (str): The file contents.

        Raises:
            CurveFormatError: If the header or any row is malformed.

        Returns:
            SeparabilityCurve: The curve.
        """
        metadata: dict[str, str] = {}
        lines = [line.rstrip("\r") for line in raw_content.split("\n") if line.strip()]

        while lines and lines[0].startswith("#"):
            key, sep, value = lines.pop(0).lstrip("#").strip().partition("=")
            if sep:
                metadata[key.strip()] = value.strip()

        if not lines or lines[0].strip() != HEADER:
            found = lines[0] if lines else "nothing"
            raise CurveFormatError(f"Expected the header '{HEADER}' but found {found!r}.")

        bins: list[CurveBin] = []
        for i, line in enumerate(lines[1:], start=2):
            parts = line.split(",")
            if len(parts) != 5:
                raise CurveFormatError(f"Row {i} has {len(parts)} fields, expected 5: {line!r}.")
            try:
                c, sigma, n, separable, stderr = parts
                bins.append(CurveBin(float(c), int(n), int(separable), float(sigma), float(stderr)))
            except ValueError as exc:
                raise CurveFormatError(f"Row {i} is malformed ({exc}): {line!r}.") from exc

        if not bins:
            raise CurveFormatError("The curve file has no bins.")

        try:
            ensemble = Ensemble.from_str(metadata.pop("ensemble")) if "ensemble" in metadata else None
            bin_count = int(metadata.pop("bin_count", len(bins) + 1))
            seed = _optional_int(metadata.pop("seed", None))
            n_spectra = _optional_int(metadata.pop("n_spectra", None))
            n_group = _optional_int(metadata.pop("n_group", None))
            return cls(ensemble, tuple(bins), bin_count, seed, n_spectra, n_group, metadata)
        except ValueError as exc:
            raise CurveFormatError(f"Invalid curve file: {exc}") from exc

    def __repr__(self) -> str:
        ensemble = self.ensemble.name if self.ensemble else "?"
        return f"SeparabilityCurve(ensemble={ensemble}, bins={len(self.bins)}, seed={self.seed})"

    def _repr_pretty_(self, p: __Printer, _: bool) -> None:
        p.text(repr(self))


def find_crossings(
    curve_a: SeparabilityCurve,
    curve_b: SeparabilityCurve,
    smooth: int = 5,
    significance: float = CROSSING_SIGNIFICANCE,
) -> list[float]:
    """Locates the c values where two curves cross.

    The difference σ̂_a - σ̂_b (curve_b interpolated onto curve_a's midpoints) is smoothed by a
    moving average; only bins where it exceeds `significance` standard errors keep a sign,
    and bins where both curves equal 1 are ignored. Each sign change between consecutive
    signed bins is located by linear interpolation.

    Args:
        curve_a (SeparabilityCurve): The first curve.
        curve_b (SeparabilityCurve): The second curve.
        smooth (int, optional): The moving-average window in bins. Defaults to 5.
        significance (float, optional): The threshold in standard errors. Defaults to 2.0.

    Returns:
        list[float]: The crossing locations in increasing order.
    """
    if smooth < 1:
        raise InvalidInputError(f"The smoothing window must be positive. Received {smooth}.")

    c = curve_a.c
    sigma_b = np.interp(c, curve_b.c, curve_b.sigma)
    stderr_b = np.interp(c, curve_b.c, curve_b.stderr)
    diff = curve_a.sigma - sigma_b
    variance = curve_a.stderr**2 + stderr_b**2

    window = np.ones(smooth)
    counts = np.convolve(np.ones_like(diff), window, mode="same")
    smoothed = np.convolve(diff, window, mode="same") / counts
    smoothed_se = np.sqrt(np.convolve(variance, window, mode="same")) / counts

    trivial = (curve_a.sigma >= 1.0 - TRIVIAL_TOL) & (sigma_b >= 1.0 - TRIVIAL_TOL)
    signed = (np.abs(smoothed) > significance * smoothed_se) & ~trivial
    indices = np.flatnonzero(signed)

    crossings: list[float] = []
    for i, j in zip(indices[:-1], indices[1:]):
        if np.sign(smoothed[i]) != np.sign(smoothed[j]):
            t = smoothed[i] / (smoothed[i] - smoothed[j])
            crossings.append(float(c[i] + t * (c[j] - c[i])))
    return crossings


def _optional_int(value: str | None) -> int | None:
    return None if value is None or value == "None" else int(value)
