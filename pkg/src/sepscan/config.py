from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace
from enum import Enum
from typing import Any, Mapping

from .enums import Ensemble, Metric, Proposal, SequenceKind
from .estimator import (
    DEFAULT_BINS,
    DEFAULT_GROUP_SAMPLES,
    DEFAULT_N_LAMBDA,
    DEFAULT_PROB_GROUP_SAMPLES,
    DEFAULT_SPECTRA_PER_BIN,
)
from .exceptions import ConfigurationError
from .jumps import DEFAULT_Z_THRESHOLD
from .sampling import DEFAULT_MAX_REJECTS

SEED_VARIABLE = "SEPSCAN_SEED"

_COUNTS = ("bins", "spectra_per_bin", "group_samples", "n_lambda", "workers", "max_rejects", "smooth")


@dataclass(frozen=True)
class RunConfig:
    """Every knob of a sepscan run. Embedded in each JSON output as a reproducibility record."""

    command: str
    ensemble: Ensemble = Ensemble.COMPLEX
    metric: Metric = Metric.HS
    bins: int = DEFAULT_BINS
    spectra_per_bin: int = DEFAULT_SPECTRA_PER_BIN
    group_samples: int = DEFAULT_GROUP_SAMPLES
    n_lambda: int = DEFAULT_N_LAMBDA
    seed: int = 0
    workers: int = 1
    out: str | None = None
    input: str | None = None
    overlay: str | None = None
    sequence: SequenceKind = SequenceKind.SOBOL
    proposal: Proposal | None = None
    max_rejects: int = DEFAULT_MAX_REJECTS
    z_threshold: float = DEFAULT_Z_THRESHOLD
    standardised: bool = False
    interval: tuple[float, float] | None = None
    excluded: tuple[float, ...] = ()
    plot_out: str | None = None
    c: float | None = None
    smooth: int = 5
    window: tuple[float, float] | None = None
    overlay_scale: float = 1.0
    derivative: bool = False
    offsets: tuple[float, float] = (10.0, -10.0)
    labels: tuple[str, ...] = ()
    quiet: bool = False

    def __post_init__(self) -> None:
        for name in _COUNTS:
            value = getattr(self, name)
            if value < 1:
                flag = name.replace("_", "-")
                raise ConfigurationError(f"--{flag} must be positive. Received {value}.")
        if self.z_threshold <= 0:
            raise ConfigurationError(f"--z-threshold must be positive. Received {self.z_threshold}.")
        if self.interval is not None and not self.interval[1] > self.interval[0]:
            raise ConfigurationError(f"--interval needs A < B. Received {self.interval}.")
        if self.window is not None and not self.window[1] > self.window[0]:
            raise ConfigurationError(f"--window needs A < B. Received {self.window}.")

    def with_env(self, environ: Mapping[str, str] | None = None) -> RunConfig:
        """Applies the SEPSCAN_SEED override, if set.

        Raises:
            ConfigurationError: If the variable is not an integer.
        """
        environ = os.environ if environ is None else environ
        raw = environ.get(SEED_VARIABLE)
        if raw is None or not raw.strip():
            return self
        try:
            seed = int(raw.strip(), 0)
        except ValueError as exc:
            raise ConfigurationError(f"{SEED_VARIABLE} must be an integer. Received {raw!r}.") from exc
        return replace(self, seed=seed)

    def to_dict(self) -> dict[str, Any]:
        """The flat snake_case record of the configuration."""
        record: dict[str, Any] = {}
        for f in fields(self):
            record[f.name] = _plain(getattr(self, f.name))
        return record


def _plain(value: Any) -> Any:
    if isinstance(value, Enum):
        return value.name.lower()
    if isinstance(value, tuple):
        return [_plain(v) for v in value]
    return value
