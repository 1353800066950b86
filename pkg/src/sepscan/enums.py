from __future__ import annotations

from enum import Enum
from typing import Type, TypeVar

TEnum = TypeVar("TEnum", bound=Enum)


def _parse(enum_type: Type[TEnum], value: str, aliases: dict[str, TEnum]) -> TEnum:
    key = value.strip().upper().replace("-", "_")
    if key in aliases:
        return aliases[key]
    for member in enum_type:
        if member.name == key:
            return member
    supported = ", ".join(e.name for e in enum_type)
    message = f"{value} not a supported {enum_type.__name__}. Supported values are {supported}."
    raise ValueError(message)


class Ensemble(Enum):
    """Enum representing the two-qubit ensembles (real symmetric or complex Hermitian)."""

    REAL = "REAL"
    COMPLEX = "COMPLEX"

    @property
    def beta(self) -> int:
        """The Dyson index of the ensemble.

        Returns:
            int: 1 for the real ensemble, 2 for the complex ensemble.
        """
        return 1 if self is Ensemble.REAL else 2

    @property
    def gaussians_per_element(self) -> int:
        """The number of standard Gaussians needed to fill one 4x4 Ginibre matrix."""
        return 16 if self is Ensemble.REAL else 32

    @staticmethod
    def from_beta(beta: int) -> Ensemble:
        if beta == 1:
            return Ensemble.REAL
        if beta == 2:
            return Ensemble.COMPLEX
        raise ValueError(f"Dyson index {beta} not supported. Supported indices are 1 and 2.")

    @staticmethod
    def from_str(value: str) -> Ensemble:
        """Converts a string to its enum representation.

        Args:
            value (str): The string, e.g. "real", "complex", "1" or "2".

        Raises:
            ValueError: If the string is not recognised.

        Returns:
            Ensemble: The enum
        """
        aliases = {"1": Ensemble.REAL, "2": Ensemble.COMPLEX}
        return _parse(Ensemble, value, aliases)


class Metric(Enum):
    """Enum representing the supported volume measures on the density matrices."""

    HS = "HS"
    BURES = "BURES"

    @staticmethod
    def from_str(value: str) -> Metric:
        """Converts a string to its enum representation.

        Args:
            value (str): The string, e.g. "hs", "hilbert-schmidt" or "bures".

        Raises:
            ValueError: If the string is not recognised.

        Returns:
            Metric: The enum
        """
        return _parse(Metric, value, {"HILBERT_SCHMIDT": Metric.HS})


class SequenceKind(Enum):
    """Enum representing the supported point sequences driving the Monte Carlo."""

    SOBOL = "SOBOL"
    PSEUDO = "PSEUDO"

    @staticmethod
    def from_str(value: str) -> SequenceKind:
        aliases = {
            "QMC": SequenceKind.SOBOL,
            "LOW_DISCREPANCY": SequenceKind.SOBOL,
            "MC": SequenceKind.PSEUDO,
        }
        return _parse(SequenceKind, value, aliases)


class Proposal(Enum):
    """Enum representing the simplex proposal distributions."""

    UNIFORM = "UNIFORM"
    BURES_ADAPTED = "BURES_ADAPTED"

    @staticmethod
    def for_metric(metric: Metric) -> Proposal:
        """The proposal matched to a metric's boundary behaviour.

        Args:
            metric (Metric): The metric.

        Returns:
            Proposal: UNIFORM for HS and BURES_ADAPTED for Bures.
        """
        return Proposal.UNIFORM if metric is Metric.HS else Proposal.BURES_ADAPTED

    @staticmethod
    def from_str(value: str) -> Proposal:
        return _parse(Proposal, value, {"BURES": Proposal.BURES_ADAPTED})
