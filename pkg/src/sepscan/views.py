from __future__ import annotations

import sys
from dataclasses import dataclass
from typing import TextIO

import colorama
from colorama import Fore, Style

from .curves import SeparabilityCurve
from .measures import Estimate

colorama.init()


@dataclass(frozen=True)
class CheckResult:
    """The outcome of one validation check."""

    name: str
    passed: bool
    detail: str = ""


class CurvePrinter:
    def build_string(self, curve: SeparabilityCurve, rows: int = 10) -> str:
        sigma = curve.sigma
        ensemble = curve.ensemble.name.lower() if curve.ensemble else "unknown"

        stats = f"""
Ensemble:  {ensemble}
Bins:      {len(curve):,}
Seed:      {curve.seed}
Verdicts:  {sum(b.n_trials for b in curve.bins):,}
σ range:   {sigma.min():.4f} .. {sigma.max():.4f}
Spearman:  {curve.spearman():.4f}
        """

        step = max(1, len(curve) // rows)
        lines = ["     c      σ̂       stderr"]
        for bin_ in curve.bins[::step]:
            lines.append(f"{bin_.c_mid:6.3f}  {bin_.sigma_hat:.5f}  {bin_.stderr:.5f}")

        return stats.strip() + "\n\n" + "\n".join(lines)


class CurveReporter:
    """Displays a summary of an estimated curve."""

    def __init__(self, stream: TextIO | None = None) -> None:
        self.stream = stream

    def display(self, curve: SeparabilityCurve) -> None:
        printer = CurvePrinter()
        print(printer.build_string(curve), file=self.stream or sys.stderr)


class NullCurveReporter(CurveReporter):
    """Null implementation of a CurveReporter"""

    def display(self, _: SeparabilityCurve) -> None:
        """Does nothing"""
        pass


class EstimateReporter:
    """Displays a probability estimate next to its reference value."""

    def __init__(self, stream: TextIO | None = None) -> None:
        self.stream = stream

    def display(self, label: str, estimate: Estimate, target: float | None = None) -> None:
        message = f"{label}: {estimate.value:.6f} ± {estimate.stderr:.6f}"
        if target is not None:
            sigmas = (estimate.value - target) / estimate.stderr if estimate.stderr > 0 else float("nan")
            message += f"  (reference {target:.6f}, {sigmas:+.2f} se)"
        print(message, file=self.stream or sys.stderr)


class NullEstimateReporter(EstimateReporter):
    """Null implementation of an EstimateReporter"""

    def display(self, _: str, __: Estimate, ___: float | None = None) -> None:
        """Does nothing"""
        pass


class ValidationReporter:
    """Prints one coloured PASS/FAIL line per check."""

    def __init__(self, stream: TextIO | None = None) -> None:
        self.stream = stream

    def display(self, result: CheckResult) -> None:
        if result.passed:
            status = f"{Fore.GREEN}PASS{Style.RESET_ALL}"
        else:
            status = f"{Fore.RED}FAIL{Style.RESET_ALL}"
        detail = f"  {result.detail}" if result.detail else ""
        print(f"[{status}] {result.name}{detail}", file=self.stream or sys.stdout)

    def summarise(self, results: list[CheckResult]) -> None:
        failures = sum(not r.passed for r in results)
        colour = Fore.RED if failures else Fore.GREEN
        message = f"{len(results) - failures}/{len(results)} checks passed"
        print(f"{colour}{message}{Style.RESET_ALL}", file=self.stream or sys.stdout)


class NullValidationReporter(ValidationReporter):
    """Null implementation of a ValidationReporter"""

    def display(self, _: CheckResult) -> None:
        """Does nothing"""
        pass

    def summarise(self, _: list[CheckResult]) -> None:
        """Does nothing"""
        pass
