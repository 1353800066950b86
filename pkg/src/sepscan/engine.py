from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from typing import Any

from .config import RunConfig
from .curves import SeparabilityCurve, find_crossings
from .estimator import (
    absolute_separability_probability,
    absolute_separability_target,
    ansatz_dispersion,
    curve_based_probability,
    estimate_curve,
    separability_probability,
    separability_target,
)
from .exceptions import ConfigurationError
from .fitting import fit_segment
from .jumps import detect_jumps
from .measures import Estimate, MeasureSpec
from .plotting import plot_curves
from .views import CurveReporter, EstimateReporter

Payload = dict[str, Any]


@dataclass
class Engine:
    """Runs one sepscan command from a RunConfig and returns its JSON payload."""

    config: RunConfig
    curve_reporter: CurveReporter
    estimate_reporter: EstimateReporter

    @property
    def spec(self) -> MeasureSpec:
        return MeasureSpec(self.config.metric, beta=self.config.ensemble.beta)

    def curve(self) -> SeparabilityCurve:
        """Estimates a σ(C) curve, writes it as CSV plus an SVG chart next to it."""
        config = self.config
        curve = estimate_curve(
            config.ensemble,
            config.bins,
            config.spectra_per_bin,
            config.group_samples,
            config.seed,
            kind=config.sequence,
            workers=config.workers,
            progress=not config.quiet,
            max_rejects=config.max_rejects,
        )
        self.curve_reporter.display(curve)

        if config.out:
            curve.to_csv(config.out)
            plot_curves([curve], svg_path(config.out))
        return curve

    def probability(self) -> Payload:
        config = self.config
        spec = self.spec
        estimate = separability_probability(
            spec,
            config.ensemble,
            config.n_lambda,
            config.group_samples,
            config.seed,
            kind=config.sequence,
            proposal=config.proposal,
            workers=config.workers,
            progress=not config.quiet,
        )
        return self._estimate_payload(f"P_sep {spec}", estimate, separability_target(spec))

    def curve_probability(self) -> Payload:
        config = self.config
        curve = self.read_curve(config.input)
        spec = self.spec
        if curve.ensemble is not None:
            spec = MeasureSpec(config.metric, beta=curve.ensemble.beta)
        estimate = curve_based_probability(
            curve, spec, config.n_lambda, config.seed, kind=config.sequence, proposal=config.proposal
        )
        return self._estimate_payload(f"P_sep(curve) {spec}", estimate, separability_target(spec))

    def absolute_probability(self) -> Payload:
        config = self.config
        spec = self.spec
        estimate = absolute_separability_probability(
            spec, config.n_lambda, config.seed, kind=config.sequence, proposal=config.proposal
        )
        return self._estimate_payload(f"P_absep {spec}", estimate, absolute_separability_target(spec))

    def jumps(self) -> Payload:
        curve = self.read_curve(self.config.input)
        report = detect_jumps(curve, self.config.z_threshold, standardised=self.config.standardised)
        return self._payload(report.to_dict())

    def fit(self) -> Payload:
        config = self.config
        if config.interval is None:
            raise ConfigurationError("fit needs --interval A B.")
        curve = self.read_curve(config.input)
        result = fit_segment(curve, config.interval[0], config.interval[1], config.excluded)
        if config.plot_out:
            plot_curves([curve], config.plot_out, window=config.interval, fits=[result])
        return self._payload(result.to_dict())

    def crossings(self) -> Payload:
        config = self.config
        curve_a = self.read_curve(config.input)
        curve_b = self.read_curve(config.overlay, flag="--overlay")
        crossings = find_crossings(curve_a, curve_b, smooth=config.smooth)
        return self._payload({"crossings": crossings})

    def dispersion(self) -> Payload:
        config = self.config
        if config.c is None:
            raise ConfigurationError("dispersion needs --c.")
        result = ansatz_dispersion(
            config.ensemble,
            config.c,
            config.spectra_per_bin,
            config.group_samples,
            config.seed,
            kind=config.sequence,
            max_rejects=config.max_rejects,
        )
        return self._payload(
            {
                "mean": result.mean,
                "between_variance": result.between_variance,
                "binomial_variance": result.binomial_variance,
                "excess_ratio": result.excess_ratio,
            }
        )

    def plot(self) -> None:
        config = self.config
        if not config.out:
            raise ConfigurationError("plot needs --out.")
        curves = [self.read_curve(config.input)]
        if config.overlay:
            curves.append(self.read_curve(config.overlay, flag="--overlay"))
        plot_curves(
            curves,
            config.out,
            labels=config.labels or None,
            derivative=config.derivative,
            offsets=config.offsets if config.derivative else None,
            window=config.window,
            overlay_scale=config.overlay_scale,
        )

    @staticmethod
    def read_curve(path: str | None, flag: str = "--in") -> SeparabilityCurve:
        if not path:
            raise ConfigurationError(f"This command needs {flag} CURVE.csv.")
        return SeparabilityCurve.read_csv(path)

    def _estimate_payload(self, label: str, estimate: Estimate, target: float | None) -> Payload:
        self.estimate_reporter.display(label, estimate, target)
        return self._payload(
            {
                "estimate": estimate.value,
                "stderr": estimate.stderr,
                "target": target,
                "deviation": None if target is None else estimate.value - target,
            }
        )

    def _payload(self, result: Payload) -> Payload:
        payload = self.config.to_dict()
        payload.update(result)
        return payload


def svg_path(csv_path: str) -> str:
    root, _ = os.path.splitext(csv_path)
    return root + ".svg"


def to_json(payload: Payload) -> str:
    """Strict JSON: infinities and NaNs are written as null."""
    return json.dumps(_finite(payload), indent=2, allow_nan=False)


def _finite(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _finite(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_finite(v) for v in value]
    return value
