from __future__ import annotations

from .config import RunConfig
from .engine import Engine
from .validation import Validator
from .views import (
    CurveReporter,
    EstimateReporter,
    NullCurveReporter,
    NullEstimateReporter,
    NullValidationReporter,
    ValidationReporter,
)


def create_engine(
    config: RunConfig,
    *,
    curve_reporter: CurveReporter | None = None,
    estimate_reporter: EstimateReporter | None = None,
) -> Engine:

    if config.quiet:
        curve_reporter = curve_reporter or NullCurveReporter()
        estimate_reporter = estimate_reporter or NullEstimateReporter()

    curve_reporter = curve_reporter or CurveReporter()
    estimate_reporter = estimate_reporter or EstimateReporter()
    return Engine(config, curve_reporter, estimate_reporter)


def create_validator(config: RunConfig, *, reporter: ValidationReporter | None = None) -> Validator:

    if reporter is None:
        reporter = NullValidationReporter() if config.quiet else ValidationReporter()

    return Validator(reporter, workers=max(2, config.workers))
