class SepscanError(Exception):
    ...


class ConfigurationError(SepscanError):
    ...


class InvalidInputError(ConfigurationError, ValueError):
    ...


class CurveFormatError(ConfigurationError):
    ...


class NumericalError(SepscanError):
    ...


class InfeasibleSliceError(NumericalError):
    def __init__(self, c: float, attempts: int) -> None:
        self.c = c
        self.attempts = attempts
        message = f"No spectrum with maximal concurrence C={c} found after {attempts:,} attempts."
        super().__init__(message)


class SingularWeightError(NumericalError):
    ...
