from typing import Optional


class DomainException(Exception):
    pass


class InvalidSchemeError(DomainException):
    pass


class InvalidPolynomialError(DomainException):
    pass


class DimensionMismatchError(DomainException):
    pass


class InfeasibleCoefficientsError(DomainException):
    pass


class CoarseningError(DomainException):
    pass


class InsufficientDataError(DomainException):
    pass


class PhaseAnalysisError(DomainException):
    pass


class DegenerateFitError(DomainException):
    pass


class UnsupportedPdeError(DomainException):
    pass


class ArtifactNotFoundError(DomainException):
    pass


class NonFiniteValueError(DomainException):
    pass


class IntegrationError(DomainException):
    def __init__(
        self,
        message: str,
        time: Optional[float] = None,
        step: Optional[int] = None
    ):
        super().__init__(message)
        self.time = time
        self.step = step


class RetryLimitExceededError(DomainException):
    def __init__(self, message: str, attempts: int, violations: dict):
        super().__init__(message)
        self.attempts = attempts
        self.violations = violations
