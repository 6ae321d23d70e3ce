import math
from typing import List, Protocol

import numpy as np

from domain.entities import SchemeCoefficients


class CoefficientProvider(Protocol):
    k: int

    def coefficients(self, state: np.ndarray, step: int) -> SchemeCoefficients:
        ...


class FixedCoefficientProvider:
    def __init__(self, coeffs: SchemeCoefficients):
        if not all(math.isfinite(v) for v in coeffs.alpha + coeffs.beta):
            raise ValueError("Scheme coefficients must be finite")
        self.coeffs = coeffs
        self.k = coeffs.k

    def coefficients(self, state: np.ndarray, step: int) -> SchemeCoefficients:
        return self.coeffs


class RecordingCoefficientProvider:
    """Wraps a provider and keeps every coefficient set it hands out."""

    def __init__(self, inner: CoefficientProvider):
        self.inner = inner
        self.k = inner.k
        self.history: List[SchemeCoefficients] = []

    def coefficients(self, state: np.ndarray, step: int) -> SchemeCoefficients:
        coeffs = self.inner.coefficients(state, step)
        self.history.append(coeffs)
        return coeffs
