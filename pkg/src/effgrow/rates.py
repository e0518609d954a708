"""Division-rate and growth-shape families used by the solvers.

The per-size division rate belongs to the power family
beta(x) = coefficient * x**(exponent - 1) with exponent >= 1; exponent 1 is
a constant rate. The family is integrable at 0 and x*beta(x) diverges, the
balance needed for a steady shape to exist.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class PowerLawRate:
    coefficient: float = 1.0
    exponent: float = 1.0

    def __post_init__(self):
        if self.coefficient <= 0:
            raise DomainError(f"rate coefficient must be positive, got {self.coefficient}")
        if self.exponent < 1:
            raise DomainError(f"rate exponent must be >= 1, got {self.exponent}")

    def __call__(self, x):
        if self.exponent == 1.0:
            return np.full_like(np.asarray(x, dtype=float), self.coefficient)
        return self.coefficient * np.asarray(x, dtype=float) ** (self.exponent - 1.0)

    def cumulative(self, x):
        """Exact primitive of the rate vanishing at 0."""
        return self.coefficient * np.asarray(x, dtype=float) ** self.exponent / self.exponent

    @property
    def is_constant(self) -> bool:
        return self.exponent == 1.0

    def describe(self) -> str:
        if self.is_constant:
            return f"const:{self.coefficient:.17g}"
        return f"pow:{self.coefficient:.17g}*x^{self.exponent - 1.0:.17g}"


def constant_rate(beta: float) -> PowerLawRate:
    return PowerLawRate(coefficient=beta, exponent=1.0)


def parse_rate_spec(spec) -> PowerLawRate:
    """Parse 'pow:N' (rate x**(N-1)) or a number (constant rate)."""
    if isinstance(spec, PowerLawRate):
        return spec
    text = str(spec).strip()
    if text.startswith("pow:"):
        return PowerLawRate(1.0, float(text[4:]))
    return constant_rate(float(text))
