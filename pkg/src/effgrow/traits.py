"""Trait sets (growth-rate multipliers) and their classical means.

A trait set holds the ordered multipliers v_1 < ... < v_M applied to the
common growth shape. Sweep construction pins a mean (arithmetic, geometric
or harmonic) to a target value while the range v_M - v_1 spans a requested
spread, using closed-form endpoints rather than root finding.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


class MeanKind(enum.Enum):
    ARITHMETIC = "arithmetic"
    GEOMETRIC = "geometric"
    HARMONIC = "harmonic"


@dataclass(frozen=True)
class TraitSet:
    """Strictly increasing, strictly positive growth-rate multipliers."""

    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) == 0:
            raise DomainError("trait set must be nonempty")
        if any(v <= 0 for v in self.values):
            raise DomainError(f"traits must be strictly positive, got {self.values}")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise DomainError(
                f"traits must be strictly increasing (equal traits collapse "
                f"to a smaller set), got {self.values}")

    @property
    def M(self) -> int:
        return len(self.values)

    @property
    def v_min(self) -> float:
        return self.values[0]

    @property
    def v_max(self) -> float:
        return self.values[-1]

    @property
    def range(self) -> float:
        return self.values[-1] - self.values[0]

    def array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    @staticmethod
    def of(*values: float) -> "TraitSet":
        return TraitSet(tuple(float(v) for v in values))


def mean(traits: TraitSet, kind: MeanKind) -> float:
    """Arithmetic, geometric or harmonic mean of the traits.

    For every trait set the values are ordered
    harmonic <= geometric <= arithmetic, with equality iff all traits agree.
    """
    v = traits.array()
    if kind is MeanKind.ARITHMETIC:
        return float(v.mean())
    if kind is MeanKind.GEOMETRIC:
        return float(math.exp(np.log(v).mean()))
    if kind is MeanKind.HARMONIC:
        return float(1.0 / (1.0 / v).mean())
    raise DomainError(f"unknown mean kind {kind!r}")


def _endpoints(sigma: float, vbar: float, kind: MeanKind) -> tuple[float, float]:
    """Closed-form endpoints a < b with b - a = sigma and m(endpoints) = vbar.

    Because each construction spaces the pinned coordinate (v, log v, or 1/v)
    evenly, the mean over all M points reduces to the midpoint of the
    endpoints, so pinning the endpoints pins the mean for every M.
    """
    if kind is MeanKind.ARITHMETIC:
        a = vbar - sigma / 2.0
        if a <= 0:
            raise DomainError(
                f"arithmetic spread requires sigma < 2*vbar = {2 * vbar}, got {sigma}")
        return a, vbar + sigma / 2.0
    if kind is MeanKind.GEOMETRIC:
        # b - a = sigma, a*b = vbar^2
        b = (sigma + math.sqrt(sigma * sigma + 4.0 * vbar * vbar)) / 2.0
        return vbar * vbar / b, b
    if kind is MeanKind.HARMONIC:
        # b - a = sigma, 2ab/(a+b) = vbar  =>  a+b = vbar + sqrt(vbar^2+sigma^2)
        s = vbar + math.sqrt(vbar * vbar + sigma * sigma)
        return (s - sigma) / 2.0, (s + sigma) / 2.0
    raise DomainError(f"unknown mean kind {kind!r}")


def make_trait_set(M: int, sigma: float, vbar: float, kind: MeanKind) -> TraitSet:
    """Build M traits with range sigma and the requested mean pinned to vbar.

    Spacing is even in v (arithmetic), in log v (geometric) or in 1/v
    (harmonic). sigma = 0 denotes a homogeneous population and collapses to
    the single-trait set (vbar,) regardless of M.
    """
    if M < 1:
        raise DomainError(f"M must be >= 1, got {M}")
    if sigma < 0:
        raise DomainError(f"sigma must be nonnegative, got {sigma}")
    if vbar <= 0:
        raise DomainError(f"vbar must be positive, got {vbar}")
    if sigma == 0:
        return TraitSet((float(vbar),))
    if M == 1:
        raise DomainError("a single trait cannot span a positive range")
    a, b = _endpoints(sigma, vbar, kind)
    if kind is MeanKind.ARITHMETIC:
        vals = np.linspace(a, b, M)
    elif kind is MeanKind.GEOMETRIC:
        vals = np.exp(np.linspace(math.log(a), math.log(b), M))
    else:
        vals = 1.0 / np.linspace(1.0 / a, 1.0 / b, M)
    # pin the endpoints exactly; interior points carry only rounding noise
    vals[0], vals[-1] = a, b
    return TraitSet(tuple(float(v) for v in vals))
