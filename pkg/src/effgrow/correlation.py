"""Mother-daughter Pearson correlation for the alpha-family kernel.

The conditional law behind the kernel is: with probability alpha the
daughter keeps the mother's trait; otherwise she draws uniformly among the
other M-1 traits. Writing V_m for the mother trait, W_m for that excluded
uniform draw and B ~ Bernoulli(alpha),

    V_d = B V_m + (1 - B) W_m,

which gives closed-form moments and hence the exact correlation for any
mother law. For the uniform mother law the correlation is linear in alpha:
(alpha M - 1)/(M - 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .traits import TraitSet

_UNIFORM_CHECK_TOL = 1e-12


@dataclass(frozen=True)
class CorrelationReport:
    gamma: float
    alpha: float
    M: int
    mother_law: tuple[float, ...]
    var_mother: float
    var_daughter: float
    cov: float

    def __post_init__(self):
        if not -1.0 - 1e-12 <= self.gamma <= 1.0 + 1e-12:
            raise DomainError(f"correlation out of [-1, 1]: {self.gamma}")
        law = np.asarray(self.mother_law)
        if np.abs(law - 1.0 / self.M).max() <= _UNIFORM_CHECK_TOL:
            closed = (self.alpha * self.M - 1.0) / (self.M - 1.0)
            if abs(self.gamma - closed) > 1e-12:
                raise DomainError(
                    f"uniform mother law must give gamma {closed}, got {self.gamma}")


def gamma_uniform_law(M: int, alpha: float) -> float:
    """Correlation under the uniform mother law: (alpha*M - 1)/(M - 1)."""
    if M < 2:
        raise DomainError(f"correlation needs M >= 2, got {M}")
    return (alpha * M - 1.0) / (M - 1.0)


def pearson_correlation_alpha(M: int, alpha: float, mother_law,
                              traits: TraitSet) -> CorrelationReport:
    """Exact mother-daughter correlation for the alpha-family kernel.

    mother_law is the distribution of the mother's trait over `traits`.
    Raises for a degenerate law (a single atom), whose correlation is
    undefined.
    """
    if M < 2:
        raise DomainError(f"correlation needs M >= 2, got {M}")
    if traits.M != M:
        raise DomainError(f"trait count {traits.M} != M = {M}")
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    law = np.asarray(mother_law, dtype=float)
    if law.shape != (M,) or (law < 0).any() or abs(law.sum() - 1.0) > 1e-12:
        raise DomainError(f"mother_law must be a probability vector of length {M}")

    # the correlation is invariant under a common shift of the traits;
    # centering avoids cancellation in the moment differences below
    v = traits.array()
    v = v - v.mean()
    e_vm = float(law @ v)
    e_vm2 = float(law @ v**2)
    var_vm = e_vm2 - e_vm**2
    if var_vm <= 0.0:
        raise DomainError("degenerate mother law: correlation undefined (zero variance)")

    # Moments of the excluded uniform draw W_m:
    #   E[W_m^k V_m^l] = R (M E[U^k] E[V_m^l] - E[V_m^(k+l)]),  R = 1/(M-1),
    # with U uniform over all traits.
    R = 1.0 / (M - 1.0)
    e_u = float(v.mean())
    e_u2 = float((v**2).mean())
    e_wm = R * (M * e_u - e_vm)
    e_wm2 = R * (M * e_u2 - e_vm2)
    var_wm = e_wm2 - e_wm**2
    delta = e_wm - e_vm

    cov = (alpha * M - 1.0) * R * var_vm
    var_vd = alpha * var_vm + (1.0 - alpha) * var_wm + alpha * (1.0 - alpha) * delta**2
    gamma = cov / math.sqrt(var_vd * var_vm)
    return CorrelationReport(gamma, alpha, M, tuple(float(p) for p in law),
                             var_vm, var_vd, cov)


def sample_mother_daughter(M: int, alpha: float, mother_law, traits: TraitSet,
                           n: int, rng: np.random.Generator
                           ) -> tuple[np.ndarray, np.ndarray]:
    """Draw n (mother, daughter) trait pairs from the conditional law.

    Monte-Carlo companion used to cross-check the closed forms.
    """
    v = traits.array()
    law = np.asarray(mother_law, dtype=float)
    mother_idx = rng.choice(M, size=n, p=law)
    keep = rng.random(n) < alpha
    other = rng.integers(0, M - 1, size=n)
    other = other + (other >= mother_idx)  # skip the mother's index
    daughter_idx = np.where(keep, mother_idx, other)
    return v[mother_idx], v[daughter_idx]
