"""Analytic steady size distributions.

Under constant growth and a constant division rate the homogeneous steady
shape is explicit for the two emblematic splitting laws: an alternating
exponential series for equal mitosis and 4 beta^2 x exp(-2 beta x) for
uniform splitting. Under linear growth with uniform splitting every type
shares the shape exp(-integral of beta), and the heterogeneous profiles are
that common shape scaled by the population fractions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, InconsistencyError
from .grids import SizeGrid, trapezoid
from .kernels import HeredityKernel
from .rates import PowerLawRate
from .spectral import EigenTriplet, build_growth_matrix, dominant_eigentriplet
from .traits import TraitSet

SERIES_TRUNCATION = 1e-15
TAIL_MASS_LIMIT = 1e-8


@dataclass(frozen=True, eq=False)
class SizeProfile:
    """Tabulated per-type densities on a size grid.

    `mass_tol` is the quadrature tolerance declared by the producer; when
    set, the total trapezoid mass must be 1 within it. Adjoint profiles are
    not densities and carry mass_tol=None.
    """

    grid: SizeGrid
    values: np.ndarray
    mass_tol: float | None = None

    def __post_init__(self):
        arr = np.atleast_2d(np.array(self.values, dtype=float))
        if arr.shape[1] != self.grid.n_nodes:
            raise DomainError(f"values shape {arr.shape} does not match grid "
                              f"({self.grid.n_nodes} nodes)")
        if (arr < 0).any():
            raise DomainError("profile values must be nonnegative")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)
        if self.mass_tol is not None:
            total = self.total_mass()
            if abs(total - 1.0) > self.mass_tol:
                raise InconsistencyError(
                    f"total mass {total!r} deviates from 1 beyond declared "
                    f"tolerance {self.mass_tol}")

    @property
    def n_types(self) -> int:
        return self.values.shape[0]

    def masses(self) -> np.ndarray:
        """Per-type trapezoid masses."""
        return trapezoid(self.values, self.grid.nodes, axis=-1)

    def total_mass(self) -> float:
        return float(self.masses().sum())


def _clip_series_noise(values: np.ndarray) -> np.ndarray:
    """Zero the tiny negatives left by truncating an alternating series."""
    floor = -1e-12 * values.max()
    if (values < floor).any():
        raise InconsistencyError(f"series evaluation went negative: min {values.min()}")
    return np.maximum(values, 0.0)


def mitosis_series_coefficients(truncation: float = SERIES_TRUNCATION) -> np.ndarray:
    """Coefficients a_0 = 1, a_n = 2 a_(n-1) / (2^n - 1) until below `truncation`.

    The ratio decays superexponentially, so at most a few dozen terms appear.
    """
    coeffs = [1.0]
    n = 1
    while True:
        nxt = 2.0 * coeffs[-1] / (2.0**n - 1.0)
        if nxt < truncation:
            return np.array(coeffs)
        coeffs.append(nxt)
        n += 1


def profile_mitosis_series(beta: float, grid: SizeGrid,
                           mass_tol: float = 1e-8) -> SizeProfile:
    """Steady shape for equal mitosis under constant growth and rate.

    sum_n (-1)^n a_n exp(-2^(n+1) beta x), truncated when the next term at
    x = 0 drops below 1e-15, then normalized to unit mass on the grid.
    """
    if beta <= 0:
        raise DomainError(f"beta must be positive, got {beta}")
    a = mitosis_series_coefficients()
    n = np.arange(a.size)
    x = grid.nodes
    terms = ((-1.0) ** n * a)[:, None] * np.exp(-np.outer(2.0 ** (n + 1) * beta, x))
    values = _clip_series_noise(terms.sum(axis=0))
    values = values / trapezoid(values, x)
    return SizeProfile(grid, values, mass_tol)


def profile_uniform_division(beta: float, grid: SizeGrid,
                             mass_tol: float | None = None) -> SizeProfile:
    """Steady shape for uniform splitting: 4 beta^2 x exp(-2 beta x), exactly.

    The analytic mass is 1; the values are not renormalized, so the declared
    tolerance defaults to the trapezoid + truncation bound of the grid.
    """
    if beta <= 0:
        raise DomainError(f"beta must be positive, got {beta}")
    x = grid.nodes
    values = 4.0 * beta**2 * x * np.exp(-2.0 * beta * x)
    if mass_tol is None:
        dx = max(np.diff(x).max(), 0.0)
        mass_tol = max(1e-10, 2.0 * (beta * dx) ** 2 + 10.0 * np.exp(-2.0 * beta * grid.x_max))
    return SizeProfile(grid, values, mass_tol)


def _cumulative_rate(beta_fn, grid: SizeGrid) -> np.ndarray:
    if isinstance(beta_fn, PowerLawRate):
        return beta_fn.cumulative(grid.nodes)
    b = np.asarray(beta_fn(grid.nodes), dtype=float)
    if (b < 0).any():
        raise DomainError("division rate must be nonnegative")
    increments = 0.5 * (b[1:] + b[:-1]) * np.diff(grid.nodes)
    return np.concatenate([[0.0], np.cumsum(increments)])


def profile_caseB_homogeneous(beta_fn: PowerLawRate | Callable, grid: SizeGrid,
                              mass_tol: float = 1e-8) -> SizeProfile:
    """Linear-growth steady shape exp(-integral of beta), unit mass.

    The power family uses its exact primitive; other callables are
    integrated by trapezoid. The grid must reach far enough that the
    remaining tail is below 1e-8 of the mass.
    """
    cumulative = _cumulative_rate(beta_fn, grid)
    values = np.exp(-cumulative)
    mass = float(trapezoid(values, grid.nodes))
    rate_at_end = float(np.asarray(beta_fn(grid.x_max)))
    if rate_at_end <= 0:
        raise DomainError("division rate must be positive at the far end of the grid")
    tail = values[-1] / rate_at_end  # exponential-tail bound, rate nondecreasing
    if tail > TAIL_MASS_LIMIT * mass:
        raise DomainError(
            f"grid too short: tail mass ~{tail / mass:.2e} of total exceeds "
            f"{TAIL_MASS_LIMIT}; extend x_max beyond {grid.x_max}")
    return SizeProfile(grid, values / mass, mass_tol)


def profiles_caseB_heterogeneous(traits: TraitSet, kernel: HeredityKernel,
                                 beta_fn: PowerLawRate | Callable, grid: SizeGrid,
                                 mass_tol: float = 1e-8) -> SizeProfile:
    """Per-type linear-growth profiles: common shape scaled by the fractions.

    The fractions solve the trait matrix problem with unit rate; each type's
    mass equals its fraction, and all types share one shape.
    """
    triplet = caseB_triplet(traits, kernel)
    shape = profile_caseB_homogeneous(beta_fn, grid, mass_tol)
    values = triplet.fractions[:, None] * shape.values[0][None, :]
    return SizeProfile(grid, values, mass_tol)


def caseB_triplet(traits: TraitSet, kernel: HeredityKernel) -> EigenTriplet:
    """Reduced linear-growth eigentriplet (the matrix problem with beta = 1)."""
    return dominant_eigentriplet(build_growth_matrix(traits, kernel, 1.0), case="B")
