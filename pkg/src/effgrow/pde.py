"""Discretized eigenproblem for the full size-structured operator.

The steady equation couples, per trait, rightward transport -v_i (tau N_i)',
a division loss v_i tau beta N_i and a splitting gain that redistributes
daughters. On a uniform grid the transport is first-order upwind (the wind
is always rightward), equal mitosis maps node 2j to node j exactly, and
uniform splitting reduces to backward cumulative tail sums. Everything is
kept positivity-preserving so that a shifted power iteration converges to
the dominant pair; the adjoint comes from iterating the exact transpose.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import ConvergenceError, DomainError
from .grids import SizeGrid, trapezoid
from .kernels import HeredityKernel
from .profiles import SizeProfile
from .rates import PowerLawRate
from .traits import TraitSet

ITER_CAP = 10**6
DEFAULT_TOL = 1e-10

FragKind = Literal["mitosis", "uniform"]
TauKind = Literal["constant", "linear"]


@dataclass(frozen=True, eq=False)
class ModelSpec:
    """Growth/division model from the built-in families.

    case "A" pins constant growth shape and a constant division rate with
    either splitting law; case "B" pins linear growth with uniform
    splitting and any power-family rate; "custom" allows the remaining
    combinations (e.g. equal mitosis with linear growth).
    """

    case: str
    tau: TauKind
    beta_fn: PowerLawRate
    frag: FragKind
    traits: TraitSet
    kernel: HeredityKernel

    def __post_init__(self):
        if self.tau not in ("constant", "linear"):
            raise DomainError(f"unknown growth shape {self.tau!r}")
        if self.frag not in ("mitosis", "uniform"):
            raise DomainError(f"unknown fragmentation kind {self.frag!r}")
        if self.kernel.M != self.traits.M:
            raise DomainError(f"kernel dimension {self.kernel.M} != trait count {self.traits.M}")
        if self.case == "A":
            if self.tau != "constant" or not self.beta_fn.is_constant:
                raise DomainError("case A means constant growth and constant division rate")
        elif self.case == "B":
            if self.tau != "linear" or self.frag != "uniform":
                raise DomainError("case B means linear growth with uniform splitting")
        elif self.case != "custom":
            raise DomainError(f"unknown case {self.case!r}")

    def tau_values(self, x: np.ndarray) -> np.ndarray:
        return np.ones_like(x) if self.tau == "constant" else x.copy()

    @property
    def M(self) -> int:
        return self.traits.M


def case_a(traits: TraitSet, kernel: HeredityKernel, beta: float,
           frag: FragKind = "uniform") -> ModelSpec:
    return ModelSpec("A", "constant", PowerLawRate(beta, 1.0), frag, traits, kernel)


def case_b(traits: TraitSet, kernel: HeredityKernel,
           beta_fn: PowerLawRate) -> ModelSpec:
    return ModelSpec("B", "linear", beta_fn, "uniform", traits, kernel)


@dataclass(frozen=True, eq=False)
class DiscreteOperator:
    """Matrix-free action of the discretized operator and its transpose.

    The shift makes the operator plus shift*Id nonnegative on nonnegative
    vectors: shift = max over grid and traits of v (tau beta + tau / dx).
    """

    model: ModelSpec
    grid: SizeGrid
    tau: np.ndarray
    beta: np.ndarray
    gain_weight: np.ndarray  # tau * beta / y with the y -> 0 limit at node 0
    shift: float

    @property
    def M(self) -> int:
        return self.model.M

    @property
    def shape(self) -> tuple[int, int]:
        return (self.model.M, self.grid.n_nodes)

    def _taubeta(self) -> np.ndarray:
        return self.tau * self.beta

    def apply(self, density: np.ndarray) -> np.ndarray:
        """Unshifted operator on per-type node vectors (M, K+1)."""
        dx = self.grid.dx
        v = self.model.traits.array()[:, None]
        kappa = self.model.kernel.entries
        flux = self.tau[None, :] * density
        transport = np.empty_like(density)
        transport[:, 0] = flux[:, 0] / dx  # zero influx ghost: tau(0) N(0) = 0
        transport[:, 1:] = np.diff(flux, axis=1) / dx
        mixed = kappa.T @ (v * density)
        out = -v * transport - v * self._taubeta()[None, :] * density
        out += self._gain(mixed)
        return out

    def apply_shifted(self, density: np.ndarray) -> np.ndarray:
        return self.apply(density) + self.shift * density

    def _gain(self, mixed: np.ndarray) -> np.ndarray:
        k_last = self.grid.n_nodes - 1
        if self.model.frag == "mitosis":
            gain = np.zeros_like(mixed)
            taubeta = self._taubeta()
            half = k_last // 2 + 1
            # reading from node 2j; the factor 4 = 2 daughters x the
            # Jacobian of the change of variables y = 2x
            gain[:, :half] = 4.0 * taubeta[::2][None, :] * mixed[:, ::2]
            return gain
        dx = self.grid.dx
        f = self.gain_weight[None, :] * mixed
        pieces = 0.5 * (f[:, :-1] + f[:, 1:]) * dx
        tails = np.concatenate(
            [np.cumsum(pieces[:, ::-1], axis=1)[:, ::-1],
             np.zeros((mixed.shape[0], 1))], axis=1)
        return 2.0 * tails

    def apply_transpose(self, weights: np.ndarray) -> np.ndarray:
        """Exact algebraic transpose of apply, for the adjoint iteration."""
        dx = self.grid.dx
        v = self.model.traits.array()[:, None]
        kappa = self.model.kernel.entries
        fdiff = np.empty_like(weights)
        fdiff[:, :-1] = weights[:, :-1] - weights[:, 1:]
        fdiff[:, -1] = weights[:, -1]
        out = -v * self.tau[None, :] * fdiff / dx
        out -= v * self._taubeta()[None, :] * weights
        out += v * (kappa @ self._gain_transpose(weights))
        return out

    def apply_transpose_shifted(self, weights: np.ndarray) -> np.ndarray:
        return self.apply_transpose(weights) + self.shift * weights

    def _gain_transpose(self, weights: np.ndarray) -> np.ndarray:
        k_last = self.grid.n_nodes - 1
        if self.model.frag == "mitosis":
            out = np.zeros_like(weights)
            taubeta = self._taubeta()
            even = np.arange(0, k_last + 1, 2)
            out[:, even] = 4.0 * taubeta[even][None, :] * weights[:, even // 2]
            return out
        dx = self.grid.dx
        prefix = np.concatenate(
            [np.zeros((weights.shape[0], 1)), np.cumsum(weights[:, :-1], axis=1)],
            axis=1)
        out = 2.0 * dx * self.gain_weight[None, :] * (prefix + 0.5 * weights)
        out[:, -1] = dx * self.gain_weight[-1] * prefix[:, -1]
        return out

    def dense(self) -> np.ndarray:
        """Explicit matrix of the unshifted operator (tests on small grids)."""
        m, k = self.shape
        n = m * k
        mat = np.empty((n, n))
        basis = np.zeros((m, k))
        for col in range(n):
            basis.flat[col] = 1.0
            mat[:, col] = self.apply(basis).ravel()
            basis.flat[col] = 0.0
        return mat


def discretize(model: ModelSpec, grid: SizeGrid) -> DiscreteOperator:
    """Assemble the operator on a uniform grid.

    Equal mitosis needs an even number of steps so halving lands on nodes.
    """
    dx = grid.require_uniform()
    if model.frag == "mitosis" and (grid.n_nodes - 1) % 2 != 0:
        raise DomainError("equal mitosis needs an even number of grid steps "
                          "so that 2x maps nodes to nodes")
    x = grid.nodes
    tau = model.tau_values(x)
    beta = np.asarray(model.beta_fn(x), dtype=float)
    if model.tau == "linear":
        gain_weight = beta.copy()  # tau(y)/y = 1 everywhere including 0
    else:
        gain_weight = np.zeros_like(x)
        gain_weight[1:] = tau[1:] * beta[1:] / x[1:]
    # conservative splitting: rescale so that the daughters of a node-l
    # mother carry total weight exactly 2 tau_l beta_l under the trapezoid
    # tail weights (which would otherwise give 2 tau beta (1 + 1/(2l)) and
    # leak a first-order error into the eigenvalue)
    levels = np.arange(x.size, dtype=float)
    gain_weight = gain_weight * (2.0 * levels / (2.0 * levels + 1.0))
    v_max = model.traits.v_max
    shift = v_max * float((tau * beta + tau / dx).max())
    return DiscreteOperator(model, grid, tau, beta, gain_weight, shift)


@dataclass(frozen=True, eq=False)
class EigenSolution:
    lambda_: float
    profile: SizeProfile
    adjoint: SizeProfile
    residual: float
    iterations: int

    def masses(self) -> np.ndarray:
        return self.profile.masses()


def _operator_power_iteration(apply_shifted, shape, tol: float,
                              cap: int = ITER_CAP) -> tuple[float, np.ndarray, int, float]:
    """Power iteration on a shifted nonnegative matrix-free operator.

    Converged when the relative eigenvalue change is below tol and the
    scale-free residual |L x - lam x|_1 / (lam |x|_1) is below 10 tol.
    """
    x = np.ones(shape)
    x /= x.sum()
    lam_prev = None
    history: list[float] = []
    lam = np.inf
    resid = np.inf
    for it in range(1, cap + 1):
        y = apply_shifted(x)
        np.maximum(y, 0.0, out=y)  # clear roundoff-level negatives
        lam = float(y.sum())
        resid = float(np.abs(y - lam * x).sum() / lam)
        if it % 64 == 0 or resid < 100 * tol:
            history.append(resid)
        if lam_prev is not None and abs(lam - lam_prev) <= tol * lam \
                and resid <= 10.0 * tol:
            return lam, x, it, resid
        x = y / lam
        lam_prev = lam
    raise ConvergenceError(
        f"eigen iteration did not converge within {cap} iterations "
        f"(residual {resid:.3e}); the operator may lack a spectral gap",
        residual=resid, residual_history=history[-50:])


def solve_eigen(operator: DiscreteOperator, tol: float = DEFAULT_TOL
                ) -> EigenSolution:
    """Dominant triplet of the discretized operator.

    Returns the unshifted eigenvalue, the steady profile normalized to unit
    total mass, and the adjoint normalized so that sum_i int N_i phi_i = 1.
    """
    lam_shifted, n_vec, iters, resid = _operator_power_iteration(
        operator.apply_shifted, operator.shape, tol)
    _, phi_vec, adj_iters, adj_resid = _operator_power_iteration(
        operator.apply_transpose_shifted, operator.shape, tol)
    lam = lam_shifted - operator.shift
    grid = operator.grid
    mass = float(trapezoid(n_vec, grid.nodes, axis=-1).sum())
    n_vec = n_vec / mass
    # the transpose iteration yields the left eigenvector of the plain-sum
    # pairing; dividing by the trapezoid weights (x2 at the endpoints) turns
    # it into the density whose quadrature pairing with any solution of the
    # dynamics is exactly conserved
    phi_vec = phi_vec.copy()
    phi_vec[:, 0] *= 2.0
    phi_vec[:, -1] *= 2.0
    weight = float(trapezoid(n_vec * phi_vec, grid.nodes, axis=-1).sum())
    phi_vec = phi_vec / weight
    profile = SizeProfile(grid, n_vec, mass_tol=1e-10)
    adjoint = SizeProfile(grid, phi_vec, mass_tol=None)
    return EigenSolution(lam, profile, adjoint, max(resid, adj_resid),
                         iters + adj_iters)


@dataclass(frozen=True, eq=False)
class HeterogeneousSolution:
    """Summary of a coupled multi-trait eigensolve."""

    lambda_: float
    masses: np.ndarray
    effective_trait: float | None
    profile: SizeProfile
    adjoint: SizeProfile
    residual: float
    iterations: int


def solve_heterogeneous(model: ModelSpec, grid: SizeGrid,
                        tol: float = DEFAULT_TOL) -> HeterogeneousSolution:
    """Block eigensolve over all traits; reports per-type masses.

    The effective trait is lambda/beta under case A and lambda under case
    B; for custom models only lambda is reported (no homogeneity law is
    assumed).
    """
    operator = discretize(model, grid)
    sol = solve_eigen(operator, tol)
    masses = sol.profile.masses()
    if model.case == "A":
        v_eff = sol.lambda_ / model.beta_fn.coefficient
    elif model.case == "B":
        v_eff = sol.lambda_
    else:
        v_eff = None
    return HeterogeneousSolution(sol.lambda_, masses, v_eff, sol.profile,
                                 sol.adjoint, sol.residual, sol.iterations)
