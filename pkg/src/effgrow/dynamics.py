"""Time integration of the growth-division dynamics.

Explicit Euler in time on exactly the spatial operator assembled by the
eigensolver, so the discrete steady profile is an exact eigenvector of the
step map and the adjoint-weighted mass is conserved by construction up to
the first-order time-stepping bias. The renormalized solution then relaxes
to a multiple of the steady profile; the multiplier is the adjoint-weighted
integral of the initial data.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InconsistencyError
from .grids import SizeGrid, trapezoid
from .pde import ModelSpec, discretize
from .profiles import SizeProfile

# Conservation-tolerance constant, pinned by the stationary-start test:
# the phi-weighted mass drifts by about rho * lambda^2 * t * dt / 2 over a
# run, which the stationary suite verifies to sit well inside C * (dt + dx).
CONSERVATION_C = 2.0

_NEGATIVE_NOISE = 1e-12


@dataclass(frozen=True, eq=False)
class PopulationState:
    """Per-type number densities at one instant."""

    time: float
    densities: np.ndarray
    grid: SizeGrid

    def __post_init__(self):
        arr = np.atleast_2d(np.array(self.densities, dtype=float))
        if arr.shape[1] != self.grid.n_nodes:
            raise DomainError("densities do not match the grid")
        if arr.min() < 0:
            raise DomainError(f"densities must be nonnegative, min {arr.min()}")
        arr.setflags(write=False)
        object.__setattr__(self, "densities", arr)

    def total_mass(self) -> float:
        return float(trapezoid(self.densities, self.grid.nodes, axis=-1).sum())


@dataclass(frozen=True, eq=False)
class Trajectory:
    model: ModelSpec
    grid: SizeGrid
    dt: float
    snapshots: tuple[PopulationState, ...]

    @property
    def times(self) -> np.ndarray:
        return np.array([s.time for s in self.snapshots])


def stability_bounds(model: ModelSpec, grid: SizeGrid) -> tuple[float, float]:
    """The two explicit-step bounds: transport CFL and division loss."""
    dx = grid.require_uniform()
    x = grid.nodes
    tau = model.tau_values(x)
    beta = np.asarray(model.beta_fn(x), dtype=float)
    v_max = model.traits.v_max
    return 0.9 * dx / (v_max * float(tau.max())), \
        0.9 / (v_max * float((tau * beta).max()))


def auto_dt(model: ModelSpec, grid: SizeGrid) -> float:
    """Step keeping every Euler update a nonnegative combination.

    Slightly stronger than the two separate bounds: it controls the sum of
    the transport and loss diagonals at every node.
    """
    dx = grid.require_uniform()
    x = grid.nodes
    tau = model.tau_values(x)
    beta = np.asarray(model.beta_fn(x), dtype=float)
    v_max = model.traits.v_max
    return 0.9 / (v_max * float((tau * (1.0 / dx + beta)).max()))


def simulate(model: ModelSpec, initial: PopulationState, t_end: float,
             dt: float | None = None, snapshot_stride: int = 50) -> Trajectory:
    """March the dynamics to t_end, emitting copies every `snapshot_stride` steps.

    dt = None picks the positivity-preserving step automatically; an
    explicit dt must respect both stability bounds.
    """
    if initial.densities.shape[0] != model.M:
        raise DomainError(
            f"initial data has {initial.densities.shape[0]} types, model has {model.M}")
    operator = discretize(model, initial.grid)
    cfl, loss_bound = stability_bounds(model, initial.grid)
    if dt is None:
        dt = auto_dt(model, initial.grid)
    elif dt > cfl or dt > loss_bound:
        raise DomainError(
            f"dt={dt} violates the stability bounds (transport {cfl:.3e}, "
            f"division {loss_bound:.3e})")
    if t_end <= 0:
        raise DomainError(f"t_end must be positive, got {t_end}")
    n_steps = max(1, round(t_end / dt))
    state = initial.densities.copy()
    snapshots = [PopulationState(initial.time, state.copy(), initial.grid)]
    t = initial.time
    for step in range(1, n_steps + 1):
        state += dt * operator.apply(state)
        low = float(state.min())
        if low < 0.0:
            if low < -_NEGATIVE_NOISE * max(state.max(), 1.0):
                err = InconsistencyError(
                    f"negative density {low} at t={t + dt}; offending state "
                    f"attached as err.state")
                err.state = np.array(state)
                err.time = t + dt
                raise err
            np.maximum(state, 0.0, out=state)
        t = initial.time + step * dt
        if step % snapshot_stride == 0 or step == n_steps:
            snapshots.append(PopulationState(t, state.copy(), initial.grid))
    return Trajectory(model, initial.grid, dt, tuple(snapshots))


def compute_rho(initial: PopulationState, adjoint: SizeProfile) -> float:
    """Adjoint-weighted initial mass: the asymptotic amplitude multiplier."""
    if not np.array_equal(initial.grid.nodes, adjoint.grid.nodes):
        raise DomainError("initial state and adjoint live on different grids")
    if initial.densities.shape != adjoint.values.shape:
        raise DomainError("initial state and adjoint have different type counts")
    return float(trapezoid(initial.densities * adjoint.values,
                           initial.grid.nodes, axis=-1).sum())


@dataclass(frozen=True, eq=False)
class ConvergenceDiagnostics:
    """Time series certifying Malthusian convergence of one trajectory."""

    rho: float
    times: np.ndarray
    phi_weighted_mass: np.ndarray
    l1_phi_distance: np.ndarray
    raw_mass: np.ndarray
    conservation_tol: float

    def __post_init__(self):
        drift = float(np.abs(self.phi_weighted_mass - self.rho).max())
        if drift > self.conservation_tol:
            raise InconsistencyError(
                f"phi-weighted mass drifted by {drift:.3e}, beyond the scheme "
                f"tolerance {self.conservation_tol:.3e}")

    def growth_exponent(self) -> float:
        """Least-squares slope of log(raw mass) over the final half of the run."""
        half = self.times.size // 2
        t = self.times[half:]
        y = np.log(self.raw_mass[half:])
        return float(np.polyfit(t, y, 1)[0])


def diagnostics(trajectory: Trajectory, lam: float, steady: SizeProfile,
                adjoint: SizeProfile) -> ConvergenceDiagnostics:
    """Renormalized series: adjoint-weighted mass and L1(phi) distance to rho N."""
    grid = trajectory.grid
    if not np.array_equal(grid.nodes, steady.grid.nodes) or \
            not np.array_equal(grid.nodes, adjoint.grid.nodes):
        raise DomainError("trajectory, steady profile and adjoint grids disagree")
    rho = compute_rho(trajectory.snapshots[0], adjoint)
    times = trajectory.times
    phi_mass = np.empty(times.size)
    distance = np.empty(times.size)
    raw = np.empty(times.size)
    for idx, snap in enumerate(trajectory.snapshots):
        scale = np.exp(-lam * snap.time)
        weighted = snap.densities * adjoint.values
        phi_mass[idx] = scale * float(trapezoid(weighted, grid.nodes, axis=-1).sum())
        gap = np.abs(scale * snap.densities - rho * steady.values) * adjoint.values
        distance[idx] = float(trapezoid(gap, grid.nodes, axis=-1).sum())
        raw[idx] = snap.total_mass()
    tol = CONSERVATION_C * (trajectory.dt + grid.require_uniform())
    return ConvergenceDiagnostics(rho, times, phi_mass, distance, raw, tol)


def initial_gaussian(grid: SizeGrid, n_types: int, center: float, width: float,
                     type_weights=None) -> PopulationState:
    """Unit-mass Gaussian bump split across types by `type_weights`."""
    w = _type_weights(n_types, type_weights)
    bump = np.exp(-0.5 * ((grid.nodes - center) / width) ** 2)
    values = w[:, None] * bump[None, :]
    return _normalized_state(values, grid)


def initial_indicator(grid: SizeGrid, n_types: int, lo: float, hi: float,
                      type_weights=None) -> PopulationState:
    """Unit-mass indicator of [lo, hi] split across types."""
    if not 0.0 <= lo < hi:
        raise DomainError(f"need 0 <= lo < hi, got [{lo}, {hi}]")
    w = _type_weights(n_types, type_weights)
    box = ((grid.nodes >= lo) & (grid.nodes <= hi)).astype(float)
    if box.sum() == 0:
        raise DomainError(f"[{lo}, {hi}] contains no grid nodes")
    values = w[:, None] * box[None, :]
    return _normalized_state(values, grid)


def initial_from_profile(profile: SizeProfile, scale: float = 1.0) -> PopulationState:
    if scale <= 0:
        raise DomainError(f"scale must be positive, got {scale}")
    return PopulationState(0.0, scale * profile.values, profile.grid)


def _type_weights(n_types: int, type_weights) -> np.ndarray:
    if type_weights is None:
        return np.full(n_types, 1.0 / n_types)
    w = np.asarray(type_weights, dtype=float)
    if w.shape != (n_types,) or (w < 0).any() or w.sum() <= 0:
        raise DomainError("type_weights must be nonnegative with positive sum")
    return w / w.sum()


def _normalized_state(values: np.ndarray, grid: SizeGrid) -> PopulationState:
    mass = float(trapezoid(values, grid.nodes, axis=-1).sum())
    return PopulationState(0.0, values / mass, grid)
