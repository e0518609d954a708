import numpy as np
import pytest

from effgrow import DomainError, InconsistencyError, TraitSet, make_kernel_bimodal
from effgrow.dynamics import (
    ConvergenceDiagnostics,
    auto_dt,
    compute_rho,
    diagnostics,
    initial_from_profile,
    initial_gaussian,
    initial_indicator,
    simulate,
    stability_bounds,
)
from effgrow.grids import SizeGrid
from effgrow.pde import case_a, solve_heterogeneous
from effgrow.profiles import SizeProfile

GRID = SizeGrid.uniform(0.05, 15.0)
MODEL = case_a(TraitSet.of(0.5, 2.5), make_kernel_bimodal(0.3, 0.5), 1.0, "uniform")


@pytest.fixture(scope="module")
def eigen():
    return solve_heterogeneous(MODEL, GRID, tol=1e-12)


def test_stability_bounds_and_auto_dt():
    cfl, loss = stability_bounds(MODEL, GRID)
    assert cfl == pytest.approx(0.9 * 0.05 / 2.5)
    assert loss == pytest.approx(0.9 / 2.5)
    dt = auto_dt(MODEL, GRID)
    assert dt <= cfl and dt <= loss


def test_dt_validation():
    init = initial_gaussian(GRID, 2, 1.0, 0.1)
    with pytest.raises(DomainError):
        simulate(MODEL, init, 1.0, dt=1.0)


def test_stationary_start_stays(eigen):
    lam = eigen.lambda_
    traj = simulate(MODEL, initial_from_profile(eigen.profile), 10.0 / lam,
                    snapshot_stride=200)
    diag = diagnostics(traj, lam, eigen.profile, eigen.adjoint)
    assert diag.rho == pytest.approx(1.0, abs=1e-10)
    assert diag.l1_phi_distance.max() <= 10.0 * traj.dt


def test_scaled_start_doubles_rho(eigen):
    state = initial_from_profile(eigen.profile, scale=2.0)
    assert compute_rho(state, eigen.adjoint) == pytest.approx(2.0, abs=1e-10)


def test_compute_rho_constant_adjoint_reduction(eigen):
    # with a per-type constant adjoint, rho reduces to the adjoint-weighted
    # vector of plain masses
    init = initial_indicator(GRID, 2, 0.5, 1.5, type_weights=[0.3, 0.7])
    rho = compute_rho(init, eigen.adjoint)
    phi_levels = eigen.adjoint.values[:, GRID.n_nodes // 3]
    from effgrow.grids import trapezoid
    masses = trapezoid(init.densities, GRID.nodes, axis=-1)
    assert rho == pytest.approx(float(phi_levels @ masses), rel=2e-2)


def test_compute_rho_grid_mismatch(eigen):
    other = SizeGrid.uniform(0.1, 15.0)
    init = initial_gaussian(other, 2, 1.0, 0.1)
    with pytest.raises(DomainError):
        compute_rho(init, eigen.adjoint)


def test_generic_start_conservation_and_growth(eigen):
    lam = eigen.lambda_
    init = initial_gaussian(GRID, 2, center=1.0, width=0.05, type_weights=[1.0, 0.0])
    traj = simulate(MODEL, init, 20.0 / lam, dt=2e-4, snapshot_stride=500)
    diag = diagnostics(traj, lam, eigen.profile, eigen.adjoint)
    drift = np.abs(diag.phi_weighted_mass - diag.rho).max()
    assert drift <= diag.conservation_tol
    assert diag.growth_exponent() == pytest.approx(lam, rel=1e-2)
    # raw mass grows while the renormalized mass stays flat
    assert diag.raw_mass[-1] > 100.0 * diag.raw_mass[0]


def test_equal_rho_same_limit(eigen):
    lam = eigen.lambda_
    a = initial_gaussian(GRID, 2, center=1.0, width=0.05, type_weights=[1.0, 0.0])
    b = initial_indicator(GRID, 2, 2.0, 3.0, type_weights=[0.2, 0.8])
    rho_a = compute_rho(a, eigen.adjoint)
    rho_b = compute_rho(b, eigen.adjoint)
    b = initial_from_profile(SizeProfile(GRID, b.densities, mass_tol=None),
                             scale=rho_a / rho_b)
    t_end = 40.0 / lam
    final = []
    for init in (a, b):
        traj = simulate(MODEL, init, t_end, dt=2e-4, snapshot_stride=10**6)
        snap = traj.snapshots[-1]
        final.append(np.exp(-lam * snap.time) * snap.densities)
    from effgrow.grids import trapezoid
    gap = float(trapezoid(np.abs(final[0] - final[1]) * eigen.adjoint.values,
                          GRID.nodes, axis=-1).sum())
    assert gap <= 2e-3


def test_states_stay_nonnegative(eigen):
    init = initial_indicator(GRID, 2, 0.5, 1.0)
    traj = simulate(MODEL, init, 5.0, snapshot_stride=20)
    for snap in traj.snapshots:
        assert snap.densities.min() >= 0.0
    assert not traj.snapshots[2].densities.flags.writeable


def test_diagnostics_detects_broken_conservation():
    times = np.linspace(0.0, 1.0, 5)
    with pytest.raises(InconsistencyError):
        ConvergenceDiagnostics(
            rho=1.0, times=times,
            phi_weighted_mass=np.array([1.0, 1.0, 1.2, 1.0, 1.0]),
            l1_phi_distance=np.zeros(5), raw_mass=np.ones(5),
            conservation_tol=0.05)
