import numpy as np
import pytest

from effgrow import TraitSet, make_kernel_bimodal, solve_noheredity
from effgrow.csvio import (
    fmt,
    read_csv,
    render_triplet,
    settings_hash,
    write_csv,
    write_diagnostics_csv,
    write_profile_csv,
    write_trajectory_csv,
)
from effgrow.dynamics import diagnostics, initial_from_profile, simulate
from effgrow.grids import SizeGrid
from effgrow.pde import case_a, solve_heterogeneous
from effgrow.profiles import profile_uniform_division


def test_fmt_is_lossless_and_plain():
    for x in (1.0 / 3.0, 0.97177978870854531, 1e-300, 123456.789):
        assert float(fmt(x)) == x
    assert fmt(3) == "3"
    assert fmt(True) == "1"
    assert fmt("case") == "case"


def test_write_read_round_trip(tmp_path):
    path = write_csv(tmp_path / "t.csv", ["a", "b"], [[1.5, "x"], [2.5, "y"]],
                     comments=("meta=1",))
    text = path.read_text()
    assert "\r" not in text
    comments, header, rows = read_csv(path)
    assert comments == ["meta=1"]
    assert header == ["a", "b"]
    assert rows == [["1.5", "x"], ["2.5", "y"]]


def test_triplet_render():
    t = solve_noheredity(TraitSet.of(0.5, 2.5), [0.5, 0.5])
    lines = render_triplet(t).splitlines()
    assert lines[0].startswith("M,beta,case,lambda,v_eff,N_1,N_2,phi_1,phi_2")
    assert float(lines[1].split(",")[3]) == pytest.approx(t.lambda_, rel=1e-16)


def test_profile_csv(tmp_path):
    grid = SizeGrid.default_for_rate(1.0)
    p = profile_uniform_division(1.0, grid)
    path = write_profile_csv(tmp_path / "p.csv", p, {"beta": 1.0, "case": "A"},
                             stride=20, x_cut=8.0)
    comments, header, rows = read_csv(path)
    assert "beta=1" in comments and "case=A" in comments
    assert header == ["x", "N_1"]
    assert float(rows[-1][0]) <= 8.0


def test_trajectory_and_diagnostics_csv(tmp_path):
    grid = SizeGrid.uniform(0.1, 15.0)
    model = case_a(TraitSet.of(0.5, 2.5), make_kernel_bimodal(0.3, 0.5), 1.0,
                   "uniform")
    sol = solve_heterogeneous(model, grid, tol=1e-10)
    traj = simulate(model, initial_from_profile(sol.profile), 1.0,
                    snapshot_stride=10)
    tpath = write_trajectory_csv(tmp_path / "traj.csv", traj, stride=30)
    _, header, rows = read_csv(tpath)
    assert header == ["t", "type", "x", "n"]
    assert {r[1] for r in rows} == {"1", "2"}
    diag = diagnostics(traj, sol.lambda_, sol.profile, sol.adjoint)
    dpath = write_diagnostics_csv(tmp_path / "diag.csv", diag)
    _, header, rows = read_csv(dpath)
    assert header == ["t", "phi_weighted_mass", "l1_phi_distance", "raw_mass"]
    assert len(rows) == diag.times.size


def test_settings_hash_stable():
    a = settings_hash({"x": 1.0, "y": [1, 2]})
    b = settings_hash({"y": [1, 2], "x": 1.0})
    assert a == b and len(a) == 64
    assert settings_hash({"x": 2.0}) != a
