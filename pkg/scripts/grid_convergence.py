#!/usr/bin/env python3
"""Grid-refinement study of the discretized eigensolver on closed-form cases.

Prints eigenvalue and L1 profile errors for a sequence of halved steps, for
the two constant-growth splitting laws and the linear-growth case with rate
beta(x) = x.
"""

import argparse

import numpy as np

from effgrow import TraitSet, make_kernel_noheredity
from effgrow.grids import SizeGrid, trapezoid
from effgrow.pde import case_a, case_b, discretize, solve_eigen
from effgrow.profiles import profile_mitosis_series, profile_uniform_division
from effgrow.rates import PowerLawRate


def case_a_row(frag: str, dx: float):
    grid = SizeGrid.uniform(dx, 15.0)
    traits, kernel = TraitSet.of(1.0), make_kernel_noheredity([1.0])
    sol = solve_eigen(discretize(case_a(traits, kernel, 1.0, frag), grid))
    if frag == "uniform":
        exact = profile_uniform_division(1.0, grid, mass_tol=1e-3)
        vals = exact.values / exact.total_mass()
    else:
        vals = profile_mitosis_series(1.0, grid).values
    l1 = float(trapezoid(np.abs(sol.profile.values - vals), grid.nodes, axis=-1).sum())
    return abs(sol.lambda_ - 1.0), l1, sol.iterations


def case_b_row(dx: float):
    grid = SizeGrid.uniform(dx, 12.0)
    model = case_b(TraitSet.of(2.0), make_kernel_noheredity([1.0]),
                   PowerLawRate(1.0, 2.0))
    sol = solve_eigen(discretize(model, grid))
    return abs(sol.lambda_ - 2.0), sol.iterations


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps", type=float, nargs="+",
                        default=[0.02, 0.01, 0.005, 0.0025])
    args = parser.parse_args()
    for frag in ("uniform", "mitosis"):
        print(f"constant growth, {frag} splitting (exact rate 1):")
        for dx in args.steps:
            lam_err, l1, iters = case_a_row(frag, dx)
            print(f"  dx={dx:<8g} lam_err={lam_err:.3e} profile_L1={l1:.3e} "
                  f"iters={iters}")
    print("linear growth, uniform splitting, rate x (exact rate 2):")
    for dx in args.steps:
        lam_err, iters = case_b_row(dx)
        print(f"  dx={dx:<8g} lam_err={lam_err:.3e} iters={iters}")


if __name__ == "__main__":
    main()
