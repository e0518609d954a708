#!/usr/bin/env python3
"""Run every figure experiment into one output tree.

    python scripts/run_all_experiments.py --out out [--seed N] [--threads N]
                                          [--quick] [--skip-pde]

--quick shrinks the PDE-backed sweeps (fig2, figS2) to coarse grids so the
whole tree builds in about a minute; without it the defaults take several
minutes, dominated by the equal-mitosis sweep.
"""

import argparse
import sys
import time

from effgrow.experiments import DEFAULT_SEED, EXPERIMENT_IDS, run_experiment

QUICK_SECTIONS = {
    "fig2": {"dx": "0.01", "x_max": "15", "tol": "1e-9"},
    "figS2_mitosis": {"M": "4", "sigmas": "0,3,6", "alphas": "0.1,0.55,0.9",
                      "mean_kinds": "m_A", "betas": "1,pow:2",
                      "dx": "0.04", "x_max": "24", "tol": "1e-7"},
}


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="out")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--quick", action="store_true")
    parser.add_argument("--skip-pde", action="store_true",
                        help="skip fig2 and figS2_mitosis entirely")
    args = parser.parse_args()

    for experiment in EXPERIMENT_IDS:
        if args.skip_pde and experiment in ("fig2", "figS2_mitosis"):
            print(f"{experiment}: skipped")
            continue
        section = QUICK_SECTIONS.get(experiment) if args.quick else None
        start = time.time()
        manifest = run_experiment(experiment, args.out, file_section=section,
                                  seed=args.seed, threads=args.threads)
        print(f"{experiment}: {manifest} ({time.time() - start:.1f}s)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
