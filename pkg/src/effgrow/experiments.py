"""Figure datasets as reproducible CSV runs.

Each experiment resolves its settings (defaults, then config file, then CLI
flags), computes rows in a deterministic order, writes CSV plus a manifest
with the settings hash, and returns the manifest path. Reruns with the same
settings and seed are byte-identical.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .correlation import gamma_uniform_law
from .csvio import write_csv, write_manifest
from .errors import ConvergenceError, DomainError, InconsistencyError, SchemaError
from .grids import SizeGrid, trapezoid
from .kernels import (
    HeredityKernel,
    alpha_neutral,
    make_kernel_alpha,
    make_kernel_bimodal,
    make_kernel_noheredity,
    make_kernel_random,
    make_kernel_uniform,
    parse_kernel_spec,
)
from .pde import ModelSpec, case_a, solve_heterogeneous
from .profiles import caseB_triplet, profile_caseB_homogeneous, profile_uniform_division
from .rates import PowerLawRate, constant_rate, parse_rate_spec
from .spectral import build_growth_matrix, dominant_eigentriplet, effective_trait_bimodal
from .traits import MeanKind, TraitSet, make_trait_set, mean

DEFAULT_SEED = 1729

EXPERIMENT_IDS = (
    "fig2", "fig3", "fig4", "fig5_heatmap", "fig5_surfaces",
    "fig6_Mconvergence", "fig7_sigma_alpha", "fig8_neutrality",
    "figS1_fractions", "figS2_mitosis",
)

_MEAN_KINDS = {"m_A": MeanKind.ARITHMETIC, "m_G": MeanKind.GEOMETRIC,
               "m_H": MeanKind.HARMONIC}


def _parse_like(template, text: str):
    if isinstance(template, bool):
        return text.strip().lower() in ("1", "true", "yes")
    if isinstance(template, int):
        return int(text)
    if isinstance(template, float):
        return float(text)
    if isinstance(template, list):
        items = [t for t in text.replace(";", ",").split(",") if t.strip()]
        inner = template[0] if template else 1.0
        return [_parse_like(inner, t) for t in items]
    return text.strip()


DEFAULTS: dict[str, dict] = {
    "fig2": {"traits": [0.5, 2.5], "k1": 0.3, "k2": 0.5, "beta": 1.0,
             "dx": 0.005, "x_max": 15.0, "tol": 1e-10, "out_stride": 10,
             "x_cut": 10.0},
    "fig3": {"v_fixed": 4.0, "v_star_min": 1.0, "v_star_max": 8.0,
             "n_points": 201,
             "kernels": ["0.5:0.5", "0.25:0.25", "0.2:0.2", "0.8:0.8",
                          "0.2:0.8", "0.8:0.2"]},
    "fig4": {"traits": [0.5, 2.5], "k_values": [round(0.05 * i, 2) for i in range(1, 20)],
             "beta": 1.0, "dx": 0.01, "x_max": 20.0, "out_stride": 10,
             "x_cut": 10.0},
    "fig5_heatmap": {"traits": [0.5, 2.5], "k_step": 0.01},
    "fig5_surfaces": {"traits": [0.5, 2.5], "k_step": 0.02},
    "fig6_Mconvergence": {"M_min": 2, "M_max": 60, "v_min": 1.0, "v_max": 7.0,
                          "alphas": [0.3, 0.6, 0.9], "plateau_gap": 0.01},
    "fig7_sigma_alpha": {"M_values": [10], "vbar": 4.0,
                         "alphas": [], "n_extra_alphas": 4,
                         "sigmas": [round(0.3 * i, 10) for i in range(21)],
                         "mean_kinds": ["m_A", "m_G", "m_H"]},
    "fig8_neutrality": {"M_values": [10, 100], "vbar": 4.0,
                        "sigmas": [round(0.3 * i, 10) for i in range(21)],
                        "kernels": ["alpha0", "uniform", "random"]},
    "figS1_fractions": {"traits": [0.5, 2.5],
                        "k_values": [round(0.05 * i, 2) for i in range(1, 20)],
                        "fixed_k2": [0.01, 0.2, 0.8], "fixed_k1": [0.2],
                        "beta": 1.0, "dx": 0.01, "x_max": 20.0,
                        "out_stride": 10, "x_cut": 10.0},
    "figS2_mitosis": {"M": 10, "vbar": 4.0, "sigmas": [0.0, 3.0, 6.0],
                      "alphas": [0.1, 0.55, 0.9],
                      "mean_kinds": ["m_A"], "betas": ["1", "pow:2"],
                      "dx": 0.02, "x_max": 30.0, "tol": 1e-8},
}


def resolve_settings(experiment: str, file_section: dict | None = None,
                     cli: dict | None = None) -> dict:
    """defaults <- config-file section <- CLI flags, type-checked by key."""
    if experiment not in DEFAULTS:
        raise SchemaError(f"unknown experiment {experiment!r}; "
                          f"choose from {', '.join(EXPERIMENT_IDS)}")
    settings = {k: (list(v) if isinstance(v, list) else v)
                for k, v in DEFAULTS[experiment].items()}
    for key, text in (file_section or {}).items():
        if key not in settings:
            raise SchemaError(f"unknown setting {key!r} for {experiment}")
        settings[key] = _parse_like(settings[key], text)
    for key, value in (cli or {}).items():
        if value is None:
            continue
        if key not in settings:
            raise SchemaError(
                f"flag --{key.replace('_', '-')} does not apply to {experiment}")
        settings[key] = value
    return settings


def _bimodal_kernel_pairs(specs: list[str]) -> list[tuple[float, float]]:
    pairs = []
    for spec in specs:
        k1, _, k2 = spec.partition(":")
        pairs.append((float(k1), float(k2)))
    return pairs


def _bimodal_v_eff(v1: float, v2: float, k1: float, k2: float) -> float:
    if v1 == v2:
        return v1  # homogeneous: the kernel cannot matter
    return effective_trait_bimodal(v1, v2, k1, k2)


# --- analytic sweeps ---------------------------------------------------------

def run_fig3(out_dir: Path, settings: dict, seed: int, threads: int = 1) -> list[str]:
    v_fixed = settings["v_fixed"]
    stars = np.linspace(settings["v_star_min"], settings["v_star_max"],
                        settings["n_points"])
    # always include the degenerate point v* = v_fixed in the sweep
    stars = np.unique(np.concatenate([stars, [v_fixed]]))
    rows = []
    for k1, k2 in _bimodal_kernel_pairs(settings["kernels"]):
        for v_star in stars:
            v1, v2 = min(v_fixed, v_star), max(v_fixed, v_star)
            pair = TraitSet.of(v1, v2) if v1 < v2 else TraitSet.of(v1)
            rows.append([float(v_star), k1, k2, _bimodal_v_eff(v1, v2, k1, k2),
                         mean(pair, MeanKind.ARITHMETIC),
                         mean(pair, MeanKind.GEOMETRIC),
                         mean(pair, MeanKind.HARMONIC)])
    write_csv(out_dir / "fig3.csv",
              ["v_star", "k1", "k2", "v_eff", "m_A", "m_G", "m_H"], rows)
    return ["fig3.csv"]


def _heatmap_rows(settings: dict) -> list[list[float]]:
    v1, v2 = settings["traits"]
    step = settings["k_step"]
    # multiplicative grid avoids accumulated rounding in the printed keys
    ks = step * np.arange(1, round(1.0 / step))
    rows = []
    for k1 in ks:
        for k2 in ks:
            rows.append([float(k1), float(k2),
                         effective_trait_bimodal(v1, v2, float(k1), float(k2))])
    return rows


def run_fig5_heatmap(out_dir, settings, seed, threads=1) -> list[str]:
    write_csv(out_dir / "fig5_heatmap.csv", ["k1", "k2", "v_eff"],
              _heatmap_rows(settings))
    return ["fig5_heatmap.csv"]


def run_fig5_surfaces(out_dir, settings, seed, threads=1) -> list[str]:
    write_csv(out_dir / "fig5_surfaces.csv", ["k1", "k2", "v_eff"],
              _heatmap_rows(settings))
    return ["fig5_surfaces.csv"]


def _kernel_for_family(family: str, M: int, seed: int) -> HeredityKernel:
    if family == "uniform":
        return make_kernel_uniform(M)
    if family == "alpha0":
        return make_kernel_alpha(M, alpha_neutral(M))
    if family == "random":
        # per-dimension sub-seed keeps the whole sweep reproducible
        return make_kernel_random(M, seed + M)
    if family.startswith("alpha:"):
        return make_kernel_alpha(M, float(family[6:]))
    return parse_kernel_spec(family, M)


def _matrix_v_eff(traits: TraitSet, kernel: HeredityKernel) -> float:
    return dominant_eigentriplet(build_growth_matrix(traits, kernel, 1.0)).effective_trait


def run_fig6(out_dir, settings, seed, threads=1) -> list[str]:
    families = (["uniform"] + [f"alpha:{a}" for a in settings["alphas"]]
                + ["random"])
    rows = []
    last_values: dict[str, dict[int, float]] = {f: {} for f in families}
    for family in families:
        for M in range(settings["M_min"], settings["M_max"] + 1):
            traits = make_trait_set(M, settings["v_max"] - settings["v_min"],
                                    0.5 * (settings["v_min"] + settings["v_max"]),
                                    MeanKind.ARITHMETIC)
            v_eff = _matrix_v_eff(traits, _kernel_for_family(family, M, seed))
            last_values[family][M] = v_eff
            rows.append([M, family, v_eff,
                         mean(traits, MeanKind.ARITHMETIC),
                         mean(traits, MeanKind.GEOMETRIC),
                         mean(traits, MeanKind.HARMONIC)])
    gap = settings["plateau_gap"]
    for family, values in last_values.items():
        hi, lo = max(values), max(values) - 10
        if lo in values and abs(values[hi] - values[lo]) >= gap:
            raise InconsistencyError(
                f"{family}: no plateau, |v({hi}) - v({lo})| = "
                f"{abs(values[hi] - values[lo]):.4f} >= {gap}")
    write_csv(out_dir / "fig6.csv",
              ["M", "kernel_id", "v_eff", "m_A", "m_G", "m_H"], rows)
    return ["fig6.csv"]


def _sigma_sweep_v_eff(M: int, sigma: float, vbar: float, kind: MeanKind,
                       kernel_builder) -> float:
    if sigma == 0.0:
        return vbar  # homogeneous population regardless of the kernel
    traits = make_trait_set(M, sigma, vbar, kind)
    return _matrix_v_eff(traits, kernel_builder(traits.M))


def run_fig7(out_dir, settings, seed, threads=1) -> list[str]:
    vbar = settings["vbar"]
    rows = []
    for M in settings["M_values"]:
        alphas = list(settings["alphas"])
        if not alphas:
            alphas = sorted({round(1.0 / M, 12), alpha_neutral(M),
                             *np.linspace(0.0, 0.95, settings["n_extra_alphas"]).round(12)})
        for alpha in alphas:
            gamma = gamma_uniform_law(M, alpha)
            for kind_name in settings["mean_kinds"]:
                kind = _MEAN_KINDS[kind_name]
                for sigma in settings["sigmas"]:
                    try:
                        v_eff = _sigma_sweep_v_eff(
                            M, sigma, vbar, kind,
                            lambda m, a=alpha: make_kernel_alpha(m, a))
                    except DomainError:
                        rows.append([M, alpha, kind_name, sigma, "", gamma,
                                     "sigma_out_of_range"])
                        continue
                    rows.append([M, alpha, kind_name, sigma, v_eff, gamma, "ok"])
                    if kind is MeanKind.ARITHMETIC and \
                            abs(alpha - alpha_neutral(M)) < 1e-15 and \
                            abs(v_eff - vbar) > 1e-9:
                        raise InconsistencyError(
                            f"neutral kernel must pin v_eff to {vbar}, got {v_eff}")
    write_csv(out_dir / "fig7.csv",
              ["M", "alpha", "mean_kind", "sigma", "v_eff", "gamma", "status"],
              rows)
    return ["fig7.csv"]


def run_fig8(out_dir, settings, seed, threads=1) -> list[str]:
    vbar = settings["vbar"]
    rows = []
    for M in settings["M_values"]:
        for family in settings["kernels"]:
            if family == "alpha0":
                alpha = alpha_neutral(M)
            elif family == "uniform":
                alpha = 1.0 / M
            else:
                alpha = math.nan
            gamma = gamma_uniform_law(M, alpha) if not math.isnan(alpha) else math.nan
            for sigma in settings["sigmas"]:
                v_eff = _sigma_sweep_v_eff(
                    M, sigma, vbar, MeanKind.ARITHMETIC,
                    lambda m, f=family: _kernel_for_family(f, m, seed))
                rows.append([M, family, alpha, sigma, v_eff, gamma])
    write_csv(out_dir / "fig8.csv",
              ["M", "kernel_id", "alpha", "sigma", "v_eff", "gamma"], rows)
    return ["fig8.csv"]


# --- profile sweeps (linear-growth analytic machinery) -----------------------

def _profile_sweep_rows(traits_pair, kernel: HeredityKernel, beta: float,
                        grid: SizeGrid, stride: int, x_cut: float,
                        label_cols: list) -> list[list]:
    triplet = caseB_triplet(traits_pair, kernel)
    shape = profile_caseB_homogeneous(constant_rate(beta), grid)
    nodes = grid.nodes
    keep = np.arange(0, nodes.size, stride)
    keep = keep[nodes[keep] <= x_cut]
    rows = []
    for i in range(traits_pair.M):
        mass = float(triplet.fractions[i])
        for j in keep:
            rows.append(label_cols + [i + 1, float(nodes[j]),
                                      mass * float(shape.values[0, j]), mass])
    return rows


def run_fig4(out_dir, settings, seed, threads=1) -> list[str]:
    v1, v2 = settings["traits"]
    traits = TraitSet.of(v1, v2)
    grid = SizeGrid.uniform(settings["dx"], settings["x_max"])
    rows = []
    for sweep_id, k2_of in (("k2=k1", lambda k: k), ("k2=1-k1", lambda k: 1.0 - k)):
        for k1 in settings["k_values"]:
            kernel = make_kernel_bimodal(k1, k2_of(k1))
            rows.extend(_profile_sweep_rows(
                traits, kernel, settings["beta"], grid, settings["out_stride"],
                settings["x_cut"], [sweep_id, k1]))
    write_csv(out_dir / "fig4.csv",
              ["sweep_id", "sweep_param", "type", "x", "N", "mass"], rows)
    return ["fig4.csv"]


def run_figS1(out_dir, settings, seed, threads=1) -> list[str]:
    v1, v2 = settings["traits"]
    traits = TraitSet.of(v1, v2)
    grid = SizeGrid.uniform(settings["dx"], settings["x_max"])
    rows = []
    panels = [(f"k2={k2:g}", "k1", lambda k, f=k2: (k, f))
              for k2 in settings["fixed_k2"]]
    panels += [(f"k1={k1:g}", "k2", lambda k, f=k1: (f, k))
               for k1 in settings["fixed_k1"]]
    for panel, _swept, pair_of in panels:
        for k in settings["k_values"]:
            kernel = make_kernel_bimodal(*pair_of(k))
            rows.extend(_profile_sweep_rows(
                traits, kernel, settings["beta"], grid, settings["out_stride"],
                settings["x_cut"], [panel, k]))
    write_csv(out_dir / "figS1.csv",
              ["panel", "sweep_param", "type", "x", "N", "mass"], rows)
    return ["figS1.csv"]


# --- PDE-backed experiments --------------------------------------------------

def run_fig2(out_dir, settings, seed, threads=1) -> list[str]:
    v1, v2 = settings["traits"]
    traits = TraitSet.of(v1, v2)
    kernel = make_kernel_bimodal(settings["k1"], settings["k2"])
    beta = settings["beta"]
    grid = SizeGrid.uniform(settings["dx"], settings["x_max"])
    het = solve_heterogeneous(case_a(traits, kernel, beta, "uniform"), grid,
                              settings["tol"])
    hom = profile_uniform_division(beta, grid, mass_tol=1e-3)
    hom_vals = hom.values[0] / hom.total_mass()
    masses = het.masses
    normalized = het.profile.values / masses[:, None]
    weighted = masses @ normalized

    nodes = grid.nodes
    keep = np.arange(0, nodes.size, settings["out_stride"])
    keep = keep[nodes[keep] <= settings["x_cut"]]
    rows = []
    for name, series in (("N_1", normalized[0]), ("N_2", normalized[1]),
                         ("N_v", hom_vals), ("m_weighted", weighted)):
        rows.extend([[name, float(nodes[j]), float(series[j])] for j in keep])
    write_csv(out_dir / "fig2_profiles.csv", ["series", "x", "N"], rows,
              comments=(f"beta={beta:.17g}", "case=A",
                        f"kernel=bimodal:{settings['k1']:.17g},{settings['k2']:.17g}",
                        f"lambda={het.lambda_:.17g}"))
    write_csv(out_dir / "fig2_masses.csv", ["type", "mass"],
              [[i + 1, float(m)] for i, m in enumerate(masses)])
    return ["fig2_profiles.csv", "fig2_masses.csv"]


def _figs2_point(args: tuple) -> list:
    (kind_name, sigma, alpha, beta_spec, M, vbar, dx, x_max, tol) = args
    beta_fn = parse_rate_spec(beta_spec)
    if sigma == 0.0:
        traits = TraitSet.of(vbar)
        kernel = make_kernel_noheredity([1.0])
    else:
        traits = make_trait_set(M, sigma, vbar, _MEAN_KINDS[kind_name])
        kernel = make_kernel_alpha(M, alpha)
    model = ModelSpec("custom", "linear", beta_fn, "mitosis", traits, kernel)
    grid = SizeGrid.uniform(dx, x_max)
    try:
        sol = solve_heterogeneous(model, grid, tol)
        # linear growth scales all rates by the trait, so lambda doubles when
        # every trait doubles and the effective trait is lambda itself
        return [kind_name, sigma, alpha, sol.lambda_, sol.lambda_,
                sol.residual, sol.iterations, 1]
    except ConvergenceError as err:
        return [kind_name, sigma, alpha, "", "", err.residual or math.nan,
                0, 0]


def run_figS2(out_dir, settings, seed, threads=1) -> list[str]:
    files = []
    for beta_spec in settings["betas"]:
        tasks = [(kind_name, sigma, alpha, beta_spec, settings["M"],
                  settings["vbar"], settings["dx"], settings["x_max"],
                  settings["tol"])
                 for kind_name in settings["mean_kinds"]
                 for sigma in settings["sigmas"]
                 for alpha in settings["alphas"]]
        rows = _pmap(_figs2_point, tasks, threads)
        tag = "const" if parse_rate_spec(beta_spec).is_constant else "linear"
        name = f"figS2_beta_{tag}.csv"
        write_csv(out_dir / name,
                  ["mean_kind", "sigma", "alpha", "lambda", "v_eff_reported",
                   "residual", "iterations", "converged"],
                  rows, comments=(f"beta={beta_spec}", "tau=linear",
                                  "frag=mitosis"))
        files.append(name)
    return files


def _pmap(fn, items, threads: int) -> list:
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


RUNNERS = {
    "fig2": run_fig2,
    "fig3": run_fig3,
    "fig4": run_fig4,
    "fig5_heatmap": run_fig5_heatmap,
    "fig5_surfaces": run_fig5_surfaces,
    "fig6_Mconvergence": run_fig6,
    "fig7_sigma_alpha": run_fig7,
    "fig8_neutrality": run_fig8,
    "figS1_fractions": run_figS1,
    "figS2_mitosis": run_figS2,
}


def run_experiment(experiment: str, out_dir: Path | str,
                   file_section: dict | None = None, cli: dict | None = None,
                   seed: int | None = None, threads: int = 1) -> Path:
    """Resolve settings, run, and write CSVs plus a manifest. Returns the
    manifest path."""
    settings = resolve_settings(experiment, file_section, cli)
    seed = DEFAULT_SEED if seed is None else seed
    out = Path(out_dir) / experiment
    out.mkdir(parents=True, exist_ok=True)
    files = RUNNERS[experiment](out, settings, seed, threads)
    return write_manifest(out, experiment, seed, settings, files)
