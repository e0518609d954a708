"""Reproducible CSV and manifest output.

All numeric output uses 17 significant digits (lossless for doubles), dot
decimal, comma separators and LF endings, so that a rerun with identical
inputs is byte-identical. Files may start with '#' comment lines carrying
run metadata.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from pathlib import Path

import numpy as np

from .dynamics import ConvergenceDiagnostics, Trajectory
from .errors import SchemaError
from .profiles import SizeProfile
from .spectral import EigenTriplet


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def render_csv(header: list[str], rows, comments: tuple[str, ...] = ()) -> str:
    out = io.StringIO()
    for line in comments:
        out.write(f"# {line}\n")
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(fmt(v) for v in row) + "\n")
    return out.getvalue()


def write_csv(path: Path, header: list[str], rows,
              comments: tuple[str, ...] = ()) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_csv(header, rows, comments), newline="\n")
    return path


def read_csv(path: Path) -> tuple[list[str], list[str], list[list[str]]]:
    """Return (comment lines, header, string rows)."""
    comments: list[str] = []
    body: list[str] = []
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            comments.append(line[1:].strip())
        elif line.strip():
            body.append(line)
    if not body:
        raise SchemaError(f"{path} has no header row")
    rows = list(csv.reader(body))
    return comments, rows[0], rows[1:]


# --- typed writers -----------------------------------------------------------

def triplet_header(M: int) -> list[str]:
    return (["M", "beta", "case", "lambda", "v_eff"]
            + [f"N_{i + 1}" for i in range(M)]
            + [f"phi_{i + 1}" for i in range(M)])


def triplet_row(triplet: EigenTriplet) -> list:
    return ([triplet.M, triplet.beta, triplet.case, triplet.lambda_,
             triplet.effective_trait]
            + [float(x) for x in triplet.fractions]
            + [float(x) for x in triplet.adjoint])


def render_triplet(triplet: EigenTriplet) -> str:
    return render_csv(triplet_header(triplet.M), [triplet_row(triplet)])


def write_profile_csv(path: Path, profile: SizeProfile, meta: dict,
                      stride: int = 1, x_cut: float | None = None) -> Path:
    """Columns x, N_1..N_M; '#' lines carry the run metadata."""
    comments = tuple(f"{k}={fmt(v)}" for k, v in meta.items())
    header = ["x"] + [f"N_{i + 1}" for i in range(profile.n_types)]
    nodes = profile.grid.nodes
    keep = np.arange(0, nodes.size, stride)
    if x_cut is not None:
        keep = keep[nodes[keep] <= x_cut]
    rows = [[nodes[j]] + [profile.values[i, j] for i in range(profile.n_types)]
            for j in keep]
    return write_csv(path, header, rows, comments)


def write_trajectory_csv(path: Path, trajectory: Trajectory,
                         stride: int = 1) -> Path:
    header = ["t", "type", "x", "n"]
    nodes = trajectory.grid.nodes
    keep = np.arange(0, nodes.size, stride)
    rows = []
    for snap in trajectory.snapshots:
        for i in range(snap.densities.shape[0]):
            for j in keep:
                rows.append([snap.time, i + 1, nodes[j], snap.densities[i, j]])
    return write_csv(path, header, rows)


def write_diagnostics_csv(path: Path, diag: ConvergenceDiagnostics) -> Path:
    header = ["t", "phi_weighted_mass", "l1_phi_distance", "raw_mass"]
    rows = [[t, w, d, r] for t, w, d, r in
            zip(diag.times, diag.phi_weighted_mass, diag.l1_phi_distance,
                diag.raw_mass)]
    return write_csv(path, header, rows)


# --- manifest ----------------------------------------------------------------

def settings_hash(settings: dict) -> str:
    canonical = json.dumps(settings, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def write_manifest(directory: Path, experiment: str, seed: int,
                   settings: dict, files: list[str]) -> Path:
    manifest = {
        "experiment": experiment,
        "seed": seed,
        "config_hash": settings_hash(settings),
        "settings": settings,
        "files": sorted(files),
    }
    path = Path(directory) / "manifest.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n",
                    newline="\n")
    return path
