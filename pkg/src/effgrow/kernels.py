"""Heredity kernels: row-stochastic irreducible trait-transition matrices.

Entry (i, j) is the probability that a mother of trait i bears a daughter
of trait j. Row sums must equal 1 within ROW_SUM_TOL and the positivity
graph must be strongly connected, so that every trait eventually seeds
every other.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, SchemaError
from .rng import SplitMix64

ROW_SUM_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class KernelReport:
    """Outcome of validate_kernel; constructors refuse kernels whose report fails."""

    row_sum_max_error: float
    min_entry: float
    stochastic: bool
    irreducible: bool
    messages: tuple[str, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return self.stochastic and self.irreducible


@dataclass(frozen=True, eq=False)
class HeredityKernel:
    entries: np.ndarray

    def __post_init__(self):
        arr = np.array(self.entries, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise DomainError(f"kernel must be a square matrix, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)
        report = validate_kernel(self)
        if not report.ok:
            raise DomainError("invalid heredity kernel: " + "; ".join(report.messages))

    @property
    def M(self) -> int:
        return self.entries.shape[0]


def _strongly_connected(positive: np.ndarray) -> bool:
    """Strong connectivity of the exact-positivity graph (entry > 0)."""
    n = positive.shape[0]
    for adjacency in (positive, positive.T):
        seen = np.zeros(n, dtype=bool)
        seen[0] = True
        queue = deque([0])
        while queue:
            i = queue.popleft()
            for j in np.nonzero(adjacency[i])[0]:
                if not seen[j]:
                    seen[j] = True
                    queue.append(int(j))
        if not seen.all():
            return False
    return True


def validate_kernel(kernel: HeredityKernel | np.ndarray) -> KernelReport:
    """Check stochasticity (row sums, nonnegativity) and irreducibility.

    Irreducibility is decided by graph search on the strict-positivity
    pattern; no floating-point matrix powers are involved.
    """
    arr = kernel.entries if isinstance(kernel, HeredityKernel) else np.asarray(kernel, float)
    messages = []
    min_entry = float(arr.min())
    row_err = float(np.abs(arr.sum(axis=1) - 1.0).max())
    stochastic = min_entry >= 0.0 and row_err <= ROW_SUM_TOL
    if min_entry < 0.0:
        messages.append(f"negative entry {min_entry}")
    if row_err > ROW_SUM_TOL:
        messages.append(f"row sums deviate from 1 by {row_err:.3e} > {ROW_SUM_TOL}")
    irreducible = _strongly_connected(arr > 0.0)
    if not irreducible:
        messages.append("positivity graph is not strongly connected")
    return KernelReport(row_err, min_entry, stochastic, irreducible, tuple(messages))


def make_kernel_bimodal(k1: float, k2: float) -> HeredityKernel:
    """2x2 kernel with rows (1-k1, k1) and (k2, 1-k2), k1, k2 in (0, 1).

    The open interval is required: k = 0 or 1 disconnects or degenerates
    the two-trait exchange.
    """
    for name, k in (("k1", k1), ("k2", k2)):
        if not 0.0 < k < 1.0:
            raise DomainError(f"{name} must lie in the open interval (0, 1), got {k}")
    return HeredityKernel(np.array([[1.0 - k1, k1], [k2, 1.0 - k2]]))


def make_kernel_alpha(M: int, alpha: float) -> HeredityKernel:
    """Kernel with diagonal alpha and off-diagonal (1-alpha)/(M-1).

    alpha parameterizes the mother-daughter trait correlation: alpha = 1/M
    is the uncorrelated (uniform) case; alpha -> 1 is perfect inheritance
    and is excluded because isolated traits make the kernel reducible.
    """
    if M < 2:
        raise DomainError(f"alpha-family kernel needs M >= 2, got {M}")
    if not 0.0 <= alpha < 1.0:
        raise DomainError(f"alpha must lie in [0, 1), got {alpha}")
    off = (1.0 - alpha) / (M - 1)
    arr = np.full((M, M), off)
    np.fill_diagonal(arr, alpha)
    return HeredityKernel(arr)


def alpha_neutral(M: int) -> float:
    """The threshold alpha at which trait spread stops moving the growth rate."""
    return 0.5 + 0.5 / M


def make_kernel_alpha0(M: int) -> HeredityKernel:
    """Kernel with diagonal 1/2 + 1/(2M) and off-diagonal 1/(2M)."""
    return make_kernel_alpha(M, alpha_neutral(M))


def make_kernel_noheredity(weights) -> HeredityKernel:
    """Kernel whose rows all equal `weights`: daughters ignore the mother's trait.

    Strict positivity of every weight is required; it guarantees
    irreducibility.
    """
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.size == 0:
        raise DomainError("weights must be a nonempty vector")
    if (w <= 0).any():
        raise DomainError(f"weights must be strictly positive, got {w.tolist()}")
    if abs(w.sum() - 1.0) > ROW_SUM_TOL:
        raise DomainError(f"weights must sum to 1 within {ROW_SUM_TOL}, got sum {w.sum()!r}")
    return HeredityKernel(np.tile(w, (w.size, 1)))


def make_kernel_uniform(M: int) -> HeredityKernel:
    return make_kernel_noheredity(np.full(M, 1.0 / M))


def make_kernel_random(M: int, seed: int) -> HeredityKernel:
    """Row-normalized matrix of uniform [0,1) draws from the seeded stream.

    Entries are drawn row-major from SplitMix64(seed), so the same (M, seed)
    yields a bit-identical kernel everywhere. A zero-sum row (measure zero)
    is redrawn from the continuing stream.
    """
    if M < 2:
        raise DomainError(f"random kernel needs M >= 2, got {M}")
    stream = SplitMix64(seed)
    rows = []
    for _ in range(M):
        row = np.array(stream.floats(M))
        while row.sum() == 0.0:
            row = np.array(stream.floats(M))
        rows.append(row / row.sum())
    return HeredityKernel(np.array(rows))


# --- plain-text serialization (config files, CLI) ---------------------------

def format_matrix(arr: np.ndarray) -> str:
    """Row-major text form: entries comma-separated, rows ';'-separated."""
    return ";".join(",".join(f"{x:.17g}" for x in row) for row in np.atleast_2d(arr))


def format_kernel(kernel: HeredityKernel) -> str:
    return format_matrix(kernel.entries)


def format_traits(traits) -> str:
    return ",".join(f"{v:.17g}" for v in traits.values)


def parse_matrix(text: str) -> np.ndarray:
    try:
        rows = [[float(x) for x in row.split(",")] for row in text.strip().split(";")]
    except ValueError as exc:
        raise SchemaError(f"malformed matrix text {text!r}: {exc}") from None
    if len({len(r) for r in rows}) != 1:
        raise SchemaError(f"ragged matrix text {text!r}")
    return np.array(rows)


def parse_kernel_spec(spec: str, M: int | None = None) -> HeredityKernel:
    """Parse a kernel description.

    Accepted forms: ``uniform``, ``alpha:A``, ``alpha0``, ``bimodal:K1,K2``,
    ``noheredity:W1,...,WM``, ``random:SEED``, ``matrix:R11,R12;R21,R22`` or a
    bare row-major matrix. Forms without an intrinsic dimension need M.
    """
    spec = spec.strip()
    head, _, rest = spec.partition(":")
    try:
        if head == "uniform":
            return make_kernel_uniform(_require_m(M, spec))
        if head == "alpha":
            return make_kernel_alpha(_require_m(M, spec), float(rest))
        if head == "alpha0":
            return make_kernel_alpha0(_require_m(M, spec))
        if head == "bimodal":
            k1, k2 = (float(x) for x in rest.split(","))
            return make_kernel_bimodal(k1, k2)
        if head == "noheredity":
            return make_kernel_noheredity([float(x) for x in rest.split(",")])
        if head == "random":
            return make_kernel_random(_require_m(M, spec), int(rest))
        if head == "matrix":
            return HeredityKernel(parse_matrix(rest))
        return HeredityKernel(parse_matrix(spec))
    except (ValueError, DomainError) as exc:
        if isinstance(exc, DomainError):
            raise
        raise SchemaError(f"cannot parse kernel spec {spec!r}: {exc}") from None


def _require_m(M: int | None, spec: str) -> int:
    if M is None:
        raise SchemaError(f"kernel spec {spec!r} needs an explicit dimension")
    return M
