"""Malthus parameter and effective growth rate via the trait matrix problem.

Integrating the steady-state system over size reduces it, whenever the
adjoint is constant per type, to a matrix eigenproblem

    lambda Nbar = A Nbar,   lambda phi = A^T phi,
    A = beta (-Id + 2 kappa^T) Diag(v).

Shifting by 2 beta v_max makes the matrix nonnegative and irreducible, so
the dominant eigenvalue is a Perron root reachable by power iteration.
Two independent routes cross-check it: the closed form for two traits, and
for heredity-free kernels the unique positive root of an explicit
polynomial isolated by bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError, InconsistencyError
from .kernels import HeredityKernel, _strongly_connected, make_kernel_noheredity
from .traits import TraitSet

EIG_TOL = 1e-12
ITER_CAP = 10**6
_CHECK_EVERY = 128
_MAX_SQUARINGS = 8

FRACTION_SUM_TOL = 1e-10
ADJOINT_NORM_TOL = 1e-10
WEIGHTED_MEAN_TOL = 1e-10
FIXED_POINT_TOL = 1e-9
_PATTERN_TOL = 1e-12
BISECTION_REL_TOL = 1e-13


@dataclass(frozen=True, eq=False)
class GrowthMatrix:
    """A = beta (-Id + 2 kappa^T) Diag(v) with provenance references."""

    entries: np.ndarray
    beta: float
    traits: TraitSet
    kernel: HeredityKernel

    @property
    def M(self) -> int:
        return self.entries.shape[0]

    def shifted(self) -> tuple[np.ndarray, float]:
        """Nonnegative irreducible companion A + 2 beta v_max Id and its shift."""
        shift = 2.0 * self.beta * self.traits.v_max
        return self.entries + shift * np.eye(self.M), shift


@dataclass(frozen=True, eq=False)
class EigenTriplet:
    """(lambda, population fractions, adjoint weights) with normalizations.

    fractions sum to 1; sum(fractions * adjoint) = 1; lambda equals
    beta times the fraction-weighted trait average; the effective trait
    lies in [v_min, v_max].
    """

    lambda_: float
    fractions: np.ndarray
    adjoint: np.ndarray
    effective_trait: float
    beta: float
    case: str
    traits: TraitSet

    def __post_init__(self):
        nbar = np.asarray(self.fractions, dtype=float)
        phi = np.asarray(self.adjoint, dtype=float)
        nbar.setflags(write=False)
        phi.setflags(write=False)
        object.__setattr__(self, "fractions", nbar)
        object.__setattr__(self, "adjoint", phi)
        if self.lambda_ <= 0:
            raise InconsistencyError(f"Malthus parameter must be positive, got {self.lambda_}")
        if (nbar < -1e-13).any() or (phi <= 0).any():
            raise InconsistencyError("fractions must be nonnegative and adjoint positive")
        if abs(nbar.sum() - 1.0) > FRACTION_SUM_TOL:
            raise InconsistencyError(f"fractions sum {nbar.sum()!r} deviates from 1")
        if abs(float(nbar @ phi) - 1.0) > ADJOINT_NORM_TOL:
            raise InconsistencyError(f"adjoint normalization sum(N*phi) = {nbar @ phi!r}")
        weighted = self.beta * float(self.traits.array() @ nbar)
        if abs(self.lambda_ - weighted) > WEIGHTED_MEAN_TOL * max(1.0, abs(self.lambda_)):
            raise InconsistencyError(
                f"lambda {self.lambda_} != beta * weighted trait mean {weighted}")
        slack = 1e-9 * self.traits.v_max
        if not self.traits.v_min - slack <= self.effective_trait <= self.traits.v_max + slack:
            raise InconsistencyError(
                f"effective trait {self.effective_trait} outside "
                f"[{self.traits.v_min}, {self.traits.v_max}]")

    @property
    def M(self) -> int:
        return self.fractions.size


def build_growth_matrix(traits: TraitSet, kernel: HeredityKernel,
                        beta: float) -> GrowthMatrix:
    """Assemble A with entries A[i, j] = beta (2 kappa[j, i] - delta_ij) v_j."""
    if kernel.M != traits.M:
        raise DomainError(f"kernel dimension {kernel.M} != trait count {traits.M}")
    if beta <= 0:
        raise DomainError(f"beta must be positive, got {beta}")
    v = traits.array()
    A = beta * (2.0 * kernel.entries.T - np.eye(traits.M)) * v[np.newaxis, :]
    matrix = GrowthMatrix(A, float(beta), traits, kernel)
    shifted, _ = matrix.shifted()
    if shifted.min() < 0 or not _strongly_connected(shifted > 0):
        raise InconsistencyError("shifted growth matrix is not nonnegative irreducible")
    return matrix


def _perron(mat: np.ndarray) -> tuple[float, np.ndarray, int]:
    """Dominant eigenpair of a nonnegative irreducible matrix by power iteration.

    Starts from the all-ones direction. If the residual stalls (small
    subdominant gap, e.g. a period-2 kernel pattern), iteration continues on
    the squared matrix; certification always happens against the original.
    Returns (eigenvalue, unit-sum eigenvector, iterations).
    """
    n = mat.shape[0]
    x = np.full(n, 1.0 / n)
    work = mat
    squared = 0
    lam_prev = None
    checkpoint = math.inf
    lam = math.inf
    resid = math.inf
    for it in range(1, ITER_CAP + 1):
        y = work @ x
        if squared:
            x_new = y / y.sum()
            z = mat @ x_new
            lam = float(z.sum())
            resid = float(np.abs(z - lam * x_new).sum())
            certified = x_new
        else:
            lam = float(y.sum())
            resid = float(np.abs(y - lam * x).sum())
            certified = x
            x_new = y / lam
        if lam_prev is not None and abs(lam - lam_prev) <= EIG_TOL * abs(lam) \
                and resid <= EIG_TOL:
            return lam, certified, it
        if it % _CHECK_EVERY == 0:
            if resid > 0.25 * checkpoint and squared < _MAX_SQUARINGS:
                work = work @ work
                work = work / work.max()
                squared += 1
            checkpoint = resid
        lam_prev = lam
        x = x_new
    raise ConvergenceError(
        f"power iteration did not reach {EIG_TOL} within {ITER_CAP} iterations",
        residual=resid)


def dominant_eigentriplet(matrix: GrowthMatrix, case: str = "A") -> EigenTriplet:
    """Perron triplet of the growth matrix: lambda, fractions and adjoint.

    Power iteration runs on the shifted matrix and on its transpose; the
    shift is then removed. The effective trait is lambda/beta, which in the
    linear-growth reduced system (beta = 1) is lambda itself.
    """
    shifted, shift = matrix.shifted()
    lam_shifted, nbar, _ = _perron(shifted)
    _, phi_raw, _ = _perron(shifted.T)
    lam = lam_shifted - shift
    nbar = nbar / nbar.sum()
    phi = phi_raw / float(phi_raw @ nbar)
    return EigenTriplet(lam, nbar, phi, lam / matrix.beta, matrix.beta, case,
                        matrix.traits)


def effective_trait_bimodal(v1: float, v2: float, k1: float, k2: float) -> float:
    """Closed-form effective trait for two traits exchanging at rates k1, k2.

    The kernel rows are (1-k1, k1) and (k2, 1-k2); ki is the probability
    that a mother of trait i switches her daughter to the other trait. The
    expression is symmetric under swapping the (trait, rate) pairs, so the
    argument order (by trait) does not matter.
    """
    for name, v in (("v1", v1), ("v2", v2)):
        if v <= 0:
            raise DomainError(f"{name} must be positive, got {v}")
    for name, k in (("k1", k1), ("k2", k2)):
        if not 0.0 < k < 1.0:
            raise DomainError(f"{name} must lie in (0, 1), got {k}")
    if v1 > v2:
        v1, v2, k1, k2 = v2, v1, k2, k1
    a = (0.5 - k1) * v1
    b = (0.5 - k2) * v2
    return a + b + math.sqrt((a - b) ** 2 + 4.0 * k1 * k2 * v1 * v2)


def bimodal_limit_k1_to_zero(v1: float, v2: float, k2: float) -> float:
    """Limit of the bimodal effective trait as k1 -> 0: max(v1, (1-2 k2) v2).

    The slower trait wins only if it outgrows what the faster,
    self-reproducing trait keeps leaking; otherwise both coexist and the
    limit sits strictly between the traits.
    """
    if not 0 < v1 < v2:
        raise DomainError(f"need 0 < v1 < v2, got ({v1}, {v2})")
    if not 0.0 < k2 < 1.0:
        raise DomainError(f"k2 must lie in (0, 1), got {k2}")
    return max(v1, (1.0 - 2.0 * k2) * v2)


def _elementary_symmetric(values: np.ndarray) -> np.ndarray:
    """Coefficients e_0..e_n of prod (u + v_k), by incremental expansion."""
    e = np.zeros(values.size + 1)
    e[0] = 1.0
    for m, v in enumerate(values, start=1):
        e[1:m + 1] = e[1:m + 1] + v * e[0:m]
    return e


@dataclass(frozen=True, eq=False)
class NoHeredityPolynomial:
    """P(u) whose unique positive root is the heredity-free effective trait.

    coefficients[n] multiplies u^n; the leading coefficient is -1 and the
    constant term is the full product of the traits, so a positive root
    always exists.
    """

    coefficients: tuple[float, ...]
    elementary_symmetric: tuple[float, ...]

    def __post_init__(self):
        if abs(self.coefficients[-1] + 1.0) > 1e-9:
            raise InconsistencyError(
                f"leading coefficient must be -1, got {self.coefficients[-1]}")
        if self.coefficients[0] <= 0:
            raise InconsistencyError(
                f"constant term must be positive, got {self.coefficients[0]}")

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, u: float) -> float:
        acc = 0.0
        for c in reversed(self.coefficients):
            acc = acc * u + c
        return acc


def noheredity_polynomial(traits: TraitSet, weights) -> NoHeredityPolynomial:
    """Build P for a kernel whose rows all equal `weights`.

    The u^n coefficient is S_{M-n} - 2 sum_j w_j e_{M-n}(traits without v_j),
    with S the elementary symmetric sums of all traits. Each reduced set is
    expanded afresh; no polynomial deflation is used.
    """
    make_kernel_noheredity(weights)  # validates the weight vector
    w = np.asarray(weights, dtype=float)
    if w.size != traits.M:
        raise DomainError(f"weights length {w.size} != trait count {traits.M}")
    v = traits.array()
    M = traits.M
    S = _elementary_symmetric(v)
    excl = np.zeros((M, M + 1))
    for j in range(M):
        excl[j, :M] = _elementary_symmetric(np.delete(v, j))
        # degree M over M-1 values is an empty sum
    coeffs = [S[M - n] - 2.0 * float(w @ excl[:, M - n]) for n in range(M + 1)]
    return NoHeredityPolynomial(tuple(coeffs), tuple(float(s) for s in S))


def solve_noheredity(traits: TraitSet, weights, beta: float = 1.0) -> EigenTriplet:
    """Effective trait for a heredity-free kernel by polynomial bisection.

    The root is bracketed in [v_min, v_max]; bisection refines it to an
    absolute tolerance of 1e-13 * v_max. Fractions follow the closed form
    2 v w_i / (v + v_i) and the adjoint is proportional to v_i / (v_i + v).
    """
    poly = noheredity_polynomial(traits, weights)
    w = np.asarray(weights, dtype=float)
    v_arr = traits.array()
    if traits.M == 1:
        root = traits.v_min
    else:
        a, b = traits.v_min, traits.v_max
        fa, fb = poly(a), poly(b)
        if fa == 0.0:
            root = a
        elif fb == 0.0:
            root = b
        elif fa < 0.0 or fb > 0.0:
            raise InconsistencyError(
                f"no sign change on [{a}, {b}]: P(a)={fa}, P(b)={fb}; "
                "polynomial construction is broken")
        else:
            tol = BISECTION_REL_TOL * traits.v_max
            while b - a > tol:
                mid = 0.5 * (a + b)
                if mid <= a or mid >= b:
                    break
                if poly(mid) > 0.0:
                    a = mid
                else:
                    b = mid
            root = 0.5 * (a + b)
    nbar = 2.0 * root * w / (root + v_arr)
    phi = v_arr / (v_arr + root)
    phi = phi / float(phi @ nbar)
    return EigenTriplet(beta * root, nbar, phi, root, float(beta), "A", traits)


def population_fractions(traits: TraitSet, kernel: HeredityKernel,
                         triplet: EigenTriplet) -> np.ndarray:
    """Return the fractions after verifying their steady-state identities.

    Always checks the fixed point
    Nbar_i = 2/(v + v_i) * sum_j kappa[j, i] v_j Nbar_j; for kernels of the
    alpha family (including uniform and the neutral diagonal) the matching
    closed form is checked too.
    """
    if kernel.M != traits.M or triplet.M != traits.M:
        raise DomainError("traits, kernel and triplet dimensions disagree")
    v = triplet.effective_trait
    vi = traits.array()
    nbar = triplet.fractions
    rhs = 2.0 / (v + vi) * (kernel.entries.T @ (vi * nbar))
    err = float(np.abs(nbar - rhs).max())
    if err > FIXED_POINT_TOL:
        raise InconsistencyError(f"population-fraction fixed point residual {err:.3e}")

    M = traits.M
    if M >= 2:
        diag = np.diag(kernel.entries)
        off = kernel.entries[~np.eye(M, dtype=bool)]
        alpha = float(diag[0])
        is_alpha_family = (np.abs(diag - alpha).max() <= _PATTERN_TOL and
                           np.abs(off - (1.0 - alpha) / (M - 1)).max() <= _PATTERN_TOL)
        if is_alpha_family:
            closed = ((1.0 - alpha) / M * v) / (
                (M - 1) / (2.0 * M) * v + ((M + 1) / (2.0 * M) - alpha) * vi)
            if float(np.abs(nbar - closed).max()) > FIXED_POINT_TOL:
                raise InconsistencyError(
                    "fractions disagree with the alpha-family closed form")
            if abs(alpha - (0.5 + 0.5 / M)) <= _PATTERN_TOL:
                if float(np.abs(nbar - 1.0 / M).max()) > FIXED_POINT_TOL:
                    raise InconsistencyError(
                        "neutral kernel must equidistribute the population")
    return nbar.copy()


def effective_trait(triplet: EigenTriplet, case: str) -> float:
    """lambda/beta under constant growth (case A), lambda under linear (case B)."""
    if case == "A":
        return triplet.lambda_ / triplet.beta
    if case == "B":
        return triplet.lambda_
    raise DomainError(f"unknown case {case!r}")
