import math

import numpy as np
import pytest

from effgrow import DomainError, TraitSet, pearson_correlation_alpha
from effgrow.correlation import gamma_uniform_law, sample_mother_daughter
from effgrow.traits import MeanKind, make_trait_set


def uniform_law(M):
    return np.full(M, 1.0 / M)


def any_traits(M):
    return make_trait_set(M, 3.0, 4.0, MeanKind.ARITHMETIC)


def test_uniform_law_closed_form():
    r = pearson_correlation_alpha(10, 0.1, uniform_law(10), any_traits(10))
    assert r.gamma == pytest.approx(0.0, abs=1e-14)
    r = pearson_correlation_alpha(10, 0.55, uniform_law(10), any_traits(10))
    assert r.gamma == pytest.approx(0.5, abs=1e-13)
    assert gamma_uniform_law(10, 0.55) == pytest.approx(0.5, abs=1e-15)


def test_uniform_law_closed_form_trait_independent():
    for traits in (any_traits(4), TraitSet.of(1.0, 2.0, 30.0, 31.0)):
        r = pearson_correlation_alpha(4, 0.7, uniform_law(4), traits)
        assert r.gamma == pytest.approx((0.7 * 4 - 1) / 3, abs=1e-13)


def test_gamma_strictly_increasing_and_limits():
    M = 7
    alphas = np.linspace(0.005, 0.995, 100)
    gammas = [pearson_correlation_alpha(M, a, uniform_law(M), any_traits(M)).gamma
              for a in alphas]
    assert all(g2 > g1 for g1, g2 in zip(gammas, gammas[1:]))
    at_no_corr = pearson_correlation_alpha(M, 1.0 / M, uniform_law(M), any_traits(M))
    assert at_no_corr.gamma == pytest.approx(0.0, abs=1e-14)
    near_one = pearson_correlation_alpha(M, 1.0 - 1e-9, uniform_law(M), any_traits(M))
    assert near_one.gamma == pytest.approx(1.0, abs=1e-6)


def test_degenerate_mother_law_rejected():
    law = np.zeros(5)
    law[2] = 1.0
    with pytest.raises(DomainError):
        pearson_correlation_alpha(5, 0.5, law, any_traits(5))


def test_alpha_domain():
    with pytest.raises(DomainError):
        pearson_correlation_alpha(5, 0.0, uniform_law(5), any_traits(5))
    with pytest.raises(DomainError):
        pearson_correlation_alpha(5, 1.0, uniform_law(5), any_traits(5))


def correlation_se(vm, vd):
    """Delta-method standard error of the sample Pearson correlation.

    Valid for non-normal data: the influence function of r is
    x~ y~ - r/2 (x~^2 + y~^2) on standardized samples.
    """
    x = (vm - vm.mean()) / vm.std()
    y = (vd - vd.mean()) / vd.std()
    r = float((x * y).mean())
    infl = x * y - 0.5 * r * (x * x + y * y)
    return r, float(infl.std() / math.sqrt(len(x)))


def test_monte_carlo_agreement_nonuniform():
    rng = np.random.default_rng(1234)
    n = 10**6
    law = np.array([0.4, 0.3, 0.2, 0.1])
    traits = TraitSet.of(1.0, 2.0, 3.0, 4.0)
    report = pearson_correlation_alpha(4, 0.6, law, traits)
    vm, vd = sample_mother_daughter(4, 0.6, law, traits, n, rng)
    r_sample, se = correlation_se(vm, vd)
    assert abs(r_sample - report.gamma) <= 3.0 * se


def test_exact_enumeration_agreement_randomized():
    # joint law P(Vm=vi, Vd=vj) = law[i] * kappa_ij gives the correlation
    # by direct summation; the closed form must match to rounding
    from effgrow.kernels import make_kernel_alpha

    rng = np.random.default_rng(99)
    for _ in range(25):
        M = int(rng.integers(2, 9))
        alpha = float(rng.uniform(0.05, 0.95))
        law = rng.dirichlet(np.ones(M) * 3.0)
        while law.min() < 0.02:
            law = rng.dirichlet(np.ones(M) * 3.0)
        traits = TraitSet(tuple(np.sort(rng.uniform(0.5, 6.0, M))))
        report = pearson_correlation_alpha(M, alpha, law, traits)
        kappa = make_kernel_alpha(M, alpha).entries
        v = traits.array()
        v = v - v.mean()  # correlation is shift-invariant; improves conditioning
        joint = law[:, None] * kappa
        e_vm, e_vd = joint.sum(1) @ v, joint.sum(0) @ v
        var_m = joint.sum(1) @ v**2 - e_vm**2
        var_d = joint.sum(0) @ v**2 - e_vd**2
        cov = joint.ravel() @ np.outer(v, v).ravel() - e_vm * e_vd
        gamma_exact = cov / math.sqrt(var_m * var_d)
        assert report.gamma == pytest.approx(gamma_exact, abs=1e-12)


def test_monte_carlo_agreement_randomized():
    rng = np.random.default_rng(7)
    n = 200_000
    for _ in range(5):
        M = int(rng.integers(2, 8))
        alpha = float(rng.uniform(0.05, 0.95))
        law = rng.dirichlet(np.ones(M) * 3.0)
        while law.min() < 0.02:
            law = rng.dirichlet(np.ones(M) * 3.0)
        traits = TraitSet(tuple(np.sort(rng.uniform(0.5, 6.0, M))))
        report = pearson_correlation_alpha(M, alpha, law, traits)
        vm, vd = sample_mother_daughter(M, alpha, law, traits, n, rng)
        r_sample, se = correlation_se(vm, vd)
        assert abs(r_sample - report.gamma) <= 3.0 * se
