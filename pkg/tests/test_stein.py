from __future__ import annotations

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from paretogof import kernels
from paretogof.errors import DegenerateSampleError, ParameterDomainError
from paretogof.estimation import mle_alpha
from paretogof.stein import (
    COARSE_SUP,
    DEFAULT_SUP,
    SupSearchConfig,
    departure,
    ds1,
    ds1_standardized,
    ds2,
    ds2_shift_m,
    ds3,
    gen_exp_integral,
    phi,
    psi_alpha,
    sigma2,
    stein_laplace_statistics,
)

from .conftest import pareto_rows


def d_oracle(t, x):
    """Independent evaluation of the departure function at a scalar t > 0."""
    a = x.size / np.sum(np.log(x))
    # exp(-t) - exp(-t x) written without cancellation for tiny t
    stein = np.mean((a + 1.0) / x * (-math.exp(-t) * np.expm1(-t * (x - 1.0))) / t)
    return stein - np.mean(np.exp(-t * x))


def d_mpmath(t, x):
    mpmath.mp.dps = 50
    xs = [mpmath.mpf(float(v)) for v in x]
    t = mpmath.mpf(t)
    a = len(xs) / mpmath.fsum(mpmath.log(v) for v in xs)
    stein = mpmath.fsum((a + 1) / v * (mpmath.exp(-t) - mpmath.exp(-t * v)) / t for v in xs) / len(xs)
    return float(stein - mpmath.fsum(mpmath.exp(-t * v) for v in xs) / len(xs))


def quad_over_t(f, x):
    # break points at the data scales so quad sees each bump
    pts = sorted({0.0, *(1.0 / x), 1.0, 10.0, 60.0})
    total = 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        total += integrate.quad(f, lo, hi, epsabs=1e-13, epsrel=1e-12, limit=200)[0]
    return total + integrate.quad(f, 60.0, np.inf, epsabs=1e-14, limit=200)[0]


def random_samples(count, seed=3):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.integers(2, 21))
        alpha = float(rng.uniform(0.7, 5.0))
        out.append(pareto_rows(rng, 1, n, alpha)[0])
    return out


# ---------------------------------------------------------------- phi


def test_phi_examples():
    assert phi(2.0, 1.0, 1.0) == pytest.approx(1.0, abs=1e-15)
    assert phi(5.0, 0.0, 3.0) == 0.0
    e = math.e
    assert phi(e, 1.0 / e, 1.0) == pytest.approx((2.0 / e) * (1.0 / e - math.exp(-e)), rel=1e-14)


def test_phi_continuity_at_endpoints(rng):
    x = 1.0 + rng.exponential(3.0, 50)
    alpha = rng.uniform(0.2, 5.0, 50)
    limit_one = (alpha + 1.0) * (x - 1.0) / x
    gaps_one = [np.max(np.abs(phi(x, 1.0 - h, alpha[0]) - (alpha[0] + 1.0) * (x - 1.0) / x)) for h in (1e-3, 1e-5, 1e-7)]
    assert gaps_one[0] > gaps_one[1] > gaps_one[2]
    assert gaps_one[2] < 1e-4
    gaps_zero = [np.max(np.abs(phi(x, h, alpha[0]))) for h in (1e-3, 1e-6, 1e-12)]
    assert gaps_zero[0] > gaps_zero[1] > gaps_zero[2]
    assert np.all(np.abs(phi(x, 1.0, 1.0) - 2.0 * (x - 1.0) / x) < 1e-15)
    assert limit_one.shape == x.shape


def test_phi_domain():
    with pytest.raises(ParameterDomainError):
        phi(0.5, 0.5, 1.0)
    with pytest.raises(ParameterDomainError):
        phi(2.0, 1.5, 1.0)
    with pytest.raises(ParameterDomainError):
        phi(2.0, 0.5, 0.0)


# ---------------------------------------------------------------- DS statistics


def test_ds1_single_point():
    assert ds1([math.e]) == pytest.approx(1.0 / math.e, rel=1e-14)


def test_degenerate_sample():
    for f in (ds1, ds2, ds3):
        with pytest.raises(DegenerateSampleError):
            f([1.0, 1.0])


@pytest.mark.parametrize("x", random_samples(100), ids=lambda x: f"n{x.size}")
def test_ds1_matches_quadrature(x):
    assert ds1(x) == pytest.approx(quad_over_t(lambda t: d_oracle(t, x), x), abs=1e-8)


@pytest.mark.parametrize("x", random_samples(100, seed=4), ids=lambda x: f"n{x.size}")
def test_ds3_matches_quadrature(x):
    assert ds3(x) == pytest.approx(quad_over_t(lambda t: d_oracle(t, x) ** 2, x), abs=1e-6)


def test_dataset_values(liv, airplane):
    assert ds1(liv) == pytest.approx(0.078093, abs=1e-6)
    assert ds1(airplane) == pytest.approx(0.079295, abs=1e-6)
    assert ds3(liv) == pytest.approx(0.0032527, abs=1e-7)
    assert ds3(airplane) == pytest.approx(0.0105903, abs=1e-7)
    assert ds2(liv) == pytest.approx(0.0681416, abs=1e-7)
    assert ds2(airplane) == pytest.approx(0.2679807, abs=1e-7)


def test_ds2_grid_refinement_stable(liv, airplane):
    for s in (liv, airplane):
        a = ds2(s, SupSearchConfig(grid_points=4096, scale="s"))
        b = ds2(s, SupSearchConfig(grid_points=8192, scale="s"))
        assert abs(a - b) < 1e-6
        c = ds2(s, SupSearchConfig(grid_points=DEFAULT_SUP.grid_points * 2))
        assert abs(ds2(s) - c) < 1e-9


def dense_sup(x):
    ts = np.exp(np.linspace(math.log(1e-7 / x.max()), math.log(80.0), 40000))
    vals = np.abs([d_oracle(t, x) for t in ts])
    a = x.size / np.sum(np.log(x))
    limit = abs((a + 1.0) * np.mean((x - 1.0) / x) - 1.0)
    return max(vals.max(), limit)


@pytest.mark.parametrize("alpha", [0.1, 0.3, 1.0, 5.0])
def test_ds2_matches_dense_search_for_heavy_tails(alpha):
    rng = np.random.default_rng(int(alpha * 100))
    for x in pareto_rows(rng, 4, 15, alpha):
        assert ds2(x) == pytest.approx(dense_sup(x), abs=1e-8)


def test_departure_against_high_precision():
    from paretogof import _pykernels

    rng = np.random.default_rng(8)
    x = pareto_rows(rng, 1, 12, 0.1)[0]
    coef = (x.size / np.sum(np.log(x)) + 1.0) / x.size
    for t in (1e-6 / x.max(), 1e-3 / x.max(), 1.0 / x.max(), 1e-4, 0.01, 1.0, 7.0):
        exact = d_mpmath(t, x)
        assert d_oracle(t, x) == pytest.approx(exact, abs=1e-12)
        assert _pykernels._d_values_t(t, x, coef, 1e-10)[0] == pytest.approx(exact, abs=1e-12)
        if t > 1e-12:
            assert departure([math.exp(-t)], x)[0] == pytest.approx(exact, abs=1e-9)


def test_ds2_dominates_departure(rng):
    x = pareto_rows(rng, 1, 25, 1.3)[0]
    s = rng.random(500)
    assert ds2(x) >= np.max(np.abs(departure(s, x))) - 1e-15


def test_departure_endpoints(liv):
    x = liv.values
    a = mle_alpha(liv).alpha_hat
    d = departure([0.0, 1.0], liv)
    assert d[0] == 0.0
    assert d[1] == pytest.approx((a + 1.0) * np.mean((x - 1.0) / x) - 1.0, rel=1e-14)
    t = 0.7
    assert departure([math.exp(-t)], liv)[0] == pytest.approx(d_oracle(t, x), rel=1e-12)


def test_coarse_sup_is_the_grid_maximum(airplane):
    grid = np.linspace(0.0, 1.0, 101)
    assert ds2(airplane, COARSE_SUP) == pytest.approx(np.max(np.abs(departure(grid, airplane))), rel=1e-14)


def test_sup_config_validation():
    with pytest.raises(ParameterDomainError):
        SupSearchConfig(grid_points=4)
    with pytest.raises(ParameterDomainError):
        SupSearchConfig(scale="t")
    with pytest.raises(ParameterDomainError):
        SupSearchConfig(refine_iterations=-1)


sample_lists = st.lists(st.floats(1.0, 1e4, allow_nan=False), min_size=2, max_size=25).filter(
    lambda v: sum(math.log(x) for x in v) > 1e-3
)


@given(sample_lists, st.randoms())
@settings(max_examples=60, deadline=None)
def test_statistics_permutation_invariant_and_signs(values, r):
    shuffled = list(values)
    r.shuffle(shuffled)
    assert ds1(shuffled) == pytest.approx(ds1(values), rel=1e-10, abs=1e-13)
    assert ds2(shuffled) == pytest.approx(ds2(values), rel=1e-10, abs=1e-13)
    assert ds3(shuffled) == pytest.approx(ds3(values), rel=1e-9, abs=1e-13)
    assert ds2(values) >= 0.0
    assert ds3(values) >= -1e-15


def test_statistics_bundle(liv):
    kinds = [s.kind for s in stein_laplace_statistics(liv)]
    assert kinds == ["DS1", "DS2", "DS3", "DS1Standardized"]


# ---------------------------------------------------------------- backends


def test_backends_agree(rng):
    impls = kernels.backends()
    if len(impls) < 2:
        pytest.skip("compiled backend not built")
    py, cy = impls["python"], impls["cython"]
    for alpha in (0.3, 1.0, 4.0):
        X = pareto_rows(rng, 20, 17, alpha)
        np.testing.assert_allclose(py.ds1_batch(X), cy.ds1_batch(X), rtol=1e-12, atol=1e-15)
        np.testing.assert_allclose(py.ds3_batch(X), cy.ds3_batch(X), rtol=1e-10, atol=1e-15)
        for log_t in (True, False):
            np.testing.assert_allclose(
                py.ds2_batch(X, 128, 60, 1e-10, log_t), cy.ds2_batch(X, 128, 60, 1e-10, log_t), rtol=1e-10, atol=1e-14
            )
        s = np.linspace(0.0, 1.0, 33)
        np.testing.assert_allclose(py.departure_batch(s, X), cy.departure_batch(s, X), rtol=1e-12, atol=1e-15)


# ---------------------------------------------------------------- asymptotic helpers


def test_sigma2_values():
    assert sigma2(1.0) == pytest.approx(53.0 / 432.0, rel=1e-14)
    assert sigma2(2.0) == pytest.approx(596.0 / 5184.0, rel=1e-14)
    assert all(sigma2(a) > 0 for a in np.logspace(-3, 3, 61))
    with pytest.raises(ParameterDomainError):
        sigma2(0.0)


def test_standardized_identity(liv, airplane):
    for s in (liv, airplane):
        a = mle_alpha(s).alpha_hat
        assert ds1_standardized(s) * math.sqrt(sigma2(a) / s.n) == pytest.approx(ds1(s), rel=1e-12)


def test_standardized_mean_under_null():
    rng = np.random.default_rng(101)
    X = pareto_rows(rng, 2000, 1000, 1.0)
    a = X.shape[1] / np.log(X).sum(axis=1)
    z = np.sqrt(X.shape[1]) * kernels.ds1_batch(X) / np.sqrt([sigma2(v) for v in a])
    assert -0.1 < z.mean() < 0.1


def test_gen_exp_integral_closed_forms():
    for z in (1e-6, 0.01, 0.5, 1.0, 3.0, 40.0, 300.0):
        assert gen_exp_integral(0.0, z) == pytest.approx(math.exp(-z) / z, rel=1e-12)
    assert gen_exp_integral(0.0, 1.0) == pytest.approx(0.36787944117144233, rel=1e-12)
    assert gen_exp_integral(2.0, 1e-12) == pytest.approx(1.0, abs=1e-9)
    assert gen_exp_integral(1.0, 1.0) == pytest.approx(0.219384, abs=1e-6)


@pytest.mark.parametrize("nu", [0.0, 0.5, 1.0, 2.0, 3.3, 7.0])
@pytest.mark.parametrize("z", [1e-4, 0.1, 0.9, 1.0, 2.5, 20.0])
def test_gen_exp_integral_against_mpmath(nu, z):
    assert gen_exp_integral(nu, z) == pytest.approx(float(mpmath.expint(nu, z)), rel=1e-10)


def test_gen_exp_integral_domain():
    with pytest.raises(ParameterDomainError):
        gen_exp_integral(1.0, 0.0)
    with pytest.raises(ParameterDomainError):
        gen_exp_integral(-1.0, 1.0)


def psi_quadrature(t, alpha):
    f = lambda x: alpha * x ** (-alpha - 2.0) * (math.exp(-t) - math.exp(-t * x)) / t
    return integrate.quad(f, 1.0, np.inf, epsabs=0.0, epsrel=1e-12, limit=400)[0]


def test_psi_alpha_value():
    e3 = float(mpmath.expint(3, 1))
    assert psi_alpha(1.0, 1.0) == pytest.approx(math.exp(-1.0) / 2.0 - e3, rel=1e-12)
    assert psi_alpha(1.0, 1.0) == pytest.approx(0.074249, abs=2e-6)


@pytest.mark.parametrize("alpha", [0.3, 1.0, 2.0, 5.0])
@pytest.mark.parametrize("t", [0.05, 0.5, 1.0, 3.0, 10.0])
def test_psi_alpha_against_defining_expectation(alpha, t):
    v = psi_alpha(t, alpha)
    assert v > 0
    assert v == pytest.approx(psi_quadrature(t, alpha), abs=1e-8)


@pytest.mark.parametrize("alpha", [0.3, 1.0, 2.0, 5.0])
@pytest.mark.parametrize("t", [0.01, 0.2, 1.0, 4.0, 15.0])
def test_shift_m_equals_psi(alpha, t):
    assert ds2_shift_m(math.exp(-t), alpha) == pytest.approx(psi_alpha(t, alpha), abs=1e-10)


def test_shift_m_value():
    e3 = float(mpmath.expint(3, 1))
    assert ds2_shift_m(1.0 / math.e, 1.0) == pytest.approx((2.0 * e3 - math.exp(-1.0)) / -2.0, rel=1e-12)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 3.0])
@pytest.mark.parametrize("s", [0.1, 0.5, 0.9])
def test_shift_m_is_mean_parameter_derivative(alpha, s):
    # d phi / d alpha = phi / (alpha + 1); integrate it against the P(alpha) density
    f = lambda x: phi(x, s, alpha) / (alpha + 1.0) * alpha * x ** (-alpha - 1.0)
    expected = integrate.quad(f, 1.0, np.inf, epsabs=0.0, epsrel=1e-12, limit=400)[0]
    assert ds2_shift_m(s, alpha) == pytest.approx(expected, abs=1e-8)
