import math

import numpy as np
import pytest

from eglfmcmc.simulators import (
    CIRCLE_PRIOR,
    LINEAR_PRIOR,
    LINEAR_X_GRID,
    TOY_PRIOR,
    Prior,
    circle_simulate,
    get_problem,
    linear_simulate,
    prior_log_density,
    prior_sample,
    prior_sample_n,
    toy_error_posterior,
    toy_simulate,
)
from oracles import brute_force_circle_pixels, trapezoid_cdf


class ZeroNoise:
    """Stub generator whose normal draws are all zero."""

    def standard_normal(self, n=None):
        return np.zeros(n) if n is not None else 0.0


# ---------------------------------------------------------------------------
# priors


def test_prior_sample_stays_in_box():
    rng = np.random.default_rng(0)
    draws = prior_sample_n(CIRCLE_PRIOR, rng, 10_000)
    assert np.all(draws >= CIRCLE_PRIOR.lower)
    assert np.all(draws <= CIRCLE_PRIOR.upper)


def test_prior_sample_deterministic():
    a = prior_sample(CIRCLE_PRIOR, np.random.default_rng(123))
    b = prior_sample(CIRCLE_PRIOR, np.random.default_rng(123))
    assert np.array_equal(a, b)


def test_prior_sample_radius_mean():
    n = 100_000
    draws = prior_sample_n(CIRCLE_PRIOR, np.random.default_rng(7), n)
    band = 3.0 * (1.0 / math.sqrt(12.0)) / math.sqrt(n)
    assert abs(draws[:, 2].mean() - 0.5) < band


def test_prior_log_density_values():
    assert prior_log_density(CIRCLE_PRIOR, np.array([0.0, 0.0, 0.5])) == pytest.approx(
        -math.log(4.0)
    )
    assert prior_log_density(CIRCLE_PRIOR, np.array([1.5, 0.0, 0.5])) == -math.inf
    assert prior_log_density(LINEAR_PRIOR, np.array([1.0, 5.0, 2.0])) == pytest.approx(
        -math.log(1000.0)
    )


def test_prior_log_density_dim_mismatch():
    with pytest.raises(ValueError):
        prior_log_density(CIRCLE_PRIOR, np.array([0.0, 0.0]))


def test_prior_validation():
    with pytest.raises(ValueError):
        Prior(np.array([0.0, 1.0]), np.array([1.0, 1.0]))


# ---------------------------------------------------------------------------
# circle simulator


def test_circle_deterministic():
    theta = np.array([0.0, 0.0, 0.5])
    assert np.array_equal(circle_simulate(theta), circle_simulate(theta))


def test_circle_binary_values():
    img = circle_simulate(np.array([0.3, -0.4, 0.6]))
    assert img.shape == (1024,)
    assert set(np.unique(img)) <= {0.0, 1.0}


def test_circle_matches_brute_force_oracle():
    # lit-pixel sets from an independent exhaustive scan of the predicate
    for theta in [(0.0, 0.0, 0.5), (0.3, -0.2, 0.4), (-0.8, 0.1, 0.05), (0.9, 0.9, 1.0)]:
        img = circle_simulate(np.array(theta)).reshape(32, 32)
        lit = {(i, j) for i, j in zip(*np.nonzero(img))}
        assert lit == brute_force_circle_pixels(*theta)


def test_circle_center_count_frozen():
    # value computed once by the exhaustive oracle and frozen here
    assert circle_simulate(np.array([0.0, 0.0, 0.5])).sum() == 44.0


def test_circle_degenerate_radius():
    # r=0 demands pixel centres within 1/32 of the origin; the closest sit at
    # sqrt(2)/32, so the oracle lights nothing and the simulator must agree.
    assert brute_force_circle_pixels(0.0, 0.0, 0.0) == set()
    assert circle_simulate(np.array([0.0, 0.0, 0.0])).sum() == 0.0


def test_circle_out_of_range_errors():
    with pytest.raises(ValueError):
        circle_simulate(np.array([1.5, 0.0, 0.5]))
    with pytest.raises(ValueError):
        circle_simulate(np.array([0.0, 0.0, -0.1]))


def test_circle_rotation_symmetry():
    # 180-degree rotation of the image equals negating the centre coordinates
    rng = np.random.default_rng(5)
    for _ in range(20):
        x, y, r = rng.uniform([-1, -1, 0], [1, 1, 1])
        a = circle_simulate(np.array([x, y, r])).reshape(32, 32)
        b = circle_simulate(np.array([-x, -y, r])).reshape(32, 32)
        assert np.array_equal(a[::-1, ::-1], b)


# ---------------------------------------------------------------------------
# linear simulator


def test_linear_noise_free_line():
    theta = np.array([2.0, 1.0, 0.0])
    obs = linear_simulate(theta, ZeroNoise())
    assert np.allclose(obs, 2.0 * LINEAR_X_GRID + 1.0, rtol=0, atol=0)


def test_linear_mean_at_fixed_point():
    theta = np.array([-0.9594, 4.294, 0.534])
    k = 0
    n = 10_000
    rng = np.random.default_rng(11)
    vals = np.array([linear_simulate(theta, rng)[k] for _ in range(n)])
    line = theta[0] * LINEAR_X_GRID[k] + theta[1]
    sigma = math.sqrt((theta[2] * line) ** 2 + 0.05**2)
    assert abs(vals.mean() - line) < 3.0 * sigma / math.sqrt(n)


def test_linear_deterministic_under_seed():
    theta = np.array([1.0, 2.0, 3.0])
    a = linear_simulate(theta, np.random.default_rng(9))
    b = linear_simulate(theta, np.random.default_rng(9))
    assert np.array_equal(a, b)


def test_linear_out_of_range_errors():
    with pytest.raises(ValueError):
        linear_simulate(np.array([9.0, 2.0, 3.0]), np.random.default_rng(0))


# ---------------------------------------------------------------------------
# toy simulator and its analytic error posterior


def test_toy_moments():
    n = 100_000
    rng = np.random.default_rng(3)
    draws = np.array([toy_simulate(np.array([2.0]), rng)[0] for _ in range(n)])
    assert abs(draws.mean() - 2.0) < 3.0 / math.sqrt(n)
    assert abs(draws.var() - 1.0) < 3.0 * math.sqrt(2.0 / (n - 1))


def test_toy_deterministic_under_seed():
    a = toy_simulate(np.array([1.0]), np.random.default_rng(4))
    b = toy_simulate(np.array([1.0]), np.random.default_rng(4))
    assert np.array_equal(a, b)


def test_toy_error_posterior_symmetry():
    for delta in [0.3, 1.7, 4.2]:
        up = toy_error_posterior(1.0 + delta, 0.8, 1.0, TOY_PRIOR)
        dn = toy_error_posterior(1.0 - delta, 0.8, 1.0, TOY_PRIOR)
        assert up == pytest.approx(dn, rel=1e-12)


def test_toy_error_posterior_at_zero():
    val = toy_error_posterior(0.0, 0.0, 0.0, TOY_PRIOR)
    assert val == pytest.approx(2.0 / math.sqrt(2.0 * math.pi), rel=1e-12)


def test_toy_error_posterior_outside_support():
    assert toy_error_posterior(11.0, 0.5, 0.0, TOY_PRIOR) == 0.0


def test_toy_error_posterior_normalizes():
    grid = np.linspace(-10.0, 10.0, 100_001)
    for eps in [0.0, 0.5, 2.0]:
        dens = toy_error_posterior(grid, eps, 0.0, TOY_PRIOR)
        z = np.trapezoid(dens, grid)
        assert np.isfinite(z) and z > 0
        posterior = dens / z
        assert abs(np.trapezoid(posterior, grid) - 1.0) < 1e-6
        # quadrature CDF must be a proper CDF as well
        cdf = trapezoid_cdf(grid, dens)
        assert cdf[0] == 0.0 and cdf[-1] == pytest.approx(1.0, abs=1e-12)


def test_toy_error_posterior_rejects_negative_eps():
    with pytest.raises(ValueError):
        toy_error_posterior(0.0, -0.5, 0.0, TOY_PRIOR)


def test_problem_registry():
    toy = get_problem("toy")
    assert toy.obs_len == 1 and toy.stochastic
    circ = get_problem("circle")
    assert np.array_equal(circ.theta_star, [0.0, 0.0, 0.5])
    lin = get_problem("linear")
    assert np.array_equal(lin.theta_star, [-0.9594, 4.294, 0.534])
    with pytest.raises(ValueError):
        get_problem("nope")
