"""Independent reference computations shared by the test modules.

Everything here is deliberately simple and slow: exhaustive scans, trapezoid
quadrature, closed-form normal CDFs.  These are the yardsticks the package is
checked against, so they must not reuse the code paths under test.
"""

import math

import numpy as np
from scipy import stats

from eglfmcmc.simulators import toy_error_posterior


def brute_force_circle_pixels(x, y, r):
    """Exhaustive scan of all 1024 pixel centres applying the outline predicate."""
    lit = set()
    for i in range(32):
        for j in range(32):
            cx = -1.0 + (j + 0.5) * 2.0 / 32.0
            cy = -1.0 + (i + 0.5) * 2.0 / 32.0
            if abs(math.hypot(cx - x, cy - y) - r) <= 1.0 / 32.0:
                lit.add((i, j))
    return lit


def trapezoid_cdf(grid, density):
    """Normalised CDF of an unnormalised density sampled on an increasing grid."""
    density = np.asarray(density, dtype=float)
    widths = np.diff(grid)
    cum = np.concatenate(([0.0], np.cumsum(0.5 * (density[1:] + density[:-1]) * widths)))
    total = cum[-1]
    if not (np.isfinite(total) and total > 0):
        raise ValueError("density does not integrate to a positive finite constant")
    return cum / total


def toy_posterior_cdf(eps, x_o=0.0, lo=-10.0, hi=10.0, n=100_001):
    """Quadrature CDF of the error-conditioned toy posterior p(theta | eps)."""
    from eglfmcmc.simulators import TOY_PRIOR

    grid = np.linspace(lo, hi, n)
    dens = toy_error_posterior(grid, eps, x_o, TOY_PRIOR)
    return grid, trapezoid_cdf(grid, dens)


def toy_interval_posterior_cdf(h, x_o=0.0, lo=-10.0, hi=10.0, n=100_001):
    """Quadrature CDF of the ABC posterior p(theta | |x - x_o| <= h) for the toy model."""
    grid = np.linspace(lo, hi, n)
    delta = grid - x_o
    dens = stats.norm.cdf(h - delta) - stats.norm.cdf(-h - delta)
    return grid, trapezoid_cdf(grid, dens)


def cdf_callable(grid, cdf):
    return lambda t: np.interp(t, grid, cdf)


def ks_against_cdf(samples, grid, cdf) -> float:
    """One-sample Kolmogorov-Smirnov statistic against a tabulated CDF."""
    return float(stats.kstest(np.asarray(samples, dtype=float), cdf_callable(grid, cdf)).statistic)


def inverse_cdf_sample(grid, cdf, rng, n):
    """IID draws from a tabulated CDF by inverse-transform sampling."""
    u = rng.uniform(0.0, 1.0, size=n)
    return np.interp(u, cdf, grid)


def quadrature_mean(grid, density, fn=None):
    """E[fn(theta)] under the normalised density (fn defaults to identity)."""
    density = np.asarray(density, dtype=float)
    z = np.trapezoid(density, grid)
    vals = grid if fn is None else fn(grid)
    return float(np.trapezoid(vals * density, grid) / z)
