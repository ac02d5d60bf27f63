"""Benchmark simulators, uniform box priors, and the tractable 1-D oracle model.

Three problems are built in:

* ``circle``  -- deterministic 32x32 binary image of a one-pixel-thick circle
  outline, parameterised by centre (x, y) and radius r.
* ``linear``  -- stochastic linear model y = m*x + b with multiplicative and
  additive Gaussian noise, observed at 100 equidistant points on [0, 10].
* ``toy``     -- x ~ Normal(theta, 1), the only problem with a closed-form
  error-conditioned posterior; used as a correctness oracle.

Every simulator is a pure function of (theta, rng): same parameters and the
same seeded generator state always reproduce the observation bit-exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

IMAGE_SIDE = 32
CIRCLE_OBS_LEN = IMAGE_SIDE * IMAGE_SIDE
LINEAR_OBS_LEN = 100

# Pixel centres of the uniform 32x32 grid over [-1, 1]^2.
_CENTERS = -1.0 + (np.arange(IMAGE_SIDE) + 0.5) * (2.0 / IMAGE_SIDE)
_CX = _CENTERS[None, :]  # column index j -> horizontal coordinate
_CY = _CENTERS[:, None]  # row index i -> vertical coordinate
_HALF_PIXEL = 1.0 / IMAGE_SIDE

# Observation grid of the linear model: x_k = 10*k/99.
LINEAR_X_GRID = np.linspace(0.0, 10.0, LINEAR_OBS_LEN)

_SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class Prior:
    """Uniform box prior with independent per-dimension bounds."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        if lower.ndim != 1 or lower.shape != upper.shape:
            raise ValueError("prior bounds must be 1-D arrays of equal length")
        if not np.all(lower < upper):
            raise ValueError("prior requires lower[i] < upper[i] in every dimension")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    @property
    def log_volume(self) -> float:
        return float(np.sum(np.log(self.upper - self.lower)))

    def contains(self, theta: np.ndarray) -> bool:
        theta = np.asarray(theta, dtype=float)
        return bool(np.all(theta >= self.lower) and np.all(theta <= self.upper))


def prior_sample(prior: Prior, rng: np.random.Generator) -> np.ndarray:
    """Draw one parameter vector uniformly from the prior box."""
    return rng.uniform(prior.lower, prior.upper)


def prior_sample_n(prior: Prior, rng: np.random.Generator, n: int) -> np.ndarray:
    """Draw ``n`` parameter vectors as an (n, dim) array."""
    return rng.uniform(prior.lower, prior.upper, size=(n, prior.dim))


def prior_log_density(prior: Prior, theta: np.ndarray) -> float:
    """Log density of the box prior: -log(volume) inside, -inf outside."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (prior.dim,):
        raise ValueError(
            f"theta has dimension {theta.shape}, prior expects ({prior.dim},)"
        )
    if not prior.contains(theta):
        return -math.inf
    return -prior.log_volume


def circle_simulate(theta: np.ndarray, rng: np.random.Generator | None = None) -> np.ndarray:
    """Rasterise a one-pixel-thick circle outline on the 32x32 grid.

    Pixel (i, j) is lit iff | ||centre - (x, y)|| - r | <= 1/32.  The image is
    returned flattened row-major as 0.0/1.0 values.  Deterministic; ``rng`` is
    accepted only to satisfy the common simulate(theta, rng) interface.
    """
    x, y, r = _check_theta(theta, CIRCLE_PRIOR, "circle")
    dist = np.sqrt((_CX - x) ** 2 + (_CY - y) ** 2)
    img = (np.abs(dist - r) <= _HALF_PIXEL).astype(float)
    return img.ravel()


def linear_simulate(theta: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Simulate the stochastic linear model on the fixed 100-point grid.

    y_k = m*x_k + b + e1_k * |f * (m*x_k + b)| + 0.05 * e2_k with e1, e2
    standard normal, drawn in that order (e1 for all points, then e2).
    """
    m, b, f = _check_theta(theta, LINEAR_PRIOR, "linear")
    line = m * LINEAR_X_GRID + b
    e1 = rng.standard_normal(LINEAR_OBS_LEN)
    e2 = rng.standard_normal(LINEAR_OBS_LEN)
    return line + e1 * np.abs(f * line) + 0.05 * e2


def toy_simulate(theta: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """One draw from Normal(theta, 1), returned as a length-1 observation."""
    theta = np.asarray(theta, dtype=float).ravel()
    return np.array([theta[0] + rng.standard_normal()])


def toy_error_posterior(
    theta, eps: float, x_o: float, prior: Prior
) -> np.ndarray | float:
    """Unnormalised density of the error-conditioned posterior of the toy model.

    For x ~ Normal(theta, 1) and eps = |x - x_o|, the exact conditional density
    of theta given eps is proportional to
    phi(eps - (theta - x_o)) + phi(eps + (theta - x_o)) inside the prior box
    and 0 outside, with phi the standard normal density.  Accepts scalar or
    array ``theta``.
    """
    if eps < 0:
        raise ValueError("eps must be non-negative")
    t = np.asarray(theta, dtype=float)
    delta = t - x_o
    dens = _normal_pdf(eps - delta) + _normal_pdf(eps + delta)
    inside = (t >= prior.lower[0]) & (t <= prior.upper[0])
    out = np.where(inside, dens, 0.0)
    return out if t.ndim else float(out)


def _normal_pdf(z):
    return np.exp(-0.5 * np.square(z)) / _SQRT_2PI


def _check_theta(theta, prior: Prior, name: str):
    theta = np.asarray(theta, dtype=float).ravel()
    if theta.shape != (prior.dim,):
        raise ValueError(f"{name} expects {prior.dim} parameters, got {theta.shape}")
    if not np.all(np.isfinite(theta)):
        raise ValueError(f"{name} parameters must be finite")
    if not prior.contains(theta):
        raise ValueError(f"{name} parameters {theta.tolist()} outside prior support")
    return theta


CIRCLE_PRIOR = Prior(np.array([-1.0, -1.0, 0.0]), np.array([1.0, 1.0, 1.0]))
LINEAR_PRIOR = Prior(np.array([-5.0, 0.0, 0.0]), np.array([5.0, 10.0, 10.0]))
TOY_PRIOR = Prior(np.array([-10.0]), np.array([10.0]))


@dataclass(frozen=True)
class Problem:
    """A benchmark problem: prior, simulator, and true generating parameter."""

    name: str
    prior: Prior
    simulate: Callable[[np.ndarray, np.random.Generator], np.ndarray]
    theta_star: np.ndarray
    obs_len: int
    stochastic: bool
    param_names: tuple[str, ...] = field(default=())

    def observe(self, rng: np.random.Generator) -> np.ndarray:
        """Simulate the true observation x_o from theta_star."""
        return self.simulate(self.theta_star, rng)


PROBLEMS: dict[str, Problem] = {
    "circle": Problem(
        name="circle",
        prior=CIRCLE_PRIOR,
        simulate=circle_simulate,
        theta_star=np.array([0.0, 0.0, 0.5]),
        obs_len=CIRCLE_OBS_LEN,
        stochastic=False,
        param_names=("x", "y", "r"),
    ),
    "linear": Problem(
        name="linear",
        prior=LINEAR_PRIOR,
        simulate=linear_simulate,
        theta_star=np.array([-0.9594, 4.294, 0.534]),
        obs_len=LINEAR_OBS_LEN,
        stochastic=True,
        param_names=("m", "b", "f"),
    ),
    "toy": Problem(
        name="toy",
        prior=TOY_PRIOR,
        simulate=toy_simulate,
        theta_star=np.array([0.0]),
        obs_len=1,
        stochastic=True,
        param_names=("theta",),
    ),
}


def get_problem(name: str) -> Problem:
    try:
        return PROBLEMS[name]
    except KeyError:
        raise ValueError(f"unknown problem {name!r}; choose from {sorted(PROBLEMS)}") from None
