"""Training-set construction: L1 errors against x_o and projection onto [0, 1].

A dataset is built by drawing parameters from the prior, simulating one
observation per draw, and recording only the scalar error eps = d(x, x_o)
together with the parameters.  Observations themselves are discarded, which is
what keeps memory use flat for high-dimensional data.  Both eps and theta are
then min-max projected onto [0, 1]: theta via the known prior bounds, eps via
the empirical range of the set.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .simulators import Prior, prior_sample_n


class ScalingError(ValueError):
    """Raised when a degenerate scaling (equal bounds) is applied."""


@dataclass(frozen=True)
class ScalingSpec:
    """Affine [0, 1] projection: theta bounds from the prior, eps bounds empirical."""

    theta_lower: np.ndarray
    theta_upper: np.ndarray
    eps_min: float
    eps_max: float

    def __post_init__(self):
        lo = np.asarray(self.theta_lower, dtype=float)
        hi = np.asarray(self.theta_upper, dtype=float)
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ValueError("theta bounds must be 1-D arrays of equal length")
        if not np.all(lo < hi):
            raise ValueError("theta bounds require lower < upper per dimension")
        if not self.eps_min <= self.eps_max:
            raise ValueError("scaling requires eps_min <= eps_max")
        object.__setattr__(self, "theta_lower", lo)
        object.__setattr__(self, "theta_upper", hi)
        object.__setattr__(self, "eps_min", float(self.eps_min))
        object.__setattr__(self, "eps_max", float(self.eps_max))

    @property
    def dim(self) -> int:
        return self.theta_lower.shape[0]

    def to_dict(self) -> dict:
        return {
            "theta_lower": self.theta_lower.tolist(),
            "theta_upper": self.theta_upper.tolist(),
            "eps_min": self.eps_min,
            "eps_max": self.eps_max,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ScalingSpec":
        return cls(
            theta_lower=np.asarray(d["theta_lower"], dtype=float),
            theta_upper=np.asarray(d["theta_upper"], dtype=float),
            eps_min=float(d["eps_min"]),
            eps_max=float(d["eps_max"]),
        )


@dataclass(frozen=True)
class ErrorDataset:
    """(theta, eps) training records in raw and scaled form."""

    theta_raw: np.ndarray   # (n, dim)
    eps_raw: np.ndarray     # (n,)
    theta_scaled: np.ndarray
    eps_scaled: np.ndarray
    scaling: ScalingSpec

    def __len__(self) -> int:
        return self.eps_raw.shape[0]

    @property
    def dim(self) -> int:
        return self.theta_raw.shape[1]


def l1_distance(x: np.ndarray, x_o: np.ndarray) -> float:
    """Sum of absolute componentwise differences between two observations."""
    x = np.asarray(x, dtype=float)
    x_o = np.asarray(x_o, dtype=float)
    if x.shape != x_o.shape:
        raise ValueError(f"length mismatch: {x.shape} vs {x_o.shape}")
    return float(np.abs(x - x_o).sum())


def apply_scaling(spec: ScalingSpec, theta_raw, eps_raw):
    """Project raw (theta, eps) onto [0, 1] per the spec's affine maps.

    eps values outside [eps_min, eps_max] are allowed and map outside [0, 1];
    no clamping is applied, so conditioning on out-of-range errors is an
    explicit extrapolation.
    """
    if spec.eps_max == spec.eps_min:
        raise ScalingError("degenerate eps scaling: eps_min == eps_max")
    theta_raw = np.asarray(theta_raw, dtype=float)
    theta_scaled = (theta_raw - spec.theta_lower) / (spec.theta_upper - spec.theta_lower)
    eps_scaled = (np.asarray(eps_raw, dtype=float) - spec.eps_min) / (
        spec.eps_max - spec.eps_min
    )
    return theta_scaled, eps_scaled


def invert_scaling(spec: ScalingSpec, theta_scaled, eps_scaled):
    """Inverse of :func:`apply_scaling`."""
    if spec.eps_max == spec.eps_min:
        raise ScalingError("degenerate eps scaling: eps_min == eps_max")
    theta_scaled = np.asarray(theta_scaled, dtype=float)
    theta_raw = spec.theta_lower + theta_scaled * (spec.theta_upper - spec.theta_lower)
    eps_raw = spec.eps_min + np.asarray(eps_scaled, dtype=float) * (
        spec.eps_max - spec.eps_min
    )
    return theta_raw, eps_raw


def build_dataset(
    simulate,
    prior: Prior,
    x_o: np.ndarray,
    n: int,
    rng: np.random.Generator,
) -> ErrorDataset:
    """Draw n parameters from the prior, simulate, and record L1 errors.

    Returns the scaled dataset together with its ScalingSpec (theta bounds
    copied from the prior, eps bounds empirical over the n draws).
    Bit-reproducible for a fixed generator seed.
    """
    if n < 2:
        raise ValueError("dataset needs n >= 2 to define an eps range")
    x_o = np.asarray(x_o, dtype=float)
    theta_raw = prior_sample_n(prior, rng, n)
    eps_raw = np.empty(n)
    for i in range(n):
        eps_raw[i] = l1_distance(simulate(theta_raw[i], rng), x_o)
    scaling = ScalingSpec(
        theta_lower=prior.lower.copy(),
        theta_upper=prior.upper.copy(),
        eps_min=float(eps_raw.min()),
        eps_max=float(eps_raw.max()),
    )
    theta_scaled, eps_scaled = apply_scaling(scaling, theta_raw, eps_raw)
    return ErrorDataset(theta_raw, eps_raw, theta_scaled, eps_scaled, scaling)


def write_dataset_csv(path, ds: ErrorDataset) -> None:
    """Write raw records as CSV with header theta_0,...,theta_{d-1},eps."""
    cols = [f"theta_{i}" for i in range(ds.dim)] + ["eps"]
    with open(path, "w", newline="") as fh:
        fh.write(",".join(cols) + "\n")
        for i in range(len(ds)):
            row = [repr(float(v)) for v in ds.theta_raw[i]] + [repr(float(ds.eps_raw[i]))]
            fh.write(",".join(row) + "\n")


def read_dataset_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Read a dataset CSV back into (theta_raw, eps_raw) arrays."""
    with open(path, "r") as fh:
        header = fh.readline().strip().split(",")
        if not header or header[-1] != "eps" or len(header) < 2:
            raise ValueError(f"{path}: line 1: expected header theta_0,...,eps")
        dim = len(header) - 1
        thetas, eps = [], []
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            parts = line.strip().split(",")
            if len(parts) != dim + 1:
                raise ValueError(f"{path}: line {lineno}: expected {dim + 1} fields")
            try:
                vals = [float(p) for p in parts]
            except ValueError:
                raise ValueError(f"{path}: line {lineno}: non-numeric field") from None
            thetas.append(vals[:dim])
            eps.append(vals[dim])
    if not thetas:
        raise ValueError(f"{path}: no data rows")
    return np.asarray(thetas), np.asarray(eps)


def dataset_from_arrays(
    theta_raw: np.ndarray, eps_raw: np.ndarray, scaling: ScalingSpec
) -> ErrorDataset:
    """Rebuild a scaled dataset from raw arrays and a known scaling."""
    theta_scaled, eps_scaled = apply_scaling(scaling, theta_raw, eps_raw)
    return ErrorDataset(
        np.asarray(theta_raw, dtype=float),
        np.asarray(eps_raw, dtype=float),
        theta_scaled,
        eps_scaled,
        scaling,
    )
