"""Metropolis-Hastings sampling driven by a log-ratio function of (eps, theta).

The chain targets the density proportional to exp(ratio_fn(eps, theta)) times
the prior, at a fixed conditioning error eps.  Proposals are an isotropic
per-dimension Gaussian random walk, which is symmetric, so the proposal
correction factor is identically one and is omitted from the acceptance
probability.  Proposals falling outside the box prior have prior density
zero and are rejected outright (the ratio function is not evaluated there).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .simulators import Prior, prior_log_density

# exp() guard: lambda above this already means certain acceptance.
_LAMBDA_CLIP = 50.0

RatioFn = Callable[[float, np.ndarray], float]


@dataclass(frozen=True)
class ProposalSpec:
    """Per-dimension standard deviations of the Gaussian random walk (raw units)."""

    sigmas: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.sigmas, dtype=float)
        if s.ndim != 1 or not np.all(s > 0):
            raise ValueError("proposal sigmas must be a 1-D array of positive reals")
        object.__setattr__(self, "sigmas", s)


def default_proposal(prior: Prior, scale: float = 0.05) -> ProposalSpec:
    """Scale-aware default: sigma_i = scale * (upper_i - lower_i)."""
    return ProposalSpec(scale * (prior.upper - prior.lower))


@dataclass(frozen=True)
class ChainConfig:
    n_steps: int
    burn_in: int
    theta0: np.ndarray
    eps: float
    seed: int | tuple = 0

    def __post_init__(self):
        if self.n_steps < 1:
            raise ValueError("chain needs n_steps >= 1")
        if self.burn_in < 0:
            raise ValueError("burn_in must be >= 0")
        object.__setattr__(self, "theta0", np.asarray(self.theta0, dtype=float))


@dataclass
class Chain:
    """Retained states (post burn-in) plus acceptance statistics."""

    states: np.ndarray  # (n_steps, dim)
    accepted: int
    proposals: int
    burn_in: int
    eps: float

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.proposals if self.proposals else 0.0

    def __len__(self) -> int:
        return self.states.shape[0]


class TransitionResult(NamedTuple):
    theta: np.ndarray
    accepted: bool
    log_target: float


def mh_transition(
    theta_t: np.ndarray,
    eps: float,
    ratio_fn: RatioFn,
    prior: Prior,
    proposal: ProposalSpec,
    rng: np.random.Generator,
    current_log_target: float | None = None,
) -> TransitionResult:
    """One random-walk Metropolis step.

    Draws theta' = theta_t + Normal(0, sigma^2), computes
    lambda = (ratio(eps, theta') + log p(theta')) - (ratio(eps, theta_t) + log p(theta_t))
    and accepts with probability min(exp(lambda), 1).  An out-of-support
    proposal is rejected without consuming an acceptance draw.
    ``current_log_target`` lets callers reuse the current state's value.
    """
    theta_t = np.asarray(theta_t, dtype=float)
    theta_p = theta_t + rng.standard_normal(theta_t.shape[0]) * proposal.sigmas
    lp_p = prior_log_density(prior, theta_p)
    if current_log_target is None:
        current_log_target = ratio_fn(eps, theta_t) + prior_log_density(prior, theta_t)
    if lp_p == -math.inf:
        return TransitionResult(theta_t, False, current_log_target)
    cand = ratio_fn(eps, theta_p) + lp_p
    lam = cand - current_log_target
    rho = min(math.exp(min(lam, _LAMBDA_CLIP)), 1.0)
    if rng.random() < rho:
        return TransitionResult(theta_p, True, cand)
    return TransitionResult(theta_t, False, current_log_target)


def run_chain(
    ratio_fn: RatioFn,
    prior: Prior,
    proposal: ProposalSpec,
    config: ChainConfig,
) -> Chain:
    """Burn in, then retain n_steps states (the current state is kept on rejection)."""
    theta = np.asarray(config.theta0, dtype=float)
    if theta.shape != (prior.dim,):
        raise ValueError(f"theta0 has shape {theta.shape}, prior expects ({prior.dim},)")
    if not prior.contains(theta):
        raise ValueError(f"theta0 {theta.tolist()} outside prior support")
    if proposal.sigmas.shape[0] != prior.dim:
        raise ValueError("proposal dimension does not match prior")

    rng = np.random.default_rng(config.seed)
    log_target = ratio_fn(config.eps, theta) + prior_log_density(prior, theta)
    states = np.empty((config.n_steps, prior.dim))
    accepted = 0
    total = config.burn_in + config.n_steps
    for t in range(total):
        theta, acc, log_target = mh_transition(
            theta, config.eps, ratio_fn, prior, proposal, rng,
            current_log_target=log_target,
        )
        if acc:
            accepted += 1
        if t >= config.burn_in:
            states[t - config.burn_in] = theta
    return Chain(
        states=states,
        accepted=accepted,
        proposals=total,
        burn_in=config.burn_in,
        eps=config.eps,
    )


def write_chain_csv(path, chains: list[tuple[str, np.ndarray]]) -> None:
    """Write one or more labelled chains as chain_id,step,theta_0,...,theta_{d-1}."""
    if not chains:
        raise ValueError("no chains to write")
    dim = chains[0][1].shape[1]
    cols = ["chain_id", "step"] + [f"theta_{i}" for i in range(dim)]
    with open(path, "w", newline="") as fh:
        fh.write(",".join(cols) + "\n")
        for chain_id, states in chains:
            if states.ndim != 2 or states.shape[1] != dim:
                raise ValueError("all chains must share the same dimension")
            for step in range(states.shape[0]):
                row = [str(chain_id), str(step)]
                row += [repr(float(v)) for v in states[step]]
                fh.write(",".join(row) + "\n")


def read_chain_csv(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Read a chain CSV into (chain_ids, steps, thetas)."""
    with open(path, "r") as fh:
        header = fh.readline().strip().split(",")
        if header[:2] != ["chain_id", "step"] or len(header) < 3:
            raise ValueError(f"{path}: line 1: expected header chain_id,step,theta_0,...")
        dim = len(header) - 2
        ids, steps, thetas = [], [], []
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            parts = line.strip().split(",")
            if len(parts) != dim + 2:
                raise ValueError(f"{path}: line {lineno}: expected {dim + 2} fields")
            try:
                steps.append(int(parts[1]))
                thetas.append([float(p) for p in parts[2:]])
            except ValueError:
                raise ValueError(f"{path}: line {lineno}: non-numeric field") from None
            ids.append(parts[0])
    if not thetas:
        raise ValueError(f"{path}: no data rows")
    return np.asarray(ids), np.asarray(steps), np.asarray(thetas)
