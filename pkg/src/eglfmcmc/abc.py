"""Rejection ABC baseline: accept prior draws whose simulation lands near x_o.

Each draw i uses its own generator seeded from (master_seed, i), so any
accepted parameter can be replayed exactly from the recorded draw index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import l1_distance
from .simulators import Prior, prior_sample


class ZeroAcceptancesError(RuntimeError):
    """Budget exhausted without a single acceptance."""

    def __init__(self, simulations_used: int, threshold: float):
        super().__init__(
            f"no acceptances after {simulations_used} simulations "
            f"(threshold {threshold})"
        )
        self.simulations_used = simulations_used
        self.threshold = threshold


@dataclass(frozen=True)
class AbcConfig:
    threshold: float
    target: int
    budget: int
    seed: int = 0

    def __post_init__(self):
        # A threshold below the problem's minimum achievable error (even a
        # negative one) is legal and simply yields zero acceptances.
        if self.target < 1:
            raise ValueError("target accepted count must be >= 1")
        if self.budget < self.target:
            raise ValueError("budget must be >= target")


@dataclass
class AbcResult:
    accepted: np.ndarray       # (k, dim)
    draw_indices: np.ndarray   # (k,) index of each accepted draw
    eps_accepted: np.ndarray   # (k,) recorded errors
    simulations_used: int


def _draw_rng(master_seed: int, index: int) -> np.random.Generator:
    # Stated splitting rule: one child stream per draw, keyed by (master, i).
    return np.random.default_rng(np.random.SeedSequence((master_seed, index)))


def abc_rejection(
    simulate,
    prior: Prior,
    x_o: np.ndarray,
    config: AbcConfig,
) -> AbcResult:
    """Draw-simulate-test until `target` acceptances or the budget runs out.

    Raises ZeroAcceptancesError if the budget is exhausted with nothing
    accepted; otherwise returns whatever was accepted (possibly fewer than
    the target).
    """
    x_o = np.asarray(x_o, dtype=float)
    accepted: list[np.ndarray] = []
    indices: list[int] = []
    errs: list[float] = []
    used = 0
    for i in range(config.budget):
        rng = _draw_rng(config.seed, i)
        theta = prior_sample(prior, rng)
        eps = l1_distance(simulate(theta, rng), x_o)
        used += 1
        if eps <= config.threshold:
            accepted.append(theta)
            indices.append(i)
            errs.append(eps)
            if len(accepted) >= config.target:
                break
    if not accepted:
        raise ZeroAcceptancesError(used, config.threshold)
    return AbcResult(
        accepted=np.asarray(accepted),
        draw_indices=np.asarray(indices, dtype=int),
        eps_accepted=np.asarray(errs),
        simulations_used=used,
    )


def replay_draw(
    simulate, prior: Prior, x_o: np.ndarray, master_seed: int, index: int
) -> tuple[np.ndarray, float]:
    """Re-run draw `index` of an ABC run; returns (theta, eps) bit-exactly."""
    rng = _draw_rng(master_seed, index)
    theta = prior_sample(prior, rng)
    eps = l1_distance(simulate(theta, rng), np.asarray(x_o, dtype=float))
    return theta, eps
