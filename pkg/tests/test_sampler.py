import numpy as np
import pytest
from scipy import stats

from eglfmcmc.sampler import (
    Chain,
    ChainConfig,
    ProposalSpec,
    default_proposal,
    mh_transition,
    read_chain_csv,
    run_chain,
    write_chain_csv,
)
from eglfmcmc.simulators import Prior

FLAT = lambda e, th: 0.0
WIDE_PRIOR = Prior(np.array([-100.0]), np.array([100.0]))
NORMAL_RATIO = lambda e, th: -0.5 * th[0] ** 2


# ---------------------------------------------------------------------------
# single transitions


def test_constant_ratio_always_accepts_in_support():
    # lambda = 0 for a flat ratio on a uniform prior, so rho = 1
    prior = Prior(np.array([-1e6]), np.array([1e6]))
    rng = np.random.default_rng(0)
    theta = np.array([0.0])
    prop = ProposalSpec(np.array([0.1]))
    for _ in range(100):
        res = mh_transition(theta, 0.0, FLAT, prior, prop, rng)
        assert res.accepted
        theta = res.theta


def test_out_of_support_proposal_always_rejected():
    prior = Prior(np.array([0.0]), np.array([1.0]))
    rng = np.random.default_rng(1)
    theta = np.array([0.5])
    prop = ProposalSpec(np.array([1e9]))  # proposals effectively never in [0, 1]
    for _ in range(100):
        res = mh_transition(theta, 0.0, FLAT, prior, prop, rng)
        assert not res.accepted
        assert np.array_equal(res.theta, theta)


def test_rejection_keeps_state_bit_exact():
    rng = np.random.default_rng(2)
    theta = np.array([0.3])
    prop = ProposalSpec(np.array([5.0]))
    rejected = 0
    for _ in range(500):
        res = mh_transition(theta, 0.0, NORMAL_RATIO, WIDE_PRIOR, prop, rng)
        if not res.accepted:
            assert res.theta is theta or np.array_equal(res.theta, theta)
            rejected += 1
        theta = res.theta
    assert rejected > 0


# ---------------------------------------------------------------------------
# whole chains


def test_forced_rejection_chain_is_theta0():
    prior = Prior(np.array([0.0]), np.array([1.0]))
    cfg = ChainConfig(n_steps=1, burn_in=0, theta0=np.array([0.5]), eps=0.0, seed=3)
    chain = run_chain(FLAT, prior, ProposalSpec(np.array([1e9])), cfg)
    assert np.array_equal(chain.states, np.array([[0.5]]))
    assert chain.accepted == 0 and chain.proposals == 1


def test_chain_deterministic():
    cfg = ChainConfig(n_steps=2000, burn_in=100, theta0=np.array([0.0]), eps=0.0, seed=11)
    prop = ProposalSpec(np.array([2.4]))
    a = run_chain(NORMAL_RATIO, WIDE_PRIOR, prop, cfg)
    b = run_chain(NORMAL_RATIO, WIDE_PRIOR, prop, cfg)
    assert np.array_equal(a.states, b.states)
    assert a.accepted == b.accepted


def test_support_confinement():
    prior = Prior(np.array([0.0, -2.0]), np.array([1.0, 2.0]))
    cfg = ChainConfig(
        n_steps=5000, burn_in=100, theta0=np.array([0.5, 0.0]), eps=0.0, seed=4
    )
    chain = run_chain(FLAT, prior, default_proposal(prior, scale=0.8), cfg)
    assert np.all(chain.states >= prior.lower)
    assert np.all(chain.states <= prior.upper)
    assert 0.0 <= chain.acceptance_rate <= 1.0


def test_normal_target_ks_smoke():
    cfg = ChainConfig(n_steps=20_000, burn_in=500, theta0=np.array([0.0]), eps=0.0, seed=5)
    chain = run_chain(NORMAL_RATIO, WIDE_PRIOR, ProposalSpec(np.array([2.4])), cfg)
    ks = stats.kstest(chain.states[:, 0], "norm").statistic
    assert ks < 0.03


def test_flat_target_uniform_recovery_smoke():
    prior = Prior(np.array([0.0]), np.array([1.0]))
    cfg = ChainConfig(n_steps=20_000, burn_in=500, theta0=np.array([0.5]), eps=0.0, seed=6)
    chain = run_chain(FLAT, prior, ProposalSpec(np.array([0.6])), cfg)
    ks = stats.kstest(chain.states[:, 0], stats.uniform(0, 1).cdf).statistic
    assert ks < 0.03


def test_acceptance_rate_monotone_in_proposal_scale():
    # shrinking sigma tenfold must not lower the acceptance rate
    def rate(sigma, seed):
        cfg = ChainConfig(
            n_steps=20_000, burn_in=200, theta0=np.array([0.0]), eps=0.0, seed=seed
        )
        return run_chain(
            NORMAL_RATIO, WIDE_PRIOR, ProposalSpec(np.array([sigma])), cfg
        ).acceptance_rate

    n = 20_200
    band = 3.0 * np.sqrt(0.25 / n)
    for seed in (7, 8, 9):
        big, small = rate(2.4, seed), rate(0.24, seed)
        assert small >= big - band


def test_detailed_balance_on_lattice():
    # 5-cell step target on [0, 5]: empirical flows a->b and b->a must match
    levels = np.array([0.0, 0.7, 1.2, 0.4, -0.3])

    def ratio(e, th):
        return levels[min(int(th[0]), 4)]

    prior = Prior(np.array([0.0]), np.array([5.0]))
    cfg = ChainConfig(
        n_steps=300_000, burn_in=2000, theta0=np.array([2.5]), eps=0.0, seed=10
    )
    chain = run_chain(ratio, prior, ProposalSpec(np.array([1.3])), cfg)
    cells = np.minimum(chain.states[:, 0].astype(int), 4)

    counts = np.zeros((5, 5))
    for a, b in zip(cells[:-1], cells[1:]):
        counts[a, b] += 1
    for a in range(5):
        for b in range(a + 1, 5):
            flow = counts[a, b] + counts[b, a]
            if flow == 0:
                continue
            assert abs(counts[a, b] - counts[b, a]) <= 5.0 * np.sqrt(flow)

    # occupancy agrees with the brute-force enumeration of cell weights
    pi = np.exp(levels) / np.exp(levels).sum()
    freq = np.bincount(cells, minlength=5) / cells.shape[0]
    assert np.abs(freq - pi).max() < 0.02


# ---------------------------------------------------------------------------
# validation and IO


def test_run_chain_validates_config():
    prior = Prior(np.array([0.0]), np.array([1.0]))
    prop = ProposalSpec(np.array([0.1]))
    with pytest.raises(ValueError):
        run_chain(FLAT, prior, prop, ChainConfig(1, 0, np.array([2.0]), 0.0, 0))
    with pytest.raises(ValueError):
        ChainConfig(n_steps=0, burn_in=0, theta0=np.array([0.5]), eps=0.0)
    with pytest.raises(ValueError):
        ChainConfig(n_steps=1, burn_in=-1, theta0=np.array([0.5]), eps=0.0)
    with pytest.raises(ValueError):
        ProposalSpec(np.array([0.0]))


def test_chain_csv_round_trip(tmp_path):
    rng = np.random.default_rng(12)
    states = rng.normal(size=(50, 3))
    p1 = tmp_path / "chain.csv"
    p2 = tmp_path / "chain2.csv"
    write_chain_csv(p1, [("0", states), ("1", states[:10])])
    ids, steps, thetas = read_chain_csv(p1)
    assert thetas.shape == (60, 3)
    assert set(ids) == {"0", "1"}
    assert np.array_equal(thetas[:50], states)
    write_chain_csv(p2, [("0", thetas[:50]), ("1", thetas[50:])])
    assert p1.read_bytes() == p2.read_bytes()


def test_chain_csv_malformed(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("chain_id,step,theta_0\n0,0,1.0\n0,1\n")
    with pytest.raises(ValueError, match="line 3"):
        read_chain_csv(p)


def test_chain_acceptance_rate_property():
    c = Chain(states=np.zeros((2, 1)), accepted=3, proposals=10, burn_in=0, eps=0.0)
    assert c.acceptance_rate == 0.3
    assert len(c) == 2
