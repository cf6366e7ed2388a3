import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mnat.bandit import (
    BanditConfig,
    NoiseSpec,
    NoisyOracle,
    _explore,
    estimate_regret,
    etc_run,
    exploration_budget,
    gaussian_arms,
    greedy_bandit,
    make_noisy_oracle,
    moss_index,
    moss_recommend,
    moss_run,
    PullHistory,
    run_trial,
)
from mnat.errors import BudgetTooSmall, RangeViolation
from mnat.greedy import greedy_exact
from mnat.instances import bandit_fixture, random_separable
from mnat.lattice import FeasibleRegion, rescale, unit_step
from mnat.mchecker import brute_force_max
from mnat.valuations import SeparableConcaveSpec, separable_concave

SEP = separable_concave(SeparableConcaveSpec([[0, 1, 1.5], [0, 0.8, 1.0]], 2))
SEP01 = rescale(SEP, 0.0, 2.0)
CHI2_DF1_P001 = 10.828
CHI2_DF2_P001 = 13.816


def bonus(tau, horizon, M):
    return math.sqrt(4 / tau * math.log(max(1.0, horizon / (M * tau))))


# -- noisy oracle -------------------------------------------------------------


def test_zero_noise_returns_exact_values():
    oracle = make_noisy_oracle(SEP01, NoiseSpec("gaussian", 0.0), seed=1)
    assert [oracle.query((1, 1)) for _ in range(3)] == [0.9] * 3
    assert oracle.queries == 3


def test_same_seed_same_noise():
    a = make_noisy_oracle(SEP01, NoiseSpec(), seed=5)
    b = make_noisy_oracle(SEP01, NoiseSpec(), seed=5)
    assert [a.query((1, 0)) for _ in range(50)] == [b.query((1, 0)) for _ in range(50)]


@pytest.mark.parametrize("noise", [NoiseSpec(), NoiseSpec("uniform")])
def test_noise_is_centered(noise):
    oracle = make_noisy_oracle(SEP01, noise, seed=11)
    draws = np.array([oracle.query((0, 0)) for _ in range(100_000)])
    assert abs(draws.mean()) < 0.02
    if noise.kind == "uniform":
        assert draws.min() >= -1 and draws.max() <= 1


def test_range_violation():
    with pytest.raises(RangeViolation):
        make_noisy_oracle(SEP, seed=0)


def test_noise_spec_parse():
    assert NoiseSpec.parse("gaussian:0.5") == NoiseSpec("gaussian", 0.5)
    assert NoiseSpec.parse("uniform") == NoiseSpec("uniform", 1.0)
    assert str(NoiseSpec.parse("gaussian")) == "gaussian:1"
    with pytest.raises(ValueError):
        NoiseSpec.parse("cauchy")


# -- MOSS ---------------------------------------------------------------------


def test_single_arm():
    h = moss_run(gaussian_arms([0.3], NoiseSpec(), 0), 100)
    assert h.counts == [100]


def test_budget_too_small():
    with pytest.raises(BudgetTooSmall):
        moss_run(gaussian_arms([0.1, 0.2, 0.3], NoiseSpec(), 0), 2)


def test_two_arm_zero_noise():
    T = 1000
    h = moss_run(gaussian_arms([0.9, 0.1], NoiseSpec("gaussian", 0.0)), T)
    assert h.pulls[:3] == [0, 1, 0]
    assert h.counts[0] > h.counts[1]
    # Arm 2 can only win while its bonus alone covers the 0.8 gap.
    limit = max(tau for tau in range(1, T) if bonus(tau, T, 2) >= 0.8)
    assert h.counts[1] <= 1 + limit


def test_index_formula():
    assert moss_index(0.5, 4, 100, 5) == pytest.approx(0.5 + math.sqrt(math.log(5)))
    assert moss_index(0.5, 40, 100, 5) == 0.5


@given(st.lists(st.floats(0, 1), min_size=1, max_size=6), st.integers(0, 50), st.integers(0, 2**31))
@settings(max_examples=30)
def test_pull_accounting(means, extra, seed):
    T = len(means) + extra
    h = moss_run(gaussian_arms(means, NoiseSpec(), seed), T)
    assert sum(h.counts) == T == len(h.pulls)
    assert min(h.counts) >= 1
    assert h.pulls[: len(means)] == list(range(len(means)))


def test_moss_regret_bound_two_arms():
    M, T = 2, 10_000
    regrets = []
    for s in range(20):
        h = moss_run(gaussian_arms([0.6, 0.4], NoiseSpec(), s), T)
        regrets.append(0.2 * h.counts[1])
    assert np.mean(regrets) <= 39 * math.sqrt(M * T) + M


def test_recommend_single_arm():
    h = PullHistory([10], [0.0], 10, 1)
    assert moss_recommend(h, np.random.default_rng(0)) == 0


def test_recommend_frequency_and_chi_square():
    h = PullHistory([7500, 2500], [0.0, 0.0], 10_000, 2)
    rng = np.random.default_rng(3)
    n = 100_000
    draws = np.array([moss_recommend(h, rng) for _ in range(n)])
    freq = np.bincount(draws, minlength=2)
    assert abs(freq[0] / n - 0.75) < 0.01
    expected = np.array([0.75, 0.25]) * n
    assert ((freq - expected) ** 2 / expected).sum() < CHI2_DF1_P001


def test_recommend_matches_counts_three_arms():
    h = PullHistory([5000, 3000, 2000], [0.0] * 3, 10_000, 3)
    rng = np.random.default_rng(4)
    n = 100_000
    freq = np.bincount([moss_recommend(h, rng) for _ in range(n)], minlength=3)
    expected = np.array([0.5, 0.3, 0.2]) * n
    assert ((freq - expected) ** 2 / expected).sum() < CHI2_DF2_P001


def test_recommend_simple_regret_two_arms():
    T = 10_000
    gaps = []
    rng = np.random.default_rng(0)
    for s in range(50):
        h = moss_run(gaussian_arms([0.7, 0.5], NoiseSpec(), s), T)
        gaps.append(0.2 * (moss_recommend(h, rng) == 1))
    assert np.mean(gaps) <= 40 * math.sqrt(2 / T)
    assert np.mean(gaps) < 0.05


# -- greedy bandit ------------------------------------------------------------


def test_greedy_bandit_zero_noise_finds_greedy_point():
    region = FeasibleRegion(SEP01, 2)
    target = greedy_exact(SEP01, 2).final
    hits = 0
    for s in range(20):
        oracle = make_noisy_oracle(SEP01, NoiseSpec("gaussian", 0.0), seed=s)
        x, phases = _explore(oracle, region, 2, 2000, s)
        for phase in phases:
            # The argmax arm receives the most pulls in every phase.
            values = [SEP01(unit_step(phase.anchor, d)) for d in phase.directions]
            best = values.index(max(values))
            assert phase.history.counts.index(max(phase.history.counts)) == best
        hits += x == target
    assert hits >= 15


def test_greedy_bandit_query_budget_and_feasibility():
    region = FeasibleRegion(SEP01, 2)
    oracle = make_noisy_oracle(SEP01, NoiseSpec(), seed=0)
    seen = set()
    query = oracle.query
    oracle.query = lambda x: (seen.add(tuple(x)), query(x))[1]
    greedy_bandit(oracle, region, 2, 1001, seed=0)
    assert oracle.queries == 2 * (1001 // 2)
    assert all(x in region for x in seen)


def test_greedy_bandit_budget_precondition():
    oracle = make_noisy_oracle(SEP01, seed=0)
    with pytest.raises(BudgetTooSmall):
        greedy_bandit(oracle, FeasibleRegion(SEP01, 2), 2, 2 * 4 - 1)


def test_greedy_bandit_simple_regret_bound():
    K, T = 2, 40_000
    region = FeasibleRegion(SEP01, K)
    _, best = brute_force_max(SEP01, region)
    regrets = []
    for s in range(100):
        oracle = make_noisy_oracle(SEP01, NoiseSpec(), seed=s)
        regrets.append(best - SEP01(greedy_bandit(oracle, region, K, T, seed=s)))
    assert np.mean(regrets) <= 2 * 40 * math.sqrt(3 * K / T)


# -- explore then commit -------------------------------------------------------


def test_exploration_budget_clipping():
    assert exploration_budget(12, 2, 4) == 12
    assert exploration_budget(10_000, 2, 4) == math.ceil(2 * 4 ** (1 / 3) * 10_000 ** (2 / 3))
    assert exploration_budget(10**9, 2, 4) < 10**9


def test_etc_tiny_budget_is_pure_exploration():
    f = bandit_fixture()
    oracle = make_noisy_oracle(f, seed=0)
    rec = etc_run(oracle, FeasibleRegion(f, 2), 2, 12, seed=0)
    assert rec.commit_rounds == 0 and rec.rounds == 12


def test_etc_zero_noise():
    # Gaps of at least 0.1 so that zero-noise MOSS concentrates its pulls.
    f = SEP01
    region = FeasibleRegion(f, 2)
    _, best = brute_force_max(f, region)
    T = 20_000
    explore = exploration_budget(T, 2, 2)
    max_gap = best - f((0, 0))
    optimal = 0
    for s in range(20):
        oracle = make_noisy_oracle(f, NoiseSpec("gaussian", 0.0), seed=s)
        rec = etc_run(oracle, region, 2, T, seed=s, optimum=best)
        assert rec.rounds == T
        assert sum(1 for _ in rec.trace()) == T
        if rec.commit_value == best:
            optimal += 1
            assert rec.cumulative_regret <= explore * max_gap + 1e-9
    # The recommendation is randomized, so a suboptimal commit keeps some probability (about 1/4 here).
    assert optimal >= 12


def test_etc_trace_consistency():
    f = bandit_fixture()
    oracle = make_noisy_oracle(f, seed=3)
    _, best = brute_force_max(f, FeasibleRegion(f, 2))
    rec = etc_run(oracle, FeasibleRegion(f, 2), 2, 3000, seed=3, optimum=best)
    rows = list(rec.trace())
    assert rows[-1][3] == pytest.approx(rec.cumulative_regret)
    assert rec.cumulative_regret >= 0


# -- Monte Carlo estimation ------------------------------------------------------


def test_single_trial_zero_stderr():
    cfg = BanditConfig(bandit_fixture(), 2, 200, NoiseSpec("gaussian", 0.0))
    assert estimate_regret(cfg, 1, seed=0).stderr == 0.0


def test_stderr_shrinks_with_trials():
    cfg = BanditConfig(bandit_fixture(), 2, 400, NoiseSpec(), estimator="realized")
    small = estimate_regret(cfg, 200, seed=1).stderr
    large = estimate_regret(cfg, 400, seed=2).stderr
    assert large / small == pytest.approx(1 / math.sqrt(2), rel=0.3)


def test_estimates_are_reproducible():
    cfg = BanditConfig(bandit_fixture(), 2, 500, NoiseSpec(), mode="cumulative")
    assert estimate_regret(cfg, 5, seed=9).to_dict() == estimate_regret(cfg, 5, seed=9).to_dict()


def test_parallel_trials_match_serial(monkeypatch):
    cfg = BanditConfig(bandit_fixture(), 2, 500, NoiseSpec())
    serial = estimate_regret(cfg, 4, seed=2).to_dict()
    monkeypatch.setenv("MNAT_THREADS", "2")
    assert estimate_regret(cfg, 4, seed=2).to_dict() == serial


def test_conditional_estimator_is_unbiased():
    f = bandit_fixture()
    cfg_c = BanditConfig(f, 2, 600, NoiseSpec())
    summary = estimate_regret(cfg_c, 400, seed=4)
    # Same trials, two estimators: the realized mean scatters around the conditional one.
    diffs = np.array([run_trial(cfg_c, t, 4, summary.optimum).realized for t in range(400)]) - summary.regrets
    assert abs(diffs.mean()) < 4 * diffs.std(ddof=1) / math.sqrt(len(diffs))


def test_cumulative_regret_is_sublinear():
    cfg = lambda T: BanditConfig(bandit_fixture(), 2, T, NoiseSpec(), mode="cumulative")
    a = estimate_regret(cfg(5_000), 40, seed=0).mean
    b = estimate_regret(cfg(10_000), 40, seed=0).mean
    assert b / a < 2


@given(st.integers(0, 10_000))
@settings(max_examples=10)
def test_random_instances_respect_the_region(seed):
    rng = np.random.default_rng(seed)
    f = random_separable(rng, 3, hi=2, budget=2)
    f = rescale(f, 0.0, 3.0)
    region = FeasibleRegion(f, 2)
    oracle = NoisyOracle(f, NoiseSpec(), np.random.default_rng(seed))
    x = greedy_bandit(oracle, region, 2, 200, seed)
    assert x in region and oracle.queries == 200
