from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cellfree_offload import (
    Allocation,
    PathLossParams,
    evaluate,
    make_scenario,
    noma_rates,
    optimal_bandwidth,
    random_bandwidth,
    random_offloading,
    tdma_policy,
    threshold_allocation,
)
from cellfree_offload.channel import first_hop_snr
from cellfree_offload.cost import fdma_first_hop
from cellfree_offload.harness import apply_policy, policy_rngs, prepare_trial


def test_tdma_single_task_equals_full_band_fdma():
    s = make_scenario(K=1, M=8)
    r, _, _ = prepare_trial(s, 0)
    t = tdma_policy(s, r)
    f = fdma_first_hop(s, first_hop_snr(s, r), np.array([1.0]))
    np.testing.assert_allclose([t.delay, t.energy, t.rate], [f.delay, f.energy, f.rate], rtol=1e-15)


def test_tdma_two_equal_users_get_half_rate():
    s = make_scenario(K=2, M=8)
    r, _, _ = prepare_trial(s, 0)
    r = replace(r, h=np.array([0.7 + 0.1j, 0.7 + 0.1j]), d=np.ones(2))
    full = s.B * np.log2(1 + first_hop_snr(s, r))
    np.testing.assert_allclose(tdma_policy(s, r).rate, full / 2, rtol=1e-15)


def _total(s, r, report, policy, trial=0):
    return apply_policy(s, r, report, policy, policy_rngs(s.seed, "none", policy, trial))[1].Omega_total


def test_tdma_never_beats_optimal_split_for_delay_sensitive_tasks():
    rng = np.random.default_rng(0)
    for seed in range(30):
        s = make_scenario(K=8, M=32, seed=seed, mu=0.0, C=rng.uniform(500, 1500, 8))
        r, report, _ = prepare_trial(s, 0)
        assert _total(s, r, report, ("tdma", "oto")) >= _total(s, r, report, ("oba", "oto"))


def test_tdma_can_beat_optimal_split_when_only_energy_counts():
    # airtime-only energy: TDMA spends sum(c) while any FDMA split spends (sum sqrt c)^2 >= sum(c)
    s = make_scenario(K=8, M=32, seed=1, mu=1.0)
    r, report, _ = prepare_trial(s, 0)
    assert _total(s, r, report, ("tdma", "oto")) < _total(s, r, report, ("oba", "oto"))


def test_noma_single_user_is_full_band():
    s = make_scenario(K=1, M=8)
    r, _, _ = prepare_trial(s, 0)
    np.testing.assert_allclose(noma_rates(s, r), s.B * np.log2(1 + first_hop_snr(s, r)), rtol=1e-15)


def test_noma_two_user_chain():
    sigma2 = 1e-6
    s = make_scenario(K=2, M=8, p_b=1.0, sigma2_first=sigma2, pathloss=PathLossParams(model="unity"))
    r, _, _ = prepare_trial(s, 0)
    r = replace(r, d=np.ones(2), h=np.sqrt([3 * sigma2, sigma2]).astype(complex))
    rates = noma_rates(s, r)
    np.testing.assert_allclose(rates, [s.B * np.log2(2.5), s.B * np.log2(2.0)], rtol=1e-12)
    assert rates.sum() == pytest.approx(s.B * np.log2(5.0), rel=1e-12)


def test_noma_tie_broken_by_index():
    s = make_scenario(K=2, M=8, pathloss=PathLossParams(model="unity"))
    r, _, _ = prepare_trial(s, 0)
    r = replace(r, d=np.ones(2), h=np.array([1e-3, 1e-3], dtype=complex))
    rates = noma_rates(s, r)
    assert rates[0] < rates[1]  # task 0 decoded first, under interference from task 1


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10_000), K=st.integers(1, 12))
def test_noma_sum_capacity_identity(seed, K):
    s = make_scenario(K=K, M=16, seed=seed)
    r, _, _ = prepare_trial(s, 0)
    power = s.p_b * r.d * np.abs(r.h) ** 2
    total = s.B * np.log2(1 + power.sum() / s.sigma2_first[0])
    assert noma_rates(s, r).sum() == pytest.approx(total, rel=1e-9)


def test_random_bandwidth_properties():
    np.testing.assert_array_equal(random_bandwidth(make_scenario(K=1), np.random.default_rng(0)), [1.0])
    s = make_scenario(K=4)
    a = random_bandwidth(s, np.random.default_rng(5))
    np.testing.assert_array_equal(a, random_bandwidth(s, np.random.default_rng(5)))
    rng = np.random.default_rng(6)
    draws = np.array([random_bandwidth(s, rng) for _ in range(10_000)])
    np.testing.assert_allclose(draws.sum(axis=1), 1.0, rtol=1e-12)
    assert np.all(np.abs(draws.mean(axis=0) - 0.25) < 0.01)


def test_random_offloading_properties():
    s = make_scenario(K=6)
    a = random_offloading(s, np.random.default_rng(3))
    np.testing.assert_array_equal(a, random_offloading(s, np.random.default_rng(3)))
    assert random_offloading(make_scenario(K=1), np.random.default_rng(0))[0] in (0, 1)
    rng = np.random.default_rng(4)
    assert np.mean([random_offloading(s, rng) for _ in range(5000)]) == pytest.approx(0.5, abs=0.02)


def test_random_offloading_costs_at_least_threshold_on_average():
    rng_params = np.random.default_rng(9)
    for seed in range(5):
        s = make_scenario(K=8, M=32, seed=seed, mu=rng_params.uniform(0, 1, 8), C=rng_params.uniform(500, 1500, 8))
        r, report, _ = prepare_trial(s, 0)
        eta = optimal_bandwidth(s, r)
        oto = evaluate(s, r, report, Allocation(eta, threshold_allocation(s, report))).Omega_total
        rng = np.random.default_rng(seed)
        ro = [evaluate(s, r, report, Allocation(eta, random_offloading(s, rng))).Omega_total for _ in range(1000)]
        assert np.mean(ro) >= oto and min(ro) >= oto * (1 - 1e-12)


def test_optimized_pair_dominates_fdma_and_tdma_baselines():
    for seed in range(20):
        s = make_scenario(K=6, M=24, seed=seed, mu=0.0, C=np.linspace(600, 1400, 6))
        r, report, _ = prepare_trial(s, 0)
        best = _total(s, r, report, ("oba", "oto"))
        for policy in [("oba", "ro"), ("tdma", "oto"), ("tdma", "ro"), ("rba", "oto"), ("rba", "ro")]:
            assert _total(s, r, report, policy) >= best * (1 - 1e-12)
