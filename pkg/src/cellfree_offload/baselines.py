"""Comparison policies: TDMA, NOMA, random bandwidth and random offloading."""

import numpy as np

from .channel import first_hop_snr
from .cost import FirstHop


def tdma_policy(scenario, realization):
    """Equal time slots over the full band.

    Throughput is ``B log2(1 + snr) / K``; the radio is on only during its
    own slots, so energy is ``p_b`` times the airtime ``l / (B log2(1 + snr))``.
    """
    s = scenario
    full_rate = s.B * np.log2(1.0 + first_hop_snr(s, realization))
    airtime = s.l / full_rate
    return FirstHop(delay=s.K * airtime, energy=s.p_b * airtime, rate=full_rate / s.K)


def noma_rates(scenario, realization):
    """Uplink SIC rates, strongest received power decoded first.

    Task k sees interference from every task decoded after it plus its own
    FAN noise. Equal powers are ordered by index.
    """
    s = scenario
    power = s.p_b * realization.d * np.abs(realization.h) ** 2
    order = np.argsort(-power, kind="stable")
    # interference for the i-th decoded task = sum of powers decoded later
    tail = np.concatenate([np.cumsum(power[order][::-1])[::-1][1:], [0.0]])
    rates = np.empty(s.K)
    rates[order] = s.B * np.log2(1.0 + power[order] / (s.sigma2_first[order] + tail))
    return rates


def noma_policy(scenario, realization):
    rates = noma_rates(scenario, realization)
    delay = scenario.l / rates
    return FirstHop(delay=delay, energy=scenario.p_b * delay, rate=rates)


def random_bandwidth(scenario, rng):
    """Uniform draw from the simplex (normalized exponentials)."""
    x = rng.exponential(size=scenario.K)
    return x / x.sum()


def random_offloading(scenario, rng):
    """Independent fair coin per task."""
    return rng.integers(0, 2, size=scenario.K)
