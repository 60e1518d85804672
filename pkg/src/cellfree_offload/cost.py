"""Delay and energy accounting for both hops and both compute tiers.

Units: bits, Hz, cycles/s, W, J and s. The weighted per-task cost mixes J
and s exactly as ``mu * E + (1 - mu) * T``; no normalization is applied.
"""

from dataclasses import dataclass

import numpy as np

from .channel import first_hop_snr
from .exceptions import InfeasibleError


@dataclass(frozen=True, eq=False)
class Allocation:
    """Bandwidth fractions and binary offloading decisions.

    ``eta`` may be ``None`` when the first hop is not an FDMA split (TDMA,
    NOMA); the caller then supplies a :class:`FirstHop` to :func:`evaluate`.
    """

    eta: np.ndarray
    alpha: np.ndarray

    def __post_init__(self):
        alpha = np.asarray(self.alpha)
        if not np.all((alpha == 0) | (alpha == 1)):
            raise ValueError("alpha entries must be 0 or 1")
        object.__setattr__(self, "alpha", alpha.astype(int))
        if self.eta is not None:
            eta = np.asarray(self.eta, dtype=float)
            if eta.shape != alpha.shape:
                raise ValueError("eta and alpha lengths differ")
            if abs(eta.sum() - 1.0) > 1e-9:
                raise ValueError(f"eta must sum to 1, sums to {eta.sum()!r}")
            if np.any(eta < 0) or np.any(eta > 1):
                raise ValueError("eta entries must lie in [0, 1]")
            object.__setattr__(self, "eta", eta)


@dataclass(frozen=True, eq=False)
class FirstHop:
    """Per-task first-hop delay (s) and transmit energy (J)."""

    delay: np.ndarray
    energy: np.ndarray
    rate: np.ndarray = None


@dataclass(frozen=True, eq=False)
class CostBreakdown:
    t_TN: np.ndarray
    E_TN: np.ndarray
    t_hop2: np.ndarray
    E_FAN: np.ndarray
    t_comp_F: np.ndarray
    t_comp_C: np.ndarray
    E_re: np.ndarray
    E_total: np.ndarray
    T_total: np.ndarray
    omega: np.ndarray
    Omega_total: float


def first_hop_rate(eta, B, snr):
    """FDMA first-hop rate ``eta B log2(1 + snr)`` in bits/s."""
    eta = np.asarray(eta, dtype=float)
    if np.any(eta <= 0) or np.any(eta > 1):
        raise InfeasibleError("bandwidth fraction must lie in (0, 1]")
    if np.any(np.asarray(snr) < 0):
        raise ValueError("snr must be non-negative")
    out = eta * B * np.log2(1.0 + np.asarray(snr, dtype=float))
    return out if out.ndim else float(out)


def fdma_first_hop(scenario, snr, eta):
    """First hop under an FDMA bandwidth split ``eta``."""
    eta = np.asarray(eta, dtype=float)
    if np.any(eta <= 0):
        raise InfeasibleError("a task with zero bandwidth can never finish its first hop")
    rate = first_hop_rate(eta, scenario.B, snr)
    if np.any(rate <= 0):
        raise InfeasibleError("zero first-hop rate")
    delay = scenario.l / rate
    return FirstHop(delay=delay, energy=scenario.p_b * delay, rate=rate)


def second_hop_rate(scenario, gamma):
    return scenario.B * np.log2(1.0 + np.asarray(gamma, dtype=float))


def _gamma_of(sinr):
    return np.asarray(getattr(sinr, "gamma_exact", sinr), dtype=float)


def task_costs(scenario, gamma, alpha, first_hop):
    """Per-task cost terms for one or many decision vectors.

    ``alpha`` may have shape ``(K,)`` or ``(N, K)``; every returned array
    broadcasts to the shape of ``alpha``.
    """
    s = scenario
    alpha = np.asarray(alpha, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    if np.any((gamma <= 0) & np.any(alpha > 0, axis=tuple(range(alpha.ndim - 1)))):
        raise InfeasibleError("offloading a task whose second-hop SINR is zero")
    with np.errstate(divide="ignore", invalid="ignore"):
        hop2_time_per_task = np.where(gamma > 0, s.l / second_hop_rate(s, gamma), np.inf)
    with np.errstate(invalid="ignore"):
        t_hop2 = np.where(alpha > 0, alpha * hop2_time_per_task, 0.0)
    E_FAN = s.q * t_hop2
    t_comp_F = s.C * (1.0 - alpha) * s.l / s.compute.f_F
    t_comp_C = s.C * alpha * s.l / s.compute.f_C
    E_re = s.C * (1.0 - alpha) * s.l * s.compute.P_CN
    t_TN = np.broadcast_to(first_hop.delay, alpha.shape)
    E_TN = np.broadcast_to(first_hop.energy, alpha.shape)
    E_total = E_TN + E_re + E_FAN
    T_total = t_TN + t_comp_F + t_hop2 + t_comp_C
    omega = s.mu * E_total + (1.0 - s.mu) * T_total
    return dict(
        t_TN=t_TN, E_TN=E_TN, t_hop2=t_hop2, E_FAN=E_FAN, t_comp_F=t_comp_F,
        t_comp_C=t_comp_C, E_re=E_re, E_total=E_total, T_total=T_total, omega=omega,
    )


def evaluate(scenario, realization, sinr_report, allocation, first_hop=None):
    """Full cost breakdown of one (bandwidth, offloading) decision.

    Args:
        scenario: system parameters.
        realization: channel draw; used for the first-hop SNR.
        sinr_report: :class:`SinrReport` or an array of second-hop SINRs.
        allocation: bandwidth fractions and offloading bits.
        first_hop: optional precomputed first hop (TDMA, NOMA). When given,
            ``allocation.eta`` is ignored.
    """
    if first_hop is None:
        if allocation.eta is None:
            raise ValueError("allocation has no bandwidth split and no first hop was given")
        first_hop = fdma_first_hop(scenario, first_hop_snr(scenario, realization), allocation.eta)
    terms = task_costs(scenario, _gamma_of(sinr_report), allocation.alpha, first_hop)
    terms = {k: np.array(v) for k, v in terms.items()}
    total = float(np.sum(scenario.w * terms["omega"]))
    return CostBreakdown(Omega_total=total, **terms)


def offload_delta(scenario, sinr_report, k=None):
    """Change in a task's weighted cost when it switches from FAN to CPU.

    ``(1 - mu) (l/R2 + C l/f_C - C l/f_F) + mu (q l/R2 - C l P_CN)`` with
    ``R2 = B log2(1 + gamma)``. First-hop terms cancel, so the value does not
    depend on the bandwidth split. Zero SINR gives ``+inf``.
    """
    s = scenario
    gamma = _gamma_of(sinr_report)
    with np.errstate(divide="ignore"):
        hop2 = np.where(gamma > 0, s.l / second_hop_rate(s, gamma), np.inf)
    delay = hop2 + s.C * s.l / s.compute.f_C - s.C * s.l / s.compute.f_F
    energy = s.q * hop2 - s.C * s.l * s.compute.P_CN
    with np.errstate(invalid="ignore"):
        delta = (1.0 - s.mu) * delay + s.mu * energy
    delta = np.where(np.isfinite(hop2), delta, np.inf)
    return delta if k is None else float(delta[k])
