"""Binary offloading decisions.

The total cost is affine in each ``alpha_k`` once the bandwidth split is
fixed, so offloading exactly the tasks whose switch cost ``delta_k`` is
negative is globally optimal. The dual/subgradient procedure, the literal
single-argmin rule and an exhaustive search are provided alongside it.
"""

import itertools
from dataclasses import dataclass, field

import numpy as np

from .bandwidth import optimal_bandwidth
from .channel import first_hop_snr
from .cost import _gamma_of, fdma_first_hop, offload_delta, second_hop_rate, task_costs
from .detection import sinr_report as _sinr_report
from .exceptions import CapacityError

MAX_BRUTE_FORCE_K = 20


def threshold_allocation(scenario, sinr_report):
    """Offload task k iff ``delta_k < 0``; ties stay local."""
    return (offload_delta(scenario, sinr_report) < 0).astype(int)


def argmin_allocation(scenario, sinr_report, psi=0.0):
    """Single offloader: the task minimizing ``delta_k + psi`` (lowest index on ties)."""
    alpha = np.zeros(scenario.K, dtype=int)
    alpha[int(np.argmin(offload_delta(scenario, sinr_report) + psi))] = 1
    return alpha


@dataclass
class DualResult:
    alpha: np.ndarray
    psi: float
    converged: bool
    iterations: int
    trace: list = field(default_factory=list)


def harmonic_steps(t, a=1.0):
    return a / t


def dual_allocation(scenario, sinr_report, step_schedule=harmonic_steps, max_iters=100_000, psi0=0.0):
    """Partially dualized allocation with projected subgradient updates.

    For fixed ``psi`` each task offloads iff ``delta_k + psi < 0``; then
    ``psi <- max(0, psi + step(t) (sum(alpha) - K))``. Stops when
    complementary slackness ``psi (sum(alpha) - K) = 0`` holds. The trace
    stores ``(psi, sum(alpha))`` per iteration.

    If ``max_iters`` runs out, the last decision is returned with
    ``converged=False``.
    """
    delta = offload_delta(scenario, sinr_report)
    K = scenario.K
    psi = float(psi0)
    trace = []
    alpha = (delta + psi < 0).astype(int)
    for t in range(1, max_iters + 1):
        alpha = (delta + psi < 0).astype(int)
        slack = int(alpha.sum()) - K
        trace.append((psi, int(alpha.sum())))
        if psi == 0.0 or slack == 0:
            return DualResult(alpha=alpha, psi=psi, converged=True, iterations=t, trace=trace)
        psi = max(0.0, psi + step_schedule(t) * slack)
    return DualResult(alpha=alpha, psi=psi, converged=False, iterations=max_iters, trace=trace)


def brute_force_allocation(scenario, realization, sinr_report=None, first_hop=None):
    """Exhaustive minimum of the total cost over all ``2^K`` decisions.

    Each candidate is scored with the full cost model. The bandwidth split
    is the optimal one unless ``first_hop`` is given. Ties go to the
    lexicographically smallest decision vector.

    Returns:
        (alpha, Omega_total) of the best decision.
    """
    K = scenario.K
    if K > MAX_BRUTE_FORCE_K:
        raise CapacityError(f"K={K} exceeds the exhaustive limit {MAX_BRUTE_FORCE_K}; use threshold_allocation")
    if sinr_report is None:
        sinr_report = _sinr_report(scenario, realization)
    gamma = _gamma_of(sinr_report)
    if first_hop is None:
        eta = optimal_bandwidth(scenario, realization)
        first_hop = fdma_first_hop(scenario, first_hop_snr(scenario, realization), eta)

    candidates = np.array(list(itertools.product((0, 1), repeat=K)), dtype=int)
    feasible = ~np.any(candidates[:, gamma <= 0] == 1, axis=1)
    candidates = candidates[feasible]
    omega = task_costs(scenario, gamma, candidates, first_hop)["omega"]
    totals = omega @ scenario.w
    best = int(np.argmin(totals))
    return candidates[best].copy(), float(totals[best])


@dataclass
class CornerCaseVerdict:
    regime: str
    alpha_threshold: np.ndarray
    holds: bool
    per_task: np.ndarray = None
    argmin_index: int = None
    slowest_fan_indices: np.ndarray = None
    argmin_operands: np.ndarray = None


def theorem2_check(scenario, sinr_report):
    """Check the two corner cases of uniform energy weights.

    ``mu == 1`` everywhere: every task whose second-hop energy
    ``q l / R2`` is below its local compute energy ``C l P_CN`` must be
    offloaded, and ``per_task`` reports which side of that comparison held.

    ``mu == 0`` everywhere: the single-argmin rule must pick a task whose FAN
    has the smallest computing frequency. The threshold decision is reported
    alongside without being asserted.
    """
    s = scenario
    mu = s.mu
    gamma = _gamma_of(sinr_report)
    alpha = threshold_allocation(s, gamma)
    if np.all(mu == 1.0):
        hop2_energy = s.q * s.l / second_hop_rate(s, gamma)
        cheaper = hop2_energy < s.C * s.l * s.compute.P_CN
        return CornerCaseVerdict(
            regime="delay-tolerant", alpha_threshold=alpha, per_task=cheaper,
            holds=bool(np.all(alpha[cheaper] == 1)),
        )
    if np.all(mu == 0.0):
        operands = s.l / second_hop_rate(s, gamma) - s.C * s.l / s.compute.f_F + s.C * s.l / s.compute.f_C
        k_star = int(np.argmin(operands))
        slowest = np.flatnonzero(s.compute.f_F == s.compute.f_F.min())
        return CornerCaseVerdict(
            regime="delay-sensitive", alpha_threshold=alpha, argmin_index=k_star,
            slowest_fan_indices=slowest, argmin_operands=operands, holds=bool(k_star in slowest),
        )
    raise ValueError("theorem2_check needs mu == 0 for all tasks or mu == 1 for all tasks")
