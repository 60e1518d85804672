"""Oracle suites run by the ``verify`` subcommand."""

from dataclasses import dataclass, replace

import numpy as np

from .allocation import brute_force_allocation, threshold_allocation, theorem2_check
from .bandwidth import bandwidth_oracle, optimal_bandwidth
from .config import PathLossParams, build_scenario, make_scenario
from .cost import Allocation, evaluate, offload_delta
from .harness import prepare_trial


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self):
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


def _seeded_scenarios(config, n, K_range, seed_offset):
    base = int(config.get("experiment.seed", 0))
    rng = np.random.default_rng([base, seed_offset])
    for i in range(n):
        K = int(rng.integers(K_range[0], K_range[1] + 1))
        yield build_scenario(config, system__K=K, experiment__seed=base + seed_offset + i)


def check_bandwidth_oracle(config, n=20, tol=1e-6):
    worst = 0.0
    for s in _seeded_scenarios(config, n, (2, 16), 1000):
        realization, _, _ = prepare_trial(s, 0)
        gap = np.max(np.abs(optimal_bandwidth(s, realization) - bandwidth_oracle(s, realization)))
        worst = max(worst, float(gap))
    return CheckResult("bandwidth closed form vs projected gradient", worst < tol,
                       f"max coordinate gap {worst:.2e} over {n} scenarios (tol {tol:g})")


def check_oto_vs_sot(config, n=50):
    mismatches = 0
    for s in _seeded_scenarios(config, n, (4, 12), 2000):
        realization, report, _ = prepare_trial(s, 0)
        alpha_bf, _ = brute_force_allocation(s, realization, report)
        mismatches += int(not np.array_equal(alpha_bf, threshold_allocation(s, report)))
    return CheckResult("threshold allocation vs exhaustive search", mismatches == 0,
                       f"{mismatches} mismatches over {n} scenarios")


def check_delta_identity(config, n=20, rtol=1e-10):
    worst = 0.0
    for s in _seeded_scenarios(config, n, (2, 12), 3000):
        realization, report, _ = prepare_trial(s, 0)
        eta = optimal_bandwidth(s, realization)
        delta = offload_delta(s, report)
        for k in range(s.K):
            a0 = np.zeros(s.K, dtype=int)
            a1 = a0.copy()
            a1[k] = 1
            w0 = evaluate(s, realization, report, Allocation(eta, a0)).omega[k]
            w1 = evaluate(s, realization, report, Allocation(eta, a1)).omega[k]
            worst = max(worst, abs((w1 - w0) - delta[k]) / max(abs(delta[k]), 1e-300))
    return CheckResult("switch-cost identity", worst < rtol, f"max relative error {worst:.2e} (tol {rtol:g})")


def sinr_convergence_study(Ms=(32, 64, 128, 256), trials=1000, K=8, tau=0.1, rho=1.0, q=0.1, sigma2=1.0, seed=0):
    """Median relative gap between exact and asymptotic SINR per ``M``.

    Unit large-scale gains; trials are paired across ``M`` because the
    channel for ``M`` is a row prefix of the channel for ``2M``.
    """
    medians = []
    for M in Ms:
        s = make_scenario(K=K, M=M, tau_D=tau, rho=rho, q=q, sigma2=sigma2, seed=seed,
                          pathloss=PathLossParams(model="unity"))
        gaps = [prepare_trial(s, t)[1].relative_gap for t in range(trials)]
        medians.append(float(np.median(np.concatenate(gaps))))
    return medians


def decision_stability(scenario, Ms=(16, 32, 64, 128, 256), trials=50):
    """Fraction of trials whose offloading decision is the same under exact and asymptotic SINR.

    Returns a dict mapping ``M`` to the agreement rate, plus the key
    ``"stable_from"`` holding the smallest ``M`` from which every larger
    ``M`` agrees on all trials (``None`` if none does). This is a report,
    not a pass/fail check.
    """
    agreement = {}
    for M in Ms:
        s = replace(scenario, M=int(M))
        same = 0
        for t in range(trials):
            _, report, _ = prepare_trial(s, t)
            same += int(np.array_equal(threshold_allocation(s, report.gamma_exact),
                                       threshold_allocation(s, report.gamma_asym)))
        agreement[int(M)] = same / trials
    stable_from = None
    for M in reversed(Ms):
        if agreement[int(M)] < 1.0:
            break
        stable_from = int(M)
    agreement["stable_from"] = stable_from
    return agreement


def check_sinr_convergence(trials=200, threshold=0.1):
    Ms = (32, 64, 128, 256)
    med = sinr_convergence_study(Ms, trials=trials)
    monotone = all(b <= a for a, b in zip(med, med[1:]))
    passed = monotone and med[-1] < threshold
    detail = ", ".join(f"M={M}: {m:.4f}" for M, m in zip(Ms, med))
    return CheckResult("asymptotic SINR convergence", passed, f"median relative gap {detail}")


def check_corner_cases(config, trials=20):
    failures = []
    f_choices = "choice(0.2e9, 0.3e9, 0.4e9, 0.5e9, 0.6e9, 0.7e9, 0.8e9)"
    for t in range(trials):
        s1 = build_scenario(config, tasks__mu=1.0, compute__p_cn_j_per_cycle=1e-8, experiment__seed=4000 + t)
        _, report, _ = prepare_trial(s1, 0)
        v1 = theorem2_check(s1, report)
        if not (v1.holds and np.all(v1.alpha_threshold == 1)):
            failures.append(f"mu=1 seed {4000 + t}")
        s0 = build_scenario(config, tasks__mu=0.0, tasks__cycles_per_bit=1000, compute__f_fan_hz=f_choices,
                            compute__p_cn_j_per_cycle=1e-10, system__q_w=1.0, experiment__seed=5000 + t)
        _, report, _ = prepare_trial(s0, 0)
        if not theorem2_check(s0, report).holds:
            failures.append(f"mu=0 seed {5000 + t}")
    return CheckResult("uniform-weight corner cases", not failures,
                       f"{2 * trials - len(failures)}/{2 * trials} cases hold" + (f"; failed: {failures[:5]}" if failures else ""))


def run_all(config, scale=1.0):
    n = max(1, int(round(scale * 20)))
    return [
        check_bandwidth_oracle(config, n=n),
        check_oto_vs_sot(config, n=max(1, int(round(scale * 50)))),
        check_delta_identity(config, n=n),
        check_sinr_convergence(trials=max(10, int(round(scale * 200)))),
        check_corner_cases(config, trials=n),
    ]
