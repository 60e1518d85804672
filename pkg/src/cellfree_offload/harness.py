"""Monte-Carlo experiment driver.

Seeding scheme
--------------
Channel draws depend only on ``(experiment seed, trial index)`` so every
policy and every sweep point sees the same (nested) channels for a given
trial. Random policies draw from
``default_rng([seed, 0x5EED, axis_id, family, policy_id, trial_index])``
where ``axis_id`` is the position of the swept parameter in ``AXES``
(4 for a plain simulation), ``family`` is 0 for bandwidth and 1 for task
policies and ``policy_id`` the index within that family. A random
bandwidth split is therefore shared by every task policy it is paired with
and by every value along the axis, and any subset of rows can be
regenerated in isolation.
"""

import csv
import hashlib
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import allocation as alloc
from .bandwidth import optimal_bandwidth
from .baselines import noma_policy, random_bandwidth, random_offloading, tdma_policy
from .channel import first_hop_snr, sample_realization
from .config import build_scenario, experiment_settings
from .cost import Allocation, evaluate, fdma_first_hop
from .detection import sinr_report
from .exceptions import ConfigError, InfeasibleError, SingularChannelError, SolverError

log = logging.getLogger(__name__)

BANDWIDTH_POLICIES = ("oba", "tdma", "noma", "rba")
TASK_POLICIES = ("oto", "ro", "sot", "argmin")
AXES = {"l_bits": "tasks__l_bits", "mu": "tasks__mu", "K": "system__K", "M": "system__M"}
INTEGER_AXES = ("K", "M")

RAW_HEADER = ["axis", "axis_value", "bw_policy", "task_policy", "trial", "omega_total",
              "energy_j", "delay_s", "alpha_bits", "resamples"]
AGG_HEADER = ["axis", "axis_value", "bw_policy", "task_policy", "trials", "omega_mean",
              "omega_ci95", "energy_mean", "delay_mean"]

_POLICY_STREAM = 0x5EED


class TrialError(RuntimeError):
    """A trial failed; the message carries the trial context."""


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    values: tuple
    policies: tuple
    trials: int
    seed: int

    def __post_init__(self):
        if self.axis not in AXES:
            raise ConfigError("sweep.axis", f"must be one of {sorted(AXES)}")
        values = tuple(self.values)
        if not values:
            raise ConfigError("sweep.values", "must not be empty")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ConfigError("sweep.values", "must be strictly increasing")
        if self.trials < 1:
            raise ConfigError("sweep.trials", "must be >= 1")
        for bw, task in self.policies:
            if bw not in BANDWIDTH_POLICIES:
                raise ConfigError("policies", f"unknown bandwidth policy {bw!r}")
            if task not in TASK_POLICIES:
                raise ConfigError("policies", f"unknown task policy {task!r}")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "policies", tuple(tuple(p) for p in self.policies))


@dataclass
class TrialResult:
    scenario_hash: str
    trial: int
    policy: tuple
    omega_total: float
    energy: float
    delay: float
    alpha: np.ndarray
    eta: np.ndarray
    gamma_min: float
    gamma_mean: float
    gamma_max: float
    resamples: int
    E_total: np.ndarray
    T_total: np.ndarray
    mu: np.ndarray
    w: np.ndarray
    axis: str = "none"
    axis_value: float = float("nan")
    error: str = None

    def recompute_omega(self):
        return float(np.sum(self.w * (self.mu * self.E_total + (1.0 - self.mu) * self.T_total)))

    @property
    def alpha_bits(self):
        return "".join(str(int(a)) for a in self.alpha) if self.alpha is not None else ""


@dataclass
class AggregateRow:
    axis: str
    axis_value: float
    bw_policy: str
    task_policy: str
    trials: int
    omega_mean: float
    omega_ci95: float
    energy_mean: float
    delay_mean: float


@dataclass
class SweepTable:
    axis: str
    rows: list = field(default_factory=list)
    aggregates: list = field(default_factory=list)

    def omegas(self, axis_value, policy):
        """Per-trial costs of one point, ordered by trial index."""
        rows = [r for r in self.rows if r.axis_value == axis_value and r.policy == tuple(policy)]
        rows.sort(key=lambda r: r.trial)
        return np.array([r.omega_total for r in rows])


def scenario_hash(scenario):
    """Short stable digest of every scenario parameter."""
    s = scenario
    h = hashlib.sha256()
    for part in (s.K, s.M, s.B, s.p_b, s.rho, s.tau_D, s.sigma2, s.seed, s.cond_threshold,
                 s.pathloss, s.compute.f_C_max):
        h.update(repr(part).encode())
    for arr in (s.q, s.sigma2_first, s.w, s.l, s.C, s.mu, s.compute.f_F, s.compute.f_C, s.compute.P_CN):
        h.update(np.ascontiguousarray(arr, dtype=float).tobytes())
    return h.hexdigest()[:16]


def axis_id(axis):
    return list(AXES).index(axis) if axis in AXES else len(AXES)


def policy_rngs(seed, axis, policy, trial_index):
    """Independent generators for the bandwidth and the task half of a policy pair."""
    a = axis_id(axis)
    bw, task = policy
    bw_id = BANDWIDTH_POLICIES.index(bw) if bw in BANDWIDTH_POLICIES else len(BANDWIDTH_POLICIES)
    task_id = TASK_POLICIES.index(task) if task in TASK_POLICIES else len(TASK_POLICIES)
    return (
        np.random.default_rng([int(seed), _POLICY_STREAM, a, 0, bw_id, int(trial_index)]),
        np.random.default_rng([int(seed), _POLICY_STREAM, a, 1, task_id, int(trial_index)]),
    )


def prepare_trial(scenario, trial_index, max_resamples=100):
    """Sample a realization and its SINR report, resampling singular draws.

    Returns:
        (realization, report, resamples)
    """
    for attempt in range(max_resamples + 1):
        realization = sample_realization(scenario, trial_index, attempt)
        try:
            return realization, sinr_report(scenario, realization), attempt
        except SingularChannelError as exc:
            log.debug("trial %d attempt %d: %s", trial_index, attempt, exc)
    raise TrialError(f"trial {trial_index}: no well-conditioned channel in {max_resamples + 1} draws")


def apply_policy(scenario, realization, report, policy, rngs, decision_sinr="exact"):
    """Run one (bandwidth, task) policy pair on a prepared realization.

    ``rngs`` is the ``(bandwidth, task)`` generator pair from :func:`policy_rngs`.

    Returns:
        (Allocation, CostBreakdown)
    """
    bw, task = policy
    bw_rng, task_rng = rngs
    snr = first_hop_snr(scenario, realization)
    if bw == "oba":
        eta = optimal_bandwidth(scenario, realization)
        first_hop = fdma_first_hop(scenario, snr, eta)
    elif bw == "rba":
        eta = random_bandwidth(scenario, bw_rng)
        first_hop = fdma_first_hop(scenario, snr, eta)
    elif bw == "tdma":
        eta, first_hop = None, tdma_policy(scenario, realization)
    elif bw == "noma":
        eta, first_hop = None, noma_policy(scenario, realization)
    else:
        raise ConfigError("policies", f"unknown bandwidth policy {bw!r}")

    gamma = report.gamma_exact if decision_sinr == "exact" else report.gamma_asym
    if task == "oto":
        alpha = alloc.threshold_allocation(scenario, gamma)
    elif task == "sot":
        # decisions scored on the same SINR the other policies decide with
        alpha, _ = alloc.brute_force_allocation(scenario, realization, gamma, first_hop=first_hop)
    elif task == "ro":
        alpha = random_offloading(scenario, task_rng)
    elif task == "argmin":
        alpha = alloc.argmin_allocation(scenario, gamma)
    else:
        raise ConfigError("policies", f"unknown task policy {task!r}")

    allocation = Allocation(eta=eta, alpha=alpha)
    return allocation, evaluate(scenario, realization, report, allocation, first_hop=first_hop)


def _result(scenario, trial_index, policy, allocation, breakdown, report, resamples, digest):
    return TrialResult(
        scenario_hash=digest,
        trial=int(trial_index),
        policy=tuple(policy),
        omega_total=breakdown.Omega_total,
        energy=float(breakdown.E_total.sum()),
        delay=float(breakdown.T_total.sum()),
        alpha=allocation.alpha,
        eta=allocation.eta,
        gamma_min=float(report.gamma_exact.min()),
        gamma_mean=float(report.gamma_exact.mean()),
        gamma_max=float(report.gamma_exact.max()),
        resamples=int(resamples),
        E_total=breakdown.E_total,
        T_total=breakdown.T_total,
        mu=scenario.mu,
        w=scenario.w,
    )


def run_trial(scenario, policy, trial_index, axis="none", decision_sinr="exact", max_resamples=100):
    """Full pipeline for one trial: sample, detect, allocate, evaluate."""
    try:
        realization, report, resamples = prepare_trial(scenario, trial_index, max_resamples)
        rngs = policy_rngs(scenario.seed, axis, policy, trial_index)
        allocation, breakdown = apply_policy(scenario, realization, report, policy, rngs, decision_sinr)
    except (InfeasibleError, SolverError) as exc:
        raise TrialError(f"trial {trial_index}, policy {policy}: {exc}") from exc
    return _result(scenario, trial_index, policy, allocation, breakdown, report, resamples, scenario_hash(scenario))


def _failed(digest, trial, policy, scenario, message):
    nan = float("nan")
    return TrialResult(
        scenario_hash=digest, trial=trial, policy=tuple(policy), omega_total=nan, energy=nan,
        delay=nan, alpha=None, eta=None, gamma_min=nan, gamma_mean=nan, gamma_max=nan,
        resamples=0, E_total=None, T_total=None, mu=scenario.mu, w=scenario.w, error=message,
    )


def _run_point(scenario, policies, trials, axis, axis_value, decision_sinr, max_resamples):
    digest = scenario_hash(scenario)
    rows = []
    for t in range(trials):
        try:
            realization, report, resamples = prepare_trial(scenario, t, max_resamples)
        except TrialError as exc:
            log.warning("%s", exc)
            rows.extend(_failed(digest, t, p, scenario, str(exc)) for p in policies)
            continue
        for policy in policies:
            rngs = policy_rngs(scenario.seed, axis, policy, t)
            try:
                allocation, breakdown = apply_policy(scenario, realization, report, policy, rngs, decision_sinr)
            except (InfeasibleError, SolverError, ConfigError) as exc:
                message = f"trial {t}, policy {policy}: {exc}"
                log.warning("%s", message)
                rows.append(_failed(digest, t, policy, scenario, message))
                continue
            rows.append(_result(scenario, t, policy, allocation, breakdown, report, resamples, digest))
    for r in rows:
        r.axis, r.axis_value = axis, axis_value
    return rows


def aggregate(rows):
    """Mean and 95% normal-approximation interval per (axis value, policy)."""
    groups = {}
    for r in rows:
        groups.setdefault((r.axis, r.axis_value, r.policy), []).append(r)
    out = []
    for (axis, value, policy), members in sorted(groups.items(), key=lambda kv: (kv[0][1], kv[0][2])):
        ok = [m for m in members if m.error is None]
        omegas = np.array([m.omega_total for m in ok])
        n = len(ok)
        mean = float(omegas.mean()) if n else float("nan")
        ci = float(1.96 * omegas.std(ddof=1) / math.sqrt(n)) if n > 1 else float("nan")
        out.append(AggregateRow(
            axis=axis, axis_value=value, bw_policy=policy[0], task_policy=policy[1], trials=n,
            omega_mean=mean, omega_ci95=ci,
            energy_mean=float(np.mean([m.energy for m in ok])) if n else float("nan"),
            delay_mean=float(np.mean([m.delay for m in ok])) if n else float("nan"),
        ))
    return out


def _axis_value(axis, value):
    return int(value) if axis in INTEGER_AXES else float(value)


def run_sweep(spec, config, decision_sinr=None, max_resamples=None):
    """Run every (axis value, policy, trial) combination of ``spec``.

    The experiment seed in ``config`` is replaced by ``spec.seed``. Failed
    trials are kept as rows with NaN costs and an error message.
    """
    settings = experiment_settings(config)
    decision_sinr = decision_sinr or settings.decision_sinr
    max_resamples = settings.max_resamples if max_resamples is None else max_resamples
    table = SweepTable(axis=spec.axis)
    for raw in spec.values:
        value = _axis_value(spec.axis, raw)
        scenario = build_scenario(config, experiment__seed=spec.seed, **{AXES[spec.axis]: value})
        table.rows.extend(_run_point(scenario, spec.policies, spec.trials, spec.axis,
                                     value, decision_sinr, max_resamples))
    table.aggregates = aggregate(table.rows)
    return table


def run_simulation(config, trials=None, policies=None):
    """All configured policies on the base scenario (no sweep axis)."""
    settings = experiment_settings(config)
    scenario = build_scenario(config)
    policies = tuple(policies or settings.policies)
    SweepSpec(axis="K", values=(scenario.K,), policies=policies, trials=1, seed=0)  # validates policy names
    table = SweepTable(axis="none")
    table.rows = _run_point(scenario, policies, trials or settings.trials, "none", float("nan"),
                            settings.decision_sinr, settings.max_resamples)
    table.aggregates = aggregate(table.rows)
    return table


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def aggregate_path(path):
    path = Path(path)
    return path.with_name(path.name[: -len(path.suffix)] + ".agg.csv" if path.suffix else path.name + ".agg.csv")


def emit_csv(table, path):
    """Write raw rows to ``path`` and aggregates to ``<stem>.agg.csv``.

    Returns:
        (raw_path, aggregate_path)
    """
    path = Path(path)
    agg = aggregate_path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\r\n")
            writer.writerow(RAW_HEADER)
            for r in table.rows:
                writer.writerow([r.axis, _fmt(r.axis_value), r.policy[0], r.policy[1], r.trial,
                                 _fmt(r.omega_total), _fmt(r.energy), _fmt(r.delay), r.alpha_bits, r.resamples])
        with open(agg, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\r\n")
            writer.writerow(AGG_HEADER)
            for a in table.aggregates:
                writer.writerow([a.axis, _fmt(a.axis_value), a.bw_policy, a.task_policy, a.trials,
                                 _fmt(a.omega_mean), _fmt(a.omega_ci95), _fmt(a.energy_mean), _fmt(a.delay_mean)])
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc
    return path, agg


def emit_gnuplot(table, agg_csv_path):
    """Plain gnuplot script plotting mean cost with 95% error bars per policy."""
    agg_csv_path = Path(agg_csv_path)
    script = agg_csv_path.with_name(agg_csv_path.name.replace(".agg.csv", ".gp"))
    policies = sorted({(a.bw_policy, a.task_policy) for a in table.aggregates})
    lines = [
        "set datafile separator ','",
        f"set xlabel '{table.axis}'",
        "set ylabel 'mean total cost'",
        "set key outside",
        f"set terminal pngcairo size 900,600",
        f"set output '{agg_csv_path.name.replace('.agg.csv', '.png')}'",
    ]
    plots = [
        f"'{agg_csv_path.name}' using 2:(strcol(3) eq '{bw}' && strcol(4) eq '{task}' ? $6 : 1/0):7 "
        f"every ::1 with yerrorlines title '{bw}+{task}'"
        for bw, task in policies
    ]
    lines.append("plot " + ", \\\n     ".join(plots))
    script.write_text("\n".join(lines) + "\n")
    return script


def paired_bound(a, b, z=1.645):
    """One-sided confidence bounds on ``mean(a - b)`` over paired samples.

    Returns:
        (lower, mean, upper); identical samples give a zero-width interval.
    """
    d = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    d = d[np.isfinite(d)]
    mean = float(d.mean())
    half = float(z * d.std(ddof=1) / math.sqrt(d.size)) if d.size > 1 else 0.0
    return mean - half, mean, mean + half
