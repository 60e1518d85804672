"""Scenario description and INI-style configuration loading.

A configuration file has five sections. Per-task keys accept a scalar, a
comma-separated list of length ``K``, ``uniform(a, b)`` or
``choice(v1, v2, ...)``; random per-task values are drawn once per scenario
from the experiment seed and then stay fixed across trials.

    [system]      K, M, B_hz, p_b_w, q_w, rho, tau_d, sigma2, sigma2_first, weights
    [tasks]       l_bits, cycles_per_bit, mu
    [compute]     f_fan_hz, f_cpu_hz, f_cpu_max_hz, p_cn_j_per_cycle
    [pathloss]    model, exponent, extent_m, ref_distance_m
    [experiment]  trials, seed, policies, decision_sinr, cond_threshold, max_resamples
"""

import configparser
import re
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .exceptions import ConfigError

DEFAULT_CONFIG = """\
[system]
K = 8
M = 64
B_hz = 1e6
p_b_w = 20.0
q_w = 1.0
rho = 1.0
tau_d = 0.1
sigma2 = 1e-6
sigma2_first = 1e-6
weights = 1.0

[tasks]
l_bits = 4e6
cycles_per_bit = uniform(500, 1500)
mu = 0.0

[compute]
f_fan_hz = choice(0.2e9, 0.3e9, 0.4e9, 0.5e9, 0.6e9, 0.7e9, 0.8e9)
f_cpu_hz = 5e9
f_cpu_max_hz = 5e9
p_cn_j_per_cycle = uniform(0, 20e-11)

[pathloss]
model = power
exponent = 3.5
extent_m = 200
ref_distance_m = 10

[experiment]
trials = 1000
seed = 2024
policies = oba:oto, oba:sot, oba:ro, tdma:oto, noma:oto, rba:oto, rba:ro
decision_sinr = exact
cond_threshold = 1e10
max_resamples = 100
"""

# Stable stream identifiers for per-task random draws.
_FIELD_STREAMS = {
    "q_w": 1,
    "sigma2_first": 2,
    "weights": 3,
    "l_bits": 4,
    "cycles_per_bit": 5,
    "mu": 6,
    "f_fan_hz": 7,
    "f_cpu_hz": 8,
    "p_cn_j_per_cycle": 9,
}
_SCENARIO_STREAM = 0xC0F

_DIST_RE = re.compile(r"^\s*(uniform|choice)\s*\((.*)\)\s*$")


@dataclass(frozen=True)
class TaskSpec:
    l: float
    C: float
    mu: float
    label: str = ""


@dataclass(frozen=True, eq=False)
class ComputeSpec:
    f_F: np.ndarray
    f_C: np.ndarray
    f_C_max: float
    P_CN: np.ndarray


@dataclass(frozen=True)
class PathLossParams:
    """Power-law path loss over uniformly placed nodes.

    ``model="unity"`` switches every large-scale gain to 1.
    """

    ref_distance: float = 10.0
    exponent: float = 3.5
    extent: float = 200.0
    model: str = "power"


@dataclass(frozen=True, eq=False)
class Scenario:
    """Static system parameters shared by every trial."""

    K: int
    M: int
    B: float
    p_b: float
    q: np.ndarray
    rho: float
    tau_D: float
    sigma2_first: np.ndarray
    sigma2: float
    pathloss: PathLossParams
    tasks: tuple
    compute: ComputeSpec
    w: np.ndarray
    seed: int = 0
    cond_threshold: float = 1e10

    def __post_init__(self):
        validate_scenario(self)

    @cached_property
    def l(self):
        return np.array([t.l for t in self.tasks], dtype=float)

    @cached_property
    def C(self):
        return np.array([t.C for t in self.tasks], dtype=float)

    @cached_property
    def mu(self):
        return np.array([t.mu for t in self.tasks], dtype=float)


@dataclass(frozen=True)
class ExperimentSettings:
    trials: int = 1000
    seed: int = 0
    policies: tuple = (("oba", "oto"),)
    decision_sinr: str = "exact"
    max_resamples: int = 100


@dataclass
class Config:
    """Raw configuration text values, keyed by ``section.key``."""

    values: dict = field(default_factory=dict)

    def get(self, key, default=None):
        return self.values.get(key, default)

    def with_overrides(self, **overrides):
        values = dict(self.values)
        for key, value in overrides.items():
            values[key.replace("__", ".")] = str(value)
        return Config(values)


def _check(cond, name, message):
    if not cond:
        raise ConfigError(name, message)


def validate_scenario(s):
    _check(isinstance(s.K, (int, np.integer)) and s.K >= 1, "system.K", "must be an integer >= 1")
    _check(isinstance(s.M, (int, np.integer)) and s.M >= 1, "system.M", "must be an integer >= 1")
    _check(s.B > 0, "system.B_hz", "must be positive")
    _check(s.p_b > 0, "system.p_b_w", "must be positive")
    _check(s.rho > 0, "system.rho", "must be positive")
    _check(0.0 <= s.tau_D <= 1.0, "system.tau_d", "must lie in [0, 1]")
    _check(s.sigma2 > 0, "system.sigma2", "must be positive")
    for name, arr in (("system.q_w", s.q), ("system.sigma2_first", s.sigma2_first), ("system.weights", s.w)):
        _check(np.shape(arr) == (s.K,), name, f"expected length {s.K}, got shape {np.shape(arr)}")
        _check(np.all(np.asarray(arr) > 0), name, "all entries must be positive")
    _check(len(s.tasks) == s.K, "tasks", f"expected {s.K} tasks, got {len(s.tasks)}")
    for t in s.tasks:
        _check(t.l > 0, "tasks.l_bits", "must be positive")
        _check(t.C > 0, "tasks.cycles_per_bit", "must be positive")
        _check(0.0 <= t.mu <= 1.0, "tasks.mu", "must lie in [0, 1]")
    c = s.compute
    for name, arr in (("compute.f_fan_hz", c.f_F), ("compute.f_cpu_hz", c.f_C), ("compute.p_cn_j_per_cycle", c.P_CN)):
        _check(np.shape(arr) == (s.K,), name, f"expected length {s.K}, got shape {np.shape(arr)}")
    _check(np.all(c.f_F > 0), "compute.f_fan_hz", "must be positive")
    _check(np.all(c.f_C > 0), "compute.f_cpu_hz", "must be positive")
    _check(np.all(c.f_C <= c.f_C_max), "compute.f_cpu_hz", f"exceeds f_cpu_max_hz={c.f_C_max}")
    _check(np.all(c.P_CN >= 0), "compute.p_cn_j_per_cycle", "must be non-negative")
    p = s.pathloss
    _check(p.model in ("power", "unity"), "pathloss.model", "must be 'power' or 'unity'")
    _check(p.ref_distance > 0, "pathloss.ref_distance_m", "must be positive")
    _check(p.exponent >= 0, "pathloss.exponent", "must be non-negative")
    _check(p.extent > 0, "pathloss.extent_m", "must be positive")


def _parse_number_list(text, name):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(name, f"cannot parse {text!r}") from exc


def parse_per_task(text, K, seed, name):
    """Expand one per-task config value to an array of length ``K``."""
    key = name.split(".")[-1]
    m = _DIST_RE.match(text)
    if m:
        kind, args = m.group(1), _parse_number_list(m.group(2), name)
        rng = np.random.default_rng([seed, _SCENARIO_STREAM, _FIELD_STREAMS.get(key, 99)])
        if kind == "uniform":
            _check(len(args) == 2 and args[0] <= args[1], name, "uniform(a, b) needs a <= b")
            return rng.uniform(args[0], args[1], K)
        _check(len(args) >= 1, name, "choice() needs at least one value")
        return rng.choice(np.array(args), K)
    values = _parse_number_list(text, name)
    if len(values) == 1:
        return np.full(K, values[0])
    _check(len(values) == K, name, f"expected 1 or {K} values, got {len(values)}")
    return np.array(values)


def parse_policies(text):
    pairs = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        bw, _, task = item.partition(":")
        _check(task != "", "experiment.policies", f"expected 'bandwidth:task', got {item!r}")
        pairs.append((bw.strip(), task.strip()))
    return tuple(pairs)


def load_config(source=None):
    """Read a config from a path, an INI string, or the built-in default.

    Keys missing from ``source`` fall back to the default configuration.
    """
    parser = configparser.ConfigParser()
    parser.optionxform = str
    parser.read_string(DEFAULT_CONFIG)
    if source is not None:
        path = Path(source) if not isinstance(source, str) or "\n" not in source else None
        if path is not None:
            if not path.exists():
                raise ConfigError("config", f"file not found: {path}")
            text = path.read_text()
        else:
            text = source
        parser.read_string(text)
    values = {f"{sec}.{key}": val for sec in parser.sections() for key, val in parser[sec].items()}
    return Config(values)


def _scalar(cfg, key, cast=float):
    raw = cfg.get(key)
    if raw is None:
        raise ConfigError(key, "missing")
    try:
        return cast(float(raw)) if cast is int else cast(raw)
    except ValueError as exc:
        raise ConfigError(key, f"cannot parse {raw!r}") from exc


def build_scenario(cfg=None, **overrides):
    """Build a validated :class:`Scenario` from a :class:`Config`.

    Overrides use ``section__key`` names, e.g. ``system__M=128``.
    """
    if cfg is None:
        cfg = load_config()
    if overrides:
        cfg = cfg.with_overrides(**overrides)
    K = _scalar(cfg, "system.K", int)
    _check(K >= 1, "system.K", "must be an integer >= 1")
    seed = _scalar(cfg, "experiment.seed", int)

    def per_task(key):
        return parse_per_task(cfg.get(key), K, seed, key)

    l, C, mu = per_task("tasks.l_bits"), per_task("tasks.cycles_per_bit"), per_task("tasks.mu")
    tasks = tuple(TaskSpec(l=float(l[k]), C=float(C[k]), mu=float(mu[k]), label=f"task{k}") for k in range(K))
    compute = ComputeSpec(
        f_F=per_task("compute.f_fan_hz"),
        f_C=per_task("compute.f_cpu_hz"),
        f_C_max=_scalar(cfg, "compute.f_cpu_max_hz"),
        P_CN=per_task("compute.p_cn_j_per_cycle"),
    )
    pathloss = PathLossParams(
        ref_distance=_scalar(cfg, "pathloss.ref_distance_m"),
        exponent=_scalar(cfg, "pathloss.exponent"),
        extent=_scalar(cfg, "pathloss.extent_m"),
        model=cfg.get("pathloss.model", "power").strip(),
    )
    return Scenario(
        K=K,
        M=_scalar(cfg, "system.M", int),
        B=_scalar(cfg, "system.B_hz"),
        p_b=_scalar(cfg, "system.p_b_w"),
        q=per_task("system.q_w"),
        rho=_scalar(cfg, "system.rho"),
        tau_D=_scalar(cfg, "system.tau_d"),
        sigma2_first=per_task("system.sigma2_first"),
        sigma2=_scalar(cfg, "system.sigma2"),
        pathloss=pathloss,
        tasks=tasks,
        compute=compute,
        w=per_task("system.weights"),
        seed=seed,
        cond_threshold=_scalar(cfg, "experiment.cond_threshold"),
    )


def experiment_settings(cfg):
    settings = ExperimentSettings(
        trials=_scalar(cfg, "experiment.trials", int),
        seed=_scalar(cfg, "experiment.seed", int),
        policies=parse_policies(cfg.get("experiment.policies", "oba:oto")),
        decision_sinr=cfg.get("experiment.decision_sinr", "exact").strip(),
        max_resamples=_scalar(cfg, "experiment.max_resamples", int),
    )
    _check(settings.trials >= 1, "experiment.trials", "must be >= 1")
    _check(settings.decision_sinr in ("exact", "asymptotic"), "experiment.decision_sinr", "must be exact or asymptotic")
    return settings


def make_scenario(K=4, M=64, l=4e6, C=1000.0, mu=0.0, **kwargs):
    """Build a scenario directly from keyword values (handy in tests and notebooks).

    Scalars are broadcast to length ``K``.
    """
    def vec(x):
        return np.broadcast_to(np.asarray(x, dtype=float), (K,)).copy()

    l, C, mu = vec(l), vec(C), vec(mu)
    tasks = tuple(TaskSpec(l=float(l[k]), C=float(C[k]), mu=float(mu[k]), label=f"task{k}") for k in range(K))
    f_C = vec(kwargs.pop("f_C", 5e9))
    compute = ComputeSpec(
        f_F=vec(kwargs.pop("f_F", 5e8)),
        f_C=f_C,
        f_C_max=float(kwargs.pop("f_C_max", f_C.max())),
        P_CN=vec(kwargs.pop("P_CN", 1e-10)),
    )
    params = dict(
        B=1e6, p_b=20.0, q=1.0, rho=1.0, tau_D=0.1, sigma2_first=1e-6, sigma2=1e-6,
        pathloss=PathLossParams(), w=1.0, seed=0, cond_threshold=1e10,
    )
    params.update(kwargs)
    for name in ("q", "sigma2_first", "w"):
        params[name] = vec(params[name])
    return Scenario(K=K, M=M, tasks=tasks, compute=compute, **params)
