import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cellfree_offload import build_scenario, load_config, make_scenario  # noqa: E402
from cellfree_offload.harness import prepare_trial  # noqa: E402


@pytest.fixture(scope="session")
def config():
    return load_config()


@pytest.fixture
def scenario():
    return make_scenario(K=4, M=32, C=[800.0, 1000.0, 1200.0, 1400.0], f_F=[2e8, 4e8, 6e8, 8e8])


@pytest.fixture
def trial(scenario):
    realization, report, _ = prepare_trial(scenario, 0)
    return scenario, realization, report


def default_trial(config, K=8, seed=7, trial_index=0, **overrides):
    s = build_scenario(config, system__K=K, experiment__seed=seed, **overrides)
    realization, report, _ = prepare_trial(s, trial_index)
    return s, realization, report


def rand_complex(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
