"""Shared fixtures: trained agents and evaluation sweeps are expensive, so
they are built once per session and reused across test modules."""
import time

import pytest

from edgecluster import ScenarioConfig, evaluate, train
from edgecluster.config import with_overrides
from edgecluster.kpi import aggregate
from edgecluster.policy import QPolicy, RandomPolicy

SWEEP = [10, 20, 30, 40, 50, 60]
REPS = 100


@pytest.fixture(scope="session")
def default_config():
    return ScenarioConfig()


@pytest.fixture(scope="session")
def timings():
    """Wall-clock seconds of the expensive session fixtures, by name."""
    return {}


@pytest.fixture(scope="session")
def trained_default(default_config, timings):
    """Agent trained on the default (mixed-class) scenario."""
    start = time.perf_counter()
    result = train(default_config)
    timings["train_default"] = time.perf_counter() - start
    return result


@pytest.fixture(scope="session")
def trained_strict(default_config):
    return train(with_overrides(default_config, class_mix=1.0))


@pytest.fixture(scope="session")
def trained_lenient(default_config):
    return train(with_overrides(default_config, class_mix=0.0))


def run_sweep(table, cfg, sweep=SWEEP, reps=REPS):
    """Evaluate the greedy agent and the random baseline over a device sweep.

    Returns {n: (rl_report, random_report)}.
    """
    rl = QPolicy(qtable=table)
    rnd = RandomPolicy()
    out = {}
    for n in sweep:
        point = with_overrides(cfg, device_count=n)
        out[n] = (
            aggregate(evaluate(rl, point, reps), point),
            aggregate(evaluate(rnd, point, reps), point),
        )
    return out


@pytest.fixture(scope="session")
def default_sweep(trained_default, default_config, timings):
    start = time.perf_counter()
    result = run_sweep(trained_default.qtable, default_config)
    timings["default_sweep"] = time.perf_counter() - start
    return result


@pytest.fixture(scope="session")
def strict_sweep(trained_strict, default_config):
    return run_sweep(trained_strict.qtable, with_overrides(default_config, class_mix=1.0))


@pytest.fixture(scope="session")
def lenient_sweep(trained_lenient, default_config):
    return run_sweep(trained_lenient.qtable, with_overrides(default_config, class_mix=0.0))
