"""Bit-exact parity between the compiled kernel and the pure-Python fallback."""
import subprocess
import sys

import numpy as np
import pytest

from edgecluster import _kernel_py

try:
    from edgecluster import _kernel as _kernel_c
except ImportError:
    _kernel_c = None

needs_compiled = pytest.mark.skipif(
    _kernel_c is None, reason="compiled kernel extension not built"
)


def random_case(rng, n, vm_count, max_occ, learn, epsilon):
    crit = rng.uniform(0.5, 30.0, n)
    cls_idx = (rng.random(n) < 0.5).astype(np.uint8)
    q = rng.standard_normal((max_occ + 1, 2, vm_count + 1, 2)) * 10.0
    explore_u = rng.random(n)
    action_u = rng.random(n)
    args = dict(
        crit=crit, cls_idx=cls_idx, explore_u=explore_u, action_u=action_u,
        epsilon=epsilon, alpha=0.1, gamma=0.9, learn=learn,
        vm_count=vm_count, max_occ=max_occ,
        inc_ok=5, dec_ok=-1, inc_delayed=-10, dec_delayed=5,
    )
    return q, args


def run_kernel(kernel, q, args):
    return kernel.run_assignment(
        args["crit"], args["cls_idx"], q, args["explore_u"], args["action_u"],
        args["epsilon"], args["alpha"], args["gamma"], args["learn"],
        args["vm_count"], args["max_occ"],
        args["inc_ok"], args["dec_ok"], args["inc_delayed"], args["dec_delayed"],
    )


@needs_compiled
@pytest.mark.parametrize("learn", [False, True])
@pytest.mark.parametrize("epsilon", [0.0, 0.3, 1.0])
def test_kernels_bit_identical(learn, epsilon):
    rng = np.random.default_rng(2024)
    for case in range(50):
        n = int(rng.integers(1, 80))
        vm_count = int(rng.integers(1, 8))
        max_occ = int(rng.integers(1, 12))
        q, args = random_case(rng, n, vm_count, max_occ, learn, epsilon)
        q_py, q_c = q.copy(), q.copy()
        out_py = run_kernel(_kernel_py, q_py, args)
        out_c = run_kernel(_kernel_c, q_c, args)
        for a, b in zip(out_py[:-1], out_c[:-1]):
            assert np.array_equal(np.asarray(a), np.asarray(b)), f"case {case}"
        assert out_py[-1] == out_c[-1]  # total reward
        assert np.array_equal(q_py, q_c)  # in-place Q mutations match bitwise


@needs_compiled
def test_engine_selects_compiled_by_default():
    from edgecluster.engine import kernel_name

    assert kernel_name() == "compiled"


@needs_compiled
def test_pure_fallback_trains_identically(tmp_path):
    """End to end: training under EDGECLUSTER_PURE=1 produces the same
    Q-table snapshot, byte for byte, as the compiled path."""
    script = """
import os, sys
from edgecluster.config import LearnSpec, ScenarioConfig, with_overrides
from edgecluster.engine import kernel_name, train

cfg = with_overrides(ScenarioConfig(), learn=LearnSpec(episodes=60), device_count=20)
result = train(cfg)
result.qtable.write_csv(sys.argv[1])
print(kernel_name())
"""
    outputs = {}
    for label, env_extra in (("compiled", {}), ("pure", {"EDGECLUSTER_PURE": "1"})):
        path = tmp_path / f"{label}.csv"
        import os

        env = dict(os.environ, **env_extra)
        proc = subprocess.run(
            [sys.executable, "-c", script, str(path)],
            capture_output=True, text=True, env=env, check=True,
        )
        expected = "compiled" if label == "compiled" else "pure-python"
        assert proc.stdout.strip() == expected
        outputs[label] = path.read_bytes()
    assert outputs["compiled"] == outputs["pure"]
