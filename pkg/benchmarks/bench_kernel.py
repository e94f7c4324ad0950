#!/usr/bin/env python3
"""Benchmark the compiled assignment kernel against the pure-Python fallback.

Runs identical training workloads through both kernel implementations and
reports episodes/second plus the speedup. Results are also sanity-checked
for bit equality, since the two kernels must agree exactly.

Usage:
    python benchmarks/bench_kernel.py [--episodes N] [--devices N] [--seed S]
"""
import argparse
import time

import numpy as np

from edgecluster import _kernel_py
from edgecluster.config import ScenarioConfig, with_overrides
from edgecluster.engine import _batch_arrays, _critical_sizes
from edgecluster.workload import RngStream, generate_batch

try:
    from edgecluster import _kernel as _kernel_c
except ImportError:
    _kernel_c = None


def prepare_episodes(cfg, episodes):
    """Pre-draw every episode's inputs so the loop times only the kernel."""
    prepared = []
    for episode in range(episodes):
        stream = RngStream(cfg.seed, episode)
        batch = generate_batch(cfg, stream)
        packets, deadlines, cls_idx = _batch_arrays(batch)
        crit = _critical_sizes(packets, deadlines, cfg)
        explore_u = stream.generator.random(len(batch))
        action_u = stream.generator.random(len(batch))
        prepared.append((crit, cls_idx, explore_u, action_u))
    return prepared


def run_training(kernel, cfg, prepared):
    q = np.zeros((cfg.learn.max_occupancy_state + 1, 2, cfg.vm.count + 1, 2))
    eps = cfg.learn.epsilon_start
    start = time.perf_counter()
    for crit, cls_idx, explore_u, action_u in prepared:
        kernel.run_assignment(
            crit, cls_idx, q, explore_u, action_u,
            eps, cfg.learn.alpha, cfg.learn.gamma, True,
            cfg.vm.count, cfg.learn.max_occupancy_state,
            cfg.rewards.inc_ok, cfg.rewards.dec_ok,
            cfg.rewards.inc_delayed, cfg.rewards.dec_delayed,
        )
        eps = max(cfg.learn.epsilon_end, eps * cfg.learn.epsilon_decay)
    elapsed = time.perf_counter() - start
    return elapsed, q


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--episodes", type=int, default=2000)
    parser.add_argument("--devices", type=int, default=60)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    cfg = with_overrides(ScenarioConfig(), device_count=args.devices, seed=args.seed)
    prepared = prepare_episodes(cfg, args.episodes)
    steps = args.episodes * args.devices

    py_s, py_q = run_training(_kernel_py, cfg, prepared)
    print(f"pure-python: {py_s:8.3f}s  {args.episodes / py_s:9.0f} ep/s  {steps / py_s:11.0f} steps/s")

    if _kernel_c is None:
        print("compiled kernel not available; install with Cython to compare")
        return

    c_s, c_q = run_training(_kernel_c, cfg, prepared)
    print(f"compiled:    {c_s:8.3f}s  {args.episodes / c_s:9.0f} ep/s  {steps / c_s:11.0f} steps/s")
    print(f"speedup:     {py_s / c_s:.1f}x")
    if not np.array_equal(py_q, c_q):
        raise SystemExit("kernel outputs diverged - parity broken")
    print("bit parity:  identical Q-tables")


if __name__ == "__main__":
    main()
