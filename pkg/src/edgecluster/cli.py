"""Command-line entry point.

Two subcommands:

  train    -- train the Q agent, dump the Q-table snapshot and training trace
  compare  -- sweep device_count for the RL and random policies, emit KPI CSVs

The CLI is a thin shell over the library; all randomness flows from the
configured seed.  Exit codes: 0 ok, 1 invalid config/usage, 2 I/O failure.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from typing import List, Optional

from . import engine, kpi
from .config import ConfigError, ScenarioConfig, load_config, validate_config, with_overrides
from .policy import QPolicy, QTable, RandomPolicy

DEFAULT_SWEEP = [10, 20, 30, 40, 50, 60]
DEFAULT_REPS = 100


def _load_validated(path: str, seed: Optional[int]) -> ScenarioConfig:
    try:
        cfg = load_config(path)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if seed is not None:
        cfg = with_overrides(cfg, seed=seed)
    violations = validate_config(cfg)
    if violations:
        raise ConfigError("\n".join(str(v) for v in violations))
    return cfg


def cmd_train(config_path: str, out_dir: str, seed: Optional[int] = None) -> int:
    try:
        cfg = _load_validated(config_path, seed)
    except ConfigError as exc:
        print(f"invalid configuration:\n{exc}", file=sys.stderr)
        return 1
    result = engine.train(cfg)
    try:
        os.makedirs(out_dir, exist_ok=True)
        result.qtable.write_csv(os.path.join(out_dir, "qtable.csv"))
        engine.write_training_trace_csv(result.trace, os.path.join(out_dir, "training_trace.csv"))
    except OSError as exc:
        print(f"cannot write outputs: {exc}", file=sys.stderr)
        return 2
    tail = result.trace[-500:]
    mean_reward = math.fsum(r.total_reward for r in tail) / len(tail) if tail else 0.0
    final_eps = tail[-1].epsilon if tail else cfg.learn.epsilon_start
    print(f"episodes={len(result.trace)} final_epsilon={final_eps:.6g} last_500_mean_reward={mean_reward:.4f}")
    return 0


def cmd_compare(
    config_path: str,
    out_dir: str,
    sweep: Optional[List[int]] = None,
    reps: int = DEFAULT_REPS,
    seed: Optional[int] = None,
    qtable_path: Optional[str] = None,
) -> int:
    try:
        cfg = _load_validated(config_path, seed)
    except ConfigError as exc:
        print(f"invalid configuration:\n{exc}", file=sys.stderr)
        return 1
    sweep = sweep or DEFAULT_SWEEP
    if reps < 1 or any(n < 1 for n in sweep):
        print("sweep points and --reps must be >= 1", file=sys.stderr)
        return 1

    if qtable_path is not None:
        try:
            table = QTable.read_csv(qtable_path)
        except (OSError, ValueError) as exc:
            print(f"cannot load Q-table snapshot: {exc}", file=sys.stderr)
            return 2
    else:
        table = engine.train(cfg).qtable

    policies = [("rl", QPolicy(qtable=table)), ("random", RandomPolicy())]
    kpi_rows: List[dict] = []
    rep_rows: List[dict] = []
    fig_rows = {n: {} for n in sweep}
    for name, policy in sorted(policies):
        for n in sorted(sweep):
            point_cfg = with_overrides(cfg, device_count=n)
            outcomes = engine.evaluate(policy, point_cfg, reps)
            report = kpi.aggregate(outcomes, point_cfg)
            kpi_rows.append(
                {
                    "policy": name,
                    "device_count": n,
                    "class_mix": cfg.class_mix,
                    "mean_clusters": report.mean_clusters_used,
                    "mean_util": report.mean_vm_utilization,
                    "mean_delayed": report.mean_delayed_devices,
                    "mean_response_ms": report.mean_response_time_ms,
                    "energy_j": report.energy_j,
                    "throughput_bps": report.throughput_bps,
                    "reps": reps,
                    "seed": cfg.seed,
                }
            )
            for rep_index, row in enumerate(report.per_replication):
                rep_rows.append(
                    {
                        "policy": name,
                        "device_count": n,
                        "replication": rep_index,
                        "clusters_used": row.clusters_used,
                        "vm_utilization": row.vm_utilization,
                        "delayed_count": row.delayed_count,
                        "response_time_ms": row.response_time_ms,
                        "energy_j": row.energy_j,
                        "throughput_bps": row.throughput_bps,
                    }
                )
            fig_rows[n][name] = report
            print(f"{name:6s} n={n:3d}  {kpi.summary_line(report, cfg.kpi_preset)}")

    try:
        os.makedirs(out_dir, exist_ok=True)
        kpi.write_kpi_csv(kpi_rows, os.path.join(out_dir, "kpi.csv"))
        kpi.write_per_replication_csv(rep_rows, os.path.join(out_dir, "kpi_replications.csv"))
        _write_fig_csv(fig_rows, sweep, "mean_clusters_used", os.path.join(out_dir, "fig_clusters.csv"))
        _write_fig_csv(fig_rows, sweep, "mean_vm_utilization", os.path.join(out_dir, "fig_utilization.csv"))
        _write_fig_csv(fig_rows, sweep, "mean_delayed_devices", os.path.join(out_dir, "fig_delayed.csv"))
    except OSError as exc:
        print(f"cannot write outputs: {exc}", file=sys.stderr)
        return 2
    return 0


def _write_fig_csv(fig_rows, sweep, attr, path):
    import csv

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["device_count", "rl", "random"])
        for n in sorted(sweep):
            rl = getattr(fig_rows[n]["rl"], attr)
            rnd = getattr(fig_rows[n]["random"], attr)
            writer.writerow([n, repr(rl), repr(rnd)])


def _parse_sweep(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("sweep must be a comma-separated list of integers") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="edgecluster",
        description="Q-learning vs random clustering of IoT devices on edge VMs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train the Q agent and dump a snapshot")
    p_train.add_argument("--config", required=True, help="path to key=value config file")
    p_train.add_argument("--seed", type=int, default=None, help="override the config seed")
    p_train.add_argument("--out", required=True, help="output directory")

    p_cmp = sub.add_parser("compare", help="sweep device_count for RL and random policies")
    p_cmp.add_argument("--config", required=True, help="path to key=value config file")
    p_cmp.add_argument("--seed", type=int, default=None, help="override the config seed")
    p_cmp.add_argument("--sweep", type=_parse_sweep, default=None, help="comma-separated device counts")
    p_cmp.add_argument("--reps", type=int, default=DEFAULT_REPS, help="evaluation replications per point")
    p_cmp.add_argument("--out", required=True, help="output directory")
    p_cmp.add_argument("--qtable", default=None, help="reuse a trained Q-table snapshot instead of training")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "train":
        return cmd_train(args.config, args.out, seed=args.seed)
    return cmd_compare(
        args.config,
        args.out,
        sweep=args.sweep,
        reps=args.reps,
        seed=args.seed,
        qtable_path=args.qtable,
    )


if __name__ == "__main__":
    sys.exit(main())
