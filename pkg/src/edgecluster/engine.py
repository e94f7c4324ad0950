"""Episode runner: training, evaluation, and episode bookkeeping.

The per-device assignment loop is the simulator's hot path.  It lives in a
kernel with two interchangeable implementations: a compiled extension
(edgecluster._kernel, built with Cython) and a pure-Python fallback
(edgecluster._kernel_py).  The compiled one is picked at import when
available; set EDGECLUSTER_PURE=1 to force the fallback.  Both produce
bit-identical results.
"""
from __future__ import annotations

import csv
import os
from dataclasses import dataclass
from typing import List, Optional, Sequence, Union

import numpy as np

from . import _kernel_py
from .config import CLASS_INDEX, Cluster, Device, ScenarioConfig, ensure_valid
from .delay import DelayReport, cluster_delays
from .policy import Action, QPolicy, QTable, RandomPolicy
from .workload import RngStream, generate_batch

if os.environ.get("EDGECLUSTER_PURE") == "1":
    _kernel = _kernel_py
else:
    try:
        from . import _kernel  # type: ignore[attr-defined]
    except ImportError:
        _kernel = _kernel_py

# Evaluation replications use stream ids disjoint from training episodes.
EVAL_STREAM_BASE = 2**32

Policy = Union[QPolicy, RandomPolicy]


def kernel_name() -> str:
    """'compiled' if the Cython extension is active, else 'pure-python'."""
    return "compiled" if getattr(_kernel, "COMPILED", False) else "pure-python"


@dataclass(frozen=True)
class StepLog:
    """Per-step trace of one Q-policy episode (arrays indexed by step)."""

    device_ids: np.ndarray
    state_occ: np.ndarray
    state_cls: np.ndarray  # 0 = STRICT, 1 = LENIENT
    state_vms: np.ndarray
    chosen: np.ndarray  # action the policy picked
    executed: np.ndarray  # action after coercion
    rewards: np.ndarray
    delayed: np.ndarray  # provisional delayed predicate at assignment time
    forced: np.ndarray


@dataclass(frozen=True)
class EpisodeOutcome:
    """Full record of one assignment pass."""

    clusters: List[Cluster]
    delay_reports: List[DelayReport]
    clusters_used: int
    delayed_count: int
    forced_increments: int
    total_reward: int
    steps: Optional[StepLog] = None


def _batch_arrays(batch: Sequence[Device]):
    packets = np.array([d.packet_bits for d in batch], dtype=np.float64)
    deadlines = np.array([d.deadline_ms for d in batch], dtype=np.float64)
    cls_idx = np.array([CLASS_INDEX[d.delay_class] for d in batch], dtype=np.uint8)
    return packets, deadlines, cls_idx


def _critical_sizes(packets: np.ndarray, deadlines: np.ndarray, cfg: ScenarioConfig) -> np.ndarray:
    # Largest cluster size at which the device is still on time:
    # total <= deadline  <=>  size <= (deadline_s - s/radio) * capacity / s
    return (deadlines / 1000.0 - packets / cfg.radio_rate) * cfg.vm.capacity / packets


def _outcome_from_assignment(
    batch: Sequence[Device],
    vm_of: np.ndarray,
    cfg: ScenarioConfig,
    forced_increments: int,
    total_reward: int,
    steps: Optional[StepLog],
) -> EpisodeOutcome:
    members: dict = {}
    for device, vm_index in zip(batch, vm_of):
        members.setdefault(int(vm_index), []).append(device)
    clusters = []
    delay_reports: List[DelayReport] = []
    for vm_index in sorted(members):
        group = members[vm_index]
        clusters.append(Cluster(vm_index=vm_index, member_ids=tuple(d.id for d in group)))
        delay_reports.extend(cluster_delays(group, cfg.vm, cfg.radio_rate))
    delay_reports.sort(key=lambda r: r.device_id)
    return EpisodeOutcome(
        clusters=clusters,
        delay_reports=delay_reports,
        clusters_used=len(clusters),
        delayed_count=sum(1 for r in delay_reports if r.delayed),
        forced_increments=forced_increments,
        total_reward=total_reward,
        steps=steps,
    )


def run_episode(
    batch: Sequence[Device],
    policy: Policy,
    cfg: ScenarioConfig,
    learn: bool = False,
    rng: Optional[RngStream] = None,
    epsilon: Optional[float] = None,
) -> EpisodeOutcome:
    """Assign one batch of devices under the given policy.

    For a QPolicy the devices are streamed in id order through the
    increment/decrement agent; with learn=True the policy's Q-table is
    updated in place after every step.  Exhausting the VMs never aborts:
    DECREMENT is coerced to an increment on the least-loaded cluster and
    counted in forced_increments.
    """
    if not batch:
        raise ValueError("batch must be non-empty")
    if isinstance(policy, RandomPolicy):
        if learn:
            raise ValueError("the random policy has nothing to learn")
        if rng is None:
            raise ValueError("the random policy needs an RngStream")
        picks = rng.generator.random(len(batch))
        vm_of = np.minimum((picks * cfg.vm.count).astype(np.int64), cfg.vm.count - 1)
        return _outcome_from_assignment(batch, vm_of, cfg, 0, 0, None)

    eps = policy.epsilon if epsilon is None else epsilon
    n = len(batch)
    if eps > 0.0 and rng is None:
        raise ValueError("exploration requires an RngStream")
    if rng is not None:
        explore_u = rng.generator.random(n)
        action_u = rng.generator.random(n)
    else:
        explore_u = np.ones(n)
        action_u = np.zeros(n)

    packets, deadlines, cls_idx = _batch_arrays(batch)
    crit = _critical_sizes(packets, deadlines, cfg)
    table = policy.qtable
    (vm_of, chosen, executed, rewards, delayed, forced, state_occ, state_vms, total) = _kernel.run_assignment(
        crit,
        cls_idx,
        table.values,
        explore_u,
        action_u,
        float(eps),
        float(cfg.learn.alpha),
        float(cfg.learn.gamma),
        bool(learn),
        int(cfg.vm.count),
        int(cfg.learn.max_occupancy_state),
        int(cfg.rewards.inc_ok),
        int(cfg.rewards.dec_ok),
        int(cfg.rewards.inc_delayed),
        int(cfg.rewards.dec_delayed),
    )
    steps = StepLog(
        device_ids=np.arange(n, dtype=np.int32),
        state_occ=state_occ,
        state_cls=cls_idx,
        state_vms=state_vms,
        chosen=chosen,
        executed=executed,
        rewards=rewards,
        delayed=delayed,
        forced=forced,
    )
    return _outcome_from_assignment(batch, vm_of, cfg, int(forced.sum()), int(total), steps)


@dataclass(frozen=True)
class TraceRow:
    episode: int
    total_reward: int
    clusters_used: int
    delayed_count: int
    epsilon: float


@dataclass(frozen=True)
class TrainResult:
    qtable: QTable
    trace: List[TraceRow]


def train(cfg: ScenarioConfig) -> TrainResult:
    """Train a fresh agent for cfg.learn.episodes episodes.

    Episode e draws its batch and its exploration randomness from
    RngStream(cfg.seed, e), so training is fully reproducible.
    """
    ensure_valid(cfg)
    table = QTable(cfg.learn.max_occupancy_state, cfg.vm.count)
    agent = QPolicy(qtable=table)
    trace: List[TraceRow] = []
    eps = cfg.learn.epsilon_start
    for episode in range(cfg.learn.episodes):
        stream = RngStream(cfg.seed, episode)
        batch = generate_batch(cfg, stream)
        outcome = run_episode(batch, agent, cfg, learn=True, rng=stream, epsilon=eps)
        trace.append(
            TraceRow(
                episode=episode,
                total_reward=outcome.total_reward,
                clusters_used=outcome.clusters_used,
                delayed_count=outcome.delayed_count,
                epsilon=eps,
            )
        )
        eps = max(cfg.learn.epsilon_end, eps * cfg.learn.epsilon_decay)
    return TrainResult(qtable=table, trace=trace)


def evaluate(policy: Policy, cfg: ScenarioConfig, replications: int) -> List[EpisodeOutcome]:
    """Run independent evaluation replications with a frozen policy.

    Replication r uses RngStream(cfg.seed, 2^32 + r); the Q policy is
    evaluated greedily (epsilon forced to 0).  Both policies therefore see
    identical batches for the same replication index.
    """
    if replications < 1:
        raise ValueError("replications must be >= 1")
    ensure_valid(cfg)
    outcomes = []
    for rep in range(replications):
        stream = RngStream(cfg.seed, EVAL_STREAM_BASE + rep)
        batch = generate_batch(cfg, stream)
        outcomes.append(run_episode(batch, policy, cfg, learn=False, rng=stream, epsilon=0.0))
    return outcomes


def write_training_trace_csv(trace: List[TraceRow], path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["episode", "total_reward", "clusters_used", "delayed_count", "epsilon"])
        for row in trace:
            writer.writerow([row.episode, row.total_reward, row.clusters_used, row.delayed_count, repr(row.epsilon)])


def write_episode_log_csv(outcome: EpisodeOutcome, path: str) -> None:
    """Per-step log of a Q-policy episode."""
    if outcome.steps is None:
        raise ValueError("this outcome carries no step log (random policy?)")
    s = outcome.steps
    labels = ("STRICT", "LENIENT")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["step", "device_id", "state_occ", "state_class", "state_vms", "action", "reward", "delayed", "forced"]
        )
        for t in range(len(s.device_ids)):
            writer.writerow(
                [
                    t,
                    int(s.device_ids[t]),
                    int(s.state_occ[t]),
                    labels[int(s.state_cls[t])],
                    int(s.state_vms[t]),
                    Action(int(s.executed[t])).name,
                    int(s.rewards[t]),
                    int(s.delayed[t]),
                    int(s.forced[t]),
                ]
            )
