"""Clustering decision-makers: the tabular Q-learning agent and the random baseline.

The agent sees a small discrete state (current cluster occupancy saturated
at a cap, the candidate device's deadline class, and how many VMs remain
unopened) and picks one of two actions: INCREMENT adds the candidate to
the currently-filling cluster, DECREMENT seals it and starts a fresh
cluster on the next free VM.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import IntEnum
from typing import List

import numpy as np

from .config import CLASS_INDEX, CLASS_LABELS, Cluster, Device, RewardTable, VmSpec
from .workload import RngStream


class Action(IntEnum):
    INCREMENT = 0
    DECREMENT = 1


@dataclass(frozen=True)
class AgentState:
    """Discrete agent state.

    occupancy: devices already in the currently-filling cluster, saturated
      at the configured cap (0 means the cluster is empty/new).
    candidate_class: deadline class of the device about to be assigned.
    vms_remaining: VMs not yet opened.
    """

    occupancy: int
    candidate_class: str
    vms_remaining: int


class QTable:
    """Dense state-action value store; unseen entries default to 0."""

    def __init__(self, max_occupancy_state: int, vm_count: int):
        if max_occupancy_state < 1 or vm_count < 1:
            raise ValueError("max_occupancy_state and vm_count must be >= 1")
        self.max_occupancy_state = max_occupancy_state
        self.vm_count = vm_count
        self.values = np.zeros((max_occupancy_state + 1, 2, vm_count + 1, 2), dtype=np.float64)

    def _index(self, state: AgentState, action: Action):
        occ = min(state.occupancy, self.max_occupancy_state)
        return occ, CLASS_INDEX[state.candidate_class], state.vms_remaining, int(action)

    def get(self, state: AgentState, action: Action) -> float:
        return float(self.values[self._index(state, action)])

    def set(self, state: AgentState, action: Action, value: float) -> None:
        self.values[self._index(state, action)] = value

    def max_value(self, state: AgentState) -> float:
        occ = min(state.occupancy, self.max_occupancy_state)
        pair = self.values[occ, CLASS_INDEX[state.candidate_class], state.vms_remaining]
        return float(max(pair[0], pair[1]))

    def copy(self) -> "QTable":
        out = QTable(self.max_occupancy_state, self.vm_count)
        out.values[...] = self.values
        return out

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, QTable)
            and self.max_occupancy_state == other.max_occupancy_state
            and self.vm_count == other.vm_count
            and np.array_equal(self.values, other.values)
        )

    def write_csv(self, path: str) -> None:
        """Snapshot as occupancy,class,vms_remaining,action,q_value rows."""
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["occupancy", "class", "vms_remaining", "action", "q_value"])
            for occ in range(self.max_occupancy_state + 1):
                for label in CLASS_LABELS:
                    for vms in range(self.vm_count + 1):
                        for action in Action:
                            value = self.values[occ, CLASS_INDEX[label], vms, int(action)]
                            writer.writerow([occ, label, vms, action.name, repr(float(value))])

    @classmethod
    def read_csv(cls, path: str) -> "QTable":
        with open(path, "r", newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if header != ["occupancy", "class", "vms_remaining", "action", "q_value"]:
                raise ValueError(f"unexpected Q-table header: {header}")
            rows = [(int(r[0]), r[1], int(r[2]), r[3], float(r[4])) for r in reader]
        if not rows:
            raise ValueError("empty Q-table snapshot")
        max_occ = max(r[0] for r in rows)
        vm_count = max(r[2] for r in rows)
        table = cls(max_occ, vm_count)
        for occ, label, vms, action, value in rows:
            table.values[occ, CLASS_INDEX[label], vms, int(Action[action])] = value
        return table


def q_update(
    q: QTable,
    state: AgentState,
    action: Action,
    reward_value: float,
    next_state: AgentState,
    terminal: bool,
    alpha: float,
    gamma: float,
) -> QTable:
    """One-step Q-learning update; touches exactly one entry, in place.

    Q(s,a) += alpha * (r + gamma * max_a' Q(s',a') * [not terminal] - Q(s,a))
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    if not 0.0 <= gamma < 1.0:
        raise ValueError("gamma must lie in [0, 1)")
    target = reward_value if terminal else reward_value + gamma * q.max_value(next_state)
    old = q.get(state, action)
    q.set(state, action, old + alpha * (target - old))
    return q


def reward(action: Action, delayed_occurred: bool, table: RewardTable) -> int:
    """Reward for one assignment step."""
    if action == Action.INCREMENT:
        return table.inc_delayed if delayed_occurred else table.inc_ok
    return table.dec_delayed if delayed_occurred else table.dec_ok


def select_action(q: QTable, state: AgentState, epsilon: float, rng: RngStream) -> Action:
    """Epsilon-greedy: explore uniformly w.p. epsilon, else argmax (ties -> INCREMENT)."""
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError("epsilon must lie in [0, 1]")
    if epsilon > 0.0 and rng.generator.random() < epsilon:
        return Action.INCREMENT if rng.generator.random() < 0.5 else Action.DECREMENT
    if q.get(state, Action.INCREMENT) >= q.get(state, Action.DECREMENT):
        return Action.INCREMENT
    return Action.DECREMENT


def random_assign(devices: List[Device], vm: VmSpec, rng: RngStream) -> List[Cluster]:
    """Baseline scheme: each device independently uniform over the VMs.

    Returns only the non-empty clusters; VMs that received no device are
    simply unused.
    """
    if vm.count < 1:
        raise ValueError("vm.count must be >= 1")
    picks = rng.generator.random(len(devices))
    members: List[List[int]] = [[] for _ in range(vm.count)]
    for device, u in zip(devices, picks):
        idx = min(int(u * vm.count), vm.count - 1)
        members[idx].append(device.id)
    return [Cluster(vm_index=i, member_ids=tuple(ids)) for i, ids in enumerate(members) if ids]


@dataclass(frozen=True)
class QPolicy:
    """A (possibly frozen) Q-learning policy with an exploration rate."""

    qtable: QTable
    epsilon: float = 0.0


@dataclass(frozen=True)
class RandomPolicy:
    """The paper's baseline: uniform random placement over the VMs."""
