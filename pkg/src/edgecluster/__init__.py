"""Seedable simulator of Q-learning based IoT device clustering on edge VMs."""

from .config import (
    Cluster,
    ConfigError,
    DelayClass,
    Device,
    LearnSpec,
    RewardTable,
    ScenarioConfig,
    Violation,
    VmSpec,
    load_config,
    loads_config,
    dumps_config,
    save_config,
    validate_config,
)
from .delay import DelayReport, cluster_delays, device_delay
from .engine import EpisodeOutcome, TrainResult, evaluate, kernel_name, run_episode, train
from .kpi import KpiReport, aggregate, vm_utilization
from .policy import (
    Action,
    AgentState,
    QPolicy,
    QTable,
    RandomPolicy,
    q_update,
    random_assign,
    reward,
    select_action,
)
from .workload import RngStream, generate_batch, sample_deadline, sample_packet_size

__version__ = "0.1.0"

__all__ = [
    "Action",
    "AgentState",
    "Cluster",
    "ConfigError",
    "DelayClass",
    "DelayReport",
    "Device",
    "EpisodeOutcome",
    "KpiReport",
    "LearnSpec",
    "QPolicy",
    "QTable",
    "RandomPolicy",
    "RewardTable",
    "RngStream",
    "ScenarioConfig",
    "TrainResult",
    "Violation",
    "VmSpec",
    "aggregate",
    "cluster_delays",
    "device_delay",
    "dumps_config",
    "evaluate",
    "generate_batch",
    "kernel_name",
    "load_config",
    "loads_config",
    "q_update",
    "random_assign",
    "reward",
    "run_episode",
    "sample_deadline",
    "sample_packet_size",
    "save_config",
    "select_action",
    "train",
    "validate_config",
    "vm_utilization",
]
