"""Framework KPIs: delay, resource utilization, energy and throughput.

Energy uses two model constants that are not derived from any measurement:
a per-bit transmission cost and a VM power draw.  They are labeled "model
constants" in the CSV header comment and are configurable per call.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Dict, List, Sequence

from .config import ScenarioConfig
from .engine import EpisodeOutcome

# Model constants (order-of-magnitude placeholders, not paper values).
DEFAULT_TX_ENERGY_J_PER_BIT = 1e-7
DEFAULT_VM_POWER_W = 20.0

# Which optional KPI columns each scenario preset reports.  Cluster/VM
# counts are always reported.
PRESET_COLUMNS: Dict[str, frozenset] = {
    "EHEALTH": frozenset({"throughput", "response_time", "energy"}),
    "FACE_RECOGNITION": frozenset({"throughput", "response_time", "energy"}),
    "VEHICULAR": frozenset({"response_time"}),
    "HOME_SENSORS": frozenset(),
    "ALL": frozenset({"throughput", "response_time", "energy"}),
}


@dataclass(frozen=True)
class ReplicationRow:
    """KPIs of a single evaluation replication."""

    clusters_used: int
    vm_utilization: float
    delayed_count: int
    response_time_ms: float
    energy_j: float
    throughput_bps: float


@dataclass(frozen=True)
class KpiReport:
    """Aggregate KPIs over a set of evaluation replications.

    Every mean is the arithmetic mean of its per_replication column
    (math.fsum based, so recomputation and permutation both reproduce the
    header values exactly).
    """

    mean_clusters_used: float
    mean_vm_utilization: float
    mean_delayed_devices: float
    mean_response_time_ms: float
    energy_j: float
    throughput_bps: float
    replication_count: int
    per_replication: List[ReplicationRow]


def _busy_ms_per_vm(outcome: EpisodeOutcome, cfg: ScenarioConfig) -> List[float]:
    report_of = {r.device_id: r for r in outcome.delay_reports}
    busy = []
    for cluster in outcome.clusters:
        # Busy time is the VM's serial work, sum of member bits / capacity.
        # processing_ms = bits * size / capacity, so divide the summed
        # processing times by the cluster size.
        total_processing = math.fsum(report_of[i].processing_ms for i in cluster.member_ids)
        busy.append(total_processing / len(cluster.member_ids))
    return busy


def vm_utilization(outcome: EpisodeOutcome, cfg: ScenarioConfig) -> float:
    """Mean over used VMs of min(1, busy_time / utilization_window).

    busy_time of a VM is the total work of its cluster (sum of member bits
    divided by capacity).  An outcome with no used VMs has utilization 0.
    """
    if not outcome.clusters:
        return 0.0
    per_vm = [min(1.0, b / cfg.utilization_window) for b in _busy_ms_per_vm(outcome, cfg)]
    return math.fsum(per_vm) / len(per_vm)


def _replication_row(
    outcome: EpisodeOutcome,
    cfg: ScenarioConfig,
    tx_energy_j_per_bit: float,
    vm_power_w: float,
) -> ReplicationRow:
    total_bits = math.fsum(r.transmission_ms for r in outcome.delay_reports) / 1000.0 * cfg.radio_rate
    busy_s = math.fsum(_busy_ms_per_vm(outcome, cfg)) / 1000.0
    makespan_s = max(r.total_ms for r in outcome.delay_reports) / 1000.0
    return ReplicationRow(
        clusters_used=outcome.clusters_used,
        vm_utilization=vm_utilization(outcome, cfg),
        delayed_count=outcome.delayed_count,
        response_time_ms=math.fsum(r.total_ms for r in outcome.delay_reports) / len(outcome.delay_reports),
        energy_j=tx_energy_j_per_bit * total_bits + vm_power_w * busy_s,
        throughput_bps=total_bits / makespan_s,
    )


def aggregate(
    outcomes: Sequence[EpisodeOutcome],
    cfg: ScenarioConfig,
    tx_energy_j_per_bit: float = DEFAULT_TX_ENERGY_J_PER_BIT,
    vm_power_w: float = DEFAULT_VM_POWER_W,
) -> KpiReport:
    """Aggregate evaluation outcomes into one KPI report."""
    if not outcomes:
        raise ValueError("EMPTY_INPUT: no outcomes to aggregate")
    rows = [_replication_row(o, cfg, tx_energy_j_per_bit, vm_power_w) for o in outcomes]
    n = len(rows)
    return KpiReport(
        mean_clusters_used=math.fsum(r.clusters_used for r in rows) / n,
        mean_vm_utilization=math.fsum(r.vm_utilization for r in rows) / n,
        mean_delayed_devices=math.fsum(r.delayed_count for r in rows) / n,
        mean_response_time_ms=math.fsum(r.response_time_ms for r in rows) / n,
        energy_j=math.fsum(r.energy_j for r in rows) / n,
        throughput_bps=math.fsum(r.throughput_bps for r in rows) / n,
        replication_count=n,
        per_replication=rows,
    )


def visible_columns(preset: str) -> List[str]:
    """KPI summary columns for a preset; hiding never changes values."""
    optional = PRESET_COLUMNS[preset]
    cols = ["mean_clusters", "mean_util", "mean_delayed"]
    if "response_time" in optional:
        cols.append("mean_response_ms")
    if "energy" in optional:
        cols.append("energy_j")
    if "throughput" in optional:
        cols.append("throughput_bps")
    return cols


def summary_line(report: KpiReport, preset: str) -> str:
    values = {
        "mean_clusters": report.mean_clusters_used,
        "mean_util": report.mean_vm_utilization,
        "mean_delayed": report.mean_delayed_devices,
        "mean_response_ms": report.mean_response_time_ms,
        "energy_j": report.energy_j,
        "throughput_bps": report.throughput_bps,
    }
    return "  ".join(f"{c}={values[c]:.4g}" for c in visible_columns(preset))


KPI_CSV_HEADER = [
    "policy",
    "device_count",
    "class_mix",
    "mean_clusters",
    "mean_util",
    "mean_delayed",
    "mean_response_ms",
    "energy_j",
    "throughput_bps",
    "reps",
    "seed",
]


def write_kpi_csv(rows: List[dict], path: str) -> None:
    """One row per (policy, sweep point); full schema regardless of preset."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(KPI_CSV_HEADER)
        for row in rows:
            writer.writerow([_fmt(row[k]) for k in KPI_CSV_HEADER])


def write_per_replication_csv(rows: List[dict], path: str) -> None:
    """Companion per-replication rows for plotting Fig.-5-style curves."""
    header = [
        "policy",
        "device_count",
        "replication",
        "clusters_used",
        "vm_utilization",
        "delayed_count",
        "response_time_ms",
        "energy_j",
        "throughput_bps",
    ]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(row[k]) for k in header])


def _fmt(value):
    return repr(value) if isinstance(value, float) else value
