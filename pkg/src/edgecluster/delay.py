"""Completion-delay model.

A cluster's VM serves its members by egalitarian processor sharing: all n
members are processed simultaneously, each receiving capacity/n, so a
packet of s bits completes after s*n/capacity seconds.  On top of that,
each device pays a fixed-rate transmission time s/radio_rate.  A device is
"delayed" when its total time strictly exceeds its deadline; hitting the
deadline exactly counts as on-time.

The paper-level inputs are only the deadlines; this service model is a
modeling decision of the artifact (documented in the README).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List

from .config import Device, VmSpec


@dataclass(frozen=True)
class DelayReport:
    """Per-device timing breakdown and the delayed verdict."""

    device_id: int
    transmission_ms: float
    processing_ms: float
    total_ms: float
    delayed: bool


def device_delay(device: Device, cluster_size: int, vm: VmSpec, radio_rate: float) -> DelayReport:
    """Delay experienced by one member of a cluster of the given size."""
    if cluster_size < 1:
        raise ValueError("cluster_size must be >= 1")
    transmission_ms = device.packet_bits / radio_rate * 1000.0
    processing_ms = device.packet_bits * cluster_size / vm.capacity * 1000.0
    total_ms = transmission_ms + processing_ms
    return DelayReport(
        device_id=device.id,
        transmission_ms=transmission_ms,
        processing_ms=processing_ms,
        total_ms=total_ms,
        delayed=total_ms > device.deadline_ms,
    )


def cluster_delays(members: List[Device], vm: VmSpec, radio_rate: float) -> List[DelayReport]:
    """Delay reports for every member of one cluster, order preserved."""
    if not members:
        raise ValueError("cluster must have at least one member")
    n = len(members)
    return [device_delay(d, n, vm, radio_rate) for d in members]
