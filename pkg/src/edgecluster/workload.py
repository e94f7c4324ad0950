"""Seed-driven workload generation.

Every random draw in the simulator flows through an RngStream: a PCG64
generator keyed by (seed, stream_id) via numpy's SeedSequence spawn keys,
so the same pair reproduces the same sample sequence on any platform.
OS entropy is never used.
"""
from __future__ import annotations

import csv
from typing import List, Optional, Union

import numpy as np

from .config import (
    DELAY_CLASSES,
    LENIENT,
    PACKET_BITS_MAX,
    PACKET_BITS_MIN,
    STRICT,
    DelayClass,
    Device,
    ScenarioConfig,
)


class RngStream:
    """A named sub-stream of the scenario seed.

    Same (seed, stream_id) => identical sample sequence, independent of
    every other stream_id.
    """

    def __init__(self, seed: int, stream_id: int = 0):
        if not 0 <= seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if stream_id < 0:
            raise ValueError("stream_id must be non-negative")
        self.seed = seed
        self.stream_id = stream_id
        self.generator = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(stream_id,)))
        )

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"


def sample_packet_size(rng: RngStream, size: Optional[int] = None) -> Union[float, np.ndarray]:
    """Packet size in bits, uniform on [500 kb, 4 Mb]."""
    return rng.generator.uniform(PACKET_BITS_MIN, PACKET_BITS_MAX, size)


def sample_deadline(
    rng: RngStream, delay_class: DelayClass, size: Optional[int] = None
) -> Union[float, np.ndarray]:
    """Completion deadline in ms, uniform over the class bounds."""
    return rng.generator.uniform(delay_class.deadline_low, delay_class.deadline_high, size)


def generate_batch(cfg: ScenarioConfig, rng: RngStream) -> List[Device]:
    """Generate exactly cfg.device_count devices in arrival (id) order.

    Class assignment is Bernoulli(class_mix) per device; packet sizes and
    deadlines follow the class distributions.  Draw order is fixed (class
    mask, packet sizes, deadline fractions) so batches are reproducible.
    """
    n = cfg.device_count
    strict_mask = rng.generator.random(n) < cfg.class_mix
    packets = sample_packet_size(rng, n)
    u = rng.generator.random(n)
    strict_cls = DELAY_CLASSES[STRICT]
    lenient_cls = DELAY_CLASSES[LENIENT]
    lo = np.where(strict_mask, strict_cls.deadline_low, lenient_cls.deadline_low)
    hi = np.where(strict_mask, strict_cls.deadline_high, lenient_cls.deadline_high)
    deadlines = lo + u * (hi - lo)
    return [
        Device(
            id=i,
            packet_bits=float(packets[i]),
            deadline_ms=float(deadlines[i]),
            delay_class=STRICT if strict_mask[i] else LENIENT,
        )
        for i in range(n)
    ]


def write_batch_csv(devices: List[Device], path: str) -> None:
    """Dump a batch as CSV with header id,packet_bits,deadline_ms,class."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "packet_bits", "deadline_ms", "class"])
        for d in devices:
            writer.writerow([d.id, repr(d.packet_bits), repr(d.deadline_ms), d.delay_class])
