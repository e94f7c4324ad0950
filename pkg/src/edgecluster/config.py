"""Domain types and scenario configuration for the edge-IoT clustering simulator.

All types here are immutable value objects; behavior is limited to
construction, invariant checking and the flat key=value config format.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import List, Tuple

KPI_PRESETS = ("EHEALTH", "FACE_RECOGNITION", "VEHICULAR", "HOME_SENSORS", "ALL")

STRICT = "STRICT"
LENIENT = "LENIENT"
CLASS_LABELS = (STRICT, LENIENT)
# Array index used for the class dimension of the Q-table.
CLASS_INDEX = {STRICT: 0, LENIENT: 1}

PACKET_BITS_MIN = 500e3
PACKET_BITS_MAX = 4e6


class ConfigError(Exception):
    """Raised when a configuration cannot be parsed or fails validation."""


@dataclass(frozen=True)
class Violation:
    """One failed invariant: which field and why."""

    field: str
    reason: str

    def __str__(self) -> str:
        return f"{self.field}: {self.reason}"


@dataclass(frozen=True)
class DelayClass:
    """A deadline class: uniform completion-deadline bounds in milliseconds."""

    label: str
    deadline_low: float
    deadline_high: float

    def __post_init__(self):
        if self.label not in CLASS_LABELS:
            raise ConfigError(f"unknown delay class label {self.label!r}")
        if not (0 < self.deadline_low < self.deadline_high):
            raise ConfigError(
                f"delay class {self.label}: need 0 < low < high, "
                f"got [{self.deadline_low}, {self.deadline_high}]"
            )


# Two deadline groups: 100-900 ms (mean 0.5 s) and 500-1500 ms (mean 1 s).
STRICT_CLASS = DelayClass(STRICT, 100.0, 900.0)
LENIENT_CLASS = DelayClass(LENIENT, 500.0, 1500.0)
DELAY_CLASSES = {STRICT: STRICT_CLASS, LENIENT: LENIENT_CLASS}


@dataclass(frozen=True)
class Device:
    """One IoT endpoint: a packet to process and a completion deadline."""

    id: int
    packet_bits: float
    deadline_ms: float
    delay_class: str


@dataclass(frozen=True)
class VmSpec:
    """Edge virtual machines: processing rate (bits/s) and how many exist."""

    capacity: float = 5e8
    count: int = 5


@dataclass(frozen=True)
class Cluster:
    """A set of devices bound to exactly one VM."""

    vm_index: int
    member_ids: Tuple[int, ...]


@dataclass(frozen=True)
class RewardTable:
    """Per-action rewards, split by whether the step produced a delayed device."""

    inc_ok: int = 5
    dec_ok: int = -1
    inc_delayed: int = -10
    dec_delayed: int = 5


@dataclass(frozen=True)
class LearnSpec:
    """Q-learning hyperparameters and the occupancy cap of the state space."""

    alpha: float = 0.1
    gamma: float = 0.9
    epsilon_start: float = 1.0
    # A persistent exploration floor (0.1 rather than ~0) keeps rarely-visited
    # deep-occupancy states refreshed; without it their INCREMENT values stay
    # near the zero init and the greedy policy seals clusters too early.
    epsilon_end: float = 0.1
    epsilon_decay: float = 0.999
    episodes: int = 5000
    # Coarse occupancy cap: every cluster size at or past the cap shares one
    # row, so experience from long forced-increment runs transfers to it.
    max_occupancy_state: int = 5


@dataclass(frozen=True)
class ScenarioConfig:
    """Full description of one simulation scenario."""

    vm: VmSpec = field(default_factory=VmSpec)
    rewards: RewardTable = field(default_factory=RewardTable)
    learn: LearnSpec = field(default_factory=LearnSpec)
    device_count: int = 60
    class_mix: float = 0.5  # fraction of STRICT devices
    radio_rate: float = 2.5e8  # bits/s on the device-to-edge link
    utilization_window: float = 1500.0  # ms; largest default deadline
    seed: int = 7
    kpi_preset: str = "ALL"


def _check(violations: List[Violation], ok: bool, fld: str, reason: str) -> None:
    if not ok:
        violations.append(Violation(fld, reason))


def validate_config(cfg: ScenarioConfig) -> List[Violation]:
    """Check every invariant; return the complete list of violations (empty if valid).

    Pure: never mutates its argument.
    """
    v: List[Violation] = []
    _check(v, isinstance(cfg.vm.count, int) and cfg.vm.count >= 1, "vm.count", "must be an integer >= 1")
    _check(v, cfg.vm.capacity > 0 and math.isfinite(cfg.vm.capacity), "vm.capacity", "must be finite and > 0")
    _check(v, 0.0 <= cfg.learn.alpha <= 1.0, "learn.alpha", "must lie in [0, 1]")
    _check(v, 0.0 <= cfg.learn.gamma < 1.0, "learn.gamma", "must lie in [0, 1)")
    _check(v, 0.0 <= cfg.learn.epsilon_start <= 1.0, "learn.epsilon_start", "must lie in [0, 1]")
    _check(v, 0.0 <= cfg.learn.epsilon_end <= 1.0, "learn.epsilon_end", "must lie in [0, 1]")
    _check(
        v,
        cfg.learn.epsilon_end <= cfg.learn.epsilon_start,
        "learn.epsilon_end",
        "must not exceed epsilon_start",
    )
    _check(v, 0.0 < cfg.learn.epsilon_decay <= 1.0, "learn.epsilon_decay", "must lie in (0, 1]")
    _check(v, isinstance(cfg.learn.episodes, int) and cfg.learn.episodes >= 0, "learn.episodes", "must be an integer >= 0")
    _check(
        v,
        isinstance(cfg.learn.max_occupancy_state, int) and cfg.learn.max_occupancy_state >= 1,
        "learn.max_occupancy_state",
        "must be an integer >= 1",
    )
    _check(v, isinstance(cfg.device_count, int) and cfg.device_count >= 1, "device_count", "must be an integer >= 1")
    _check(v, 0.0 <= cfg.class_mix <= 1.0, "class_mix", "must lie in [0, 1]")
    _check(v, cfg.radio_rate > 0 and math.isfinite(cfg.radio_rate), "radio_rate", "must be finite and > 0")
    _check(
        v,
        cfg.utilization_window > 0 and math.isfinite(cfg.utilization_window),
        "utilization_window",
        "must be finite and > 0",
    )
    _check(v, isinstance(cfg.seed, int) and 0 <= cfg.seed < 2**64, "seed", "must be a 64-bit unsigned integer")
    _check(v, cfg.kpi_preset in KPI_PRESETS, "kpi_preset", f"must be one of {', '.join(KPI_PRESETS)}")
    return v


def ensure_valid(cfg: ScenarioConfig) -> ScenarioConfig:
    """Return cfg unchanged, or raise ConfigError listing every violation."""
    violations = validate_config(cfg)
    if violations:
        raise ConfigError("; ".join(str(x) for x in violations))
    return cfg


# --- flat key=value config format ------------------------------------------

_INT_KEYS = {
    "vm.count",
    "rewards.inc_ok",
    "rewards.dec_ok",
    "rewards.inc_delayed",
    "rewards.dec_delayed",
    "learn.episodes",
    "learn.max_occupancy_state",
    "device_count",
    "seed",
}
_FLOAT_KEYS = {
    "vm.capacity",
    "learn.alpha",
    "learn.gamma",
    "learn.epsilon_start",
    "learn.epsilon_end",
    "learn.epsilon_decay",
    "class_mix",
    "radio_rate",
    "utilization_window",
}
_STR_KEYS = {"kpi_preset"}
CONFIG_KEYS = sorted(_INT_KEYS | _FLOAT_KEYS | _STR_KEYS)


def _config_items(cfg: ScenarioConfig):
    return [
        ("vm.capacity", cfg.vm.capacity),
        ("vm.count", cfg.vm.count),
        ("rewards.inc_ok", cfg.rewards.inc_ok),
        ("rewards.dec_ok", cfg.rewards.dec_ok),
        ("rewards.inc_delayed", cfg.rewards.inc_delayed),
        ("rewards.dec_delayed", cfg.rewards.dec_delayed),
        ("learn.alpha", cfg.learn.alpha),
        ("learn.gamma", cfg.learn.gamma),
        ("learn.epsilon_start", cfg.learn.epsilon_start),
        ("learn.epsilon_end", cfg.learn.epsilon_end),
        ("learn.epsilon_decay", cfg.learn.epsilon_decay),
        ("learn.episodes", cfg.learn.episodes),
        ("learn.max_occupancy_state", cfg.learn.max_occupancy_state),
        ("device_count", cfg.device_count),
        ("class_mix", cfg.class_mix),
        ("radio_rate", cfg.radio_rate),
        ("utilization_window", cfg.utilization_window),
        ("seed", cfg.seed),
        ("kpi_preset", cfg.kpi_preset),
    ]


def dumps_config(cfg: ScenarioConfig) -> str:
    """Serialize to the flat key=value text format (round-trips exactly)."""
    return "".join(f"{k}={v!r}\n" if isinstance(v, float) else f"{k}={v}\n" for k, v in _config_items(cfg))


def loads_config(text: str) -> ScenarioConfig:
    """Parse the flat key=value format; unknown keys and bad values are errors.

    Keys absent from the file keep their defaults.  Lines that are blank or
    start with '#' are ignored.
    """
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        if key in _INT_KEYS:
            try:
                values[key] = int(val)
            except ValueError:
                raise ConfigError(f"line {lineno}: {key} must be an integer, got {val!r}") from None
        elif key in _FLOAT_KEYS:
            try:
                values[key] = float(val)
            except ValueError:
                raise ConfigError(f"line {lineno}: {key} must be a number, got {val!r}") from None
        elif key in _STR_KEYS:
            values[key] = val
        else:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")

    base = ScenarioConfig()
    cfg = ScenarioConfig(
        vm=VmSpec(
            capacity=values.get("vm.capacity", base.vm.capacity),
            count=values.get("vm.count", base.vm.count),
        ),
        rewards=RewardTable(
            inc_ok=values.get("rewards.inc_ok", base.rewards.inc_ok),
            dec_ok=values.get("rewards.dec_ok", base.rewards.dec_ok),
            inc_delayed=values.get("rewards.inc_delayed", base.rewards.inc_delayed),
            dec_delayed=values.get("rewards.dec_delayed", base.rewards.dec_delayed),
        ),
        learn=LearnSpec(
            alpha=values.get("learn.alpha", base.learn.alpha),
            gamma=values.get("learn.gamma", base.learn.gamma),
            epsilon_start=values.get("learn.epsilon_start", base.learn.epsilon_start),
            epsilon_end=values.get("learn.epsilon_end", base.learn.epsilon_end),
            epsilon_decay=values.get("learn.epsilon_decay", base.learn.epsilon_decay),
            episodes=values.get("learn.episodes", base.learn.episodes),
            max_occupancy_state=values.get("learn.max_occupancy_state", base.learn.max_occupancy_state),
        ),
        device_count=values.get("device_count", base.device_count),
        class_mix=values.get("class_mix", base.class_mix),
        radio_rate=values.get("radio_rate", base.radio_rate),
        utilization_window=values.get("utilization_window", base.utilization_window),
        seed=values.get("seed", base.seed),
        kpi_preset=values.get("kpi_preset", base.kpi_preset),
    )
    return cfg


def load_config(path: str) -> ScenarioConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return loads_config(fh.read())


def save_config(cfg: ScenarioConfig, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_config(cfg))


def with_overrides(cfg: ScenarioConfig, **kwargs) -> ScenarioConfig:
    """Convenience replace() for top-level ScenarioConfig fields."""
    return replace(cfg, **kwargs)
