"""Processor-sharing delay model."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from edgecluster.config import Device, ScenarioConfig, VmSpec, with_overrides
from edgecluster.delay import cluster_delays, device_delay
from edgecluster.engine import _critical_sizes


def make_device(bits=1e6, deadline=100.0, cls="STRICT", id=0):
    return Device(id=id, packet_bits=bits, deadline_ms=deadline, delay_class=cls)


class TestDeviceDelay:
    def test_hand_computed_example(self):
        # 1 Mb packet, 250 Mb/s radio -> 4 ms transmission;
        # 500 Mb/s VM shared by 2 -> 1e6 * 2 / 5e8 s = 4 ms processing.
        vm = VmSpec(capacity=5e8, count=5)
        report = device_delay(make_device(bits=1e6, deadline=100.0), 2, vm, 2.5e8)
        assert report.transmission_ms == pytest.approx(4.0)
        assert report.processing_ms == pytest.approx(4.0)
        assert report.total_ms == pytest.approx(8.0)
        assert not report.delayed

    def test_boundary_is_on_time(self):
        # Exactly hitting the deadline does not count as delayed.
        vm = VmSpec(capacity=1e6, count=1)
        device = make_device(bits=1e6, deadline=2000.0)
        report = device_delay(device, 1, vm, 1e6)
        assert report.total_ms == 2000.0
        assert not report.delayed

    def test_just_past_boundary_is_delayed(self):
        vm = VmSpec(capacity=1e6, count=1)
        report = device_delay(make_device(bits=1e6, deadline=2000.0), 2, vm, 1e6)
        assert report.total_ms == 3000.0
        assert report.delayed

    def test_monotone_in_cluster_size(self):
        vm = VmSpec()
        totals = [device_delay(make_device(), k, vm, 2.5e8).total_ms for k in range(1, 20)]
        assert totals == sorted(totals)
        assert len(set(totals)) == len(totals)

    def test_rejects_empty_cluster_size(self):
        with pytest.raises(ValueError):
            device_delay(make_device(), 0, VmSpec(), 2.5e8)


class TestClusterDelays:
    def test_order_preserved(self):
        vm = VmSpec()
        members = [make_device(id=i) for i in (3, 1, 2)]
        reports = cluster_delays(members, vm, 2.5e8)
        assert [r.device_id for r in reports] == [3, 1, 2]

    def test_size_is_member_count(self):
        vm = VmSpec()
        members = [make_device(id=i) for i in range(4)]
        reports = cluster_delays(members, vm, 2.5e8)
        solo = device_delay(members[0], 4, vm, 2.5e8)
        assert reports[0] == solo

    def test_rejects_empty_cluster(self):
        with pytest.raises(ValueError):
            cluster_delays([], VmSpec(), 2.5e8)


class TestCriticalSize:
    """The engine's critical-size shortcut must agree with the delay model."""

    @settings(max_examples=200, deadline=None)
    @given(
        bits=st.floats(min_value=500e3, max_value=4e6),
        deadline=st.floats(min_value=100.0, max_value=1500.0),
        size=st.integers(min_value=1, max_value=100),
    )
    def test_delayed_iff_size_exceeds_crit(self, bits, deadline, size):
        cfg = ScenarioConfig()
        device = make_device(bits=bits, deadline=deadline)
        crit = _critical_sizes(np.array([bits]), np.array([deadline]), cfg)[0]
        report = device_delay(device, size, cfg.vm, cfg.radio_rate)
        if size < crit * (1 - 1e-12):
            assert not report.delayed
        elif size > crit * (1 + 1e-12):
            assert report.delayed

    def test_crit_worst_cases(self):
        # Largest packet with the tightest/loosest deadlines of each class.
        cfg = ScenarioConfig()
        crit = _critical_sizes(np.array([4e6, 4e6]), np.array([100.0, 500.0]), cfg)
        assert crit[0] == pytest.approx(10.5)
        assert crit[1] == pytest.approx(60.5)
