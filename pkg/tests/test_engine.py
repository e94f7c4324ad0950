"""Episode runner: assignment semantics, training, evaluation, traces."""
import csv

import numpy as np
import pytest

from edgecluster.config import ScenarioConfig, with_overrides
from edgecluster.engine import (
    EVAL_STREAM_BASE,
    evaluate,
    kernel_name,
    run_episode,
    train,
    write_episode_log_csv,
    write_training_trace_csv,
)
from edgecluster.policy import Action, AgentState, QPolicy, QTable, RandomPolicy, q_update
from edgecluster.workload import RngStream, generate_batch


def small_config(**overrides):
    cfg = ScenarioConfig()
    learn = cfg.learn.__class__(
        alpha=cfg.learn.alpha,
        gamma=cfg.learn.gamma,
        epsilon_start=cfg.learn.epsilon_start,
        epsilon_end=cfg.learn.epsilon_end,
        epsilon_decay=cfg.learn.epsilon_decay,
        episodes=overrides.pop("episodes", 30),
        max_occupancy_state=cfg.learn.max_occupancy_state,
    )
    return with_overrides(cfg, learn=learn, device_count=overrides.pop("device_count", 15), **overrides)


def fresh_policy(cfg):
    return QPolicy(qtable=QTable(cfg.learn.max_occupancy_state, cfg.vm.count))


class TestRunEpisode:
    def test_single_device_one_cluster(self):
        cfg = with_overrides(ScenarioConfig(), device_count=1)
        batch = generate_batch(cfg, RngStream(0, 0))
        out = run_episode(batch, fresh_policy(cfg), cfg)
        assert out.clusters_used == 1
        assert out.steps.state_occ[0] == 0
        assert out.steps.state_vms[0] == cfg.vm.count - 1

    def test_rejects_empty_batch(self):
        cfg = ScenarioConfig()
        with pytest.raises(ValueError):
            run_episode([], fresh_policy(cfg), cfg)

    def test_random_policy_needs_rng(self):
        cfg = with_overrides(ScenarioConfig(), device_count=3)
        batch = generate_batch(cfg, RngStream(0, 0))
        with pytest.raises(ValueError):
            run_episode(batch, RandomPolicy(), cfg)

    def test_random_policy_cannot_learn(self):
        cfg = with_overrides(ScenarioConfig(), device_count=3)
        batch = generate_batch(cfg, RngStream(0, 0))
        with pytest.raises(ValueError):
            run_episode(batch, RandomPolicy(), cfg, learn=True, rng=RngStream(0, 1))

    def test_exploration_needs_rng(self):
        cfg = with_overrides(ScenarioConfig(), device_count=3)
        batch = generate_batch(cfg, RngStream(0, 0))
        with pytest.raises(ValueError):
            run_episode(batch, fresh_policy(cfg), cfg, epsilon=0.5)

    @pytest.mark.parametrize("policy_kind", ["q", "random"])
    def test_partition_invariant(self, policy_kind):
        cfg = with_overrides(ScenarioConfig(), device_count=37)
        batch = generate_batch(cfg, RngStream(1, 0))
        policy = fresh_policy(cfg) if policy_kind == "q" else RandomPolicy()
        out = run_episode(batch, policy, cfg, rng=RngStream(1, 1))
        ids = sorted(i for c in out.clusters for i in c.member_ids)
        assert ids == list(range(37))
        assert out.clusters_used <= cfg.vm.count
        assert len(out.delay_reports) == 37
        assert [r.device_id for r in out.delay_reports] == list(range(37))

    def test_fresh_agent_increments_forever(self):
        # Zero Q-table ties break to INCREMENT, so greedy packs one cluster.
        cfg = with_overrides(ScenarioConfig(), device_count=25)
        batch = generate_batch(cfg, RngStream(2, 0))
        out = run_episode(batch, fresh_policy(cfg), cfg)
        assert out.clusters_used == 1
        assert out.forced_increments == 0
        assert all(a == Action.INCREMENT for a in out.steps.executed)

    def test_decrement_always_agent(self):
        # An agent that always wants DECREMENT: the first device lands in the
        # empty cluster, each next seals one, and once the VMs run out the
        # rest are coerced increments.
        cfg = with_overrides(ScenarioConfig(), device_count=20)
        policy = fresh_policy(cfg)
        policy.qtable.values[:, :, :, int(Action.DECREMENT)] = 1.0
        batch = generate_batch(cfg, RngStream(3, 0))
        out = run_episode(batch, policy, cfg)
        assert out.clusters_used == cfg.vm.count
        assert out.forced_increments == 20 - cfg.vm.count
        assert int(out.steps.forced.sum()) == out.forced_increments
        # Coerced steps keep the chosen action in the log.
        coerced = out.steps.forced.astype(bool)
        assert all(out.steps.chosen[coerced] == int(Action.DECREMENT))
        assert all(out.steps.executed[coerced] == int(Action.INCREMENT))

    def test_decrement_on_empty_cluster_consumes_no_vm(self):
        cfg = with_overrides(ScenarioConfig(), device_count=1)
        policy = fresh_policy(cfg)
        policy.qtable.values[:, :, :, int(Action.DECREMENT)] = 1.0
        batch = generate_batch(cfg, RngStream(4, 0))
        out = run_episode(batch, policy, cfg)
        assert out.clusters_used == 1
        assert out.steps.state_vms[0] == cfg.vm.count - 1
        assert out.forced_increments == 0

    def test_total_reward_matches_step_rewards(self):
        cfg = with_overrides(ScenarioConfig(), device_count=30)
        batch = generate_batch(cfg, RngStream(5, 0))
        out = run_episode(batch, fresh_policy(cfg), cfg)
        assert out.total_reward == int(out.steps.rewards.sum())

    def test_step_log_replay_reproduces_kernel_table(self):
        # Replaying the step log through the reference q_update must land on
        # the exact same table the kernel produced.
        cfg = small_config(device_count=40, episodes=1)
        policy = fresh_policy(cfg)
        stream = RngStream(cfg.seed, 0)
        batch = generate_batch(cfg, stream)
        out = run_episode(batch, policy, cfg, learn=True, rng=stream, epsilon=0.7)

        labels = ("STRICT", "LENIENT")
        replay = QTable(cfg.learn.max_occupancy_state, cfg.vm.count)
        s = out.steps
        n = len(batch)
        for t in range(n):
            st = AgentState(int(s.state_occ[t]), labels[int(s.state_cls[t])], int(s.state_vms[t]))
            if t + 1 < n:
                nxt = AgentState(
                    int(s.state_occ[t + 1]), labels[int(s.state_cls[t + 1])], int(s.state_vms[t + 1])
                )
            else:
                nxt = st
            q_update(
                replay,
                st,
                Action(int(s.chosen[t])),
                float(s.rewards[t]),
                nxt,
                t + 1 == n,
                cfg.learn.alpha,
                cfg.learn.gamma,
            )
        assert np.array_equal(replay.values, policy.qtable.values)


class TestTrain:
    def test_deterministic(self):
        cfg = small_config()
        a, b = train(cfg), train(cfg)
        assert a.qtable == b.qtable
        assert a.trace == b.trace

    def test_trace_shape_and_epsilon_schedule(self):
        cfg = small_config(episodes=20)
        res = train(cfg)
        assert len(res.trace) == 20
        assert res.trace[0].epsilon == cfg.learn.epsilon_start
        for prev, cur in zip(res.trace, res.trace[1:]):
            expected = max(cfg.learn.epsilon_end, prev.epsilon * cfg.learn.epsilon_decay)
            assert cur.epsilon == expected

    def test_zero_episodes_untrained_table(self):
        res = train(small_config(episodes=0))
        assert res.trace == []
        assert not res.qtable.values.any()

    def test_invalid_config_rejected(self):
        from edgecluster.config import ConfigError

        with pytest.raises(ConfigError):
            train(with_overrides(ScenarioConfig(), device_count=0))

    def test_seed_changes_training(self):
        a = train(small_config())
        b = train(with_overrides(small_config(), seed=12345))
        assert a.qtable != b.qtable


class TestEvaluate:
    def test_deterministic(self):
        cfg = small_config()
        policy = fresh_policy(cfg)
        a = evaluate(policy, cfg, 5)
        b = evaluate(policy, cfg, 5)
        assert [o.clusters for o in a] == [o.clusters for o in b]

    def test_policies_see_identical_batches(self):
        cfg = small_config()
        for rep in range(3):
            stream_a = RngStream(cfg.seed, EVAL_STREAM_BASE + rep)
            stream_b = RngStream(cfg.seed, EVAL_STREAM_BASE + rep)
            assert generate_batch(cfg, stream_a) == generate_batch(cfg, stream_b)

    def test_eval_streams_disjoint_from_training(self):
        cfg = small_config()
        train_batch = generate_batch(cfg, RngStream(cfg.seed, 0))
        eval_batch = generate_batch(cfg, RngStream(cfg.seed, EVAL_STREAM_BASE))
        assert train_batch != eval_batch

    def test_rejects_zero_replications(self):
        cfg = small_config()
        with pytest.raises(ValueError):
            evaluate(fresh_policy(cfg), cfg, 0)

    def test_random_policy_saturates_vms(self):
        # Coupon collector: with 200 devices over 5 VMs the chance of an
        # unused VM is ~5 * (4/5)^200, i.e. vanishing.
        cfg = with_overrides(ScenarioConfig(), device_count=200)
        outcomes = evaluate(RandomPolicy(), cfg, 20)
        assert all(o.clusters_used == cfg.vm.count for o in outcomes)


class TestTraceCsv:
    def test_training_trace_csv(self, tmp_path):
        res = train(small_config(episodes=5))
        path = tmp_path / "trace.csv"
        write_training_trace_csv(res.trace, str(path))
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["episode", "total_reward", "clusters_used", "delayed_count", "epsilon"]
        assert len(rows) == 6

    def test_episode_log_csv(self, tmp_path):
        cfg = small_config(device_count=6)
        batch = generate_batch(cfg, RngStream(0, 0))
        out = run_episode(batch, fresh_policy(cfg), cfg)
        path = tmp_path / "steps.csv"
        write_episode_log_csv(out, str(path))
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        assert len(rows) == 7
        assert rows[1][5] in ("INCREMENT", "DECREMENT")

    def test_episode_log_requires_steps(self, tmp_path):
        cfg = small_config(device_count=4)
        batch = generate_batch(cfg, RngStream(0, 0))
        out = run_episode(batch, RandomPolicy(), cfg, rng=RngStream(0, 1))
        with pytest.raises(ValueError):
            write_episode_log_csv(out, str(tmp_path / "nope.csv"))


def test_kernel_name_reports_backend():
    assert kernel_name() in ("compiled", "pure-python")
