import numpy as np
import pytest
from scipy import special
from scipy.stats import chisquare

from pkgnet.core import Adam, Module, Tensor, ops
from pkgnet.core.module import zeros_parameter
from pkgnet.envs import SymbolGrid
from pkgnet.errors import ContractError
from pkgnet.models.experiment import TrainConfig
from pkgnet.networks.pkgnet import ModelOutput, as_batch
from pkgnet.rl.a2c import Rollout, a2c_update, nstep_returns
from pkgnet.rl.dqn import DQNLearner, dqn_loss, dqn_step, td_targets
from pkgnet.rl.policy import ActMode, act, greedy_action
from pkgnet.rl.replay import Batch, PrioritizedReplayBuffer, ReplayBuffer, Transition
from pkgnet.rl.schedules import LinearSchedule
from pkgnet.rl.sum_tree import SumTree

GRIDS = [SymbolGrid.from_rows([f"{i}"]) for i in range(6)]


class TabularModel(Module):
    """Q-table indexed by the digit in a 1×1 grid"""

    def __init__(self, states: int, actions: int, value_head: bool = False):
        self.num_actions = actions
        self.table = zeros_parameter((states, actions), "table")
        self.values = zeros_parameter((states, 1), "values") if value_head else None

    def __call__(self, kg, grids) -> ModelOutput:
        rows = np.array([int(g[0, 0]) for g in as_batch(grids)])
        onehot = Tensor(np.eye(self.table.shape[0])[rows])
        value = ops.reshape(ops.matmul(onehot, self.values), (len(rows),)) if self.values is not None else None
        return ModelOutput(ops.matmul(onehot, self.table), value)


class FixedModel:
    num_actions = 4

    def __init__(self, q):
        self.q = np.asarray(q, dtype=np.float32)

    def __call__(self, kg, grids):
        return ModelOutput(Tensor(self.q[None]))


def transition(s, a, r, s2, done):
    return Transition(GRIDS[s], a, r, GRIDS[s2], done)


def test_sum_tree_totals_and_lookup():
    tree = SumTree(5)
    for i, p in enumerate([1.0, 2.0, 0.0, 3.0, 4.0]):
        tree.update(i, p)
    assert tree.total == pytest.approx(10.0)
    assert [tree.find(v) for v in (0.5, 1.5, 3.5, 6.9, 9.99)] == [0, 1, 3, 4, 4]
    tree.update(4, 0.0)
    assert tree.total == pytest.approx(6.0)
    assert tree.find(5.9) == 3


def test_sum_tree_rejects_bad_updates():
    tree = SumTree(2)
    with pytest.raises(ContractError):
        tree.update(2, 1.0)
    with pytest.raises(ContractError):
        tree.update(0, -1.0)


@pytest.mark.parametrize("capacity", [1, 3, 5, 6, 13, 16])
def test_sum_tree_lookup_follows_leaf_order(capacity):
    rng = np.random.default_rng(capacity)
    tree = SumTree(capacity)
    priorities = rng.uniform(0.1, 2.0, size=capacity)
    for i, p in enumerate(priorities):
        tree.update(i, p)
    edges = np.concatenate([[0.0], np.cumsum(priorities)])
    assert [tree.find((lo + hi) / 2) for lo, hi in zip(edges, edges[1:])] == list(range(capacity))


@pytest.mark.parametrize("capacity", [7, 16])
def test_sum_tree_root_tracks_leaves_under_interleaved_updates_and_lookups(capacity):
    rng = np.random.default_rng(capacity)
    tree = SumTree(capacity)
    for _ in range(2000):
        if tree.total == 0.0 or rng.random() < 0.6:
            priority = 0.0 if rng.random() < 0.2 else rng.exponential()
            tree.update(int(rng.integers(capacity)), priority)
        else:
            value = rng.random() * tree.total
            leaf = tree.find(value)
            edges = np.concatenate([[0.0], np.cumsum(tree.leaves())])
            assert tree[leaf] > 0.0
            assert edges[leaf] - 1e-9 <= value < edges[leaf + 1] + 1e-9
        assert tree.total == pytest.approx(tree.leaves().sum(), rel=1e-12, abs=1e-12)


def test_replay_is_fifo_at_capacity():
    buffer = ReplayBuffer(3, np.random.default_rng(0))
    items = [transition(i, 0, 0.0, i, False) for i in range(4)]
    for t in items:
        buffer.add(t)
    assert len(buffer) == 3
    assert items[0] not in buffer
    assert all(t in buffer for t in items[1:])


def test_uniform_replay_weights_are_one():
    buffer = ReplayBuffer(10, np.random.default_rng(0))
    for i in range(5):
        buffer.add(transition(i, 0, 0.0, i, False))
    batch = buffer.sample(8)
    np.testing.assert_array_equal(batch.weights, np.ones(8))


def test_empty_buffer_cannot_be_sampled():
    with pytest.raises(ContractError):
        ReplayBuffer(4, np.random.default_rng(0)).sample(1)


def test_uniform_priorities_sample_uniformly():
    buffer = PrioritizedReplayBuffer(8, np.random.default_rng(0))
    for i in range(8):
        buffer.add(transition(i % 6, 0, 0.0, 0, False))
    counts = np.zeros(8)
    for _ in range(10_000 // 32 + 1):
        counts += np.bincount(buffer.sample(32).indices, minlength=8)
    assert chisquare(counts).pvalue > 0.01


def test_sampling_frequencies_match_priorities():
    td_errors = np.random.default_rng(0).uniform(0.5, 4.0, size=16)
    buffer = PrioritizedReplayBuffer(16, np.random.default_rng(1), alpha=0.6)
    for i in range(16):
        buffer.add(transition(i % 6, 0, 0.0, 0, False))
    buffer.update_priorities(list(range(16)), td_errors)
    expected = (td_errors + buffer.epsilon) ** 0.6
    expected /= expected.sum()

    counts = np.zeros(16)
    for _ in range(1000):
        counts += np.bincount(buffer.sample(100).indices, minlength=16)
    assert counts.sum() == 100_000
    np.testing.assert_allclose(counts / counts.sum(), expected, rtol=0.02)


def test_point_mass_priority_is_always_drawn():
    buffer = PrioritizedReplayBuffer(4, np.random.default_rng(0), alpha=1.0)
    for i in range(4):
        buffer.add(transition(i, 0, 0.0, 0, False))
    for i in range(4):
        buffer.tree.update(i, 0.0)
    buffer.tree.update(2, 5.0)
    assert set(buffer.sample(64).indices.tolist()) == {2}


def test_priorities_follow_td_errors():
    buffer = PrioritizedReplayBuffer(4, np.random.default_rng(0), alpha=0.5, epsilon=1e-3)
    for i in range(4):
        buffer.add(transition(i, 0, 0.0, 0, False))
    buffer.update_priorities([0, 1, 2, 3], np.array([0.0, 1.0, -3.0, 8.0]))
    expected = (np.abs([0.0, 1.0, -3.0, 8.0]) + 1e-3) ** 0.5
    np.testing.assert_allclose(buffer.probabilities(), expected / expected.sum())
    assert buffer.max_priority == pytest.approx(expected.max())


def test_importance_weights_are_normalised():
    buffer = PrioritizedReplayBuffer(4, np.random.default_rng(0), alpha=1.0)
    for i in range(4):
        buffer.add(transition(i, 0, 0.0, 0, False))
    buffer.update_priorities([0, 1, 2, 3], np.array([1.0, 2.0, 3.0, 4.0]))
    weights = buffer.sample(200, beta=1.0).weights
    assert weights.max() <= 1.0 + 1e-6
    assert weights.min() > 0.0


def test_linear_schedule():
    schedule = LinearSchedule(1.0, 0.05, 100)
    assert schedule.value(0) == 1.0
    assert schedule.value(50) == pytest.approx(0.525)
    assert schedule.value(100) == schedule.value(10_000) == 0.05


def test_terminal_targets_equal_rewards():
    target = TabularModel(6, 2)
    target.table.data = np.full((6, 2), 9.0, dtype=np.float32)
    batch = Batch([transition(0, 0, r, 1, True) for r in (1.0, -2.0)], np.arange(2), np.ones(2))
    np.testing.assert_allclose(td_targets(target, None, batch, 0.99), [1.0, -2.0])


def test_nonterminal_targets_bootstrap_from_the_max():
    target = TabularModel(6, 2)
    target.table.data[1] = [0.5, 2.0]
    batch = Batch([transition(0, 0, 1.0, 1, False)], np.arange(1), np.ones(1))
    np.testing.assert_allclose(td_targets(target, None, batch, 0.5), [2.0])


def test_fixed_point_has_zero_loss_and_no_update():
    model, target = TabularModel(6, 2), TabularModel(6, 2)
    model.table.data[0, 1] = 1.0
    batch = Batch([transition(0, 1, 1.0, 1, True)], np.arange(1), np.ones(1))
    loss, td_errors = dqn_loss(model, target, None, batch, 0.99)
    assert loss.item() == 0.0 and not td_errors.any()

    optimizer = Adam(model.parameters(), 0.1)
    before = model.table.data.copy()
    loss.backward()
    optimizer.step()
    np.testing.assert_array_equal(model.table.data, before)


def test_dqn_step_waits_for_warmup():
    config = TrainConfig(batch_size=2, warmup_steps=5)
    model, target = TabularModel(6, 2), TabularModel(6, 2)
    buffer = ReplayBuffer(10, np.random.default_rng(0))
    for i in range(4):
        buffer.add(transition(0, 0, 1.0, 1, True))
    assert dqn_step(model, target, None, buffer, Adam(model.parameters(), 0.1), config) is None


def test_dqn_learns_a_chain():
    """0 -> 1 -> 2 -> terminal with reward 1 at the end; action 1 advances, action 0 stays"""
    gamma = 0.9
    config = TrainConfig(batch_size=6, warmup_steps=6, target_sync=20, learning_rate=0.005, gamma=gamma)
    model, target = TabularModel(3, 2), TabularModel(3, 2)
    learner = DQNLearner.create(model, target, config)
    buffer = ReplayBuffer(1000, np.random.default_rng(0))
    for s in range(3):
        buffer.add(transition(s, 0, 0.0, s, False))
        buffer.add(transition(s, 1, 1.0 if s == 2 else 0.0, min(s + 1, 2), s == 2))
    for _ in range(5000):
        learner.learn(None, buffer)
    q = model.table.data
    np.testing.assert_allclose(q[:, 1], [gamma ** 2, gamma, 1.0], atol=1e-2)
    np.testing.assert_allclose(q[:, 0], gamma * q[:, 1], atol=1e-2)
    assert all(greedy_action(row) == 1 for row in q)
    assert learner.updates == 5000


def test_target_network_syncs_on_schedule():
    config = TrainConfig(batch_size=1, warmup_steps=1, target_sync=3, learning_rate=0.1)
    model, target = TabularModel(3, 2), TabularModel(3, 2)
    learner = DQNLearner.create(model, target, config)
    buffer = ReplayBuffer(4, np.random.default_rng(0))
    buffer.add(transition(0, 0, 1.0, 1, True))
    learner.learn(None, buffer)
    assert not np.array_equal(model.table.data, target.table.data)
    learner.learn(None, buffer)
    learner.learn(None, buffer)
    np.testing.assert_array_equal(model.table.data, target.table.data)


def test_nstep_returns_cut_at_episode_end():
    returns = nstep_returns([1.0, 1.0, 1.0], [False, True, False], bootstrap=10.0, gamma=0.5)
    np.testing.assert_allclose(returns, [1.5, 1.0, 6.0])


def test_a2c_zero_advantage_has_no_policy_gradient():
    model = TabularModel(6, 4, value_head=True)
    model.values.data[:] = 1.0
    rollout = Rollout()
    rollout.add(GRIDS[0], 2, 1.0, GRIDS[1], True)
    stats = a2c_update(model, None, rollout, Adam(model.parameters(), 0.1), TrainConfig())
    assert stats.policy_loss == pytest.approx(0.0)
    assert stats.value_loss == pytest.approx(0.0)
    assert stats.entropy == pytest.approx(np.log(4), abs=1e-6)


def test_a2c_learns_a_bandit():
    model = TabularModel(1, 4, value_head=True)
    optimizer = Adam(model.parameters(), 0.05)
    config = TrainConfig(entropy_coef=0.0)
    rng = np.random.default_rng(0)
    for _ in range(2000):
        rollout = Rollout()
        for _ in range(4):
            action = act(model, None, GRIDS[0], rng, ActMode.CATEGORICAL)
            rollout.add(GRIDS[0], action, 1.0 if action == 3 else 0.0, GRIDS[0], True)
        a2c_update(model, None, rollout, optimizer, config)
    assert special.softmax(model.table.data[0].astype(np.float64))[3] > 0.95


def test_a2c_requires_a_value_head():
    rollout = Rollout()
    rollout.add(GRIDS[0], 0, 0.0, GRIDS[0], True)
    model = TabularModel(6, 4)
    with pytest.raises(ContractError):
        a2c_update(model, None, rollout, Adam(model.parameters(), 0.1), TrainConfig())


def test_greedy_ties_go_to_the_lowest_index():
    assert greedy_action(np.array([0.1, 0.9, 0.9, 0.2])) == 1
    assert act(FixedModel([0.1, 0.9, 0.9, 0.2]), None, GRIDS[0], np.random.default_rng(0)) == 1


def test_zero_epsilon_is_greedy():
    model = FixedModel([0.0, 0.0, 3.0, 0.0])
    rng = np.random.default_rng(0)
    assert {act(model, None, GRIDS[0], rng, ActMode.EPSILON_GREEDY, 0.0) for _ in range(50)} == {2}


def test_full_epsilon_is_uniform():
    model = FixedModel([0.0, 0.0, 3.0, 0.0])
    rng = np.random.default_rng(0)
    actions = [act(model, None, GRIDS[0], rng, ActMode.EPSILON_GREEDY, 1.0) for _ in range(4000)]
    assert chisquare(np.bincount(actions, minlength=4)).pvalue > 0.01
