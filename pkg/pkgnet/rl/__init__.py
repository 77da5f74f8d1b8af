"""DQN, prioritized replay and A2C over any (model, environment, knowledge graph)"""
from pkgnet.rl.sum_tree import SumTree
from pkgnet.rl.replay import Batch, PrioritizedReplayBuffer, ReplayBuffer, Transition
from pkgnet.rl.schedules import LinearSchedule
from pkgnet.rl.policy import ActMode, act, greedy_action
from pkgnet.rl.dqn import DQNLearner, dqn_loss, dqn_step, td_targets
from pkgnet.rl.a2c import A2CStats, Rollout, a2c_update, nstep_returns

__all__ = [
    "SumTree",
    "Batch",
    "PrioritizedReplayBuffer",
    "ReplayBuffer",
    "Transition",
    "LinearSchedule",
    "ActMode",
    "act",
    "greedy_action",
    "DQNLearner",
    "dqn_loss",
    "dqn_step",
    "td_targets",
    "A2CStats",
    "Rollout",
    "a2c_update",
    "nstep_returns"
]
