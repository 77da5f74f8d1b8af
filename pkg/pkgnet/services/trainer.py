"""One training run (one seed of one experiment), resumable at episode boundaries"""

import logging
import time
from typing import List, Optional

from pkgnet.core.optim import Adam
from pkgnet.models.experiment import Algorithm, EpisodeRecord, EvalRecord, EvalSplit, ExperimentConfig
from pkgnet.networks.factory import build_model
from pkgnet.rl.a2c import Rollout, a2c_update
from pkgnet.rl.dqn import DQNLearner
from pkgnet.rl.policy import ActMode, act
from pkgnet.rl.replay import PrioritizedReplayBuffer, ReplayBuffer, Transition
from pkgnet.rl.schedules import LinearSchedule
from pkgnet.services.evaluation_service import EvaluationService
from pkgnet.services.world import World, build_world
from pkgnet.utils.seeding import stream

logger = logging.getLogger(__name__)


class RunTrainer:
    """
    Holds every piece of mutable training state for one seed

    The world (maze sets, graphs, step function) is rebuilt from the config
    on restore, so pickling covers only models, optimiser, replay, random
    streams and counters.
    """

    def __init__(self, config: ExperimentConfig, seed: int):
        self.config = config
        self.seed = seed
        self.world = build_world(config)
        train = config.train
        self.model_config = self.world.model_config(value_head=config.algorithm == Algorithm.A2C)
        self.model = build_model(self.model_config, stream(seed, "init"))
        self.env = self.world.make_env(stream(seed, "environment"))
        self.exploration = stream(seed, "exploration")
        self.epsilon = LinearSchedule(train.epsilon_start, train.epsilon_end, train.epsilon_decay_steps)
        self.beta = LinearSchedule(train.per_beta_start, train.per_beta_end, max(config.episodes, 1))

        self.learner: Optional[DQNLearner] = None
        self.buffer: Optional[ReplayBuffer] = None
        self.optimizer: Optional[Adam] = None
        if config.algorithm == Algorithm.A2C:
            self.optimizer = Adam(self.model.parameters(), train.learning_rate)
        else:
            target = build_model(self.model_config, stream(seed, "init"))
            self.learner = DQNLearner.create(self.model, target, train)
            replay_rng = stream(seed, "replay")
            if config.algorithm == Algorithm.PER:
                self.buffer = PrioritizedReplayBuffer(train.buffer_capacity, replay_rng, train.per_alpha, train.per_epsilon)
            else:
                self.buffer = ReplayBuffer(train.buffer_capacity, replay_rng)

        self.episode = 0
        self.total_steps = 0
        self.elapsed = 0.0
        self.evaluator = EvaluationService()

    def __getstate__(self) -> dict:
        state = dict(self.__dict__)
        state.pop("world")
        return state

    def __setstate__(self, state: dict) -> None:
        self.__dict__.update(state)
        self.world = build_world(self.config)

    @property
    def finished(self) -> bool:
        return self.episode >= self.config.episodes

    def _epsilon(self) -> float:
        if self.config.algorithm == Algorithm.A2C:
            return 0.0
        return self.epsilon.value(self.total_steps)

    def run_episode(self) -> EpisodeRecord:
        started = time.perf_counter()
        world: World = self.world
        kg = world.train.kg
        grid = self.env.reset()
        world.check_leakage(grid)
        rollout = Rollout()
        episode_return, steps, success = 0.0, 0, False
        beta = self.beta.value(self.episode)
        epsilon = self._epsilon()

        while True:
            if self.config.algorithm == Algorithm.A2C:
                action = act(self.model, kg, grid, self.exploration, ActMode.CATEGORICAL)
            else:
                epsilon = self._epsilon()
                action = act(self.model, kg, grid, self.exploration, ActMode.EPSILON_GREEDY, epsilon)
            result = self.env.step(action)
            terminal = result.done and not result.truncated
            if self.config.algorithm == Algorithm.A2C:
                rollout.add(grid, action, result.reward, result.grid, terminal)
                if len(rollout) >= self.config.train.rollout_length or result.done:
                    a2c_update(self.model, kg, rollout, self.optimizer, self.config.train)
                    rollout = Rollout()
            else:
                self.buffer.add(Transition(grid, action, result.reward, result.grid, terminal))
                self.learner.learn(kg, self.buffer, beta)

            self.total_steps += 1
            steps += 1
            episode_return += result.reward
            grid = result.grid
            if result.done:
                success = result.success
                break

        self.episode += 1
        self.elapsed += time.perf_counter() - started
        return EpisodeRecord(
            episode=self.episode,
            episode_return=round(episode_return, 6),
            steps=steps,
            success=success,
            epsilon=round(epsilon, 6),
            wall_time=round(self.elapsed, 3),
        )

    def due_for_eval(self) -> bool:
        return self.episode > 0 and self.episode % self.config.eval_every == 0

    def evaluate(self) -> List[EvalRecord]:
        return [
            self.evaluator.evaluate(self.model, self.world, split, self.episode, self.seed)
            for split in (EvalSplit.TRAIN, EvalSplit.TEST)
        ]
