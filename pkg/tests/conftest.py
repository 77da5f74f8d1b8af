import numpy as np
import pytest

from pkgnet.core.tensor import Tensor
from pkgnet.models.experiment import ExperimentConfig


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow reproduction checks")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def _central_differences(evaluate, values, eps: float):
    """Central differences of a scalar function with respect to every entry of every array"""
    grads = []
    for value in values:
        grad = np.zeros(value.shape, dtype=np.float64)
        flat = value.reshape(-1)
        for i in range(flat.size):
            original = flat[i]
            flat[i] = original + eps
            plus = float(evaluate())
            flat[i] = original - eps
            minus = float(evaluate())
            flat[i] = original
            grad.reshape(-1)[i] = (plus - minus) / (2 * eps)
        grads.append(grad)
    return grads


@pytest.fixture
def grad_check():
    """
    Compare analytic gradients of a scalar loss against central differences

    `reference` recomputes the loss in float64 numpy from the tensors' values
    and is differenced at the default step. Without it the float32 loss_fn is
    differenced in place, which only resolves coarser steps and tolerances.
    """

    def check(loss_fn, tensors, reference=None, eps=1e-3, tolerance=1e-3):
        for t in tensors:
            t.zero_grad()
        loss_fn().backward()
        if reference is None:
            numeric = _central_differences(lambda: loss_fn().data, [t.data for t in tensors], eps)
        else:
            values = [t.data.astype(np.float64) for t in tensors]
            numeric = _central_differences(lambda: reference(*values), values, eps)
        for t, expected in zip(tensors, numeric):
            analytic = np.zeros(t.shape) if t.grad is None else t.grad.astype(np.float64)
            scale = max(np.linalg.norm(expected) + np.linalg.norm(analytic), 1e-6)
            assert np.linalg.norm(expected - analytic) / scale < tolerance, t.name

    return check


@pytest.fixture
def tiny_sokoban_config():
    """An experiment small enough to train for a few episodes in a test"""

    def make(**overrides) -> ExperimentConfig:
        payload = {
            "name": "tiny",
            "environment": "sokoban",
            "variation": "one-one",
            "algorithm": "dqn",
            "model": "pkgnet",
            "seeds": [0],
            "episodes": 3,
            "eval_every": 2,
            "num_train_mazes": 4,
            "num_test_mazes": 3,
            "max_steps": 6,
            "train": {"batch_size": 4, "warmup_steps": 4, "target_sync": 5, "epsilon_decay_steps": 20},
        }
        payload.update(overrides)
        return ExperimentConfig.model_validate(payload)

    return make
