"""Numeric core: tensors, differentiable ops, parameter containers, Adam, checkpoints"""
from pkgnet.core.tensor import Tensor, no_grad, grad_enabled
from pkgnet.core.module import Module, fan_in_uniform, zeros_parameter
from pkgnet.core.optim import Adam, AdamState, adam_step
from pkgnet.core.checkpoint import save_checkpoint, load_checkpoint
from pkgnet.core import ops

__all__ = [
    "Tensor",
    "no_grad",
    "grad_enabled",
    "Module",
    "fan_in_uniform",
    "zeros_parameter",
    "Adam",
    "AdamState",
    "adam_step",
    "save_checkpoint",
    "load_checkpoint",
    "ops"
]
