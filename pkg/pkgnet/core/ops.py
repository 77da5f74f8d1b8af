"""
Differentiable operations over Tensor

Spatial maps are channel-last: (h, w, c) or batched (n, h, w, c).
Vectors may carry any number of leading batch axes.
"""

import re
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from pkgnet.core.tensor import DTYPE, Tensor, as_tensor
from pkgnet.errors import ContractError, DimensionError

Scalar = Union[int, float]


def _unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    """Sum a broadcast gradient back down to `shape`"""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, extent in enumerate(shape):
        if extent == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def add(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    out = a.data + b.data

    def backward(g):
        return _unbroadcast(g, a.shape), _unbroadcast(g, b.shape)

    return Tensor.from_op(out, (a, b), backward)


def sub(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    out = a.data - b.data

    def backward(g):
        return _unbroadcast(g, a.shape), _unbroadcast(-g, b.shape)

    return Tensor.from_op(out, (a, b), backward)


def mul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    out = a.data * b.data

    def backward(g):
        return _unbroadcast(g * b.data, a.shape), _unbroadcast(g * a.data, b.shape)

    return Tensor.from_op(out, (a, b), backward)


def neg(a) -> Tensor:
    return mul(a, -1.0)


def relu(x: Tensor) -> Tensor:
    mask = x.data > 0
    out = np.where(mask, x.data, 0.0).astype(DTYPE)

    def backward(g):
        return (g * mask,)

    return Tensor.from_op(out, (x,), backward)


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """(..., n) @ (n, m) -> (..., m); b has no batch axes"""
    a, b = as_tensor(a), as_tensor(b)
    if b.ndim != 2:
        raise DimensionError(f"matmul right operand must be 2-D, got shape {b.shape}")
    if a.shape[-1] != b.shape[0]:
        raise DimensionError(
            f"matmul inner axis mismatch: left axis -1 has {a.shape[-1]}, right axis 0 has {b.shape[0]}"
        )
    out = a.data @ b.data

    def backward(g):
        grad_a = g @ b.data.T
        grad_b = a.data.reshape(-1, a.shape[-1]).T @ g.reshape(-1, b.shape[1])
        return grad_a, grad_b

    return Tensor.from_op(out, (a, b), backward)


def linear(x: Tensor, weight: Tensor, bias: Tensor) -> Tensor:
    """x·weight + bias"""
    if bias.shape != (weight.shape[-1],):
        raise DimensionError(
            f"linear bias has shape {bias.shape}, expected ({weight.shape[-1]},) on axis 0"
        )
    return add(matmul(x, weight), bias)


def _as_batched_map(x: Tensor) -> bool:
    if x.ndim == 3:
        return False
    if x.ndim == 4:
        return True
    raise DimensionError(f"expected an (h, w, c) or (n, h, w, c) map, got shape {x.shape}")


def conv2d(x: Tensor, kernel: Tensor, bias: Tensor) -> Tensor:
    """
    Size-preserving cross-correlation with zero padding k//2 and stride 1

    kernel is (k, k, c_in, c_out) with k odd; bias is (c_out,).
    """
    batched = _as_batched_map(x)
    xd = x.data if batched else x.data[None]
    if kernel.ndim != 4 or kernel.shape[0] != kernel.shape[1] or kernel.shape[0] % 2 == 0:
        raise DimensionError(f"kernel must be (k, k, c_in, c_out) with odd k, got shape {kernel.shape}")
    k, _, c_in, c_out = kernel.shape
    if xd.shape[-1] != c_in:
        raise DimensionError(
            f"conv2d channel mismatch on axis -1: input has {xd.shape[-1]}, kernel expects {c_in}"
        )
    if bias.shape != (c_out,):
        raise DimensionError(f"conv2d bias has shape {bias.shape}, expected ({c_out},) on axis 0")

    n, h, w, _ = xd.shape
    pad = k // 2
    padded = np.pad(xd, ((0, 0), (pad, pad), (pad, pad), (0, 0)))
    cols = np.stack(
        [padded[:, di:di + h, dj:dj + w, :] for di in range(k) for dj in range(k)], axis=3
    ).reshape(n * h * w, k * k * c_in)
    flat_kernel = kernel.data.reshape(k * k * c_in, c_out)
    out = (cols @ flat_kernel + bias.data).reshape(n, h, w, c_out)
    if not batched:
        out = out[0]

    def backward(g):
        g2 = g.reshape(n * h * w, c_out)
        grad_kernel = (cols.T @ g2).reshape(kernel.shape)
        grad_bias = g2.sum(axis=0)
        grad_cols = (g2 @ flat_kernel.T).reshape(n, h, w, k * k, c_in)
        grad_padded = np.zeros_like(padded)
        for tap in range(k * k):
            di, dj = divmod(tap, k)
            grad_padded[:, di:di + h, dj:dj + w, :] += grad_cols[:, :, :, tap, :]
        grad_x = grad_padded[:, pad:pad + h, pad:pad + w, :]
        return (grad_x if batched else grad_x[0]), grad_kernel, grad_bias

    return Tensor.from_op(out, (x, kernel, bias), backward)


def channel_mean(x: Tensor) -> Tensor:
    """Mean over the two spatial axes, per channel"""
    batched = _as_batched_map(x)
    h, w = x.shape[-3], x.shape[-2]
    if h * w == 0:
        raise DimensionError(f"channel_mean over empty spatial extent, shape {x.shape}")
    out = x.data.mean(axis=(-3, -2))

    def backward(g):
        expanded = g[..., None, None, :] if batched else g[None, None, :]
        return (np.broadcast_to(expanded / (h * w), x.shape).astype(DTYPE),)

    return Tensor.from_op(out, (x,), backward)


def sum_all(x: Tensor) -> Tensor:
    out = np.asarray(x.data.sum(), dtype=DTYPE)

    def backward(g):
        return (np.broadcast_to(g, x.shape).astype(DTYPE),)

    return Tensor.from_op(out, (x,), backward)


def mean_all(x: Tensor) -> Tensor:
    size = max(x.data.size, 1)
    return mul(sum_all(x), 1.0 / size)


def sum_last(x: Tensor) -> Tensor:
    out = x.data.sum(axis=-1)

    def backward(g):
        return (np.broadcast_to(g[..., None], x.shape).astype(DTYPE),)

    return Tensor.from_op(out, (x,), backward)


def reshape(x: Tensor, shape: Sequence[int]) -> Tensor:
    out = x.data.reshape(shape)

    def backward(g):
        return (g.reshape(x.shape),)

    return Tensor.from_op(out, (x,), backward)


_EINSUM_PATTERN = re.compile(r"^([a-z]+),([a-z]+)->([a-z]*)$")


def einsum(spec: str, a, b) -> Tensor:
    """
    Two-operand einsum

    Every index of an operand must appear in the other operand or in the
    output, so each operand's gradient is again a two-operand einsum.
    """
    match = _EINSUM_PATTERN.match(spec.replace(" ", ""))
    if not match:
        raise ContractError(f"unsupported einsum spec {spec!r}")
    left, right, result = match.groups()
    for name, sub_spec, other in (("left", left, right), ("right", right, left)):
        orphan = set(sub_spec) - set(other) - set(result)
        if orphan:
            raise ContractError(f"einsum {spec!r}: {name} index {sorted(orphan)} is summed alone")
    a, b = as_tensor(a), as_tensor(b)
    try:
        out = np.einsum(f"{left},{right}->{result}", a.data, b.data, optimize=True)
    except ValueError as e:
        raise DimensionError(f"einsum {spec!r} on shapes {a.shape} and {b.shape}: {e}")
    out = np.asarray(out, dtype=DTYPE)

    def backward(g):
        grad_a = np.einsum(f"{result},{right}->{left}", g, b.data, optimize=True) if a.requires_grad else None
        grad_b = np.einsum(f"{result},{left}->{right}", g, a.data, optimize=True) if b.requires_grad else None
        return grad_a, grad_b

    return Tensor.from_op(out, (a, b), backward)


def take_along_last(x: Tensor, index: np.ndarray) -> Tensor:
    """out[i] = x[i, index[i]] for x of shape (n, k)"""
    index = np.asarray(index, dtype=np.int64)
    if x.ndim != 2 or index.shape != (x.shape[0],):
        raise DimensionError(f"take_along_last expects (n, k) and (n,), got {x.shape} and {index.shape}")
    rows = np.arange(x.shape[0])
    out = x.data[rows, index]

    def backward(g):
        grad = np.zeros_like(x.data)
        grad[rows, index] = g
        return (grad,)

    return Tensor.from_op(out, (x,), backward)


def log_softmax(x: Tensor) -> Tensor:
    shifted = x.data - x.data.max(axis=-1, keepdims=True)
    log_norm = np.log(np.exp(shifted).sum(axis=-1, keepdims=True))
    out = (shifted - log_norm).astype(DTYPE)
    probs = np.exp(out)

    def backward(g):
        return (g - probs * g.sum(axis=-1, keepdims=True),)

    return Tensor.from_op(out, (x,), backward)


def softmax(x: Tensor) -> Tensor:
    shifted = np.exp(x.data - x.data.max(axis=-1, keepdims=True))
    out = (shifted / shifted.sum(axis=-1, keepdims=True)).astype(DTYPE)

    def backward(g):
        return (out * (g - (g * out).sum(axis=-1, keepdims=True)),)

    return Tensor.from_op(out, (x,), backward)


def entropy(logits: Tensor) -> Tensor:
    """Per-row entropy of the categorical distribution softmax(logits)"""
    return neg(sum_last(mul(softmax(logits), log_softmax(logits))))


def mse_loss(prediction: Tensor, target, weights: Optional[np.ndarray] = None) -> Tensor:
    """Mean squared error over the batch, optionally importance-weighted"""
    target = as_tensor(target)
    if prediction.shape != target.shape:
        raise DimensionError(f"mse_loss shapes differ: {prediction.shape} vs {target.shape}")
    squared = mul(sub(prediction, target), sub(prediction, target))
    if weights is not None:
        squared = mul(squared, np.asarray(weights, dtype=DTYPE))
    return mean_all(squared)


def sample_categorical(logits: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Draw one action per row from softmax(logits)"""
    logits = np.atleast_2d(logits).astype(np.float64)
    probs = np.exp(logits - logits.max(axis=-1, keepdims=True))
    probs /= probs.sum(axis=-1, keepdims=True)
    cumulative = probs.cumsum(axis=-1)
    draws = rng.random(probs.shape[0])[:, None]
    return np.minimum((draws > cumulative).sum(axis=-1), probs.shape[-1] - 1)


Tensor.__add__ = add
Tensor.__radd__ = lambda self, other: add(other, self)
Tensor.__sub__ = sub
Tensor.__rsub__ = lambda self, other: sub(other, self)
Tensor.__mul__ = mul
Tensor.__rmul__ = lambda self, other: mul(other, self)
Tensor.__neg__ = neg
Tensor.__matmul__ = matmul
