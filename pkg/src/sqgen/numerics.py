"""Dense float64 tensors with reverse-mode differentiation.

Just enough substrate for an encoder-decoder transformer: elementwise
arithmetic, matmul, softmax, layer norm, embedding lookup, gather/scatter,
and multi-head attention composed from those pieces. Arrays are numpy
float64 throughout and every reduction has a fixed order, so runs with the
same seed are bit-reproducible.

Gradients flow through a recorded graph: each op closes over its inputs and
appends local gradients to them when `backward` walks the graph in reverse
topological order, in the style of the classic scalar autodiff tape but
tensor-valued.
"""

from __future__ import annotations

import contextlib
from typing import Callable, Iterable

import numpy as np


class NumericalError(ArithmeticError):
    """An op produced or received NaN/Inf where finite values are required."""


class InvalidLoss(ValueError):
    """backward() needs a scalar root."""


class ConfigError(ValueError):
    """Shape/head configuration is inconsistent."""


_GRAD_ENABLED = True


@contextlib.contextmanager
def no_grad():
    """Disable graph recording inside the block (forward-only evaluation)."""
    global _GRAD_ENABLED
    prev = _GRAD_ENABLED
    _GRAD_ENABLED = False
    try:
        yield
    finally:
        _GRAD_ENABLED = prev


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, data, requires_grad: bool = False):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad: np.ndarray | None = None
        self.requires_grad = bool(requires_grad)
        self._parents: tuple[Tensor, ...] = ()
        self._backward: Callable[[np.ndarray], None] | None = None

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    def item(self) -> float:
        return float(self.data)

    def __repr__(self) -> str:
        return f"Tensor(shape={self.data.shape}, requires_grad={self.requires_grad})"

    # -- graph construction -------------------------------------------------

    @staticmethod
    def _make(data: np.ndarray, parents: tuple["Tensor", ...], backward) -> "Tensor":
        out = Tensor(data)
        if _GRAD_ENABLED and any(p.requires_grad for p in parents):
            out.requires_grad = True
            out._parents = parents
            out._backward = backward
        return out

    def _accumulate(self, g: np.ndarray) -> None:
        if self.grad is None:
            self.grad = np.zeros_like(self.data)
        self.grad += g

    def backward(self) -> None:
        """Fill .grad on every reachable tensor with requires_grad."""
        if self.data.size != 1:
            raise InvalidLoss(f"backward root must be scalar, got shape {self.shape}")
        if not np.isfinite(self.data).all():
            raise NumericalError("backward root is not finite")

        topo: list[Tensor] = []
        seen: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, processed = stack.pop()
            if processed:
                topo.append(node)
                continue
            if id(node) in seen or not node.requires_grad:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for p in node._parents:
                stack.append((p, False))

        self.grad = np.ones_like(self.data)
        for node in reversed(topo):
            if node._backward is not None and node.grad is not None:
                node._backward(node.grad)

    # -- operator sugar ------------------------------------------------------

    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return add(neg(self), other)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(self, other)

    def __neg__(self):
        return neg(self)

    def __matmul__(self, other):
        return matmul(self, other)

    def __getitem__(self, key):
        return getitem(self, key)


def _as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def _unbroadcast(g: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum g down to `shape` along the axes numpy broadcast it over."""
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for ax, n in enumerate(shape):
        if n == 1 and g.shape[ax] != 1:
            g = g.sum(axis=ax, keepdims=True)
    return g


# -- elementwise ---------------------------------------------------------


def add(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    out_data = a.data + b.data

    def backward(g):
        if a.requires_grad:
            a._accumulate(_unbroadcast(g, a.data.shape))
        if b.requires_grad:
            b._accumulate(_unbroadcast(g, b.data.shape))

    return Tensor._make(out_data, (a, b), backward)


def sub(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    out_data = a.data - b.data

    def backward(g):
        if a.requires_grad:
            a._accumulate(_unbroadcast(g, a.data.shape))
        if b.requires_grad:
            b._accumulate(_unbroadcast(-g, b.data.shape))

    return Tensor._make(out_data, (a, b), backward)


def neg(a) -> Tensor:
    a = _as_tensor(a)

    def backward(g):
        if a.requires_grad:
            a._accumulate(-g)

    return Tensor._make(-a.data, (a,), backward)


def mul(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    out_data = a.data * b.data

    def backward(g):
        if a.requires_grad:
            a._accumulate(_unbroadcast(g * b.data, a.data.shape))
        if b.requires_grad:
            b._accumulate(_unbroadcast(g * a.data, b.data.shape))

    return Tensor._make(out_data, (a, b), backward)


def log(a) -> Tensor:
    a = _as_tensor(a)
    if np.any(a.data <= 0.0):
        raise NumericalError("log of a non-positive value")
    out_data = np.log(a.data)

    def backward(g):
        if a.requires_grad:
            a._accumulate(g / a.data)

    return Tensor._make(out_data, (a,), backward)


def exp(a) -> Tensor:
    a = _as_tensor(a)
    out_data = np.exp(a.data)

    def backward(g):
        if a.requires_grad:
            a._accumulate(g * out_data)

    return Tensor._make(out_data, (a,), backward)


def sigmoid(a) -> Tensor:
    a = _as_tensor(a)
    x = a.data
    out_data = np.where(x >= 0, 1.0 / (1.0 + np.exp(-np.abs(x))), np.exp(-np.abs(x)) / (1.0 + np.exp(-np.abs(x))))

    def backward(g):
        if a.requires_grad:
            a._accumulate(g * out_data * (1.0 - out_data))

    return Tensor._make(out_data, (a,), backward)


def tanh(a) -> Tensor:
    a = _as_tensor(a)
    out_data = np.tanh(a.data)

    def backward(g):
        if a.requires_grad:
            a._accumulate(g * (1.0 - out_data**2))

    return Tensor._make(out_data, (a,), backward)


_GELU_C = float(np.sqrt(2.0 / np.pi))
_GELU_A = 0.044715


def gelu(a) -> Tensor:
    """tanh-form GELU, smooth everywhere (finite differences stay honest)."""
    a = _as_tensor(a)
    x = a.data
    u = _GELU_C * (x + _GELU_A * x**3)
    t = np.tanh(u)
    out_data = 0.5 * x * (1.0 + t)

    def backward(g):
        if a.requires_grad:
            du = _GELU_C * (1.0 + 3.0 * _GELU_A * x**2)
            a._accumulate(g * (0.5 * (1.0 + t) + 0.5 * x * (1.0 - t**2) * du))

    return Tensor._make(out_data, (a,), backward)


# -- shape ops -------------------------------------------------------------


def reshape(a, shape) -> Tensor:
    a = _as_tensor(a)
    old = a.data.shape

    def backward(g):
        if a.requires_grad:
            a._accumulate(g.reshape(old))

    return Tensor._make(a.data.reshape(shape), (a,), backward)


def transpose(a, axes) -> Tensor:
    a = _as_tensor(a)
    axes = tuple(axes)
    inv = tuple(np.argsort(axes))

    def backward(g):
        if a.requires_grad:
            a._accumulate(g.transpose(inv))

    return Tensor._make(a.data.transpose(axes), (a,), backward)


def concat(tensors: Iterable[Tensor], axis: int = 0) -> Tensor:
    ts = [_as_tensor(t) for t in tensors]
    sizes = [t.data.shape[axis] for t in ts]
    out_data = np.concatenate([t.data for t in ts], axis=axis)

    def backward(g):
        start = 0
        for t, size in zip(ts, sizes):
            sl = [slice(None)] * g.ndim
            sl[axis] = slice(start, start + size)
            if t.requires_grad:
                t._accumulate(g[tuple(sl)])
            start += size

    return Tensor._make(out_data, tuple(ts), backward)


def getitem(a, key) -> Tensor:
    a = _as_tensor(a)

    def backward(g):
        if a.requires_grad:
            full = np.zeros_like(a.data)
            np.add.at(full, key, g)
            a._accumulate(full)

    return Tensor._make(a.data[key], (a,), backward)


def sum_(a, axis=None, keepdims: bool = False) -> Tensor:
    a = _as_tensor(a)
    out_data = a.data.sum(axis=axis, keepdims=keepdims)

    def backward(g):
        if a.requires_grad:
            gg = g
            if not keepdims and axis is not None:
                gg = np.expand_dims(gg, axis)
            a._accumulate(np.broadcast_to(gg, a.data.shape).copy())

    return Tensor._make(out_data, (a,), backward)


def mean(a, axis=None, keepdims: bool = False) -> Tensor:
    a = _as_tensor(a)
    n = a.data.size if axis is None else a.data.shape[axis]
    return mul(sum_(a, axis=axis, keepdims=keepdims), 1.0 / n)


# -- linear algebra ----------------------------------------------------------


def matmul(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    if a.ndim < 2 or b.ndim < 2:
        raise ConfigError("matmul expects tensors with ndim >= 2")
    out_data = a.data @ b.data

    def backward(g):
        if a.requires_grad:
            ga = g @ b.data.swapaxes(-1, -2)
            a._accumulate(_unbroadcast(ga, a.data.shape))
        if b.requires_grad:
            gb = a.data.swapaxes(-1, -2) @ g
            b._accumulate(_unbroadcast(gb, b.data.shape))

    return Tensor._make(out_data, (a, b), backward)


def linear(x: Tensor, w: Tensor, b: Tensor) -> Tensor:
    return add(matmul(x, w), b)


def softmax(a, axis: int = -1) -> Tensor:
    """Stabilized softmax along `axis`; NaN anywhere in the input is an error."""
    a = _as_tensor(a)
    if np.isnan(a.data).any():
        raise NumericalError("softmax received NaN")
    shifted = a.data - a.data.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    out_data = e / e.sum(axis=axis, keepdims=True)

    def backward(g):
        if a.requires_grad:
            dot = (g * out_data).sum(axis=axis, keepdims=True)
            a._accumulate(out_data * (g - dot))

    return Tensor._make(out_data, (a,), backward)


def layer_norm(x, gain, bias, eps: float = 1e-12) -> Tensor:
    """Normalize the last axis to zero mean / unit variance, then scale+shift."""
    x, gain, bias = _as_tensor(x), _as_tensor(gain), _as_tensor(bias)
    mu = x.data.mean(axis=-1, keepdims=True)
    centered = x.data - mu
    var = (centered**2).mean(axis=-1, keepdims=True)
    inv_std = 1.0 / np.sqrt(var + eps)
    xhat = centered * inv_std
    out_data = xhat * gain.data + bias.data

    def backward(g):
        if gain.requires_grad:
            gain._accumulate((g * xhat).reshape(-1, x.data.shape[-1]).sum(axis=0))
        if bias.requires_grad:
            bias._accumulate(g.reshape(-1, x.data.shape[-1]).sum(axis=0))
        if x.requires_grad:
            gx_hat = g * gain.data
            m1 = gx_hat.mean(axis=-1, keepdims=True)
            m2 = (gx_hat * xhat).mean(axis=-1, keepdims=True)
            x._accumulate(inv_std * (gx_hat - m1 - xhat * m2))

    return Tensor._make(out_data, (x, gain, bias), backward)


# -- lookups and scatters ----------------------------------------------------


def embedding(table: Tensor, ids) -> Tensor:
    """Row lookup: out[i] = table[ids[i]]."""
    table = _as_tensor(table)
    idx = np.asarray(ids, dtype=np.intp)

    def backward(g):
        if table.requires_grad:
            full = np.zeros_like(table.data)
            np.add.at(full, idx, g)
            table._accumulate(full)

    return Tensor._make(table.data[idx], (table,), backward)


def take_per_row(x: Tensor, idx) -> Tensor:
    """out[t] = x[t, idx[t]] for a 2-D tensor."""
    x = _as_tensor(x)
    cols = np.asarray(idx, dtype=np.intp)
    rows = np.arange(x.data.shape[0])

    def backward(g):
        if x.requires_grad:
            full = np.zeros_like(x.data)
            np.add.at(full, (rows, cols), g)
            x._accumulate(full)

    return Tensor._make(x.data[rows, cols], (x,), backward)


def scatter_to_vocab(weights: Tensor, ids, width: int) -> Tensor:
    """Spread per-position weights onto a width-sized axis by token id.

    weights (..., L) and ids (L,) produce out (..., width) with
    out[..., ids[i]] += weights[..., i]; duplicate ids accumulate.
    """
    weights = _as_tensor(weights)
    idx = np.asarray(ids, dtype=np.intp)
    out_shape = weights.data.shape[:-1] + (width,)
    out_data = np.zeros(out_shape)
    if weights.data.ndim == 1:
        np.add.at(out_data, idx, weights.data)
    elif weights.data.ndim == 2:
        rows = np.arange(weights.data.shape[0])[:, None]
        np.add.at(out_data, (rows, idx[None, :]), weights.data)
    else:
        raise ConfigError("scatter_to_vocab supports 1-D or 2-D weights")

    def backward(g):
        if weights.requires_grad:
            weights._accumulate(g[..., idx])

    return Tensor._make(out_data, (weights,), backward)


# -- attention ----------------------------------------------------------------


def multi_head_attention(
    q: Tensor,
    k: Tensor,
    v: Tensor,
    wq: Tensor,
    bq: Tensor,
    wk: Tensor,
    bk: Tensor,
    wv: Tensor,
    bv: Tensor,
    wo: Tensor,
    bo: Tensor,
    n_heads: int,
    mask: np.ndarray | None = None,
) -> tuple[Tensor, Tensor]:
    """Scaled dot-product attention over n_heads splits of the model dim.

    q (Tq,d), k/v (Tk,d). `mask` is an additive constant broadcastable to
    (Tq,Tk); hidden positions carry -1e9 so they vanish under softmax.
    Returns the projected output (Tq,d) and the attention weights
    (n_heads,Tq,Tk), which stay in the graph (the copy path trains through
    them).
    """
    d = q.data.shape[-1]
    if d % n_heads != 0:
        raise ConfigError(f"d_model={d} not divisible by n_heads={n_heads}")
    dh = d // n_heads
    tq, tk = q.data.shape[0], k.data.shape[0]

    def split(x: Tensor, t: int) -> Tensor:
        return transpose(reshape(x, (t, n_heads, dh)), (1, 0, 2))

    qh = split(linear(q, wq, bq), tq)  # (H,Tq,dh)
    kh = split(linear(k, wk, bk), tk)  # (H,Tk,dh)
    vh = split(linear(v, wv, bv), tk)  # (H,Tk,dh)

    scores = mul(matmul(qh, transpose(kh, (0, 2, 1))), 1.0 / np.sqrt(dh))
    if mask is not None:
        scores = add(scores, np.asarray(mask, dtype=np.float64))
    attn = softmax(scores, axis=-1)  # (H,Tq,Tk)

    ctx = matmul(attn, vh)  # (H,Tq,dh)
    merged = reshape(transpose(ctx, (1, 0, 2)), (tq, d))
    return linear(merged, wo, bo), attn


def causal_mask(t: int) -> np.ndarray:
    """(t,t) additive mask hiding future positions from each query."""
    return np.triu(np.full((t, t), -1e9), k=1)


# -- gradient bookkeeping ------------------------------------------------------


def zero_grads(params: dict[str, Tensor]) -> None:
    for p in params.values():
        p.grad = None


def grad_map(loss: Tensor, params: dict[str, Tensor]) -> dict[str, np.ndarray]:
    """Gradients of a scalar loss for every named parameter (zeros if unused)."""
    zero_grads(params)
    loss.backward()
    return {
        name: (p.grad.copy() if p.grad is not None else np.zeros_like(p.data))
        for name, p in params.items()
    }
