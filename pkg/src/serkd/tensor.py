"""Dense float64 tensors with reverse-mode differentiation.

Values are stored row-major in numpy float64 arrays. Operations build an
implicit graph of primitive nodes; ``backward`` extracts the topologically
ordered :class:`ComputationRecord` reachable from a scalar root and walks it
once in reverse, accumulating gradients into shared inputs.

Broadcasting is deliberately restricted: binary elementwise ops accept equal
shapes or a scalar (python number / rank-0 tensor) paired with a tensor.
Anything wider goes through the explicit :func:`broadcast_to`.

Every tensor's storage is registered with a module-level allocation tracker
so callers can measure peak auxiliary memory of a computation (used by the
tiled loss kernels and the benchmark CLI).
"""

from __future__ import annotations

import math
import weakref
from contextlib import contextmanager

import numpy as np

from .errors import ContractError, NumericalError, ShapeError

# Floor applied to denominators and to the arguments of log/sqrt guards.
EPS = 1e-12


# ---------------------------------------------------------------------------
# allocation tracking


class _PeakWindow:
    __slots__ = ("baseline", "peak")

    def __init__(self, baseline):
        self.baseline = baseline
        self.peak = 0


class _AllocationTracker:
    """Counts live bytes owned by tensor storage.

    Views (reshape/transpose/slice/detach) resolve to their base buffer and
    are not double counted. Buffers deregister when garbage collected, which
    under CPython refcounting happens as soon as the last tensor referencing
    them is dropped.
    """

    def __init__(self):
        self.live_bytes = 0
        self._owned = set()
        self._windows = []

    def register(self, arr):
        base = arr
        while base.base is not None:
            base = base.base
        key = id(base)
        if key in self._owned or base.nbytes == 0:
            return
        self._owned.add(key)
        nbytes = base.nbytes
        self.live_bytes += nbytes
        for w in self._windows:
            w.peak = max(w.peak, self.live_bytes - w.baseline)
        weakref.finalize(base, self._release, key, nbytes)

    def _release(self, key, nbytes):
        if key in self._owned:
            self._owned.discard(key)
            self.live_bytes -= nbytes

    @contextmanager
    def window(self):
        w = _PeakWindow(self.live_bytes)
        self._windows.append(w)
        try:
            yield w
        finally:
            self._windows.remove(w)


allocation_tracker = _AllocationTracker()


def measure_peak_bytes(fn):
    """Run ``fn()`` and return ``(result, peak auxiliary bytes)``.

    Peak is measured relative to the bytes live when the call starts, so
    pre-existing inputs do not count against the computation.
    """
    with allocation_tracker.window() as w:
        result = fn()
    return result, w.peak


# ---------------------------------------------------------------------------
# grad mode

_grad_enabled = [True]


def grad_enabled():
    return _grad_enabled[0]


@contextmanager
def no_grad():
    """Disable graph construction inside the block."""
    _grad_enabled.append(False)
    try:
        yield
    finally:
        _grad_enabled.pop()


@contextmanager
def enable_grad():
    _grad_enabled.append(True)
    try:
        yield
    finally:
        _grad_enabled.pop()


# ---------------------------------------------------------------------------
# core types


class Node:
    """One recorded primitive: inputs, and the rule mapping the output
    gradient to per-input gradients (``None`` where undefined/blocked)."""

    __slots__ = ("op", "inputs", "backward")

    def __init__(self, op, inputs, backward):
        self.op = op
        self.inputs = inputs
        self.backward = backward


class Tensor:
    __slots__ = ("data", "requires_grad", "grad", "node", "__weakref__")

    def __init__(self, data, requires_grad=False, _node=None):
        arr = np.asarray(data, dtype=np.float64)
        allocation_tracker.register(arr)
        self.data = arr
        self.requires_grad = bool(requires_grad)
        self.grad = None
        self.node = _node

    # -- metadata ----------------------------------------------------------

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def size(self):
        return self.data.size

    def item(self):
        if self.data.size != 1:
            raise ContractError(f"item() needs a single-element tensor, got shape {self.shape}")
        return float(self.data.reshape(()))

    def numpy(self):
        """Copy of the values as a plain ndarray."""
        return self.data.copy()

    def zero_grad(self):
        self.grad = None

    def __repr__(self):
        return f"Tensor(shape={tuple(self.shape)}, requires_grad={self.requires_grad})"

    # -- operators ---------------------------------------------------------

    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(_as_tensor(other), self)

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return div(self, other)

    def __rtruediv__(self, other):
        return div(_as_tensor(other), self)

    def __neg__(self):
        return mul(self, -1.0)

    def __matmul__(self, other):
        return matmul(self, other)

    def __pow__(self, p):
        return power(self, p)

    def backward(self):
        backward(self)

    def detach(self):
        return detach(self)

    def reshape(self, shape):
        return reshape(self, shape)

    def transpose(self, axes=None):
        return transpose(self, axes)

    def sum(self, axis=None, keepdims=False):
        return sum_(self, axis=axis, keepdims=keepdims)

    def mean(self, axis=None, keepdims=False):
        return mean(self, axis=axis, keepdims=keepdims)


def _as_tensor(x):
    if isinstance(x, Tensor):
        return x
    return Tensor(np.asarray(x, dtype=np.float64))


def _is_scalar(t):
    return t.data.ndim == 0 or t.data.size == 1


def _result(data, op, inputs, backward):
    requires = _grad_enabled[0] and any(t.requires_grad for t in inputs)
    node = Node(op, tuple(inputs), backward) if requires else None
    return Tensor(data, requires_grad=requires, _node=node)


# ---------------------------------------------------------------------------
# backward engine


class ComputationRecord:
    """Topologically ordered op-producing tensors reachable from a root."""

    def __init__(self, ordered):
        self.ordered = ordered

    @classmethod
    def from_root(cls, root):
        order = []
        seen = set()
        stack = [(root, False)]
        while stack:
            t, expanded = stack.pop()
            if expanded:
                order.append(t)
                continue
            if t.node is None or id(t) in seen:
                continue
            seen.add(id(t))
            stack.append((t, True))
            for inp in t.node.inputs:
                if inp.node is not None and id(inp) not in seen:
                    stack.append((inp, False))
        return cls(order)


def _accumulate_leaf(t, g):
    if t.grad is None:
        t.grad = np.array(g, dtype=np.float64)
    else:
        t.grad = t.grad + g


def _run_backward(root, seed):
    if root.node is None:
        if root.requires_grad:
            _accumulate_leaf(root, seed)
        return
    record = ComputationRecord.from_root(root)
    pending = {id(root): np.asarray(seed, dtype=np.float64)}
    for t in reversed(record.ordered):
        g = pending.pop(id(t), None)
        if g is None:
            continue
        input_grads = t.node.backward(g)
        for inp, ig in zip(t.node.inputs, input_grads):
            if ig is None or not inp.requires_grad:
                continue
            if inp.node is None:
                _accumulate_leaf(inp, ig)
            elif id(inp) in pending:
                pending[id(inp)] = pending[id(inp)] + ig
            else:
                pending[id(inp)] = ig


def backward(root):
    """Populate ``.grad`` on every requires-grad leaf reachable from a
    scalar root. Raises :class:`ContractError` on non-scalar roots."""
    if root.data.size != 1:
        raise ContractError(f"backward requires a scalar root, got shape {root.shape}")
    _run_backward(root, np.ones_like(root.data))


# ---------------------------------------------------------------------------
# elementwise binary primitives


def _binary_shapes(op, a, b):
    if a.shape == b.shape:
        return "same"
    if _is_scalar(a) or _is_scalar(b):
        return "scalar"
    raise ShapeError(f"{op}: incompatible shapes {a.shape} and {b.shape}")


def _reduce_scalar_grad(g, operand):
    # gradient of a scalar operand in a scalar-with-tensor op
    return np.asarray(g).sum().reshape(operand.shape)


def add(a, b):
    a, b = _as_tensor(a), _as_tensor(b)
    kind = _binary_shapes("add", a, b)
    out = a.data + b.data

    def bwd(g):
        ga = _reduce_scalar_grad(g, a) if kind == "scalar" and _is_scalar(a) else g
        gb = _reduce_scalar_grad(g, b) if kind == "scalar" and _is_scalar(b) else g
        return ga, gb

    return _result(out, "add", (a, b), bwd)


def sub(a, b):
    a, b = _as_tensor(a), _as_tensor(b)
    kind = _binary_shapes("sub", a, b)
    out = a.data - b.data

    def bwd(g):
        ga = _reduce_scalar_grad(g, a) if kind == "scalar" and _is_scalar(a) else g
        gb = -g
        if kind == "scalar" and _is_scalar(b):
            gb = _reduce_scalar_grad(gb, b)
        return ga, gb

    return _result(out, "sub", (a, b), bwd)


def mul(a, b):
    a, b = _as_tensor(a), _as_tensor(b)
    _binary_shapes("mul", a, b)
    out = a.data * b.data

    def bwd(g):
        ga = g * b.data
        gb = g * a.data
        if ga.shape != a.data.shape:
            ga = _reduce_scalar_grad(ga, a)
        if gb.shape != b.data.shape:
            gb = _reduce_scalar_grad(gb, b)
        return ga, gb

    return _result(out, "mul", (a, b), bwd)


def div(a, b):
    a, b = _as_tensor(a), _as_tensor(b)
    _binary_shapes("div", a, b)
    out = a.data / b.data

    def bwd(g):
        ga = g / b.data
        gb = -g * a.data / (b.data * b.data)
        if ga.shape != a.data.shape:
            ga = _reduce_scalar_grad(ga, a)
        if gb.shape != b.data.shape:
            gb = _reduce_scalar_grad(gb, b)
        return ga, gb

    return _result(out, "div", (a, b), bwd)


# ---------------------------------------------------------------------------
# matmul / layout


def matmul(a, b):
    a, b = _as_tensor(a), _as_tensor(b)
    if a.ndim < 2 or b.ndim < 2:
        raise ShapeError(f"matmul: operands must be at least rank 2, got {a.shape} and {b.shape}")
    if a.shape[-1] != b.shape[-2]:
        raise ShapeError(f"matmul: inner dimensions differ, {a.shape} vs {b.shape}")
    if a.ndim > 2 and b.ndim > 2 and a.shape[:-2] != b.shape[:-2]:
        raise ShapeError(f"matmul: batch dimensions differ, {a.shape} vs {b.shape}")
    out = np.matmul(a.data, b.data)

    def bwd(g):
        ga = np.matmul(g, np.swapaxes(b.data, -1, -2))
        gb = np.matmul(np.swapaxes(a.data, -1, -2), g)
        ga = _sum_to_shape(ga, a.data.shape)
        gb = _sum_to_shape(gb, b.data.shape)
        return ga, gb

    return _result(out, "matmul", (a, b), bwd)


def _sum_to_shape(g, shape):
    # collapse leading batch axes a rank-2 operand was broadcast over
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    return g


def transpose(a, axes=None):
    a = _as_tensor(a)
    out = np.transpose(a.data, axes)
    if axes is None:
        inv = None
    else:
        inv = np.argsort(axes)

    def bwd(g):
        return (np.transpose(g, inv),)

    return _result(out, "transpose", (a,), bwd)


def reshape(a, shape):
    a = _as_tensor(a)
    out = np.reshape(a.data, shape)

    def bwd(g):
        return (np.reshape(g, a.data.shape),)

    return _result(out, "reshape", (a,), bwd)


def broadcast_to(a, shape):
    """Explicit broadcast; the only sanctioned way to widen a tensor."""
    a = _as_tensor(a)
    try:
        out = np.broadcast_to(a.data, shape)
    except ValueError as exc:
        raise ShapeError(f"broadcast_to: cannot broadcast {a.shape} to {tuple(shape)}") from exc

    src = a.data.shape
    extra = len(shape) - len(src)

    def bwd(g):
        g = g.sum(axis=tuple(range(extra))) if extra else g
        summed_axes = tuple(i for i, d in enumerate(src) if d == 1 and shape[extra + i] != 1)
        if summed_axes:
            g = g.sum(axis=summed_axes, keepdims=True)
        return (g.reshape(src),)

    return _result(out, "broadcast_to", (a,), bwd)


def slice_axis(a, axis, start, stop):
    a = _as_tensor(a)
    if not 0 <= axis < a.ndim:
        raise ShapeError(f"slice_axis: axis {axis} out of range for shape {a.shape}")
    index = tuple(slice(None) if i != axis else slice(start, stop) for i in range(a.ndim))
    out = a.data[index]

    def bwd(g):
        full = np.zeros_like(a.data)
        full[index] = g
        return (full,)

    return _result(out, "slice_axis", (a,), bwd)


def gather(a, axis, indices):
    """Select whole slices along ``axis`` by integer index (numpy take)."""
    a = _as_tensor(a)
    idx = np.asarray(indices, dtype=np.int64)
    if idx.ndim != 1:
        raise ContractError(f"gather: indices must be 1-D, got shape {idx.shape}")
    if idx.size and (idx.min() < 0 or idx.max() >= a.shape[axis]):
        raise ContractError(f"gather: index out of range for axis {axis} of shape {a.shape}")
    out = np.take(a.data, idx, axis=axis)

    def bwd(g):
        full = np.zeros_like(a.data)
        key = tuple(slice(None) if i != axis else idx for i in range(a.ndim))
        np.add.at(full, key, g)
        return (full,)

    return _result(out, "gather", (a,), bwd)


def concat(tensors, axis=0):
    tensors = [_as_tensor(t) for t in tensors]
    out = np.concatenate([t.data for t in tensors], axis=axis)
    sizes = [t.shape[axis] for t in tensors]
    offsets = np.cumsum([0] + sizes)

    def bwd(g):
        grads = []
        for i, t in enumerate(tensors):
            index = tuple(
                slice(None) if d != axis else slice(offsets[i], offsets[i + 1])
                for d in range(t.ndim)
            )
            grads.append(g[index])
        return tuple(grads)

    return _result(out, "concat", tuple(tensors), bwd)


# ---------------------------------------------------------------------------
# elementwise unary primitives


def exp(a):
    a = _as_tensor(a)
    out = np.exp(a.data)

    def bwd(g):
        return (g * out,)

    return _result(out, "exp", (a,), bwd)


def log(a, eps=EPS):
    a = _as_tensor(a)
    floored = np.maximum(a.data, eps)
    out = np.log(floored)
    mask = a.data >= eps

    def bwd(g):
        return (g * mask / floored,)

    return _result(out, "log", (a,), bwd)


def sqrt(a, eps=EPS):
    a = _as_tensor(a)
    floored = np.maximum(a.data, eps)
    out = np.sqrt(floored)
    mask = a.data >= eps

    def bwd(g):
        return (g * mask / (2.0 * out),)

    return _result(out, "sqrt", (a,), bwd)


def power(a, p):
    a = _as_tensor(a)
    p = float(p)
    out = a.data**p

    def bwd(g):
        return (g * p * a.data ** (p - 1.0),)

    return _result(out, "power", (a,), bwd)


def clamp_min(a, floor):
    a = _as_tensor(a)
    floor = float(floor)
    out = np.maximum(a.data, floor)
    mask = a.data >= floor

    def bwd(g):
        return (g * mask,)

    return _result(out, "clamp_min", (a,), bwd)


def clamp_max(a, ceil):
    a = _as_tensor(a)
    ceil = float(ceil)
    out = np.minimum(a.data, ceil)
    mask = a.data <= ceil

    def bwd(g):
        return (g * mask,)

    return _result(out, "clamp_max", (a,), bwd)


def abs_(a):
    a = _as_tensor(a)
    out = np.abs(a.data)
    sign = np.sign(a.data)

    def bwd(g):
        return (g * sign,)

    return _result(out, "abs", (a,), bwd)


def huber(a, b, delta=1.0):
    """Elementwise Huber: quadratic within ``delta`` of zero, linear beyond.

    ``0.5 (a-b)^2`` for ``|a-b| <= delta``, else ``delta |a-b| - delta^2/2``.
    """
    a, b = _as_tensor(a), _as_tensor(b)
    _binary_shapes("huber", a, b)
    delta = float(delta)
    if delta <= 0:
        raise ContractError(f"huber: threshold must be positive, got {delta}")
    d = a.data - b.data
    absd = np.abs(d)
    quad = absd <= delta
    out = np.where(quad, 0.5 * d * d, delta * absd - 0.5 * delta * delta)
    slope = np.where(quad, d, delta * np.sign(d))

    def bwd(g):
        ga = g * slope
        gb = -ga
        if ga.shape != a.data.shape:
            ga = _reduce_scalar_grad(ga, a)
        if gb.shape != b.data.shape:
            gb = _reduce_scalar_grad(gb, b)
        return ga, gb

    return _result(out, "huber", (a, b), bwd)


# ---------------------------------------------------------------------------
# reductions / normalization


def _norm_axis(axis, ndim):
    if axis is None:
        return None
    if isinstance(axis, int):
        axis = (axis,)
    return tuple(a % ndim for a in axis)


def sum_(a, axis=None, keepdims=False):
    a = _as_tensor(a)
    axis = _norm_axis(axis, a.ndim)
    out = a.data.sum(axis=axis, keepdims=keepdims)

    def bwd(g):
        g = np.asarray(g)
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, a.data.shape),)

    return _result(out, "sum", (a,), bwd)


def mean(a, axis=None, keepdims=False):
    a = _as_tensor(a)
    axis = _norm_axis(axis, a.ndim)
    out = a.data.mean(axis=axis, keepdims=keepdims)
    if axis is None:
        count = a.data.size
    else:
        count = int(np.prod([a.shape[i] for i in axis]))

    def bwd(g):
        g = np.asarray(g)
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, a.data.shape) / count,)

    return _result(out, "mean", (a,), bwd)


def softmax(a, axis=-1):
    a = _as_tensor(a)
    shifted = a.data - a.data.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    out = e / e.sum(axis=axis, keepdims=True)

    def bwd(g):
        inner = (g * out).sum(axis=axis, keepdims=True)
        return (out * (g - inner),)

    return _result(out, "softmax", (a,), bwd)


def log_softmax(a, axis=-1):
    a = _as_tensor(a)
    shifted = a.data - a.data.max(axis=axis, keepdims=True)
    lse = np.log(np.exp(shifted).sum(axis=axis, keepdims=True))
    out = shifted - lse
    soft = np.exp(out)

    def bwd(g):
        return (g - soft * g.sum(axis=axis, keepdims=True),)

    return _result(out, "log_softmax", (a,), bwd)


def layer_norm(x, gain, bias, eps=EPS):
    """Normalize over the last axis, then scale and shift per channel."""
    x, gain, bias = _as_tensor(x), _as_tensor(gain), _as_tensor(bias)
    c = x.shape[-1]
    if gain.shape != (c,) or bias.shape != (c,):
        raise ShapeError(
            f"layer_norm: gain/bias must have shape ({c},), got {gain.shape} and {bias.shape}"
        )
    mu = x.data.mean(axis=-1, keepdims=True)
    var = x.data.var(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + eps)
    xhat = (x.data - mu) * inv
    out = xhat * gain.data + bias.data

    def bwd(g):
        ggain = (g * xhat).reshape(-1, c).sum(axis=0)
        gbias = g.reshape(-1, c).sum(axis=0)
        gx_hat = g * gain.data
        gx = inv * (
            gx_hat
            - gx_hat.mean(axis=-1, keepdims=True)
            - xhat * (gx_hat * xhat).mean(axis=-1, keepdims=True)
        )
        return gx, ggain, gbias

    return _result(out, "layer_norm", (x, gain, bias), bwd)


# ---------------------------------------------------------------------------
# 2-D pooling and depthwise convolution (layout B, H, W, C)


def _pool_windows(data, window, stride):
    h, w = window
    sh, sw = stride
    B, H, W, C = data.shape
    if H < h or W < w or (H - h) % sh or (W - w) % sw:
        raise ShapeError(
            f"pool: window {window} with stride {stride} does not tile input {data.shape}"
        )
    win = np.lib.stride_tricks.sliding_window_view(data, (h, w), axis=(1, 2))
    return win[:, ::sh, ::sw]  # (B, Ho, Wo, C, h, w)


def avg_pool2d(a, window, stride=None):
    a = _as_tensor(a)
    if a.ndim != 4:
        raise ShapeError(f"avg_pool2d: expected rank-4 (B,H,W,C), got {a.shape}")
    stride = tuple(stride) if stride is not None else tuple(window)
    win = _pool_windows(a.data, window, stride)
    out = win.mean(axis=(-2, -1))
    h, w = window
    sh, sw = stride
    Ho, Wo = out.shape[1], out.shape[2]

    def bwd(g):
        gx = np.zeros_like(a.data)
        scaled = g / (h * w)
        for p in range(h):
            for q in range(w):
                gx[:, p : p + sh * Ho : sh, q : q + sw * Wo : sw, :] += scaled
        return (gx,)

    return _result(out, "avg_pool2d", (a,), bwd)


def max_pool2d(a, window, stride=None):
    """Max over each window; ties resolved to the lowest flat window index."""
    a = _as_tensor(a)
    if a.ndim != 4:
        raise ShapeError(f"max_pool2d: expected rank-4 (B,H,W,C), got {a.shape}")
    stride = tuple(stride) if stride is not None else tuple(window)
    win = _pool_windows(a.data, window, stride)
    B, Ho, Wo, C = win.shape[:4]
    h, w = window
    sh, sw = stride
    flat = win.reshape(B, Ho, Wo, C, h * w)
    arg = flat.argmax(axis=-1)
    out = np.take_along_axis(flat, arg[..., None], axis=-1)[..., 0]

    def bwd(g):
        gx = np.zeros_like(a.data)
        bi, ii, ji, ci = np.indices((B, Ho, Wo, C))
        rows = ii * sh + arg // w
        cols = ji * sw + arg % w
        np.add.at(gx, (bi, rows, cols, ci), g)
        return (gx,)

    return _result(out, "max_pool2d", (a,), bwd)


def depthwise_conv2d(a, kernel, stride):
    """Per-channel strided convolution: one (h, w) filter per channel."""
    a, kernel = _as_tensor(a), _as_tensor(kernel)
    if a.ndim != 4 or kernel.ndim != 3:
        raise ShapeError(
            f"depthwise_conv2d: expected (B,H,W,C) and (h,w,C), got {a.shape} and {kernel.shape}"
        )
    if kernel.shape[2] != a.shape[3]:
        raise ShapeError(
            f"depthwise_conv2d: channel mismatch, input {a.shape} vs kernel {kernel.shape}"
        )
    h, w, _ = kernel.shape
    stride = tuple(stride)
    sh, sw = stride
    win = _pool_windows(a.data, (h, w), stride)  # (B,Ho,Wo,C,h,w)
    out = np.einsum("bijcpq,pqc->bijc", win, kernel.data)
    Ho, Wo = out.shape[1], out.shape[2]

    def bwd(g):
        gk = np.einsum("bijcpq,bijc->pqc", win, g)
        gx = np.zeros_like(a.data)
        for p in range(h):
            for q in range(w):
                gx[:, p : p + sh * Ho : sh, q : q + sw * Wo : sw, :] += g * kernel.data[p, q]
        return gx, gk

    return _result(out, "depthwise_conv2d", (a, kernel), bwd)


# ---------------------------------------------------------------------------
# graph control


def detach(a):
    """Value-identical tensor cut off from the graph (shares storage)."""
    a = _as_tensor(a)
    return Tensor(a.data, requires_grad=False)


def checkpoint(fn, *inputs):
    """Evaluate ``fn(*inputs)`` without retaining its intermediate graph.

    The forward pass runs detached; the backward rule re-runs ``fn`` to
    rebuild the local graph and routes gradients to ``inputs``. Peak memory
    therefore stays at one invocation's working set instead of the sum over
    all retained intermediates.
    """
    inputs = tuple(_as_tensor(t) for t in inputs)
    with no_grad():
        out = fn(*(detach(t) for t in inputs))
    if not _grad_enabled[0] or not any(t.requires_grad for t in inputs):
        return out

    def bwd(g):
        leaves = [Tensor(t.data, requires_grad=t.requires_grad) for t in inputs]
        with enable_grad():
            replay = fn(*leaves)
        _run_backward(replay, np.asarray(g, dtype=np.float64))
        return tuple(leaf.grad if leaf.requires_grad else None for leaf in leaves)

    return _result(out.data, "checkpoint", inputs, bwd)


# ---------------------------------------------------------------------------
# constructors / checks


def zeros(shape, requires_grad=False):
    return Tensor(np.zeros(shape), requires_grad=requires_grad)


def ones(shape, requires_grad=False):
    return Tensor(np.ones(shape), requires_grad=requires_grad)


def full(shape, value, requires_grad=False):
    return Tensor(np.full(shape, float(value)), requires_grad=requires_grad)


def check_finite(t, what="tensor"):
    data = t.data if isinstance(t, Tensor) else np.asarray(t)
    if not np.all(np.isfinite(data)):
        bad = np.argwhere(~np.isfinite(data))[0]
        raise NumericalError(f"{what} contains a non-finite value at index {tuple(bad)}")
    return t
