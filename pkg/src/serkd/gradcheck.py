"""Central-difference verification of analytic gradients."""

from __future__ import annotations

import math

import numpy as np

from .errors import ContractError, NumericalError
from .tensor import Tensor, backward, no_grad

REL_FLOOR = 1e-6


def _eval_scalar(f, x_data, coord=None):
    with no_grad():
        y = f(Tensor(x_data))
    v = float(np.asarray(y.data).reshape(()))
    if not math.isfinite(v):
        where = "" if coord is None else f" while perturbing coordinate {coord}"
        raise NumericalError(f"function returned non-finite value {v}{where}")
    return v


def finite_diff_check(f, x, h=1e-4, coords=None):
    """Max relative error between the analytic gradient of ``f`` at ``x``
    and central differences with step ``h``.

    ``f`` maps a tensor to a scalar tensor. ``coords`` optionally restricts
    the comparison to a subset of flat coordinate indices (useful when a
    full sweep is too slow). The error for coordinate ``i`` is
    ``|g_analytic - g_fd| / max(|g_fd|, 1e-6)``.
    """
    x = x if isinstance(x, Tensor) else Tensor(x)
    leaf = Tensor(x.data.copy(), requires_grad=True)
    y = f(leaf)
    if y.data.size != 1:
        raise ContractError(f"finite_diff_check needs a scalar-valued f, got shape {y.shape}")
    if not math.isfinite(float(y.data.reshape(()))):
        raise NumericalError("function returned a non-finite value at the base point")
    backward(y)
    analytic = np.zeros(x.data.size) if leaf.grad is None else leaf.grad.reshape(-1)

    flat = x.data.copy().reshape(-1)
    if coords is None:
        coords = range(flat.size)
    worst = 0.0
    for i in coords:
        base = flat[i]
        flat[i] = base + h
        f_plus = _eval_scalar(f, flat.reshape(x.data.shape), coord=i)
        flat[i] = base - h
        f_minus = _eval_scalar(f, flat.reshape(x.data.shape), coord=i)
        flat[i] = base
        g_fd = (f_plus - f_minus) / (2.0 * h)
        err = abs(analytic[i] - g_fd) / max(abs(g_fd), REL_FLOOR)
        worst = max(worst, err)
    return worst
