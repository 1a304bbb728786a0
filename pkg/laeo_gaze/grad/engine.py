"""Exact gradients by forward-mode evaluation, and a finite-difference verifier."""

from typing import Callable, Sequence, Tuple

import numpy as np

from .dual import DualScalar, derivative, value
from ..errors import NumericalError


def grad(loss_eval: Callable[[Sequence[DualScalar]], DualScalar], params) -> np.ndarray:
    """
    Gradient of a scalar function by forward-mode dual evaluation.

    The function is evaluated once per parameter with a unit tangent on that
    parameter and zero tangents elsewhere.

    Args:
        loss_eval: Function of a sequence of scalars returning a scalar
        params: Point at which to differentiate

    Returns:
        Gradient vector with the shape of ``params``
    """
    params = np.asarray(params, dtype=float).ravel()
    out = np.empty_like(params)
    for j in range(params.size):
        seeded = [DualScalar(float(p), 1.0 if k == j else 0.0) for k, p in enumerate(params)]
        result = loss_eval(seeded)
        if not np.all(np.isfinite(value(result))):
            raise NumericalError(f"non-finite loss value {value(result)!r}")
        out[j] = derivative(result)
    if not np.all(np.isfinite(out)):
        raise NumericalError("non-finite gradient")
    return out


def fd_check(
    loss_eval: Callable[[np.ndarray], Tuple[float, np.ndarray]],
    params,
    step: float = 1e-6,
) -> float:
    """
    Compare an analytic gradient with central finite differences.

    Args:
        loss_eval: Maps a parameter vector to ``(value, analytic gradient)``
        params: Point at which to compare
        step: Central-difference step ``h``

    Returns:
        max over coordinates of |analytic - fd| / max(‖analytic‖∞, 1e-8);
        every entry is measured against the gradient's largest entry
    """
    params = np.asarray(params, dtype=float).ravel()
    _, analytic = loss_eval(params)
    analytic = np.asarray(analytic, dtype=float).ravel()
    scale = max(float(np.max(np.abs(analytic), initial=0.0)), 1e-8)

    worst = 0.0
    for j in range(params.size):
        forward = params.copy()
        backward = params.copy()
        forward[j] += step
        backward[j] -= step
        f_plus, _ = loss_eval(forward)
        f_minus, _ = loss_eval(backward)
        fd = (f_plus - f_minus) / (2.0 * step)
        worst = max(worst, abs(analytic[j] - fd) / scale)
    return float(worst)
