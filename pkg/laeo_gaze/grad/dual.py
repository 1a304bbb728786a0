"""Forward-mode dual numbers.

A ``DualScalar`` carries a value and a tangent. Values may be Python floats or
numpy arrays of shape ``(B,)``; tangents broadcast against them, so a tangent
of shape ``(k, B)`` pushes ``k`` seed directions through a batch of ``B``
independent evaluations in one pass.

The module-level functions (``sqrt``, ``sin``, ...) accept plain floats,
numpy arrays or duals, so geometry code written against them runs unchanged
on all three.
"""

from __future__ import annotations

from typing import List, Sequence, Union

import numpy as np

Scalar = Union[float, np.ndarray, "DualScalar"]


class DualScalar:
    """Value plus forward-mode tangent."""

    __slots__ = ("value", "derivative")
    # numpy defers binary operators to us instead of building object arrays
    __array_ufunc__ = None

    def __init__(self, value, derivative=0.0):
        self.value = value
        self.derivative = derivative

    def __repr__(self) -> str:
        return f"DualScalar({self.value!r}, {self.derivative!r})"

    # ---------- arithmetic ----------
    @staticmethod
    def _coerce(x) -> "DualScalar":
        return x if isinstance(x, DualScalar) else DualScalar(x, 0.0)

    def __add__(self, other):
        o = DualScalar._coerce(other)
        return DualScalar(self.value + o.value, self.derivative + o.derivative)

    __radd__ = __add__

    def __sub__(self, other):
        o = DualScalar._coerce(other)
        return DualScalar(self.value - o.value, self.derivative - o.derivative)

    def __rsub__(self, other):
        o = DualScalar._coerce(other)
        return DualScalar(o.value - self.value, o.derivative - self.derivative)

    def __mul__(self, other):
        o = DualScalar._coerce(other)
        return DualScalar(
            self.value * o.value,
            self.value * o.derivative + o.value * self.derivative,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = DualScalar._coerce(other)
        return DualScalar(
            self.value / o.value,
            (self.derivative * o.value - self.value * o.derivative) / (o.value * o.value),
        )

    def __rtruediv__(self, other):
        return DualScalar._coerce(other).__truediv__(self)

    def __neg__(self):
        return DualScalar(-self.value, -self.derivative)

    def __pos__(self):
        return self

    def __pow__(self, power):
        if isinstance(power, DualScalar):
            raise TypeError("dual exponents are not supported")
        return DualScalar(
            self.value ** power,
            power * self.value ** (power - 1) * self.derivative,
        )

    def __abs__(self):
        return DualScalar(np.abs(self.value), np.sign(self.value) * self.derivative)

    # comparisons act on the value only
    def __lt__(self, other):
        return self.value < value(other)

    def __le__(self, other):
        return self.value <= value(other)

    def __gt__(self, other):
        return self.value > value(other)

    def __ge__(self, other):
        return self.value >= value(other)


def is_dual(x) -> bool:
    return isinstance(x, DualScalar)


def value(x):
    """Primal part of ``x`` (identity for non-duals)."""
    return x.value if isinstance(x, DualScalar) else x


def derivative(x):
    """Tangent part of ``x`` (zero for non-duals)."""
    return x.derivative if isinstance(x, DualScalar) else 0.0


def _unary(x, f, df):
    if isinstance(x, DualScalar):
        return DualScalar(f(x.value), df(x.value) * x.derivative)
    return f(x)


def sqrt(x):
    """Square root; the tangent at zero is taken as zero instead of inf."""
    if isinstance(x, DualScalar):
        root = np.sqrt(x.value)
        positive = root > 0
        safe = np.where(positive, root, 1.0)
        return DualScalar(root, np.where(positive, x.derivative / (2.0 * safe), 0.0))
    return np.sqrt(x)


def exp(x):
    if isinstance(x, DualScalar):
        e = np.exp(x.value)
        return DualScalar(e, e * x.derivative)
    return np.exp(x)


def log(x):
    return _unary(x, np.log, lambda v: 1.0 / v)


def sin(x):
    return _unary(x, np.sin, np.cos)


def cos(x):
    return _unary(x, np.cos, lambda v: -np.sin(v))


def tanh(x):
    if isinstance(x, DualScalar):
        t = np.tanh(x.value)
        return DualScalar(t, (1.0 - t * t) * x.derivative)
    return np.tanh(x)


def arcsin(x):
    return _unary(x, np.arcsin, lambda v: 1.0 / np.sqrt(1.0 - v * v))


def arctan(x):
    return _unary(x, np.arctan, lambda v: 1.0 / (1.0 + v * v))


def arctan2(y, x):
    if isinstance(y, DualScalar) or isinstance(x, DualScalar):
        yd, xd = DualScalar._coerce(y), DualScalar._coerce(x)
        denom = xd.value * xd.value + yd.value * yd.value
        return DualScalar(
            np.arctan2(yd.value, xd.value),
            (xd.value * yd.derivative - yd.value * xd.derivative) / denom,
        )
    return np.arctan2(y, x)


def absolute(x):
    return abs(x) if isinstance(x, DualScalar) else np.abs(x)


def where(condition, a, b):
    """Elementwise select that keeps tangents aligned with the chosen branch."""
    if isinstance(a, DualScalar) or isinstance(b, DualScalar):
        ad, bd = DualScalar._coerce(a), DualScalar._coerce(b)
        return DualScalar(
            np.where(condition, ad.value, bd.value),
            np.where(condition, ad.derivative, bd.derivative),
        )
    return np.where(condition, a, b)


def seed_parameters(values: Sequence) -> List[DualScalar]:
    """Seed one tangent direction per parameter.

    Each entry of ``values`` is a float or a ``(B,)`` array. The returned duals
    carry tangents of shape ``(k,)`` or ``(k, B)`` where ``k = len(values)``;
    row ``j`` of every downstream tangent is the derivative with respect to
    parameter ``j``.
    """
    k = len(values)
    seeded = []
    for j, v in enumerate(values):
        v = np.asarray(v, dtype=float)
        tangent = np.zeros((k,) + v.shape)
        tangent[j] = 1.0
        seeded.append(DualScalar(v if v.ndim else float(v), tangent))
    return seeded
