import warnings

import numpy as np
import pytest

from laeo_gaze.grad import DualScalar, seed_parameters
from laeo_gaze.grad import dual as dm


class TestDualArithmetic:

    def test_product_rule(self):
        x = DualScalar(3.0, 1.0)
        y = x * x + 2.0 * x
        assert y.value == 15.0
        assert y.derivative == 8.0

    def test_quotient_and_power(self):
        x = DualScalar(2.0, 1.0)
        assert (1.0 / x).derivative == pytest.approx(-0.25)
        assert (x ** 3).derivative == pytest.approx(12.0)

    @pytest.mark.parametrize("fn, d", [
        (dm.sin, np.cos),
        (dm.cos, lambda v: -np.sin(v)),
        (dm.exp, np.exp),
        (dm.tanh, lambda v: 1.0 - np.tanh(v) ** 2),
        (dm.sqrt, lambda v: 0.5 / np.sqrt(v)),
        (dm.log, lambda v: 1.0 / v),
        (dm.arcsin, lambda v: 1.0 / np.sqrt(1.0 - v * v)),
    ])
    def test_elementary_functions(self, fn, d):
        v = 0.3
        out = fn(DualScalar(v, 1.0))
        assert out.value == pytest.approx(float(fn(v)))
        assert out.derivative == pytest.approx(float(d(v)))

    def test_arctan2(self):
        y, x = 0.4, -0.7
        dy = dm.arctan2(DualScalar(y, 1.0), x).derivative
        dx = dm.arctan2(y, DualScalar(x, 1.0)).derivative
        assert dy == pytest.approx(x / (x * x + y * y))
        assert dx == pytest.approx(-y / (x * x + y * y))

    def test_plain_inputs_pass_through(self):
        assert dm.sin(0.5) == pytest.approx(np.sin(0.5))
        assert dm.value(2.0) == 2.0
        assert dm.derivative(2.0) == 0.0


class TestSeeding:

    def test_one_tangent_row_per_parameter(self):
        a, b = seed_parameters([np.array([1.0, 2.0]), np.array([3.0, 4.0])])
        out = a * b
        np.testing.assert_allclose(out.derivative[0], [3.0, 4.0])
        np.testing.assert_allclose(out.derivative[1], [1.0, 2.0])

    def test_where_selects_tangents(self):
        a, b = seed_parameters([np.array([1.0, 2.0]), np.array([3.0, 4.0])])
        out = dm.where(np.array([True, False]), a, b)
        np.testing.assert_allclose(out.value, [1.0, 4.0])
        np.testing.assert_allclose(out.derivative, [[1.0, 0.0], [0.0, 1.0]])


class TestSqrtAtZero:

    def test_scalar_tangent_is_finite(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            out = dm.sqrt(DualScalar(0.0, 1.0))
        assert out.value == 0.0
        assert out.derivative == 0.0

    def test_array_zero_entries_only(self):
        (x,) = seed_parameters([np.array([0.0, 4.0])])
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            out = dm.sqrt(x * x)
        assert np.all(np.isfinite(out.derivative))
        np.testing.assert_allclose(out.derivative, [[0.0, 1.0]])
