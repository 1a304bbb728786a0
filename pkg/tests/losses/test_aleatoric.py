import numpy as np
import pytest

from laeo_gaze.geometry import GazeAngles
from laeo_gaze.losses import GazePrediction, aleatoric_loss, symmetry_loss


class TestAleatoric:

    def test_value(self):
        out = aleatoric_loss(GazePrediction.of(0.1, -0.2, np.log(0.5)), GazeAngles(0.0, 0.0))
        assert out.value == pytest.approx(2.0 * np.log(0.5) + 0.3 / 0.5)

    def test_gradients(self):
        out = aleatoric_loss(GazePrediction.of(0.1, -0.2, np.log(0.5)), GazeAngles(0.0, 0.0))
        assert out.grads["pitch"] == pytest.approx(2.0)
        assert out.grads["yaw"] == pytest.approx(-2.0)
        assert out.grads["log_sigma"] == pytest.approx(2.0 - 0.6)

    def test_batch_gradients_are_per_sample_derivatives_of_the_mean(self):
        pred = GazePrediction.of(np.array([0.1, -0.3]), np.array([0.2, 0.0]), np.array([0.0, 0.0]))
        out = aleatoric_loss(pred, GazeAngles(np.zeros(2), np.zeros(2)))
        assert out.value == pytest.approx((0.3 + 0.3) / 2)
        np.testing.assert_allclose(out.grads["pitch"], [0.5, -0.5])
        np.testing.assert_allclose(out.grads["yaw"], [0.5, 0.0])

    def test_sigma_minimizer_is_the_residual(self):
        # 2 log s + r / s is smallest at s = r / 2
        r = 0.4
        values = [
            aleatoric_loss(GazePrediction.of(r, 0.0, np.log(s)), GazeAngles(0.0, 0.0)).value
            for s in (0.1, 0.2, 0.4)
        ]
        assert values[1] < values[0] and values[1] < values[2]


class TestSymmetry:

    def test_equivariant_predictions_have_zero_residual(self):
        out = symmetry_loss(GazePrediction.of(0.1, 0.2, 0.0), GazePrediction.of(0.1, -0.2, 0.0))
        assert out.value == pytest.approx(0.0)
        assert out.grads["original.yaw"] == 0.0
        assert out.grads["mirrored.pitch"] == 0.0

    def test_asymmetric_predictions(self):
        out = symmetry_loss(GazePrediction.of(0.1, 0.2, 0.0), GazePrediction.of(0.1, 0.2, 0.0))
        # each side is 0.4 away from the other's flipped yaw
        assert out.value == pytest.approx(0.4)
        assert out.grads["mirrored.yaw"] == pytest.approx(0.5)
        assert out.grads["original.yaw"] == pytest.approx(0.5)

    def test_frozen_targets(self):
        target = GazeAngles(0.0, 0.0)
        out = symmetry_loss(GazePrediction.of(0.1, 0.0, 0.0), GazePrediction.of(0.0, 0.0, 0.0), target, target)
        assert out.value == pytest.approx(0.05)
