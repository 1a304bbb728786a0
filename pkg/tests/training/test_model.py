import numpy as np
import pytest

from laeo_gaze.errors import InvalidInputError
from laeo_gaze.geometry import GazeAngles, angles_to_vector
from laeo_gaze.training import backward, forward, init_predictor, load_params, mirror_features, save_params
from laeo_gaze.training.features import FEATURE_WIDTH
from laeo_gaze.training.model import MLP_KEYS, forward_with_cache


def _linear_loss(params, inputs, coef, mirrored=False):
    pred = forward(params, inputs, mirrored)
    return float(np.sum(coef[0] * pred.pitch + coef[1] * pred.yaw + coef[2] * pred.log_sigma))


class TestInit:

    def test_direct_starts_off_the_projection_ray(self):
        params = init_predictor("direct", seed=0, n_slots=200)
        assert params.size == 600
        gaze = angles_to_vector(GazeAngles(params.arrays["pitch"], params.arrays["yaw"]))
        off_ray = np.degrees(np.arccos(-gaze.z))
        assert np.all((off_ray >= 15.0 - 1e-9) & (off_ray <= 45.0 + 1e-9))
        np.testing.assert_array_equal(params.arrays["log_sigma"], 0.0)

    def test_direct_is_deterministic(self):
        a = init_predictor("direct", seed=5, n_slots=4)
        b = init_predictor("direct", seed=5, n_slots=4)
        c = init_predictor("direct", seed=6, n_slots=4)
        np.testing.assert_array_equal(a.arrays["yaw"], b.arrays["yaw"])
        assert not np.array_equal(a.arrays["yaw"], c.arrays["yaw"])

    def test_direct_needs_slots(self):
        with pytest.raises(InvalidInputError):
            init_predictor("direct", seed=0)

    def test_mlp_is_deterministic(self):
        a = init_predictor("mlp", seed=3, hidden_width=8)
        b = init_predictor("mlp", seed=3, hidden_width=8)
        assert list(a.arrays) == list(MLP_KEYS)
        for k in MLP_KEYS:
            np.testing.assert_array_equal(a.arrays[k], b.arrays[k])
        assert a.arrays["W1"].shape == (FEATURE_WIDTH, 8)
        assert a.arrays["W3"].shape == (8, 3)

    def test_unknown_mode(self):
        with pytest.raises(InvalidInputError):
            init_predictor("cnn", seed=0)


class TestForward:

    def test_direct_mirror_flips_yaw(self):
        params = init_predictor("direct", seed=0, n_slots=3)
        params.arrays["pitch"][:] = [0.1, 0.2, 0.3]
        params.arrays["yaw"][:] = [0.4, 0.5, 0.6]
        pred = forward(params, np.array([2, 0]), mirrored=True)
        np.testing.assert_array_equal(pred.pitch, [0.3, 0.1])
        np.testing.assert_array_equal(pred.yaw, [-0.6, -0.4])

    def test_mlp_mirror_uses_flipped_features(self, rng):
        params = init_predictor("mlp", seed=1, hidden_width=6, init_std=0.5)
        x = rng.normal(size=(4, FEATURE_WIDTH))
        a = forward(params, x, mirrored=True)
        b = forward(params, mirror_features(x))
        np.testing.assert_allclose(a.yaw, b.yaw)
        np.testing.assert_allclose(a.log_sigma, b.log_sigma)

    def test_mlp_pitch_is_bounded(self, rng):
        params = init_predictor("mlp", seed=1, hidden_width=6, init_std=5.0)
        pred = forward(params, 10.0 * rng.normal(size=(50, FEATURE_WIDTH)))
        assert np.all(np.abs(pred.pitch) <= np.pi / 2)

    @pytest.mark.parametrize("inputs", [np.array([0.5]), np.array([3]), np.array([-1])])
    def test_direct_rejects_bad_slots(self, inputs):
        params = init_predictor("direct", seed=0, n_slots=3)
        with pytest.raises(InvalidInputError):
            forward(params, inputs)

    def test_mlp_rejects_wrong_width(self):
        params = init_predictor("mlp", seed=0, hidden_width=4)
        with pytest.raises(InvalidInputError):
            forward(params, np.zeros((2, FEATURE_WIDTH + 1)))


class TestBackward:

    @pytest.mark.parametrize("mirrored", [False, True])
    def test_mlp_matches_finite_differences(self, rng, mirrored):
        params = init_predictor("mlp", seed=2, hidden_width=5, init_std=0.5)
        x = rng.normal(size=(4, FEATURE_WIDTH))
        coef = rng.normal(size=(3, 4))
        _, cache = forward_with_cache(params, x, mirrored)
        grads = backward(params, cache, {"pitch": coef[0], "yaw": coef[1], "log_sigma": coef[2]})

        h = 1e-6
        for k in MLP_KEYS:
            flat = params.arrays[k].reshape(-1)
            for j in range(0, flat.size, max(1, flat.size // 6)):
                saved = flat[j]
                flat[j] = saved + h
                plus = _linear_loss(params, x, coef, mirrored)
                flat[j] = saved - h
                minus = _linear_loss(params, x, coef, mirrored)
                flat[j] = saved
                fd = (plus - minus) / (2 * h)
                assert grads[k].reshape(-1)[j] == pytest.approx(fd, rel=1e-5, abs=1e-8)

    def test_direct_accumulates_repeated_slots(self):
        params = init_predictor("direct", seed=0, n_slots=3)
        _, cache = forward_with_cache(params, np.array([1, 1, 2]), mirrored=True)
        grads = backward(params, cache, {"pitch": np.array([1.0, 2.0, 3.0]), "yaw": np.array([1.0, 1.0, 1.0])})
        np.testing.assert_array_equal(grads["pitch"], [0.0, 3.0, 3.0])
        np.testing.assert_array_equal(grads["yaw"], [0.0, -2.0, -1.0])
        np.testing.assert_array_equal(grads["log_sigma"], [0.0, 0.0, 0.0])


class TestPersistence:

    def test_roundtrip(self, tmp_path):
        params = init_predictor("mlp", seed=4, hidden_width=3)
        path = tmp_path / "run" / "params.json"
        save_params(params, str(path))
        loaded = load_params(str(path))
        assert loaded.mode == "mlp"
        for k in MLP_KEYS:
            np.testing.assert_array_equal(loaded.arrays[k], params.arrays[k])

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_params(str(tmp_path / "absent.json"))

    def test_missing_arrays(self, tmp_path):
        path = tmp_path / "params.json"
        path.write_text('{"mode": "direct", "arrays": {"pitch": [0.0]}}')
        with pytest.raises(InvalidInputError):
            load_params(str(path))
