from dataclasses import replace

import numpy as np
import pytest

from laeo_gaze.config import GEOMETRY_CONFIG
from laeo_gaze.geometry import Vec3, camera_to_normalized, vector_to_angles
from laeo_gaze.losses import (
    GazePrediction,
    PairGeometry,
    camera_gaze,
    geom2d_loss,
    geom3d_cosine_variant,
    geom3d_loss,
)
from laeo_gaze.scene import derived_gaze_vectors
from laeo_gaze.scene.models import SubjectObservation

from .conftest import truth_predictions


class TestZeroAtTruth:

    @pytest.mark.parametrize("loss", [geom2d_loss, geom3d_loss, geom3d_cosine_variant])
    def test_value_and_gradient_vanish(self, loss, geometry, truth):
        out = loss(geometry, *truth)
        assert out.value == pytest.approx(0.0, abs=1e-9)
        assert out.gradient_norm() < 1e-6
        assert not out.excluded

    def test_single_pair_returns_scalars(self, clean_pair):
        pred_a, pred_b = truth_predictions([clean_pair])
        out = geom3d_loss(clean_pair, pred_a.take(0), pred_b.take(0))
        assert isinstance(out.grads["a.pitch"], float)


class TestAwayFromTruth:

    def test_losses_grow_with_perturbation(self, geometry, truth):
        pred_a, pred_b = truth
        for loss in (geom2d_loss, geom3d_loss, geom3d_cosine_variant):
            small = loss(geometry, GazePrediction.of(pred_a.pitch + 0.05, pred_a.yaw, pred_a.log_sigma), pred_b)
            large = loss(geometry, GazePrediction.of(pred_a.pitch + 0.3, pred_a.yaw, pred_a.log_sigma), pred_b)
            assert small.value > 0.0
            if loss is not geom2d_loss:
                assert large.value > small.value

    def test_geom3d_keeps_a_gradient_for_backward_rays(self, geometry, truth):
        pred_a, pred_b = truth
        backward = GazePrediction.of(-pred_a.pitch + 0.2, pred_a.yaw + np.pi, pred_a.log_sigma)
        out = geom3d_loss(geometry, backward, pred_b)
        assert out.value > 0.75
        assert np.all(np.isfinite(out.grads["a.yaw"]))
        assert out.gradient_norm() > 0.0


def _sweep_a(pair, n=4001):
    """geom3d per pair while A's gaze turns from B to straight away from B; B stays at truth."""
    a = pair.subject_a.cyclopean_3d.to_array()
    b = pair.subject_b.cyclopean_3d.to_array()
    u = (b - a) / np.linalg.norm(b - a)
    e = np.cross(u, [0.0, 1.0, 0.0])
    e /= np.linalg.norm(e)
    theta = np.linspace(0.0, np.pi, n)
    gaze = np.cos(theta)[:, None] * u + np.sin(theta)[:, None] * e
    angles = camera_to_normalized(vector_to_angles(Vec3.from_array(gaze)), pair.subject_a.cyclopean_3d)
    pairs = [pair] * n
    _, pred_b = truth_predictions(pairs)
    pred_a = GazePrediction.of(np.asarray(angles.pitch), np.asarray(angles.yaw), np.zeros(n))
    return theta, geom3d_loss(PairGeometry.from_pairs(pairs), pred_a, pred_b).per_item


class TestPlaneCeiling:

    def test_continuous_through_the_parallel_ray(self, clean_pair):
        _, values = _sweep_a(clean_pair)
        assert np.max(np.abs(np.diff(values))) < 0.01

    def test_grows_with_the_angle_off_target(self, clean_pair):
        _, values = _sweep_a(clean_pair)
        assert np.all(np.diff(values) >= -1e-12)
        assert values[0] == pytest.approx(0.0, abs=1e-9)

    def test_bounded_by_the_ceiling(self, clean_pair):
        _, values = _sweep_a(clean_pair)
        # B sits at its label, so each pair value is half of A's term
        cap = (GEOMETRY_CONFIG["ray_ceiling_offset"] + 2.0) / 2.0
        assert np.all(values <= cap + 1e-9)
        assert values[-1] == pytest.approx(cap, rel=1e-5)

    def test_parallel_ray_scores_the_ceiling(self, clean_pair):
        a = clean_pair.subject_a.cyclopean_3d.to_array()
        b = clean_pair.subject_b.cyclopean_3d.to_array()
        normal = clean_pair.subject_b.heading.to_array()
        w = b - a
        gaze = w - normal * normal.dot(w)
        gaze /= np.linalg.norm(gaze)
        angles = camera_to_normalized(vector_to_angles(Vec3.from_array(gaze)), clean_pair.subject_a.cyclopean_3d)
        _, pred_b = truth_predictions([clean_pair])
        pred_a = GazePrediction.of(float(angles.pitch), float(angles.yaw), 0.0)
        out = geom3d_loss(clean_pair, pred_a, pred_b.take(0))
        sep = np.linalg.norm(w)
        perp = np.linalg.norm(np.cross(w, gaze))
        expected = (GEOMETRY_CONFIG["ray_ceiling_offset"] + perp / sep) / 2.0
        assert out.value == pytest.approx(expected, rel=1e-5)


class TestExclusion:

    def test_gaze_along_projection_ray_is_excluded_from_geom2d(self, geometry, truth):
        pred_a, pred_b = truth
        # zero normalized angles look straight back at the camera
        pitch = pred_a.pitch.copy()
        yaw = pred_a.yaw.copy()
        pitch[0], yaw[0] = 0.0, 0.0
        out = geom2d_loss(geometry, GazePrediction.of(pitch, yaw, pred_a.log_sigma), pred_b)
        assert out.excluded == {"geom2d": 1}
        assert out.per_item[0] == 0.0
        assert out.grads["a.pitch"][0] == 0.0
        assert out.value == pytest.approx(0.0, abs=1e-9)


class TestCameraGaze:

    def test_normalized_prediction_maps_to_camera_frame(self, clean_pairs, geometry):
        pred_a, _ = truth_predictions(clean_pairs)
        gaze = camera_gaze(pred_a, geometry.frame_a).to_array()
        expected = np.array([derived_gaze_vectors(p)[0].to_array() for p in clean_pairs])
        np.testing.assert_allclose(gaze, expected, atol=1e-12)


def _scaled(pair, k_a, k_b):
    """The pair with each subject pushed along its camera ray by a depth factor."""
    def push(s, k):
        return SubjectObservation.from_eyes(
            s.left_eye_2d, s.right_eye_2d, s.depth_mm * k, pair.camera, s.heading, s.head_box, s.body_box,
        )
    return replace(pair, subject_a=push(pair.subject_a, k_a), subject_b=push(pair.subject_b, k_b))


class TestDepthScaling:

    def test_geom2d_ignores_a_shared_depth_scale(self, clean_pairs, truth):
        pred_a, pred_b = truth
        off_a = GazePrediction.of(pred_a.pitch + 0.1, pred_a.yaw - 0.2, pred_a.log_sigma)
        off_b = GazePrediction.of(pred_b.pitch - 0.15, pred_b.yaw + 0.1, pred_b.log_sigma)
        base = geom2d_loss(PairGeometry.from_pairs(clean_pairs), off_a, off_b)
        for k in (0.5, 2.5):
            scaled = [_scaled(p, k, k) for p in clean_pairs]
            out = geom2d_loss(PairGeometry.from_pairs(scaled), off_a, off_b)
            np.testing.assert_allclose(out.per_item, base.per_item, rtol=1e-9, atol=1e-12)

    def test_geom3d_sees_unequal_depth_scales(self, clean_pairs, truth):
        scaled = [_scaled(p, 1.0, 1.3) for p in clean_pairs]
        at_labels = geom3d_loss(PairGeometry.from_pairs(clean_pairs), *truth)
        moved = geom3d_loss(PairGeometry.from_pairs(scaled), *truth)
        assert at_labels.value == pytest.approx(0.0, abs=1e-9)
        assert np.all(np.asarray(moved.per_item) > 1e-6)
