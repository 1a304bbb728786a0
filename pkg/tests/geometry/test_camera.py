import numpy as np
import pytest

from laeo_gaze.errors import BehindCameraError, DegenerateError, InvalidInputError
from laeo_gaze.geometry import (
    CameraIntrinsics,
    Point2D,
    Vec3,
    approximate_intrinsics,
    backproject,
    cyclopean_eye_2d,
    project,
    project_gaze_dir,
)


class TestBackproject:

    def test_formula_anchor(self, camera):
        p = backproject(Point2D(100.0, 50.0), 2000.0, camera)
        assert (p.x, p.y, p.z) == (200.0, 100.0, 2000.0)

    def test_randomized_roundtrip(self, camera, rng):
        n = 10_000
        q = Point2D(rng.uniform(-960, 960, n), rng.uniform(-540, 540, n))
        z = rng.uniform(100.0, 20_000.0, n)
        back = project(backproject(q, z, camera), camera)
        np.testing.assert_allclose(back.x, q.x, rtol=1e-9, atol=1e-9)
        np.testing.assert_allclose(back.y, q.y, rtol=1e-9, atol=1e-9)

        p = Vec3(rng.uniform(-3000, 3000, n), rng.uniform(-2000, 2000, n), rng.uniform(100, 9000, n))
        again = backproject(project(p, camera), p.z, camera)
        np.testing.assert_allclose(again.to_array(), p.to_array(), rtol=1e-9)

    @pytest.mark.parametrize("z", [0.0, -10.0])
    def test_rejects_non_positive_depth(self, camera, z):
        with pytest.raises(BehindCameraError):
            backproject(Point2D(0.0, 0.0), z, camera)


class TestProject:

    def test_behind_camera(self, camera):
        with pytest.raises(BehindCameraError):
            project(Vec3(1.0, 2.0, -5.0), camera)

    def test_principal_axis_maps_to_origin(self, camera):
        q = project(Vec3(0.0, 0.0, 1234.0), camera)
        assert (q.x, q.y) == (0.0, 0.0)


class TestIntrinsics:

    def test_approximation_uses_larger_dimension(self):
        cam = approximate_intrinsics((1920, 1080))
        assert cam.focal_px == 1920.0
        assert cam.principal_point == (960.0, 540.0)

    def test_portrait_image(self):
        assert approximate_intrinsics((720, 1280)).focal_px == 1280.0

    def test_invalid_sizes(self):
        with pytest.raises(InvalidInputError):
            approximate_intrinsics((0, 1080))
        with pytest.raises(InvalidInputError):
            CameraIntrinsics(focal_px=-1.0, principal_point=(0.0, 0.0), image_size=(10.0, 10.0))


class TestGazeDirection:

    def test_matches_projected_step(self, camera):
        eye = Vec3(150.0, -80.0, 2500.0)
        gaze = Vec3(0.6, 0.1, -0.5).normalized()
        d = project_gaze_dir(eye, gaze, camera)
        s = 1e-4
        step = project(eye + gaze * s, camera) - project(eye, camera)
        expected = step / step.norm()
        np.testing.assert_allclose([d.x, d.y], [expected.x, expected.y], atol=1e-6)
        assert float(d.norm()) == pytest.approx(1.0)

    def test_gaze_along_projection_ray(self, camera):
        eye = Vec3(100.0, 50.0, 2000.0)
        with pytest.raises(DegenerateError):
            project_gaze_dir(eye, eye.normalized(), camera)

    def test_cyclopean_midpoint(self):
        c = cyclopean_eye_2d(Point2D(10.0, 4.0), Point2D(30.0, -2.0))
        assert (c.x, c.y) == (20.0, 1.0)
