import pytest

from laeo_gaze.annotate import DISCARD, KEEP, occlusion_filter
from laeo_gaze.geometry import Box2D

FACE = Box2D(0.0, 0.0, 100.0, 1.0)


class TestOcclusionFilter:

    def test_no_other_bodies(self):
        assert occlusion_filter(FACE, []) == KEEP

    def test_disjoint_body(self):
        assert occlusion_filter(FACE, [Box2D(200.0, 0.0, 300.0, 50.0)]) == KEEP

    def test_threshold_is_inclusive(self):
        # intersection 1, union 100
        assert FACE.iou(Box2D(0.0, 0.0, 1.0, 1.0)) == pytest.approx(0.01)
        assert occlusion_filter(FACE, [Box2D(0.0, 0.0, 1.0, 1.0)]) == DISCARD

    def test_just_below_threshold(self):
        assert occlusion_filter(FACE, [Box2D(0.0, 0.0, 0.5, 1.0)]) == KEEP

    def test_any_overlapping_body_discards(self):
        bodies = [Box2D(500.0, 0.0, 600.0, 10.0), Box2D(0.0, 0.0, 50.0, 1.0)]
        assert occlusion_filter(FACE, bodies) == DISCARD

    def test_zero_area_face(self):
        assert occlusion_filter(Box2D(5.0, 5.0, 5.0, 20.0), []) == DISCARD

    def test_custom_threshold(self):
        body = Box2D(0.0, 0.0, 50.0, 1.0)
        assert occlusion_filter(FACE, [body], iou_threshold=0.6) == KEEP
