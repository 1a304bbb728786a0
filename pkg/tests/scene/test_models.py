from dataclasses import replace
import json

import numpy as np
import pytest

from laeo_gaze.errors import InvalidInputError, RecordError
from laeo_gaze.geometry import Point2D, Vec3
from laeo_gaze.scene import ingest_scenes
from laeo_gaze.scene.models import SubjectObservation
from laeo_gaze.scene.storage import pair_to_dict


class TestSubjectObservation:

    def test_from_eyes_builds_a_consistent_subject(self, clean_pair):
        s = clean_pair.subject_a
        rebuilt = SubjectObservation.from_eyes(
            s.left_eye_2d, s.right_eye_2d, s.depth_mm, clean_pair.camera, s.heading, s.head_box, s.body_box,
        )
        np.testing.assert_allclose(rebuilt.cyclopean_3d.to_array(), s.cyclopean_3d.to_array(), rtol=1e-12)

    @pytest.mark.parametrize("depth", [0.0, -10.0, float("nan"), float("inf")])
    def test_depth_must_be_positive_and_finite(self, clean_pair, depth):
        with pytest.raises(InvalidInputError, match="depth_mm"):
            replace(clean_pair.subject_a, depth_mm=depth)

    def test_cyclopean_must_be_the_eye_midpoint(self, clean_pair):
        s = clean_pair.subject_a
        shifted = Point2D(float(s.cyclopean_2d.x) + 1.0, float(s.cyclopean_2d.y))
        with pytest.raises(InvalidInputError, match="midpoint"):
            replace(s, cyclopean_2d=shifted)

    def test_heading_must_be_unit(self, clean_pair):
        with pytest.raises(InvalidInputError, match="unit length"):
            replace(clean_pair.subject_a, heading=Vec3(0.0, 0.0, 2.0))

    def test_from_eyes_checks_heading(self, clean_pair):
        s = clean_pair.subject_b
        with pytest.raises(InvalidInputError, match="unit length"):
            SubjectObservation.from_eyes(
                s.left_eye_2d, s.right_eye_2d, s.depth_mm, clean_pair.camera,
                Vec3(0.5, 0.0, 0.5), s.head_box, s.body_box,
            )

    def test_stored_heading_is_checked_on_ingest(self, tmp_path, clean_pair):
        record = pair_to_dict(clean_pair)
        record["subjects"][0]["heading"] = [0.0, 0.0, 0.5]
        path = tmp_path / "bad.jsonl"
        path.write_text(json.dumps(record) + "\n")
        with pytest.raises(RecordError, match="unit length"):
            ingest_scenes(str(path))
