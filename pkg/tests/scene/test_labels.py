import numpy as np
import pytest

from laeo_gaze.errors import InvalidInputError
from laeo_gaze.geometry import angles_to_vector, angular_error_deg, camera_to_normalized
from laeo_gaze.scene import (
    default_label_ladder,
    derived_gaze_label,
    derived_gaze_vectors,
    eye_center_assumption_error,
    label_error_study,
    subject_label_rows,
)


class TestDerivedLabels:

    def test_vectors_are_opposite_units(self, clean_pair):
        v_a, v_b = derived_gaze_vectors(clean_pair)
        np.testing.assert_allclose(v_a.to_array(), -v_b.to_array())
        assert float(v_a.norm()) == pytest.approx(1.0)

    def test_labels_match_ground_truth(self, clean_pair):
        labels = derived_gaze_label(clean_pair)
        for label, subject in zip(labels, clean_pair.subjects):
            gt = camera_to_normalized(subject.gt_gaze, subject.cyclopean_3d)
            assert label.pitch == pytest.approx(gt.pitch, abs=1e-9)
            assert label.yaw == pytest.approx(gt.yaw, abs=1e-9)

    def test_label_rows(self, clean_pairs):
        rows = subject_label_rows(clean_pairs[:3])
        assert [r["subject"] for r in rows] == ["a", "b"] * 3
        assert all(r["error_deg"] < 1e-6 for r in rows)


class TestLabelStudy:

    def test_eye_center_bound(self):
        assert eye_center_assumption_error(37.5, 500.0) == pytest.approx(4.29, abs=0.01)

    def test_ladder_decreases_to_zero(self, synth_config):
        rows = label_error_study(synth_config, default_label_ladder(), n_scenes=200, seed=42)
        errors = [r.mean_err_deg for r in rows]
        assert [r.rung for r in rows] == ["approx_focal", "exact_focal", "exact_eyes", "all_exact"]
        assert all(a > b for a, b in zip(errors, errors[1:]))
        assert errors[-1] == pytest.approx(0.0, abs=1e-6)

    def test_rungs_share_scenes(self, clean_pairs, synth_config):
        ladder = default_label_ladder()
        first = label_error_study(synth_config, ladder, pairs=clean_pairs)
        second = label_error_study(synth_config, ladder, pairs=clean_pairs)
        assert [r.to_dict() for r in first] == [r.to_dict() for r in second]

    def test_empty_ladder(self, synth_config):
        with pytest.raises(InvalidInputError):
            label_error_study(synth_config, [], n_scenes=1)
