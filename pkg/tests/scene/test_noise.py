from dataclasses import replace

import numpy as np
import pytest

from laeo_gaze.config import NOISE_CONFIG
from laeo_gaze.scene import NoiseModel, corrupt, corrupt_depths
from laeo_gaze.scene.storage import pair_to_dict


class TestCorrupt:

    def test_identity_model_keeps_geometry(self, clean_pair):
        noisy = corrupt(clean_pair, NoiseModel())
        assert pair_to_dict(noisy) == pair_to_dict(clean_pair)

    def test_focal_approximation(self, clean_pair):
        noisy = corrupt(clean_pair, NoiseModel(focal_mode="max-image-dim"))
        assert noisy.camera.focal_px == max(clean_pair.camera.image_size)
        for clean, dirty in zip(clean_pair.subjects, noisy.subjects):
            assert dirty.depth_mm == clean.depth_mm
            assert dirty.gt_gaze == clean.gt_gaze

    def test_depth_floor(self, clean_pairs):
        noisy = corrupt_depths(clean_pairs, 50.0, seed=3)
        depths = [s.depth_mm for p in noisy for s in p.subjects]
        assert min(depths) >= NOISE_CONFIG["depth_floor_mm"]

    def test_deterministic_per_frame(self, clean_pairs):
        model = NoiseModel(eye2d_sigma_px=5.0, depth_rel_sigma=0.1, seed=9)
        first = corrupt(clean_pairs[3], model)
        again = [corrupt(p, model) for p in clean_pairs][3]
        assert pair_to_dict(first) == pair_to_dict(again)

    def test_eye_noise_moves_eyes(self, clean_pair):
        noisy = corrupt(clean_pair, NoiseModel(eye2d_sigma_px=10.0))
        moved = np.abs(noisy.subject_a.left_eye_2d.to_array() - clean_pair.subject_a.left_eye_2d.to_array())
        assert moved.max() > 0
        assert noisy.subject_a.depth_mm == clean_pair.subject_a.depth_mm

    def test_negative_sigma_rejected(self):
        with pytest.raises(ValueError):
            NoiseModel(depth_rel_sigma=-0.1)

    @pytest.mark.slow
    def test_mean_relative_depth_error_is_half_normal(self, clean_pair):
        sigma = 0.3
        pairs = [replace(clean_pair, frame_id=f"depth-{k:05d}") for k in range(20000)]
        noisy = corrupt_depths(pairs, sigma, seed=11)
        clean = np.array([s.depth_mm for s in clean_pair.subjects])
        rel = np.array([[abs(s.depth_mm - z) / z for s, z in zip(p.subjects, clean)] for p in noisy])
        assert rel.mean() == pytest.approx(sigma * np.sqrt(2.0 / np.pi), rel=0.02)
