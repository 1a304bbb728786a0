"""Feature vectors standing in for head crops.

Each subject is described by nine numbers:

    0:3  face heading in the subject's normalized frame
    3    noisy gaze cue, pitch (normalized frame)
    4    noisy gaze cue, yaw
    5    cue noise level (radians)
    6:8  cyclopean eye position, scaled to [-1, 1] by the half image size
    8    mirror flag

The cue is the true gaze plus Gaussian noise whose level grows as the face
turns away from the camera, so some inputs are much less informative than
others.
"""

from typing import Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field, model_validator

from ..config import FEATURE_CONFIG
from ..geometry import CameraIntrinsics, Vec3, angles_to_vector, normalized_frame, vector_to_angles
from ..geometry.frames import rotate
from ..scene import LaeoPair, SubjectObservation, derived_gaze_vectors

FEATURE_WIDTH = 9
MIRROR_FLAG = 8
# Components that change sign under a horizontal flip
YAW_ODD = (0, 4, 6)


class FeatureConfig(BaseModel):
    """Cue noise range, in degrees, from frontal faces to faces turned fully away."""
    cue_sigma_min_deg: float = Field(default=FEATURE_CONFIG["cue_sigma_min_deg"], ge=0)
    cue_sigma_max_deg: float = Field(default=FEATURE_CONFIG["cue_sigma_max_deg"], ge=0)

    @model_validator(mode="after")
    def _check_order(self):
        if self.cue_sigma_max_deg < self.cue_sigma_min_deg:
            raise ValueError("cue_sigma_max_deg must be >= cue_sigma_min_deg")
        return self


def _stack(vectors: Sequence[Vec3]) -> Vec3:
    return Vec3.from_array(np.array([v.to_array() for v in vectors]).reshape(-1, 3))


def cue_sigma(subjects: Sequence[SubjectObservation], config: FeatureConfig) -> np.ndarray:
    """Cue noise (radians) per subject, linear in the angle between heading and the camera direction."""
    heading = _stack([s.heading for s in subjects]).to_array()
    to_camera = -_stack([s.cyclopean_3d for s in subjects]).to_array()
    to_camera /= np.linalg.norm(to_camera, axis=-1, keepdims=True)
    cos = np.clip(np.sum(heading * to_camera, axis=-1), -1.0, 1.0)
    span = config.cue_sigma_max_deg - config.cue_sigma_min_deg
    return np.radians(config.cue_sigma_min_deg + span * np.arccos(cos) / np.pi)


def extract_features(
    subjects: Sequence[SubjectObservation],
    cameras: Sequence[CameraIntrinsics],
    true_gaze: Sequence[Vec3],
    rng: np.random.Generator,
    config: Optional[FeatureConfig] = None,
) -> np.ndarray:
    """
    Feature rows for a list of subjects.

    ``true_gaze`` holds camera-frame unit vectors the cue is drawn around.
    Noise is drawn from ``rng`` in subject order, pitch then yaw.

    Returns:
        Array of shape (len(subjects), 9) with the mirror flag cleared
    """
    config = config or FeatureConfig()
    n = len(subjects)
    if n == 0:
        return np.zeros((0, FEATURE_WIDTH))
    eye3d = _stack([s.cyclopean_3d for s in subjects])
    frames = normalized_frame(eye3d)
    heading = rotate(frames, _stack([s.heading for s in subjects])).to_array()
    truth = vector_to_angles(rotate(frames, _stack(true_gaze)))
    sigma = cue_sigma(subjects, config)
    noise = rng.normal(size=(n, 2)) * sigma[:, None]

    half = np.array([[c.image_size[0] / 2.0, c.image_size[1] / 2.0] for c in cameras])
    eye2d = np.array([[float(s.cyclopean_2d.x), float(s.cyclopean_2d.y)] for s in subjects])

    features = np.zeros((n, FEATURE_WIDTH))
    features[:, 0:3] = heading
    features[:, 3] = np.asarray(truth.pitch) + noise[:, 0]
    features[:, 4] = np.asarray(truth.yaw) + noise[:, 1]
    features[:, 5] = sigma
    features[:, 6:8] = eye2d / half
    return features


def mirror_features(features: np.ndarray) -> np.ndarray:
    """Horizontally flipped counterpart: yaw-odd components negated, mirror flag toggled."""
    out = np.array(features, dtype=float, copy=True)
    out[..., list(YAW_ODD)] *= -1.0
    out[..., MIRROR_FLAG] = 1.0 - out[..., MIRROR_FLAG]
    return out


def pair_truth(pair: LaeoPair) -> Tuple[Vec3, Vec3]:
    """Camera-frame gaze the cues are drawn around: ground truth when known, else the derived labels."""
    if pair.subject_a.gt_gaze is not None and pair.subject_b.gt_gaze is not None:
        return angles_to_vector(pair.subject_a.gt_gaze), angles_to_vector(pair.subject_b.gt_gaze)
    return derived_gaze_vectors(pair)


def pair_features(
    pairs: Sequence[LaeoPair],
    rng: np.random.Generator,
    config: Optional[FeatureConfig] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """Feature rows for subjects A and B of every pair, each of shape (N, 9)."""
    truth = [pair_truth(p) for p in pairs]
    subjects = [s for p in pairs for s in p.subjects]
    cameras = [p.camera for p in pairs for _ in (0, 1)]
    gaze = [t for pair_truths in truth for t in pair_truths]
    rows = extract_features(subjects, cameras, gaze, rng, config)
    return rows[0::2], rows[1::2]
