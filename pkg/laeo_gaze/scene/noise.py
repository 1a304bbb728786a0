"""Geometry-noise models applied to clean pairs."""

import logging
import zlib

import numpy as np

from ..config import NOISE_CONFIG
from ..geometry import CameraIntrinsics, Point2D, approximate_intrinsics
from .models import LaeoPair, SubjectObservation
from .schema import NoiseModel

logger = logging.getLogger(__name__)


def noise_rng(noise: NoiseModel, frame_id: str) -> np.random.Generator:
    """Generator keyed on (noise seed, frame id), so one pair's draws never depend on the others."""
    return np.random.default_rng(np.random.SeedSequence([noise.seed, zlib.crc32(frame_id.encode())]))


def _corrupt_subject(
    subject: SubjectObservation,
    camera: CameraIntrinsics,
    shift: Point2D,
    eye_noise: np.ndarray,
    depth_noise: float,
    noise: NoiseModel,
) -> SubjectObservation:
    sigma = noise.eye2d_sigma_px
    left = subject.left_eye_2d + shift + Point2D(*(sigma * eye_noise[0]))
    right = subject.right_eye_2d + shift + Point2D(*(sigma * eye_noise[1]))
    depth = max(subject.depth_mm * (1.0 + noise.depth_rel_sigma * depth_noise),
                NOISE_CONFIG["depth_floor_mm"])
    return SubjectObservation.from_eyes(
        left_eye_2d=left,
        right_eye_2d=right,
        depth_mm=depth,
        camera=camera,
        heading=subject.heading,
        head_box=subject.head_box.shifted(shift.x, shift.y),
        body_box=subject.body_box.shifted(shift.x, shift.y),
        gt_gaze=subject.gt_gaze,
    )


def corrupt(pair: LaeoPair, noise: NoiseModel) -> LaeoPair:
    """
    Apply a noise model to a pair.

    The camera is replaced according to ``focal_mode``; the 2D eyes receive
    Gaussian jitter; depths are scaled by (1 + N(0, depth_rel_sigma)) and
    clamped at 1 mm; 3D eyes are back-projected again. Ground-truth gaze is
    left as is.

    Every normal variate is drawn whatever the sigmas are, so rungs of a study
    that share a seed see the same underlying noise.
    """
    rng = noise_rng(noise, pair.frame_id)
    eye_noise = rng.normal(size=(2, 2, 2))
    depth_noise = rng.normal(size=2)

    camera = pair.camera
    if noise.focal_mode == "max-image-dim":
        camera = approximate_intrinsics(pair.camera.image_size)
    # centered coordinates move when the assumed principal point moves
    shift = Point2D(
        pair.camera.principal_point[0] - camera.principal_point[0],
        pair.camera.principal_point[1] - camera.principal_point[1],
    )

    subjects = [
        _corrupt_subject(s, camera, shift, eye_noise[k], float(depth_noise[k]), noise)
        for k, s in enumerate(pair.subjects)
    ]
    return LaeoPair(subject_a=subjects[0], subject_b=subjects[1], camera=camera, frame_id=pair.frame_id)


def corrupt_depths(pairs, depth_rel_sigma: float, seed: int):
    """Depth-only corruption of a whole dataset."""
    noise = NoiseModel(name=f"depth_{depth_rel_sigma:g}", depth_rel_sigma=depth_rel_sigma, seed=seed)
    return [corrupt(p, noise) for p in pairs]
