"""Synthetic LAEO scenes with known ground truth."""

import logging
from dataclasses import replace
from typing import List, Optional, Sequence, Union

import numpy as np

from ..errors import InfeasibleSceneError
from ..geometry import (
    Box2D,
    CameraIntrinsics,
    GazeAngles,
    Point2D,
    Vec3,
    angles_to_vector,
    backproject,
    project,
    vector_to_angles,
)
from .models import LaeoPair, SubjectObservation
from .schema import SynthConfig

logger = logging.getLogger(__name__)

Seed = Union[int, Sequence[int]]

_UP = Vec3(0.0, -1.0, 0.0)


def _camera(config: SynthConfig, rng: np.random.Generator) -> CameraIntrinsics:
    width, height = config.image_size
    focal = rng.uniform(*config.focal_range_px)
    pp = (width / 2.0 + config.principal_offset_px[0], height / 2.0 + config.principal_offset_px[1])
    return CameraIntrinsics(focal_px=float(focal), principal_point=pp, image_size=(width, height))


def _in_image(q: Point2D, cam: CameraIntrinsics, margin: float) -> bool:
    """Bounds check on a centered image point."""
    x = q.x + cam.principal_point[0]
    y = q.y + cam.principal_point[1]
    return (
        margin <= x <= cam.image_size[0] - margin
        and margin <= y <= cam.image_size[1] - margin
    )


def _jittered(direction: Vec3, jitter_rad: float, rng: np.random.Generator) -> Vec3:
    angles = vector_to_angles(direction)
    pitch = np.clip(angles.pitch + rng.uniform(-jitter_rad, jitter_rad), -np.pi / 2, np.pi / 2)
    yaw = angles.yaw + rng.uniform(-jitter_rad, jitter_rad)
    return angles_to_vector(GazeAngles(float(pitch), float(yaw)))


def _subject(
    cyc2d: Point2D,
    depth: float,
    heading: Vec3,
    config: SynthConfig,
    cam: CameraIntrinsics,
) -> SubjectObservation:
    center = backproject(cyc2d, depth, cam)
    axis = heading.cross(_UP).normalized() * (config.interocular_mm / 2.0)
    half = (project(center + axis, cam) - project(center - axis, cam)) / 2.0
    scale = cam.focal_px / depth
    head = config.head_size_mm * scale / 2.0
    body_w = config.body_size_mm[0] * scale / 2.0
    body_h = config.body_size_mm[1] * scale
    return SubjectObservation.from_eyes(
        left_eye_2d=cyc2d - half,
        right_eye_2d=cyc2d + half,
        depth_mm=depth,
        camera=cam,
        heading=heading,
        head_box=Box2D(cyc2d.x - head, cyc2d.y - head, cyc2d.x + head, cyc2d.y + head),
        body_box=Box2D(cyc2d.x - body_w, cyc2d.y + head, cyc2d.x + body_w, cyc2d.y + head + body_h),
    )


def synth_scene(config: SynthConfig, rng_seed: Seed, frame_id: Optional[str] = None) -> LaeoPair:
    """
    Generate one two-person scene in which both subjects look at each other.

    Subject A is placed at a random in-image pixel and depth; B is placed at a
    random separation along a mostly horizontal direction. Placements that
    leave the image, the depth range or crowd the two eyes together are
    redrawn.

    Args:
        config: Placement distribution
        rng_seed: Integer seed, or a (master_seed, index) sequence
        frame_id: Identifier for the pair; derived from the seed when omitted

    Raises:
        InfeasibleSceneError: If no placement succeeded within max_retries
    """
    rng = np.random.default_rng(rng_seed)
    if frame_id is None:
        frame_id = "scene-" + "-".join(str(s) for s in np.atleast_1d(rng_seed))
    jitter = np.radians(config.heading_jitter_deg)
    margin = config.image_margin_px

    for attempt in range(config.max_retries):
        cam = _camera(config, rng)
        x_lo = margin - cam.principal_point[0]
        y_lo = margin - cam.principal_point[1]
        cyc_a = Point2D(
            float(rng.uniform(x_lo, x_lo + cam.image_size[0] - 2 * margin)),
            float(rng.uniform(y_lo, y_lo + cam.image_size[1] - 2 * margin)),
        )
        depth_a = float(rng.uniform(*config.depth_range_mm))
        eye_a = backproject(cyc_a, depth_a, cam)

        separation = rng.uniform(*config.separation_range_mm)
        u = Vec3.from_array(rng.normal(size=3)).normalized()
        if abs(u.y) > config.max_vertical_fraction:
            continue
        eye_b = eye_a + u * separation
        if not config.depth_range_mm[0] <= eye_b.z <= config.depth_range_mm[1]:
            continue
        cyc_b = project(eye_b, cam)
        if not _in_image(cyc_b, cam, margin):
            continue
        if (cyc_b - cyc_a).norm() < config.min_eye_separation_px:
            continue

        heading_a = _jittered(u, jitter, rng)
        heading_b = _jittered(-u, jitter, rng)
        subject_a = _subject(cyc_a, depth_a, heading_a, config, cam)
        subject_b = _subject(cyc_b, float(eye_b.z), heading_b, config, cam)

        # ground truth follows the recorded 3D eyes exactly
        line = subject_b.cyclopean_3d - subject_a.cyclopean_3d
        subject_a = _with_gaze(subject_a, vector_to_angles(line.normalized()))
        subject_b = _with_gaze(subject_b, vector_to_angles((-line).normalized()))
        if attempt:
            logger.debug("frame %s placed after %d retries", frame_id, attempt)
        return LaeoPair(subject_a=subject_a, subject_b=subject_b, camera=cam, frame_id=frame_id)

    raise InfeasibleSceneError(
        f"no feasible placement for frame {frame_id} after {config.max_retries} attempts"
    )


def _with_gaze(subject: SubjectObservation, gaze: GazeAngles) -> SubjectObservation:
    return replace(subject, gt_gaze=gaze)


def synth_dataset(config: SynthConfig, n: int, seed: int) -> List[LaeoPair]:
    """``n`` scenes, scene ``i`` seeded from (seed, i)."""
    pairs = [synth_scene(config, [seed, i], frame_id=f"scene-{i:05d}") for i in range(n)]
    logger.info("synthesized %d scenes (seed %d)", n, seed)
    return pairs
