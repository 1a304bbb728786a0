"""Pinhole camera model: projection, back-projection and focal approximation.

Image coordinates are principal-point-centered everywhere in this package.
"""

import logging
from typing import Sequence, Tuple

import numpy as np

from .types import CameraIntrinsics, Point2D, Vec3
from ..config import GEOMETRY_CONFIG
from ..errors import BehindCameraError, DegenerateError, InvalidInputError
from ..grad import dual as dm

logger = logging.getLogger(__name__)


def _require_in_front(z, what: str):
    if np.any(np.asarray(dm.value(z)) <= 0):
        raise BehindCameraError(f"{what} must have z > 0, got z={dm.value(z)!r}")


def project(p: Vec3, cam: CameraIntrinsics) -> Point2D:
    """Project a camera-frame point to centered pixel coordinates (f·x/z, f·y/z)."""
    _require_in_front(p.z, "projected point")
    f = cam.focal_px
    return Point2D(f * p.x / p.z, f * p.y / p.z)


def backproject(q: Point2D, z, cam: CameraIntrinsics) -> Vec3:
    """Lift a centered pixel at depth ``z`` (mm) to (z·x/f, z·y/f, z)."""
    _require_in_front(z, "back-projection depth")
    f = cam.focal_px
    return Vec3(z * q.x / f, z * q.y / f, z)


def approximate_intrinsics(image_size: Sequence[float]) -> CameraIntrinsics:
    """
    Camera guess used when calibration is unknown.

    The focal length is the larger image dimension and the principal point
    sits at the image center.
    """
    width, height = float(image_size[0]), float(image_size[1])
    if width <= 0 or height <= 0:
        raise InvalidInputError(f"image_size must be positive, got {tuple(image_size)}")
    return CameraIntrinsics(
        focal_px=max(width, height),
        principal_point=(width / 2.0, height / 2.0),
        image_size=(width, height),
    )


def cyclopean_eye_2d(left_eye: Point2D, right_eye: Point2D) -> Point2D:
    return Point2D((left_eye.x + right_eye.x) / 2.0, (left_eye.y + right_eye.y) / 2.0)


def gaze_image_vector(eye3d: Vec3, gaze: Vec3, cam: CameraIntrinsics) -> Tuple[Point2D, object]:
    """
    Unnormalized image-plane direction of a 3D gaze leaving ``eye3d``.

    Returns ``(d, |d|)`` with d = (f·gx − x·gz, f·gy − y·gz), where (x, y) is
    the projected eye. Batched callers use this to mask degenerate entries
    themselves instead of raising.
    """
    q = project(eye3d, cam)
    f = cam.focal_px
    d = Point2D(f * gaze.x - q.x * gaze.z, f * gaze.y - q.y * gaze.z)
    return d, d.norm()


def is_degenerate_direction(length, cam: CameraIntrinsics):
    """True where an image gaze vector is too short to define a direction."""
    return np.asarray(dm.value(length)) < GEOMETRY_CONFIG["degenerate_rel_tol"] * cam.focal_px


def project_gaze_dir(eye3d: Vec3, gaze: Vec3, cam: CameraIntrinsics) -> Point2D:
    """
    Unit 2D direction in which a gaze ray leaves the eye in the image.

    This is the limit direction of project(eye3d + s·gaze) − project(eye3d)
    as s → 0⁺.

    Raises:
        DegenerateError: If the gaze runs along the projection ray
    """
    d, length = gaze_image_vector(eye3d, gaze, cam)
    if np.any(is_degenerate_direction(length, cam)):
        raise DegenerateError("gaze is parallel to the projection ray; image direction undefined")
    return d / length
