"""Per-subject normalized eye frames.

The normalized frame of a subject is the camera frame rotated so that its z
axis passes through that subject's 3D cyclopean eye. Predictions live in it;
scene-level losses work in the camera frame.
"""

import numpy as np

from .types import GazeAngles, Vec3
from .vectors import angles_to_vector, vector_to_angles
from ..errors import BehindCameraError


def normalized_frame(eye3d: Vec3) -> np.ndarray:
    """
    Camera-to-normalized rotation for an eye (or a batch of eyes).

    Built as the minimal rotation carrying the unit ray toward the eye onto
    +z: R = I + [v]× + [v]×²/(1 + c) with v = p̂ × ẑ and c = p̂·ẑ.

    Returns:
        Array of shape (3, 3), or (B, 3, 3) for batched components
    """
    p = eye3d.to_array()
    if np.any(p[..., 2] <= 0):
        raise BehindCameraError("eye must be in front of the camera to define a normalized frame")
    p = p / np.linalg.norm(p, axis=-1, keepdims=True)
    # v = p x z_hat = (p_y, -p_x, 0)
    vx, vy = p[..., 1], -p[..., 0]
    c = p[..., 2]
    zero = np.zeros_like(vx)
    skew = np.stack(
        [
            np.stack([zero, zero, vy], axis=-1),
            np.stack([zero, zero, -vx], axis=-1),
            np.stack([-vy, vx, zero], axis=-1),
        ],
        axis=-2,
    )
    eye = np.broadcast_to(np.eye(3), skew.shape)
    return eye + skew + (skew @ skew) / (1.0 + c)[..., None, None]


def rotate(rotation: np.ndarray, v: Vec3) -> Vec3:
    """Apply R (shape (3,3) or (B,3,3)) to a vector whose components may be duals."""
    r = rotation
    return Vec3(
        r[..., 0, 0] * v.x + r[..., 0, 1] * v.y + r[..., 0, 2] * v.z,
        r[..., 1, 0] * v.x + r[..., 1, 1] * v.y + r[..., 1, 2] * v.z,
        r[..., 2, 0] * v.x + r[..., 2, 1] * v.y + r[..., 2, 2] * v.z,
    )


def rotate_back(rotation: np.ndarray, v: Vec3) -> Vec3:
    """Apply Rᵀ."""
    return rotate(np.swapaxes(rotation, -1, -2), v)


def normalized_to_camera(angles: GazeAngles, eye3d: Vec3) -> GazeAngles:
    """Re-express normalized-frame gaze angles in the camera frame."""
    return vector_to_angles(rotate_back(normalized_frame(eye3d), angles_to_vector(angles)))


def camera_to_normalized(angles: GazeAngles, eye3d: Vec3) -> GazeAngles:
    return vector_to_angles(rotate(normalized_frame(eye3d), angles_to_vector(angles)))
