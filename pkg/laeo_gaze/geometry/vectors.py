"""Gaze-angle convention and 3D primitives.

Convention: v = (cosθ·sinφ, sinθ, −cosθ·cosφ). Zero angles look straight
back at the camera and negating the yaw mirrors the vector in x only.
"""

from typing import Tuple

import numpy as np

from .types import FacePlane, GazeAngles, Vec3
from ..config import GEOMETRY_CONFIG
from ..errors import DegenerateError, InvalidInputError, ParallelError
from ..grad import dual as dm


def angles_to_vector(g: GazeAngles) -> Vec3:
    cos_p = dm.cos(g.pitch)
    return Vec3(cos_p * dm.sin(g.yaw), dm.sin(g.pitch), -cos_p * dm.cos(g.yaw))


def vector_to_angles(v: Vec3) -> GazeAngles:
    """
    Inverse of ``angles_to_vector``.

    Looking straight up or down (|v.y| = 1) has no defined yaw; 0 is returned.
    Yaw is reported in (−π, π].
    """
    x = np.asarray(dm.value(v.x), dtype=float)
    y = np.asarray(dm.value(v.y), dtype=float)
    z = np.asarray(dm.value(v.z), dtype=float)
    pitch = np.arcsin(np.clip(y, -1.0, 1.0))
    gimbal = (x == 0.0) & (z == 0.0)
    yaw = np.where(gimbal, 0.0, np.arctan2(x, -z))
    yaw = np.where(yaw <= -np.pi, np.pi, yaw)
    if pitch.ndim == 0:
        return GazeAngles(float(pitch), float(yaw))
    return GazeAngles(pitch, yaw)


def heading_vector(ear_midpoint: Vec3, nose_tip: Vec3) -> Vec3:
    """Unit vector from the midpoint of the outer ear points toward the nose tip."""
    d = nose_tip - ear_midpoint
    length = d.norm()
    if np.any(np.asarray(length) == 0.0):
        raise DegenerateError("ear midpoint and nose tip coincide")
    return d / length


def check_unit(v: Vec3, what: str = "vector") -> None:
    deviation = np.abs(np.asarray(dm.value(v.norm())) - 1.0)
    if np.any(deviation > GEOMETRY_CONFIG["unit_tol"]):
        raise InvalidInputError(f"{what} must be unit length (|v| - 1 = {np.max(deviation):.3g})")


def face_plane(eye: Vec3, heading: Vec3) -> FacePlane:
    check_unit(heading, "heading")
    return FacePlane(point=eye, normal=heading)


def ray_plane_intersect(
    origin: Vec3,
    direction: Vec3,
    plane: FacePlane,
    eps_parallel: float = None,
) -> Tuple[Vec3, object]:
    """
    Intersect the ray origin + t·direction with a plane.

    Negative ``t`` is returned as is; whether a hit behind the origin counts
    is the caller's decision.

    Raises:
        ParallelError: If |normal·direction| <= eps_parallel
    """
    if eps_parallel is None:
        eps_parallel = GEOMETRY_CONFIG["eps_parallel"]
    denom = plane.normal.dot(direction)
    if np.any(np.abs(np.asarray(dm.value(denom))) <= eps_parallel):
        raise ParallelError("gaze ray is parallel to the target face plane")
    t = plane.normal.dot(plane.point - origin) / denom
    return origin + direction * t, t


def angular_error_deg(u: Vec3, v: Vec3):
    """Angle between two (not necessarily unit) vectors, in degrees.

    Uses atan2(|u×v|, u·v), which stays accurate for nearly parallel inputs.
    """
    u, v = u.values(), v.values()
    return np.degrees(np.arctan2(u.cross(v).norm(), u.dot(v)))
