"""Pinhole camera geometry and gaze-vector primitives."""

from .types import (
    Box2D,
    CameraIntrinsics,
    FacePlane,
    GazeAngles,
    Point2D,
    Point3D,
    UnitVec3,
    Vec3,
)
from .camera import (
    approximate_intrinsics,
    backproject,
    cyclopean_eye_2d,
    project,
    project_gaze_dir,
)
from .vectors import (
    angles_to_vector,
    angular_error_deg,
    face_plane,
    heading_vector,
    ray_plane_intersect,
    vector_to_angles,
)
from .frames import camera_to_normalized, normalized_frame, normalized_to_camera

__all__ = [
    'Box2D',
    'CameraIntrinsics',
    'FacePlane',
    'GazeAngles',
    'Point2D',
    'Point3D',
    'UnitVec3',
    'Vec3',
    'approximate_intrinsics',
    'backproject',
    'cyclopean_eye_2d',
    'project',
    'project_gaze_dir',
    'angles_to_vector',
    'angular_error_deg',
    'face_plane',
    'heading_vector',
    'ray_plane_intersect',
    'vector_to_angles',
    'camera_to_normalized',
    'normalized_frame',
    'normalized_to_camera',
]
