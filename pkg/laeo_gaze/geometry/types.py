"""Geometric value types.

Vector components may be floats, ``(B,)`` numpy arrays or dual numbers; the
arithmetic below only uses operators and ``grad.dual`` functions, so a single
``Vec3`` can describe one point or a whole batch of them.
"""

from dataclasses import dataclass
from typing import Any, Tuple

import numpy as np

from ..errors import InvalidInputError
from ..grad import dual as dm


@dataclass(frozen=True)
class GazeAngles:
    """Gaze pitch (theta) and yaw (phi) in radians."""
    pitch: Any
    yaw: Any

    def to_tuple(self) -> Tuple[float, float]:
        return (float(self.pitch), float(self.yaw))


@dataclass(frozen=True)
class Vec3:
    """A 3-vector in camera coordinates (millimeters for points)."""
    x: Any
    y: Any
    z: Any

    def __add__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def __neg__(self) -> "Vec3":
        return Vec3(-self.x, -self.y, -self.z)

    def __mul__(self, s) -> "Vec3":
        return Vec3(self.x * s, self.y * s, self.z * s)

    __rmul__ = __mul__

    def __truediv__(self, s) -> "Vec3":
        return Vec3(self.x / s, self.y / s, self.z / s)

    def dot(self, other: "Vec3"):
        return self.x * other.x + self.y * other.y + self.z * other.z

    def cross(self, other: "Vec3") -> "Vec3":
        return Vec3(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )

    def norm(self):
        return dm.sqrt(self.dot(self))

    def normalized(self) -> "Vec3":
        return self / self.norm()

    def values(self) -> "Vec3":
        """Drop tangents (stop-gradient)."""
        return Vec3(dm.value(self.x), dm.value(self.y), dm.value(self.z))

    def take(self, index) -> "Vec3":
        return Vec3(self.x[index], self.y[index], self.z[index])

    def to_array(self) -> np.ndarray:
        """Stack components on the last axis."""
        return np.stack(
            [np.asarray(dm.value(c), dtype=float) for c in (self.x, self.y, self.z)], axis=-1
        )

    @classmethod
    def from_array(cls, a) -> "Vec3":
        a = np.asarray(a, dtype=float)
        if a.ndim == 1:
            return cls(float(a[0]), float(a[1]), float(a[2]))
        return cls(a[..., 0], a[..., 1], a[..., 2])


# A point and a unit direction share one representation
Point3D = Vec3
UnitVec3 = Vec3


@dataclass(frozen=True)
class Point2D:
    """Image point in pixels, principal-point-centered."""
    x: Any
    y: Any

    def __add__(self, other: "Point2D") -> "Point2D":
        return Point2D(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Point2D") -> "Point2D":
        return Point2D(self.x - other.x, self.y - other.y)

    def __mul__(self, s) -> "Point2D":
        return Point2D(self.x * s, self.y * s)

    __rmul__ = __mul__

    def __truediv__(self, s) -> "Point2D":
        return Point2D(self.x / s, self.y / s)

    def dot(self, other: "Point2D"):
        return self.x * other.x + self.y * other.y

    def norm(self):
        return dm.sqrt(self.dot(self))

    def take(self, index) -> "Point2D":
        return Point2D(self.x[index], self.y[index])

    def to_array(self) -> np.ndarray:
        return np.stack(
            [np.asarray(dm.value(c), dtype=float) for c in (self.x, self.y)], axis=-1
        )

    @classmethod
    def from_array(cls, a) -> "Point2D":
        a = np.asarray(a, dtype=float)
        if a.ndim == 1:
            return cls(float(a[0]), float(a[1]))
        return cls(a[..., 0], a[..., 1])


@dataclass(frozen=True)
class CameraIntrinsics:
    """Pinhole camera: focal length, principal point and image size in pixels."""
    focal_px: float
    principal_point: Tuple[float, float]
    image_size: Tuple[float, float]

    def __post_init__(self):
        if not self.focal_px > 0:
            raise InvalidInputError(f"focal_px must be positive, got {self.focal_px}")
        if not (self.image_size[0] > 0 and self.image_size[1] > 0):
            raise InvalidInputError(f"image_size must be positive, got {self.image_size}")

    def to_dict(self) -> dict:
        return {
            "focal_px": self.focal_px,
            "pp": list(self.principal_point),
            "image_size": list(self.image_size),
        }


@dataclass(frozen=True)
class FacePlane:
    """Plane through a subject's 3D cyclopean eye, normal to the heading."""
    point: Vec3
    normal: Vec3

    def signed_distance(self, p: Vec3):
        return self.normal.dot(p - self.point)


@dataclass(frozen=True)
class Box2D:
    """Axis-aligned image box (x0, y0) - (x1, y1) in pixels."""
    x0: float
    y0: float
    x1: float
    y1: float

    @property
    def area(self) -> float:
        return max(self.x1 - self.x0, 0.0) * max(self.y1 - self.y0, 0.0)

    def intersection(self, other: "Box2D") -> float:
        w = min(self.x1, other.x1) - max(self.x0, other.x0)
        h = min(self.y1, other.y1) - max(self.y0, other.y0)
        return max(w, 0.0) * max(h, 0.0)

    def iou(self, other: "Box2D") -> float:
        inter = self.intersection(other)
        union = self.area + other.area - inter
        return inter / union if union > 0 else 0.0

    def shifted(self, dx: float, dy: float) -> "Box2D":
        return Box2D(self.x0 + dx, self.y0 + dy, self.x1 + dx, self.y1 + dy)

    def to_list(self) -> list:
        return [self.x0, self.y0, self.x1, self.y1]

    @classmethod
    def from_list(cls, values) -> "Box2D":
        x0, y0, x1, y1 = (float(v) for v in values)
        return cls(x0, y0, x1, y1)
