"""Camera intrinsics and rigid-transform primitives shared across the toolkit."""

from dataclasses import dataclass

import numpy as np

ORTHONORMAL_TOL = 1e-9


@dataclass(frozen=True)
class CameraIntrinsics:
    """Pinhole camera parameters for an undistorted/rectified image."""

    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int

    def __post_init__(self):
        if not (self.fx > 0 and self.fy > 0):
            raise ValueError(f"focal lengths must be positive, got fx={self.fx}, fy={self.fy}")
        if not (isinstance(self.width, int) and isinstance(self.height, int)
                and self.width > 0 and self.height > 0):
            raise ValueError(f"image size must be positive integers, got {self.width}x{self.height}")
        if not (0 < self.cx < self.width and 0 < self.cy < self.height):
            raise ValueError(f"principal point ({self.cx}, {self.cy}) outside image {self.width}x{self.height}")

    def matrix(self) -> np.ndarray:
        return np.array(
            [[self.fx, 0.0, self.cx], [0.0, self.fy, self.cy], [0.0, 0.0, 1.0]],
            dtype=np.float64,
        )


def _check_rotation(rotation: np.ndarray) -> np.ndarray:
    rotation = np.asarray(rotation, dtype=np.float64)
    if rotation.shape != (3, 3):
        raise ValueError(f"rotation must be 3x3, got shape {rotation.shape}")
    err = np.abs(rotation.T @ rotation - np.eye(3)).max()
    det = np.linalg.det(rotation)
    if err > ORTHONORMAL_TOL or abs(det - 1.0) > ORTHONORMAL_TOL:
        raise ValueError(f"rotation is not orthonormal with det +1 (RtR err {err:.3e}, det {det:.12f})")
    return rotation


@dataclass(frozen=True)
class RigidTransform:
    """Rotation + translation, e.g. the radar-to-camera extrinsic calibration."""

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "rotation", _check_rotation(self.rotation))
        translation = np.asarray(self.translation, dtype=np.float64)
        if translation.shape != (3,):
            raise ValueError(f"translation must be a 3-vector, got shape {translation.shape}")
        object.__setattr__(self, "translation", translation)

    def apply(self, points: np.ndarray) -> np.ndarray:
        """Transform an (N, 3) array of points."""
        points = np.asarray(points, dtype=np.float64)
        return points @ self.rotation.T + self.translation

    @staticmethod
    def identity() -> "RigidTransform":
        return RigidTransform(np.eye(3), np.zeros(3))


def default_intrinsics(width=640, height=480, focal_factor=0.75) -> CameraIntrinsics:
    """Toy camera with a fixed field of view regardless of resolution."""
    return CameraIntrinsics(
        fx=focal_factor * width, fy=focal_factor * width,
        cx=width / 2.0, cy=height / 2.0, width=int(width), height=int(height),
    )


def rot_x(angle_rad: float) -> np.ndarray:
    c, s = np.cos(angle_rad), np.sin(angle_rad)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def rot_y(angle_rad: float) -> np.ndarray:
    c, s = np.cos(angle_rad), np.sin(angle_rad)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rot_z(angle_rad: float) -> np.ndarray:
    c, s = np.cos(angle_rad), np.sin(angle_rad)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
