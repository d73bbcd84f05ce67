"""Planar surfaces, their midpoint meshes, rigid motions and the Fraunhofer boundary."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from lismodes.errors import GeometryError, InvalidArgument

SPEED_OF_LIGHT = 299792458.0

_TRIAD_TOL = 1e-12


@dataclass(frozen=True)
class Wave:
    frequency: float

    def __post_init__(self):
        if not (math.isfinite(self.frequency) and self.frequency > 0):
            raise InvalidArgument(f"frequency must be positive, got {self.frequency}")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.frequency

    @property
    def wavenumber(self) -> float:
        return 2.0 * math.pi / self.wavelength


def rotation_x(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def rotation_y(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rotation_from_angles(angles_deg: Sequence[float]) -> np.ndarray:
    """Rotation about the fixed x axis by ``angles_deg[0]``, then about the fixed y axis."""
    ax, ay = (math.radians(a) for a in angles_deg)
    return rotation_y(ay) @ rotation_x(ax)


def _check_rotation(rotation: np.ndarray) -> np.ndarray:
    rotation = np.asarray(rotation, dtype=float)
    if rotation.shape != (3, 3) or not np.all(np.isfinite(rotation)):
        raise InvalidArgument("rotation must be a finite 3x3 matrix")
    if np.max(np.abs(rotation.T @ rotation - np.eye(3))) > _TRIAD_TOL:
        raise InvalidArgument("rotation is not orthonormal")
    if abs(np.linalg.det(rotation) - 1.0) > _TRIAD_TOL:
        raise InvalidArgument("rotation must have determinant +1")
    return rotation


@dataclass(frozen=True, eq=False)
class Surface:
    """Zero-thickness rectangle with a right-handed (u, v, normal) triad."""

    center: np.ndarray
    basis_u: np.ndarray
    basis_v: np.ndarray
    len_u: float
    len_v: float
    normal: np.ndarray = field(default=None)

    def __post_init__(self):
        for name in ("center", "basis_u", "basis_v"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (3,) or not np.all(np.isfinite(arr)):
                raise InvalidArgument(f"{name} must be a finite 3-vector")
            object.__setattr__(self, name, arr)
        if not (self.len_u > 0 and self.len_v > 0):
            raise InvalidArgument("side lengths must be positive")
        u, v = self.basis_u, self.basis_v
        if (
            abs(np.linalg.norm(u) - 1.0) > _TRIAD_TOL
            or abs(np.linalg.norm(v) - 1.0) > _TRIAD_TOL
            or abs(u @ v) > _TRIAD_TOL
        ):
            raise InvalidArgument("basis_u and basis_v must be orthonormal")
        n = np.cross(u, v)
        if self.normal is not None:
            given = np.asarray(self.normal, dtype=float)
            if given.shape != (3,) or np.max(np.abs(given - n)) > _TRIAD_TOL:
                raise InvalidArgument("normal must equal basis_u x basis_v")
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "len_u", float(self.len_u))
        object.__setattr__(self, "len_v", float(self.len_v))

    @classmethod
    def from_angles(cls, center, angles_deg, len_u: float, len_v: float) -> "Surface":
        rot = rotation_from_angles(angles_deg)
        return cls(np.asarray(center, dtype=float), rot[:, 0], rot[:, 1], len_u, len_v)

    @classmethod
    def square(cls, side: float, center=(0.0, 0.0, 0.0)) -> "Surface":
        """Axis-aligned square in a z = const plane."""
        return cls(np.asarray(center, dtype=float), np.array([1.0, 0, 0]), np.array([0, 1.0, 0]), side, side)

    @property
    def area(self) -> float:
        return self.len_u * self.len_v

    @property
    def size(self) -> float:
        """Largest side, used as the antenna size D."""
        return max(self.len_u, self.len_v)

    def corners(self) -> np.ndarray:
        hu, hv = 0.5 * self.len_u * self.basis_u, 0.5 * self.len_v * self.basis_v
        c = self.center
        return np.array([c - hu - hv, c + hu - hv, c + hu + hv, c - hu + hv])

    def local_coords(self, points: np.ndarray) -> np.ndarray:
        """(u, v, n) coordinates of ``points`` in this surface's frame."""
        rel = np.asarray(points, dtype=float) - self.center
        return np.stack([rel @ self.basis_u, rel @ self.basis_v, rel @ self.normal], axis=-1)


@dataclass(frozen=True, eq=False)
class Mesh:
    points: np.ndarray
    weights: np.ndarray
    spacing: float
    shape: tuple
    surface: Surface

    def __len__(self) -> int:
        return len(self.weights)

    @property
    def area(self) -> float:
        return float(np.sum(self.weights))


def cells_along(length: float, target_spacing: float) -> int:
    # tolerance keeps exact multiples (10λ / (λ/2)) from rounding up a cell
    return max(1, math.ceil(length / target_spacing - 1e-9))


def mesh_size(surface: Surface, target_spacing: float) -> int:
    return cells_along(surface.len_u, target_spacing) * cells_along(surface.len_v, target_spacing)


def build_mesh(surface: Surface, target_spacing: float) -> Mesh:
    """Uniform midpoint mesh; point ``i_u * n_v + i_v`` is cell (i_u, i_v)."""
    if not (target_spacing > 0 and math.isfinite(target_spacing)):
        raise InvalidArgument(f"target_spacing must be positive, got {target_spacing}")
    n_u = cells_along(surface.len_u, target_spacing)
    n_v = cells_along(surface.len_v, target_spacing)
    du, dv = surface.len_u / n_u, surface.len_v / n_v
    a = (np.arange(n_u) + 0.5) * du - 0.5 * surface.len_u
    b = (np.arange(n_v) + 0.5) * dv - 0.5 * surface.len_v
    aa, bb = np.meshgrid(a, b, indexing="ij")
    points = (
        surface.center
        + aa.reshape(-1, 1) * surface.basis_u
        + bb.reshape(-1, 1) * surface.basis_v
    )
    weights = np.full(n_u * n_v, du * dv)
    return Mesh(points, weights, max(du, dv), (n_u, n_v), surface)


def transform(surface: Surface, rotation, translation) -> Surface:
    rotation = _check_rotation(rotation)
    translation = np.asarray(translation, dtype=float)
    if translation.shape != (3,):
        raise InvalidArgument("translation must be a 3-vector")
    return Surface(
        rotation @ surface.center + translation,
        rotation @ surface.basis_u,
        rotation @ surface.basis_v,
        surface.len_u,
        surface.len_v,
    )


def transform_points(points: np.ndarray, rotation, translation) -> np.ndarray:
    rotation = _check_rotation(rotation)
    return np.asarray(points, dtype=float) @ rotation.T + np.asarray(translation, dtype=float)


def fraunhofer_distance(D: float, wave: Wave) -> float:
    """Far-field boundary 2 D^2 / lambda for an antenna of size ``D``."""
    if not D >= 0:
        raise InvalidArgument(f"antenna size must be non-negative, got {D}")
    return 2.0 * D * D / wave.wavelength


def _strictly_one_side(surface: Surface, other: Surface) -> bool:
    h = other.local_coords(surface.corners())[:, 2]
    return bool(np.all(h > 0) or np.all(h < 0))


def check_separated(a: Surface, b: Surface) -> None:
    """Raise if the two rectangles may touch or intersect.

    Two convex planar pieces are disjoint when one lies strictly on one side
    of the other's plane; coplanar or crossing layouts are rejected.
    """
    if _strictly_one_side(a, b) or _strictly_one_side(b, a):
        return
    raise GeometryError("surfaces touch or cross each other's plane")
