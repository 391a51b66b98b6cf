"""Cartesian/spherical conversions and rotation parametrizations.

All Cartesian coordinates are expressed in a local-level NED-style frame:
x north, y east, z down, right-handed.  Azimuth is measured in the x-y
plane from +x toward +y, elevation from the x-y plane toward +z.  Euler
angles follow the intrinsic Z-Y-X (yaw, pitch, roll) convention.
"""

from typing import NamedTuple

import numpy as np

from .errors import GimbalLockError, MissingRangeError, ZeroVectorError

ZERO_NORM_TOL = 1e-12
GIMBAL_TOL = 1e-9
ROTATION_TOL = 1e-9


class Spherical(NamedTuple):
    """Spherical coordinates (range in meters, angles in radians).

    ``rng`` is None for bearing-only (2D sensor) data.  Fields may hold
    arrays when produced from stacked Cartesian input.
    """

    rng: object
    az: object
    el: object


class EulerAngles(NamedTuple):
    """Intrinsic Z-Y-X Euler angles in radians: yaw, pitch, roll."""

    psi: float
    theta: float
    phi: float


def wrap_angle(angle):
    """Wrap an angle (or array of angles) to (-pi, pi]."""
    return np.pi - np.mod(np.pi - np.asarray(angle, dtype=float), 2.0 * np.pi)


def cart_to_spherical(p) -> Spherical:
    """Convert Cartesian positions to range/azimuth/elevation.

    Parameters
    ----------
    p : array_like, shape (3,) or (..., 3)
        Position in meters.

    Returns
    -------
    Spherical
        Range in meters, azimuth in (-pi, pi] (four-quadrant), elevation
        in [-pi/2, pi/2].  Scalar fields for a single vector, arrays for
        stacked input.

    Raises
    ------
    ZeroVectorError
        If any input vector has norm below 1e-12 (angles undefined).
    """
    p = np.asarray(p, dtype=float)
    rng = np.linalg.norm(p, axis=-1)
    if np.any(rng < ZERO_NORM_TOL):
        raise ZeroVectorError("cannot take angles of a zero-length vector")
    x, y, z = p[..., 0], p[..., 1], p[..., 2]
    az = np.arctan2(y, x)
    el = np.arctan2(z, np.hypot(x, y))
    if p.ndim == 1:
        return Spherical(float(rng), float(az), float(el))
    return Spherical(rng, az, el)


def spherical_to_cart(s: Spherical) -> np.ndarray:
    """Convert range/azimuth/elevation back to Cartesian coordinates.

    Raises
    ------
    MissingRangeError
        If ``s.rng`` is None (bearing-only data has no Cartesian point).
    """
    if s.rng is None:
        raise MissingRangeError("range is required to form a Cartesian point")
    rng = np.asarray(s.rng, dtype=float)
    return rng[..., np.newaxis] * direction_from_angles(s.az, s.el)


def direction_from_angles(az, el) -> np.ndarray:
    """Unit direction vector(s) for azimuth/elevation angles.

    Broadcasts over array input; the last axis of the result has size 3.
    """
    az = np.asarray(az, dtype=float)
    el = np.asarray(el, dtype=float)
    ce = np.cos(el)
    return np.stack([ce * np.cos(az), ce * np.sin(az), np.sin(el)], axis=-1)


def euler_to_rotation(angles: EulerAngles) -> np.ndarray:
    """Rotation matrix for intrinsic Z-Y-X Euler angles.

    R = Rz(psi) @ Ry(theta) @ Rx(phi), proper orthogonal.
    """
    psi, theta, phi = angles
    cz, sz = np.cos(psi), np.sin(psi)
    cy, sy = np.cos(theta), np.sin(theta)
    cx, sx = np.cos(phi), np.sin(phi)
    rz = np.array([[cz, -sz, 0.0], [sz, cz, 0.0], [0.0, 0.0, 1.0]])
    ry = np.array([[cy, 0.0, sy], [0.0, 1.0, 0.0], [-sy, 0.0, cy]])
    rx = np.array([[1.0, 0.0, 0.0], [0.0, cx, -sx], [0.0, sx, cx]])
    return rz @ ry @ rx


def rotation_to_euler(rot) -> EulerAngles:
    """Recover intrinsic Z-Y-X Euler angles from a rotation matrix.

    Returns yaw and roll in (-pi, pi], pitch in [-pi/2, pi/2].

    Raises
    ------
    GimbalLockError
        If pitch is within ~1e-9 of +/-90 deg, where yaw and roll are
        not separately observable.
    """
    rot = np.asarray(rot, dtype=float)
    if abs(rot[2, 0]) >= 1.0 - GIMBAL_TOL:
        raise GimbalLockError("pitch at +/-90 deg, yaw/roll not unique")
    theta = np.arcsin(-rot[2, 0])
    psi = np.arctan2(rot[1, 0], rot[0, 0])
    phi = np.arctan2(rot[2, 1], rot[2, 2])
    return EulerAngles(float(wrap_angle(psi)), float(theta), float(wrap_angle(phi)))


def rotation_from_rotvec(rotvec) -> np.ndarray:
    """Rotation matrix for a rotation vector (axis * angle, radians)."""
    rotvec = np.asarray(rotvec, dtype=float)
    angle = np.linalg.norm(rotvec)
    if angle < 1e-12:
        # first-order term only; higher orders are below double precision
        return np.eye(3) + skew(rotvec)
    k = skew(rotvec / angle)
    return np.eye(3) + np.sin(angle) * k + (1.0 - np.cos(angle)) * (k @ k)


def skew(v) -> np.ndarray:
    """Skew-symmetric cross-product matrix of a 3-vector."""
    x, y, z = np.asarray(v, dtype=float)
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def is_rotation_matrix(rot, tol: float = ROTATION_TOL) -> bool:
    """True if ``rot`` is orthogonal with determinant +1 within ``tol``."""
    rot = np.asarray(rot, dtype=float)
    if rot.shape != (3, 3):
        return False
    ortho = np.max(np.abs(rot.T @ rot - np.eye(3)))
    return bool(ortho <= tol and abs(np.linalg.det(rot) - 1.0) <= tol)


def geodesic_angle(rot_a, rot_b) -> float:
    """Angle in radians of the rotation taking ``rot_a`` to ``rot_b``.

    Computed as atan2 of the rotation's sine (from the antisymmetric
    part) and cosine (from the trace), which stays accurate for angles
    near zero where the plain arccos form loses ~8 digits.
    """
    rot_a = np.asarray(rot_a, dtype=float)
    rot_b = np.asarray(rot_b, dtype=float)
    d = rot_a.T @ rot_b
    sine_vec = 0.5 * np.array([d[2, 1] - d[1, 2],
                               d[0, 2] - d[2, 0],
                               d[1, 0] - d[0, 1]])
    cosine = (np.trace(d) - 1.0) / 2.0
    return float(np.arctan2(np.linalg.norm(sine_vec), cosine))


def collinearity_ratio(points) -> float:
    """Spread of a point set transverse to its dominant axis.

    Returns sigma_2 / sigma_1 of the centered coordinates (second and
    largest singular values).  Near zero means the points are close to
    a straight line.
    """
    points = np.asarray(points, dtype=float)
    centered = points - points.mean(axis=0)
    sv = np.linalg.svd(centered, compute_uv=False)
    if sv[0] < ZERO_NORM_TOL:
        return 0.0
    return float(sv[1] / sv[0])
