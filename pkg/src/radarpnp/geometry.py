"""
Value types and exact coordinate transforms.

Radar detections are measured in spherical coordinates (range, elevation
from the +z axis, azimuth from the +x axis).  A ``Pose`` maps radar-frame
points into the camera frame, ``x_cam = R x_radar + t``, and a pinhole
``CameraIntrinsics`` maps camera-frame points to pixels.

All types are immutable; all functions are pure.
"""

# Copyright (c) 2026, the radarpnp contributors
#
# Released under the terms of the GNU GPL
# http://www.gnu.org/copyleft/gpl.html

import math
import warnings
from collections import namedtuple

import numpy as np
from scipy.spatial.transform import Rotation

from .errors import BehindCameraError, DomainError


TWO_PI = 2.0 * math.pi

# Euler convention of the rotation error metric: intrinsic roll-pitch-yaw.
EULER_SEQUENCE = 'XYZ'

ORTHONORMALITY_TOLERANCE = 1e-9


def _finite(*values):
    return all(math.isfinite(v) for v in values)


def wrap_angle(phi):
    """Wrap an angle into [0, 2*pi).

        >>> print(round(wrap_angle(-math.pi / 2), 12))
        4.712388980385
        >>> wrap_angle(-1e-300)
        0.0

    """
    phi = math.fmod(phi, TWO_PI)
    if phi < 0:
        phi += TWO_PI
    if phi >= TWO_PI:
        # -tiny + 2*pi rounds up to 2*pi
        phi = 0.0
    return phi


def wrap_angle_array(phi):
    """Array version of wrap_angle."""
    phi = np.mod(phi, TWO_PI)
    return np.where(phi >= TWO_PI, 0.0, phi)


class SphericalPoint(namedtuple('SphericalPoint', 'range theta phi')):
    """Radar measurement: range (m), elevation from +z (rad), azimuth (rad).

    Construction rejects values outside range > 0, theta in [0, pi],
    phi in [0, 2*pi).

        >>> SphericalPoint(1.0, math.pi / 2, 0.0)
        SphericalPoint(range=1.0, theta=1.5707963267948966, phi=0.0)
        >>> SphericalPoint(1.0, 4.0, 0.0)
        Traceback (most recent call last):
          ...
        radarpnp.errors.DomainError: elevation 4.0 outside [0, pi]

    """

    __slots__ = ()

    def __new__(cls, range, theta, phi):
        range, theta, phi = float(range), float(theta), float(phi)
        if not (_finite(range) and range > 0):
            raise DomainError("range %r is not strictly positive" % range)
        if not (0.0 <= theta <= math.pi):
            raise DomainError("elevation %r outside [0, pi]" % theta)
        if not (0.0 <= phi < TWO_PI):
            raise DomainError("azimuth %r outside [0, 2*pi)" % phi)
        return super(SphericalPoint, cls).__new__(cls, range, theta, phi)


def canonical_spherical(range, theta, phi):
    """Build a SphericalPoint from angles that may have left their domain.

    Elevations outside [0, pi] are reflected through the pole (which turns
    the azimuth by pi) and the azimuth is wrapped into [0, 2*pi).  The
    Cartesian point is unchanged.
    """
    theta = math.fmod(theta, TWO_PI)
    if theta < 0:
        theta += TWO_PI
    if theta > math.pi:
        theta = TWO_PI - theta
        phi += math.pi
    return SphericalPoint(range, theta, wrap_angle(phi))


def canonical_spherical_array(sph):
    """Array version of canonical_spherical; returns a new (..., 3) array."""
    sph = np.array(sph, dtype=float)
    theta = np.mod(sph[..., 1], TWO_PI)
    flip = theta > math.pi
    sph[..., 1] = np.where(flip, TWO_PI - theta, theta)
    sph[..., 2] = wrap_angle_array(sph[..., 2] + np.where(flip, math.pi, 0.0))
    return sph


class CartesianPoint(namedtuple('CartesianPoint', 'x y z')):
    """Point in meters (radar frame unless stated otherwise)."""

    __slots__ = ()

    def __new__(cls, x, y, z):
        x, y, z = float(x), float(y), float(z)
        if not _finite(x, y, z):
            raise DomainError("non-finite point (%r, %r, %r)" % (x, y, z))
        return super(CartesianPoint, cls).__new__(cls, x, y, z)


class PixelPoint(namedtuple('PixelPoint', 'u v')):
    """Image coordinates in pixels."""

    __slots__ = ()

    def __new__(cls, u, v):
        u, v = float(u), float(v)
        if not _finite(u, v):
            raise DomainError("non-finite pixel (%r, %r)" % (u, v))
        return super(PixelPoint, cls).__new__(cls, u, v)


class CameraIntrinsics(namedtuple('CameraIntrinsics', 'fx fy u0 v0')):
    """Zero-skew pinhole intrinsics in pixels.

        >>> CameraIntrinsics(100, 200, 320, 240).matrix.tolist()
        [[100.0, 0.0, 320.0], [0.0, 200.0, 240.0], [0.0, 0.0, 1.0]]

    """

    __slots__ = ()

    def __new__(cls, fx, fy, u0, v0):
        fx, fy, u0, v0 = float(fx), float(fy), float(u0), float(v0)
        if not _finite(fx, fy, u0, v0):
            raise DomainError("non-finite intrinsics")
        if not (fx > 0 and fy > 0):
            raise DomainError("focal lengths must be positive, got %r, %r"
                              % (fx, fy))
        return super(CameraIntrinsics, cls).__new__(cls, fx, fy, u0, v0)

    @property
    def matrix(self):
        return np.array([[self.fx, 0.0, self.u0],
                         [0.0, self.fy, self.v0],
                         [0.0, 0.0, 1.0]])

    def normalize(self, pixels):
        """Apply K^-1 to pixels: (..., 2) -> homogeneous (..., 3) rays."""
        pixels = np.asarray(pixels, dtype=float)
        rays = np.ones(pixels.shape[:-1] + (3,))
        rays[..., 0] = (pixels[..., 0] - self.u0) / self.fx
        rays[..., 1] = (pixels[..., 1] - self.v0) / self.fy
        return rays


def nearest_rotation(matrix):
    """Closest proper rotation to a 3x3 matrix in the Frobenius sense."""
    u, _, vt = np.linalg.svd(np.asarray(matrix, dtype=float))
    d = np.sign(np.linalg.det(u @ vt))
    if d == 0:
        d = 1.0
    return u @ np.diag([1.0, 1.0, d]) @ vt


def skew(v):
    """Cross-product matrices of (..., 3) vectors, shape (..., 3, 3)."""
    v = np.asarray(v, dtype=float)
    out = np.zeros(v.shape[:-1] + (3, 3))
    out[..., 0, 1] = -v[..., 2]
    out[..., 0, 2] = v[..., 1]
    out[..., 1, 0] = v[..., 2]
    out[..., 1, 2] = -v[..., 0]
    out[..., 2, 0] = -v[..., 1]
    out[..., 2, 1] = v[..., 0]
    return out


class Pose(object):
    """Rigid transform from the radar frame to the camera frame.

    Maps x to ``rotation @ x + translation``.  The rotation must be
    orthonormal with determinant +1 to within 1e-9.
    """

    __slots__ = ('rotation', 'translation')

    def __init__(self, rotation, translation):
        rotation = np.array(rotation, dtype=float).reshape(3, 3)
        translation = np.array(translation, dtype=float).reshape(3)
        if not (np.all(np.isfinite(rotation))
                and np.all(np.isfinite(translation))):
            raise DomainError("non-finite pose")
        gram_error = np.linalg.norm(rotation.T @ rotation - np.eye(3))
        if (gram_error >= ORTHONORMALITY_TOLERANCE
                or abs(np.linalg.det(rotation) - 1.0)
                >= ORTHONORMALITY_TOLERANCE):
            raise DomainError("rotation is not a proper orthonormal matrix")
        rotation.flags.writeable = False
        translation.flags.writeable = False
        self.rotation = rotation
        self.translation = translation

    @classmethod
    def identity(cls):
        return cls(np.eye(3), np.zeros(3))

    @classmethod
    def from_rotvec(cls, rotvec, translation=(0.0, 0.0, 0.0)):
        """Pose whose rotation is exp([rotvec]x)."""
        return cls(Rotation.from_rotvec(rotvec).as_matrix(), translation)

    @classmethod
    def from_quaternion(cls, quaternion, translation):
        """Pose from a (w, x, y, z) quaternion."""
        w, x, y, z = quaternion
        return cls(Rotation.from_quat([x, y, z, w]).as_matrix(), translation)

    @classmethod
    def from_euler(cls, angles, translation=(0.0, 0.0, 0.0)):
        """Pose from intrinsic XYZ Euler angles in radians."""
        return cls(Rotation.from_euler(EULER_SEQUENCE, angles).as_matrix(),
                   translation)

    def transform(self, points):
        """Map (..., 3) radar-frame points into the camera frame."""
        return np.asarray(points, dtype=float) @ self.rotation.T \
            + self.translation

    def compose(self, other):
        """The pose applying ``other`` first, then ``self``."""
        return Pose(self.rotation @ other.rotation,
                    self.rotation @ other.translation + self.translation)

    def inverse(self):
        return Pose(self.rotation.T, -self.rotation.T @ self.translation)

    def retract(self, delta):
        """Apply a local increment (rotvec, translation) of length 6.

        The rotation increment multiplies from the left and the result is
        re-orthonormalized.
        """
        delta = np.asarray(delta, dtype=float)
        rotation = Rotation.from_rotvec(delta[:3]).as_matrix() @ self.rotation
        return Pose(nearest_rotation(rotation), self.translation + delta[3:])

    def as_rotvec(self):
        return Rotation.from_matrix(self.rotation).as_rotvec()

    def as_quaternion(self):
        """Unit quaternion (w, x, y, z) with w >= 0."""
        x, y, z, w = Rotation.from_matrix(self.rotation).as_quat()
        q = np.array([w, x, y, z])
        if w < 0:
            q = -q
        return q / np.linalg.norm(q)

    def as_euler(self):
        """Intrinsic XYZ Euler angles in radians."""
        return euler_angles(self.rotation)

    def __eq__(self, other):
        return (isinstance(other, Pose)
                and np.array_equal(self.rotation, other.rotation)
                and np.array_equal(self.translation, other.translation))

    def __ne__(self, other):
        return not self.__eq__(other)

    __hash__ = None

    def __repr__(self):
        return 'Pose(rotation=%r, translation=%r)' % (
            self.rotation.tolist(), self.translation.tolist())


def spherical_to_cartesian_array(sph):
    """Convert (..., 3) arrays of (range, theta, phi) to (x, y, z)."""
    sph = np.asarray(sph, dtype=float)
    rho, theta, phi = sph[..., 0], sph[..., 1], sph[..., 2]
    sin_theta = np.sin(theta)
    return np.stack([rho * sin_theta * np.cos(phi),
                     rho * sin_theta * np.sin(phi),
                     rho * np.cos(theta)], axis=-1)


def cartesian_to_spherical_array(xyz):
    """Convert (..., 3) arrays of (x, y, z) to (range, theta, phi).

    Azimuth is 0 on the z axis.  Zero-norm rows raise DomainError.
    """
    xyz = np.asarray(xyz, dtype=float)
    x, y, z = xyz[..., 0], xyz[..., 1], xyz[..., 2]
    planar = np.hypot(x, y)
    rho = np.hypot(planar, z)
    if np.any(rho == 0):
        raise DomainError("cannot convert the origin to spherical coordinates")
    theta = np.arctan2(planar, z)
    phi = np.where(planar == 0, 0.0, wrap_angle_array(np.arctan2(y, x)))
    return np.stack([rho, theta, phi], axis=-1)


def spherical_to_cartesian(p):
    """Convert a SphericalPoint to a CartesianPoint.

        >>> spherical_to_cartesian(SphericalPoint(2.0, 0.0, 1.3))
        CartesianPoint(x=0.0, y=0.0, z=2.0)

    """
    return CartesianPoint(*spherical_to_cartesian_array(tuple(p)))


def cartesian_to_spherical(p):
    """Convert a CartesianPoint to a SphericalPoint.

    On the z axis the azimuth is defined as 0.

        >>> cartesian_to_spherical(CartesianPoint(0, 0, -3))
        SphericalPoint(range=3.0, theta=3.141592653589793, phi=0.0)

    """
    x, y, z = (float(c) for c in p)
    planar = math.hypot(x, y)
    rho = math.hypot(planar, z)
    if rho == 0:
        raise DomainError("cannot convert the origin to spherical coordinates")
    theta = math.atan2(planar, z)
    phi = 0.0 if planar == 0 else wrap_angle(math.atan2(y, x))
    return SphericalPoint(rho, theta, phi)


def project_points(points, pose, K):
    """Project (n, 3) radar-frame points to (n, 2) pixels.

    Raises BehindCameraError naming the first point with non-positive depth.
    """
    camera = pose.transform(np.atleast_2d(points))
    depth = camera[:, 2]
    behind = np.flatnonzero(~(depth > 0))
    if behind.size:
        i = int(behind[0])
        raise BehindCameraError(
            "point %d at %s has camera depth %r" % (
                i, np.asarray(points, dtype=float).reshape(-1, 3)[i].tolist(),
                float(depth[i])),
            index=i)
    return np.stack([K.fx * camera[:, 0] / depth + K.u0,
                     K.fy * camera[:, 1] / depth + K.v0], axis=-1)


def project(p_radar, pose, K):
    """Project one radar-frame point to a PixelPoint.

        >>> project(CartesianPoint(1, 0, 2), Pose.identity(),
        ...         CameraIntrinsics(100, 100, 320, 240))
        PixelPoint(u=370.0, v=240.0)

    """
    u, v = project_points(np.asarray(tuple(p_radar), dtype=float), pose, K)[0]
    return PixelPoint(u, v)


def euler_angles(rotation):
    """Intrinsic XYZ Euler angles of a rotation matrix.

    At gimbal lock the third angle is set to zero; no error is raised.
    """
    with warnings.catch_warnings():
        warnings.simplefilter('ignore', UserWarning)
        return Rotation.from_matrix(
            np.asarray(rotation, dtype=float)).as_euler(EULER_SEQUENCE)


def rotation_error(R_est, R_gt):
    """Norm of the XYZ Euler angles of R_gt^-1 R_est, in radians."""
    relative = np.asarray(R_gt, dtype=float).T @ np.asarray(R_est, dtype=float)
    return float(np.linalg.norm(euler_angles(relative)))


def translation_error(t_est, t_gt):
    """Euclidean distance between two translations, in meters.

        >>> print(round(translation_error([0.1, 0.2, 0.2], [0, 0, 0]), 12))
        0.3

    """
    return float(np.linalg.norm(np.asarray(t_est, dtype=float)
                                - np.asarray(t_gt, dtype=float)))
