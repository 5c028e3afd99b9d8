import doctest
import math
import unittest

import numpy as np

from radarpnp.errors import BehindCameraError, DomainError
from radarpnp.geometry import (
    CameraIntrinsics, CartesianPoint, PixelPoint, Pose, SphericalPoint,
    canonical_spherical, canonical_spherical_array,
    cartesian_to_spherical, cartesian_to_spherical_array, nearest_rotation,
    project, project_points, rotation_error, skew, spherical_to_cartesian,
    spherical_to_cartesian_array, translation_error, wrap_angle)


def random_spherical(rng, n):
    return np.stack([rng.uniform(0.5, 50, n), rng.uniform(0, math.pi, n),
                     rng.uniform(0, 2 * math.pi, n)], axis=-1)


class TestValueTypes(unittest.TestCase):

    def test_spherical_point_domain(self):
        self.assertRaises(DomainError, SphericalPoint, 0.0, 1.0, 0.0)
        self.assertRaises(DomainError, SphericalPoint, -1.0, 1.0, 0.0)
        self.assertRaises(DomainError, SphericalPoint, 1.0, -0.1, 0.0)
        self.assertRaises(DomainError, SphericalPoint, 1.0, 1.0, 2 * math.pi)
        self.assertRaises(DomainError, SphericalPoint, float('nan'), 1, 0)
        SphericalPoint(1.0, math.pi, 0.0)

    def test_domain_error_is_a_value_error(self):
        self.assertRaises(ValueError, SphericalPoint, 1.0, 4.0, 0.0)

    def test_non_finite_points_and_pixels(self):
        self.assertRaises(DomainError, CartesianPoint, 1, float('inf'), 0)
        self.assertRaises(DomainError, PixelPoint, float('nan'), 0)

    def test_intrinsics(self):
        self.assertRaises(DomainError, CameraIntrinsics, 0, 100, 320, 240)
        K = CameraIntrinsics(100, 200, 320, 240)
        rays = K.normalize([[420.0, 440.0], [320.0, 240.0]])
        np.testing.assert_allclose(rays, [[1.0, 1.0, 1.0], [0.0, 0.0, 1.0]])

    def test_wrap_angle(self):
        self.assertEqual(wrap_angle(0.0), 0.0)
        self.assertAlmostEqual(wrap_angle(7.0), 7.0 - 2 * math.pi)
        self.assertAlmostEqual(wrap_angle(-0.5), 2 * math.pi - 0.5)


class TestConversions(unittest.TestCase):

    def test_round_trip(self):
        rng = np.random.default_rng(1)
        sph = random_spherical(rng, 200)
        back = cartesian_to_spherical_array(spherical_to_cartesian_array(sph))
        np.testing.assert_allclose(back, sph, rtol=0, atol=1e-10)

    def test_scalar_and_array_forms_agree(self):
        p = SphericalPoint(3.0, 1.2, 4.0)
        c = spherical_to_cartesian(p)
        np.testing.assert_allclose(
            c, spherical_to_cartesian_array([3.0, 1.2, 4.0]), rtol=1e-15)
        q = cartesian_to_spherical(c)
        np.testing.assert_allclose(q, p, rtol=1e-12)

    def test_origin(self):
        self.assertRaises(DomainError, cartesian_to_spherical,
                          CartesianPoint(0, 0, 0))
        self.assertRaises(DomainError, cartesian_to_spherical_array,
                          [[1, 0, 0], [0, 0, 0]])

    def test_azimuth_on_the_axis(self):
        self.assertEqual(cartesian_to_spherical((0, 0, 2)).phi, 0.0)

    def test_canonical_spherical_keeps_the_point(self):
        p = canonical_spherical(2.0, 4.0, 0.5)
        self.assertAlmostEqual(p.theta, 2 * math.pi - 4.0)
        self.assertAlmostEqual(p.phi, 0.5 + math.pi)
        np.testing.assert_allclose(spherical_to_cartesian(p),
                                   spherical_to_cartesian_array([2.0, 4.0, 0.5]),
                                   atol=1e-12)

    def test_canonical_spherical_array(self):
        raw = np.array([[2.0, -0.3, -0.2], [1.0, 3.5, 7.0], [5.0, 1.0, 1.0]])
        canonical = canonical_spherical_array(raw)
        self.assertTrue(np.all(canonical[:, 1] >= 0))
        self.assertTrue(np.all(canonical[:, 1] <= math.pi))
        self.assertTrue(np.all(canonical[:, 2] >= 0))
        self.assertTrue(np.all(canonical[:, 2] < 2 * math.pi))
        np.testing.assert_allclose(spherical_to_cartesian_array(canonical),
                                   spherical_to_cartesian_array(raw),
                                   atol=1e-12)
        for row in canonical:
            SphericalPoint(*row)


class TestPose(unittest.TestCase):

    def setUp(self):
        self.pose = Pose.from_rotvec([0.3, -0.2, 1.1], [0.5, -1.0, 2.0])

    def test_rejects_non_rotations(self):
        self.assertRaises(DomainError, Pose, np.diag([1.0, 1.0, -1.0]),
                          [0, 0, 0])
        self.assertRaises(DomainError, Pose, 2 * np.eye(3), [0, 0, 0])
        self.assertRaises(DomainError, Pose, np.eye(3), [0, float('nan'), 0])

    def test_is_immutable(self):
        self.assertRaises(ValueError, self.pose.rotation.__setitem__,
                          (0, 0), 1.0)

    def test_compose_with_inverse(self):
        identity = self.pose.compose(self.pose.inverse())
        np.testing.assert_allclose(identity.rotation, np.eye(3), atol=1e-12)
        np.testing.assert_allclose(identity.translation, 0, atol=1e-12)

    def test_transform(self):
        points = np.array([[1.0, 2.0, 3.0], [-1.0, 0.0, 5.0]])
        expected = points @ self.pose.rotation.T + self.pose.translation
        np.testing.assert_allclose(self.pose.transform(points), expected)

    def test_quaternion(self):
        q = self.pose.as_quaternion()
        self.assertAlmostEqual(np.linalg.norm(q), 1.0, places=15)
        self.assertGreaterEqual(q[0], 0.0)
        back = Pose.from_quaternion(q, self.pose.translation)
        np.testing.assert_allclose(back.rotation, self.pose.rotation,
                                   atol=1e-12)

    def test_euler(self):
        back = Pose.from_euler(self.pose.as_euler(), self.pose.translation)
        np.testing.assert_allclose(back.rotation, self.pose.rotation,
                                   atol=1e-12)

    def test_rotvec(self):
        np.testing.assert_allclose(self.pose.as_rotvec(), [0.3, -0.2, 1.1],
                                   atol=1e-12)

    def test_retract(self):
        self.assertEqual(self.pose.retract(np.zeros(6)).rotation.tolist(),
                         nearest_rotation(self.pose.rotation).tolist())
        moved = self.pose.retract([0, 0, 0.1, 1, 2, 3])
        np.testing.assert_allclose(moved.translation,
                                   self.pose.translation + [1, 2, 3])
        expected = Pose.from_rotvec([0, 0, 0.1]).rotation @ self.pose.rotation
        np.testing.assert_allclose(moved.rotation, expected, atol=1e-12)

    def test_equality(self):
        same = Pose(self.pose.rotation, self.pose.translation)
        self.assertEqual(self.pose, same)
        self.assertNotEqual(self.pose, Pose.identity())

    def test_nearest_rotation(self):
        noisy = self.pose.rotation + 1e-3 * np.arange(9).reshape(3, 3)
        fixed = nearest_rotation(noisy)
        np.testing.assert_allclose(fixed.T @ fixed, np.eye(3), atol=1e-12)
        self.assertAlmostEqual(np.linalg.det(fixed), 1.0)

    def test_skew(self):
        a = np.array([1.0, -2.0, 0.5])
        b = np.array([0.3, 0.7, -1.1])
        np.testing.assert_allclose(skew(a) @ b, np.cross(a, b))


class TestProjection(unittest.TestCase):

    def test_exact_configuration(self):
        p = spherical_to_cartesian(SphericalPoint(3.0, 0.0, 0.0))
        pose = Pose(np.eye(3), [0.5, -0.25, 1.0])
        pixel = project(p, pose, CameraIntrinsics(100, 100, 320, 240))
        self.assertAlmostEqual(pixel.u, 332.5, places=12)
        self.assertAlmostEqual(pixel.v, 233.75, places=12)

    def test_behind_camera(self):
        K = CameraIntrinsics(100, 100, 320, 240)
        points = [[0, 0, 1], [0, 0, 2], [0, 0, -1], [0, 0, 0]]
        with self.assertRaises(BehindCameraError) as cm:
            project_points(points, Pose.identity(), K)
        self.assertEqual(cm.exception.index, 2)
        self.assertRaises(BehindCameraError, project, (1, 1, 0),
                          Pose.identity(), K)


class TestErrorMetrics(unittest.TestCase):

    def test_rotation_error(self):
        R = Pose.from_rotvec([0.3, 0.1, -0.4]).rotation
        self.assertAlmostEqual(rotation_error(R, R), 0.0, places=12)
        rx = Pose.from_rotvec([0.1, 0, 0]).rotation
        self.assertAlmostEqual(rotation_error(R @ rx, R), 0.1, places=12)

    def test_rotation_error_is_not_negative(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            a = Pose.from_rotvec(rng.normal(size=3)).rotation
            b = Pose.from_rotvec(rng.normal(size=3)).rotation
            self.assertGreaterEqual(rotation_error(a, b), 0.0)

    def test_translation_error(self):
        self.assertEqual(translation_error([1, 2, 2], [0, 0, 0]), 3.0)


def test_suite():
    optionflags = doctest.NORMALIZE_WHITESPACE | doctest.ELLIPSIS
    loader = unittest.defaultTestLoader
    return unittest.TestSuite([
        doctest.DocTestSuite('radarpnp.geometry', optionflags=optionflags),
        loader.loadTestsFromTestCase(TestValueTypes),
        loader.loadTestsFromTestCase(TestConversions),
        loader.loadTestsFromTestCase(TestPose),
        loader.loadTestsFromTestCase(TestProjection),
        loader.loadTestsFromTestCase(TestErrorMetrics),
    ])
