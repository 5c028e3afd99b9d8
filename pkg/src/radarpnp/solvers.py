"""
Pose estimators for radar-camera correspondences.

Three nonlinear refiners share one Levenberg-Marquardt loop and differ only
in the residual they minimize:

``3dupnp``
    the bias-compensated 3D residual in the radar frame, whitened by the
    propagated spherical noise covariance, with the depth along each pixel
    ray chosen to minimize it (squared Mahalanobis distance to the ray);

``reproj``
    the pixel reprojection error;

``algebraic``
    the algebraic point residual ``c_xy - q c_z`` in normalized image
    coordinates.

The ``linear`` solver is the EPnP initializer the refiners start from.
"""

# Copyright (c) 2026, the radarpnp contributors
#
# Released under the terms of the GNU GPL
# http://www.gnu.org/copyleft/gpl.html

import copy
import logging
import math
from collections import namedtuple

import numpy as np
import scipy.linalg

from .epnp import epnp
from .errors import (
    BehindCameraError, DomainError, InitializationError)
from .geometry import (
    CartesianPoint, PixelPoint, SphericalPoint, cartesian_to_spherical,
    skew, spherical_to_cartesian)
from .noise_model import (
    propagate_covariance_array, whitening_factor)


log = logging.getLogger(__name__)


MIN_DAMPING = 1e-12
MAX_DAMPING = 1e12
DAMPING_FACTOR = 10.0


class Correspondence(object):
    """A radar measurement matched with the pixel it was seen at."""

    __slots__ = ('radar_meas', 'pixel', 'cartesian')

    def __init__(self, radar_meas, pixel):
        self.radar_meas = SphericalPoint(*radar_meas)
        self.pixel = PixelPoint(*pixel)
        self.cartesian = spherical_to_cartesian(self.radar_meas)

    @classmethod
    def from_cartesian(cls, point, pixel):
        return cls(cartesian_to_spherical(CartesianPoint(*point)), pixel)

    def __eq__(self, other):
        return (isinstance(other, Correspondence)
                and self.radar_meas == other.radar_meas
                and self.pixel == other.pixel)

    def __ne__(self, other):
        return not self.__eq__(other)

    def __hash__(self):
        return hash((self.radar_meas, self.pixel))

    def __repr__(self):
        return 'Correspondence(%r, %r)' % (tuple(self.radar_meas),
                                           tuple(self.pixel))


def correspondence_arrays(corrs):
    """Stack correspondences into (spherical, cartesian, pixels) arrays."""
    corrs = list(corrs)
    spherical = np.array([tuple(c.radar_meas) for c in corrs],
                         dtype=float).reshape(-1, 3)
    cartesian = np.array([tuple(c.cartesian) for c in corrs],
                         dtype=float).reshape(-1, 3)
    pixels = np.array([tuple(c.pixel) for c in corrs],
                      dtype=float).reshape(-1, 2)
    return spherical, cartesian, pixels


class SolveOptions(namedtuple('SolveOptions', 'max_iterations cost_tolerance'
                              ' param_tolerance initial_damping')):
    """Levenberg-Marquardt stopping rules and starting damping."""

    __slots__ = ()

    def __new__(cls, max_iterations=100, cost_tolerance=1e-10,
                param_tolerance=1e-10, initial_damping=1e-3):
        self = super(SolveOptions, cls).__new__(
            cls, int(max_iterations), float(cost_tolerance),
            float(param_tolerance), float(initial_damping))
        for name, value in zip(self._fields, self):
            if not value > 0:
                raise DomainError("%s must be positive, got %r"
                                  % (name, value))
        return self


class SolveReport(namedtuple('SolveReport', 'pose final_cost iterations'
                             ' converged per_point_residuals')):
    """Outcome of a solve.

    ``per_point_residuals`` holds each correspondence's squared residual
    norm at the returned pose, in input order.
    """

    __slots__ = ()


#
# Residual models
#

class ResidualModel(object):
    """Stacked residuals and their Jacobian w.r.t. a left pose increment.

    The increment is (rotation vector, translation) as taken by
    ``Pose.retract``.
    """

    dimension = None
    per_point_attributes = ('points',)
    needs_positive_depth = False

    def __init__(self, cartesian):
        self.points = np.asarray(cartesian, dtype=float)

    def depths(self, pose):
        return self.points @ pose.rotation[2] + pose.translation[2]

    def residuals(self, pose):
        raise NotImplementedError

    def jacobian(self, pose):
        raise NotImplementedError

    def cost(self, residuals):
        return float(np.sum(np.square(residuals)))

    def per_point(self, pose):
        return np.sum(np.square(self.residuals(pose)), axis=1)

    def subset(self, indices):
        """The same model restricted to the given points."""
        other = copy.copy(self)
        for attr in self.per_point_attributes:
            setattr(other, attr, getattr(self, attr)[indices])
        return other


class MahalanobisResidual(ResidualModel):
    """Whitened bias-compensated 3D residuals (3 per point).

    Each residual runs from the back-projected pixel ray to the debiased
    radar point.  The depth along the ray is eliminated in closed form, so
    a residual has two degrees of freedom and its squared norm is the
    Mahalanobis distance of the point from the ray.
    """

    dimension = 3
    per_point_attributes = ('points', 'rays', 'bias', 'whitening')

    def __init__(self, spherical, cartesian, pixels, K, noise):
        ResidualModel.__init__(self, cartesian)
        self.rays = K.normalize(pixels)
        cartesian_noise = propagate_covariance_array(spherical, noise)
        self.bias = cartesian_noise.bias
        self.whitening = whitening_factor(cartesian_noise.covariance)

    def _whitened(self, pose):
        R, t = pose.rotation, pose.translation
        offset = np.einsum('nij,nj->ni', self.whitening,
                           self.points - self.bias + t @ R)
        direction = np.einsum('nij,nj->ni', self.whitening, self.rays @ R)
        norm2 = np.sum(np.square(direction), axis=1)
        depth = np.sum(direction * offset, axis=1) / norm2
        return offset, direction, norm2, depth

    def residuals(self, pose):
        offset, direction, _, depth = self._whitened(pose)
        return offset - depth[:, None] * direction

    def jacobian(self, pose):
        R, t = pose.rotation, pose.translation
        offset, direction, norm2, depth = self._whitened(pose)
        residuals = offset - depth[:, None] * direction
        n = len(offset)
        # R^T t and R^T ray move by R^T [t]x omega + R^T tau and
        # R^T [ray]x omega under a left increment
        d_offset = self.whitening @ np.concatenate([R.T @ skew(t), R.T],
                                                   axis=1)
        d_direction = np.concatenate(
            [self.whitening @ (R.T @ skew(self.rays)), np.zeros((n, 3, 3))],
            axis=2)
        moved = d_offset - depth[:, None, None] * d_direction
        along = np.einsum('ni,nij->nj', direction, moved) / norm2[:, None]
        turned = (np.einsum('ni,nij->nj', residuals, d_direction)
                  / norm2[:, None])
        return (moved - direction[:, :, None] * along[:, None, :]
                - direction[:, :, None] * turned[:, None, :])


class ReprojectionResidual(ResidualModel):
    """Pixel reprojection errors (2 per point)."""

    dimension = 2
    needs_positive_depth = True
    per_point_attributes = ('points', 'pixels')

    def __init__(self, cartesian, pixels, K):
        ResidualModel.__init__(self, cartesian)
        self.pixels = np.asarray(pixels, dtype=float)
        self.K = K

    def residuals(self, pose):
        camera = pose.transform(self.points)
        z = camera[:, 2]
        return np.stack([self.K.fx * camera[:, 0] / z + self.K.u0,
                         self.K.fy * camera[:, 1] / z + self.K.v0],
                        axis=-1) - self.pixels

    def jacobian(self, pose):
        rotated = self.points @ pose.rotation.T
        camera = rotated + pose.translation
        x, y, z = camera[:, 0], camera[:, 1], camera[:, 2]
        n = len(camera)
        proj = np.zeros((n, 2, 3))
        proj[:, 0, 0] = self.K.fx / z
        proj[:, 0, 2] = -self.K.fx * x / z ** 2
        proj[:, 1, 1] = self.K.fy / z
        proj[:, 1, 2] = -self.K.fy * y / z ** 2
        return np.concatenate([proj @ -skew(rotated), proj], axis=2)


class AlgebraicResidual(ResidualModel):
    """Algebraic point residuals c_xy - q c_z, q normalized (2 per point)."""

    dimension = 2
    per_point_attributes = ('points', 'selector')

    def __init__(self, cartesian, pixels, K):
        ResidualModel.__init__(self, cartesian)
        normalized = K.normalize(pixels)
        n = len(normalized)
        self.selector = np.zeros((n, 2, 3))
        self.selector[:, 0, 0] = 1.0
        self.selector[:, 1, 1] = 1.0
        self.selector[:, :, 2] = -normalized[:, :2]

    def residuals(self, pose):
        return np.einsum('nij,nj->ni', self.selector,
                         pose.transform(self.points))

    def jacobian(self, pose):
        rotated = self.points @ pose.rotation.T
        return np.concatenate([self.selector @ -skew(rotated),
                               self.selector], axis=2)


#
# Levenberg-Marquardt
#

def _evaluate(model, pose):
    if model.needs_positive_depth and not np.all(model.depths(pose) > 0):
        return None, math.inf
    residuals = model.residuals(pose)
    cost = model.cost(residuals)
    if not math.isfinite(cost):
        return None, math.inf
    return residuals, cost


def _check_init(model, init, name):
    depth = model.depths(init)
    in_front = int(np.count_nonzero(depth > 0))
    if in_front == 0:
        raise InitializationError(
            "%s: initial pose puts all %d points behind the camera"
            % (name, len(depth)))
    if model.needs_positive_depth and in_front < len(depth):
        raise InitializationError(
            "%s: initial pose puts %d of %d points behind the camera"
            % (name, len(depth) - in_front, len(depth)))
    if 2 * in_front <= len(depth):
        log.warning("%s: only %d of %d points in front of the camera at the"
                    " initial pose", name, in_front, len(depth))


def levenberg_marquardt(model, init, opts=None, name='lm'):
    """Minimize the model's sum of squared residuals starting at init.

    Steps solve (J^T J + lambda diag(J^T J)) delta = -J^T r and are accepted
    when they do not increase the cost.  Returns a SolveReport; failing to
    meet a tolerance within max_iterations gives ``converged=False``.
    """
    opts = opts or SolveOptions()
    _check_init(model, init, name)
    pose = init
    residuals, cost = _evaluate(model, pose)
    if residuals is None:
        raise InitializationError("%s: cost is not finite at the initial pose"
                                  % name)
    initial_cost = cost
    damping = opts.initial_damping
    converged = cost == 0.0
    iterations = 0
    while not converged and iterations < opts.max_iterations:
        iterations += 1
        J = model.jacobian(pose).reshape(-1, 6)
        r = residuals.reshape(-1)
        hessian = J.T @ J
        gradient = J.T @ r
        diagonal = np.maximum(np.diag(hessian), MIN_DAMPING)
        try:
            step = scipy.linalg.solve(hessian + damping * np.diag(diagonal),
                                      -gradient, assume_a='pos')
        except (np.linalg.LinAlgError, ValueError):
            step = None
        if step is None or not np.all(np.isfinite(step)):
            damping = min(damping * DAMPING_FACTOR, MAX_DAMPING)
            continue
        step_norm = float(np.linalg.norm(step))
        candidate = pose.retract(step)
        new_residuals, new_cost = _evaluate(model, candidate)
        if new_residuals is not None and new_cost <= cost:
            decrease = cost - new_cost
            log.debug("%s iteration %d: cost %.6g -> %.6g (damping %.1e)",
                      name, iterations, cost, new_cost, damping)
            previous_cost = cost
            pose, residuals, cost = candidate, new_residuals, new_cost
            damping = max(damping / DAMPING_FACTOR, MIN_DAMPING)
            if (step_norm < opts.param_tolerance
                    or decrease <= opts.cost_tolerance * previous_cost):
                converged = True
        else:
            log.debug("%s iteration %d: rejected step, cost %.6g (damping"
                      " %.1e)", name, iterations, new_cost, damping)
            damping = min(damping * DAMPING_FACTOR, MAX_DAMPING)
            if step_norm < opts.param_tolerance:
                converged = True
    if converged:
        log.debug("%s converged after %d iterations: cost %.6g (initial"
                  " %.6g)", name, iterations, cost, initial_cost)
    else:
        log.info("%s did not converge in %d iterations: cost %.6g",
                 name, iterations, cost)
    return SolveReport(pose, cost, iterations, converged,
                       np.sum(np.square(residuals), axis=1))


#
# Public solver functions
#

def mahalanobis_model(corrs, K, noise):
    spherical, cartesian, pixels = correspondence_arrays(corrs)
    return MahalanobisResidual(spherical, cartesian, pixels, K, noise)


def residual_3dupnp(pose, c, K, noise):
    """Whitened bias-compensated residual of one correspondence (3,).

    Its squared norm is the point's squared Mahalanobis distance.  Raises
    BehindCameraError if the measured point has non-positive camera depth.
    """
    model = mahalanobis_model([c], K, noise)
    depth = model.depths(pose)[0]
    if not depth > 0:
        raise BehindCameraError(
            "point %s has camera depth %r" % (tuple(c.cartesian), depth),
            index=0)
    return model.residuals(pose)[0]


def solve_linear_init(corrs, K):
    """EPnP pose from at least four correspondences."""
    _, cartesian, pixels = correspondence_arrays(corrs)
    return epnp(cartesian, pixels, K)


def solve_3dupnp(corrs, K, noise, init, opts=None):
    """Minimize the summed squared Mahalanobis residuals."""
    return levenberg_marquardt(mahalanobis_model(corrs, K, noise), init, opts,
                               name='3dupnp')


def solve_reprojection_pnp(corrs, K, init, opts=None):
    """Minimize the summed squared pixel reprojection errors."""
    _, cartesian, pixels = correspondence_arrays(corrs)
    return levenberg_marquardt(ReprojectionResidual(cartesian, pixels, K),
                               init, opts, name='reproj')


def solve_algebraic_pnp(corrs, K, init, opts=None):
    """Minimize the summed squared algebraic point residuals."""
    _, cartesian, pixels = correspondence_arrays(corrs)
    return levenberg_marquardt(AlgebraicResidual(cartesian, pixels, K),
                               init, opts, name='algebraic')


#
# Registry
#

class Solver(object):
    """Base class of the solvers selectable by name."""

    name = None
    description = None

    def __init__(self, options=None):
        self.options = options or SolveOptions()

    def solve(self, corrs, K, noise, init=None):
        """Estimate a pose, starting from the linear solution by default."""
        corrs = list(corrs)
        if init is None:
            init = solve_linear_init(corrs, K)
        return self.refine(corrs, K, noise, init)

    def refine(self, corrs, K, noise, init):
        raise NotImplementedError


class LinearSolver(Solver):
    name = 'linear'
    description = 'EPnP linear initialization only'

    def solve(self, corrs, K, noise, init=None):
        corrs = list(corrs)
        pose = solve_linear_init(corrs, K)
        _, cartesian, pixels = correspondence_arrays(corrs)
        model = ReprojectionResidual(cartesian, pixels, K)
        per_point = model.per_point(pose)
        return SolveReport(pose, float(np.sum(per_point)), 0, True,
                           per_point)


class MahalanobisSolver(Solver):
    name = '3dupnp'
    description = 'bias-compensated covariance-weighted 3D residual (LM)'

    def refine(self, corrs, K, noise, init):
        return solve_3dupnp(corrs, K, noise, init, self.options)


class ReprojectionSolver(Solver):
    name = 'reproj'
    description = 'pixel reprojection error (LM)'

    def refine(self, corrs, K, noise, init):
        return solve_reprojection_pnp(corrs, K, init, self.options)


class AlgebraicSolver(Solver):
    name = 'algebraic'
    description = 'algebraic point residual in normalized coordinates (LM)'

    def refine(self, corrs, K, noise, init):
        return solve_algebraic_pnp(corrs, K, init, self.options)


SOLVERS = [
    LinearSolver,
    MahalanobisSolver,
    ReprojectionSolver,
    AlgebraicSolver,
]

REFINERS = [s.name for s in SOLVERS if s is not LinearSolver]


def get_solver(name):
    """Look up a solver class by name."""
    for solver in SOLVERS:
        if solver.name == name:
            return solver
    raise DomainError("unknown solver %r (choose from %s)"
                      % (name, ', '.join(s.name for s in SOLVERS)))
