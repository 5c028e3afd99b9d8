"""
EPnP: closed-form pose from 3D-2D correspondences.

The 3D points are expressed as barycentric combinations of four control
points (the centroid plus the principal axes of the cloud).  The camera
frame control points lie in the null space of a 2n x 12 projection
constraint matrix; the combination of null space vectors is found for
kernel dimensions 1 to 4, each polished by Gauss-Newton on the control
point distances, and the candidate with the smallest reprojection error
wins.
"""

# Copyright (c) 2026, the radarpnp contributors
#
# Released under the terms of the GNU GPL
# http://www.gnu.org/copyleft/gpl.html

import logging
import math

import numpy as np
from scipy.spatial.distance import pdist

from .errors import ArityError, DegenerateConfigurationError
from .geometry import Pose


log = logging.getLogger(__name__)


MIN_POINTS = 4

# Relative singular value below which the cloud is considered flat.
DEGENERACY_TOLERANCE = 1e-8

GAUSS_NEWTON_ITERATIONS = 10

# Order of the linearized products B11, B12, ..., B44.
_UPPER = np.triu_indices(4)
_UPPER_WEIGHTS = np.where(_UPPER[0] == _UPPER[1], 1.0, 2.0)


def point_spread(points):
    """Singular values of the centered (n, 3) point matrix, descending."""
    points = np.asarray(points, dtype=float)
    return np.linalg.svd(points - points.mean(axis=0), compute_uv=False)


def check_configuration(points):
    """Raise unless the points span three dimensions."""
    points = np.asarray(points, dtype=float)
    if len(points) < MIN_POINTS:
        raise ArityError("need at least %d correspondences, got %d"
                         % (MIN_POINTS, len(points)))
    spread = point_spread(points)
    if not spread[0] > 0:
        raise DegenerateConfigurationError("all 3D points coincide")
    if spread[1] <= DEGENERACY_TOLERANCE * spread[0]:
        raise DegenerateConfigurationError("3D points are collinear")
    if spread[2] <= DEGENERACY_TOLERANCE * spread[0]:
        raise DegenerateConfigurationError("3D points are coplanar")


def control_points(points):
    """Centroid and principal axes scaled by the cloud's spread, (4, 3)."""
    centroid = points.mean(axis=0)
    _, spread, axes = np.linalg.svd(points - centroid, full_matrices=False)
    scale = spread / math.sqrt(len(points))
    return np.vstack([centroid, centroid + axes * scale[:, None]])


def barycentric(points, controls):
    """Homogeneous barycentric coordinates alphas (4, n), P = alphas^T C."""
    lhs = np.vstack([controls.T, np.ones(4)])
    rhs = np.vstack([points.T, np.ones(len(points))])
    return np.linalg.solve(lhs, rhs)


def constraint_matrix(alphas, pixels, K):
    """The 2n x 12 matrix M with M @ vec(camera control points) = 0."""
    n = pixels.shape[0]
    weights = alphas.T
    M = np.zeros((2 * n, 12))
    M[0::2, 0::3] = weights * K.fx
    M[0::2, 2::3] = weights * (K.u0 - pixels[:, 0])[:, None]
    M[1::2, 1::3] = weights * K.fy
    M[1::2, 2::3] = weights * (K.v0 - pixels[:, 1])[:, None]
    return M


def _kernel_grams(kernel):
    """For each control point pair, Gram matrix of kernel differences."""
    kt = kernel.T
    grams = []
    for i in range(3):
        for j in range(i + 1, 4):
            diff = kt[:, 3 * i:3 * i + 3] - kt[:, 3 * j:3 * j + 3]
            grams.append(diff @ diff.T)
    return np.array(grams)


def _sqrt_with_sign(value, reference, cross):
    sign = -1.0 if (reference > 0) != (cross > 0) else 1.0
    return sign * math.sqrt(abs(value))


def _betas_n2(L, rho):
    b = np.linalg.lstsq(L[:, [0, 1, 4]], rho, rcond=None)[0]
    betas = np.zeros(4)
    betas[0] = math.sqrt(abs(b[0]))
    betas[1] = _sqrt_with_sign(b[2], b[0], b[1])
    return betas


def _betas_n3(L, rho):
    b = np.linalg.lstsq(L[:, [0, 1, 2, 4, 5, 7]], rho, rcond=None)[0]
    betas = np.zeros(4)
    betas[0] = math.sqrt(abs(b[0]))
    betas[1] = _sqrt_with_sign(b[3], b[0], b[1])
    betas[2] = _sqrt_with_sign(b[5], b[0], b[2])
    return betas


def _relinearize(null_space):
    """Combination of the 5-d null space satisfying Bii Bjj = Bij Bij."""
    N, n = 5, 4
    idx = np.array([[0, 1, 2, 3], [1, 4, 5, 6], [2, 5, 7, 8], [3, 6, 8, 9]])
    V = null_space
    rows = []

    def quadratic_row(terms):
        row = []
        for a in range(N):
            for b in range(a, N):
                value = 0.0
                for (p, q), (r, s), sign in terms:
                    value += sign * V[idx[p, q], a] * V[idx[r, s], b]
                    if a != b:
                        value += sign * V[idx[p, q], b] * V[idx[r, s], a]
                row.append(value)
        return row

    for i in range(n):
        for j in range(i + 1, n):
            rows.append(quadratic_row([((i, i), (j, j), 1.0),
                                       ((i, j), (i, j), -1.0)]))
    for k in range(n):
        for j in range(k, n):
            for i in range(n):
                if i != j and i != k:
                    rows.append(quadratic_row([((i, j), (i, k), 1.0),
                                               ((i, i), (j, k), -1.0)]))
    system = np.array(rows)
    sol = np.linalg.svd(system.T @ system)[2][-1]
    sol = sol / sol[-1]
    lambdas = np.empty(N)
    lambdas[0] = math.sqrt(abs(sol[0]))
    for k, square in zip(range(1, N), (5, 9, 12, 14)):
        lambdas[k] = _sqrt_with_sign(sol[square], sol[0], sol[k])
    return lambdas


def _betas_n4(L, rho):
    augmented = np.hstack([L, -rho[:, None]])
    null_space = np.linalg.svd(augmented)[2][-5:].T
    b = null_space @ _relinearize(null_space)
    # the homogeneous component must be 1
    if b[10] != 0:
        b = b / b[10]
    betas = np.empty(4)
    betas[0] = math.sqrt(abs(b[0]))
    for k, square in zip(range(1, 4), (4, 7, 9)):
        betas[k] = (1.0 if b[k] > 0 else -1.0) * math.sqrt(abs(b[square]))
    return betas


def _betas_n1(L, rho):
    return np.array([1.0, 0.0, 0.0, 0.0])


def _gauss_newton(grams, betas, rho, iterations=GAUSS_NEWTON_ITERATIONS):
    """Refine betas so that camera control point distances match rho."""
    betas = betas.copy()
    for _ in range(iterations):
        half_jacobian = grams @ betas
        residual = half_jacobian @ betas - rho
        step = np.linalg.lstsq(2.0 * half_jacobian, -residual, rcond=None)[0]
        betas += step
        if np.linalg.norm(step) <= 1e-15 * max(1.0, np.linalg.norm(betas)):
            break
    return betas


def align(camera, world):
    """Rigid (R, t) minimizing sum |camera - (R world + t)|^2."""
    world_mean = world.mean(axis=0)
    camera_mean = camera.mean(axis=0)
    H = (world - world_mean).T @ (camera - camera_mean)
    U, _, Vt = np.linalg.svd(H)
    d = 1.0 if np.linalg.det(Vt.T @ U.T) >= 0 else -1.0
    R = Vt.T @ np.diag([1.0, 1.0, d]) @ U.T
    return R, camera_mean - R @ world_mean


def reprojection_error(points, pixels, R, t, K):
    """Mean pixel distance; infinite if any point falls behind the camera."""
    camera = points @ R.T + t
    depth = camera[:, 2]
    if not np.all(depth > 0):
        return math.inf
    projected = np.stack([K.fx * camera[:, 0] / depth + K.u0,
                          K.fy * camera[:, 1] / depth + K.v0], axis=-1)
    error = float(np.mean(np.linalg.norm(projected - pixels, axis=1)))
    return error if math.isfinite(error) else math.inf


def epnp(points, pixels, K):
    """Pose mapping radar points (n, 3) onto pixels (n, 2).

    Raises ArityError for fewer than four points and
    DegenerateConfigurationError for collinear or coplanar clouds.
    """
    points = np.asarray(points, dtype=float).reshape(-1, 3)
    pixels = np.asarray(pixels, dtype=float).reshape(-1, 2)
    check_configuration(points)

    controls = control_points(points)
    alphas = barycentric(points, controls)
    M = constraint_matrix(alphas, pixels, K)
    # eigenvectors of the smallest eigenvalues first
    kernel = np.linalg.eigh(M.T @ M)[1][:, :4]
    grams = _kernel_grams(kernel)
    L = grams[:, _UPPER[0], _UPPER[1]] * _UPPER_WEIGHTS
    world_dists = pdist(controls)
    rho = world_dists ** 2

    def candidate(betas):
        control = (kernel @ betas).reshape(4, 3)
        camera_dists = pdist(control)
        norm = camera_dists @ camera_dists
        if not norm > 0:
            return None
        scale = camera_dists @ world_dists / norm
        camera = alphas.T @ (control * scale)
        if np.any(camera[:, 2] < 0):
            camera = -camera
            scale = -scale
        R, t = align(camera, points)
        return reprojection_error(points, pixels, R, t, K), R, t, betas * scale

    best = None
    cases = (_betas_n1, _betas_n2, _betas_n3, _betas_n4)
    for case, solve_betas in enumerate(cases, 1):
        try:
            first = candidate(solve_betas(L, rho))
            if first is None:
                continue
            polished = candidate(_gauss_newton(grams, first[3], rho))
        except np.linalg.LinAlgError:
            log.debug("EPnP case N=%d: singular system", case)
            continue
        for result in (first, polished):
            if result is not None and (best is None or result[0] < best[0]):
                best = result
        log.debug("EPnP case N=%d: reprojection error %.3g px",
                  case, best[0])

    if best is None or not math.isfinite(best[0]):
        raise DegenerateConfigurationError(
            "no control point solution places the points in front of the"
            " camera")
    _, R, t, _ = best
    return Pose(R, t)
