"""
Spherical Gaussian noise and what it does to Cartesian radar points.

Independent zero-mean Gaussian noise on (range, elevation, azimuth) has two
effects after conversion to Cartesian coordinates:

* a non-zero mean (the *bias*), because the mean of cos(x + d) shrinks by
  exp(-sigma**2 / 2);
* a covariance, propagated to first order through the Jacobian of the
  spherical-to-Cartesian map.

Most functions come in two forms: one taking a single SphericalPoint and an
``_array`` form taking an (n, 3) array of (range, theta, phi) rows.
"""

# Copyright (c) 2026, the radarpnp contributors
#
# Released under the terms of the GNU GPL
# http://www.gnu.org/copyleft/gpl.html

import math
from collections import namedtuple

import numpy as np

from .errors import DomainError
from .geometry import spherical_to_cartesian_array


class NoiseSpec(namedtuple('NoiseSpec', 'sigma_range sigma_theta sigma_phi')):
    """Standard deviations of spherical measurement noise (m, rad, rad)."""

    __slots__ = ()

    def __new__(cls, sigma_range, sigma_theta, sigma_phi):
        values = tuple(float(v) for v in (sigma_range, sigma_theta, sigma_phi))
        for name, value in zip(cls._fields, values):
            if not (math.isfinite(value) and value >= 0):
                raise DomainError("%s must be a non-negative number, got %r"
                                  % (name, value))
        return super(NoiseSpec, cls).__new__(cls, *values)

    @classmethod
    def zero(cls):
        return cls(0.0, 0.0, 0.0)

    @property
    def covariance(self):
        """Spherical covariance diag(sigma_range**2, sigma_theta**2, ...)."""
        return np.diag(np.square(self))


# Datasheet noise of the 4D imaging radar used for the simulation defaults.
RADAR_NOISE = NoiseSpec(0.02, 0.005, 0.005)


class TrigMoments(namedtuple('TrigMoments', 'e_cos e_cos2 e_sin2')):
    """Moments of cos/sin of a zero-mean Gaussian angle error.

    E[sin d] and E[sin d cos d] vanish by symmetry; they are exposed as
    constants.
    """

    __slots__ = ()

    e_sin = 0.0
    e_sincos = 0.0


def trig_moments(sigma):
    """Trigonometric moments of d ~ N(0, sigma**2).

        >>> trig_moments(0.0)
        TrigMoments(e_cos=1.0, e_cos2=1.0, e_sin2=0.0)

    """
    sigma = float(sigma)
    if not (sigma >= 0 and math.isfinite(sigma)):
        raise DomainError("sigma must be non-negative, got %r" % sigma)
    e_cos = math.exp(-sigma ** 2 / 2)
    e_cos2 = (1 + math.exp(-2 * sigma ** 2)) / 2
    # e_cos2 lies in (1/2, 1], so 1 - e_cos2 is exact and the pair sums to 1
    e_sin2 = 1 - e_cos2
    return TrigMoments(e_cos, e_cos2, e_sin2)


def shrink_factors(noise):
    """Return (kappa, kappa_z): the mean shrinkage of (x, y) and of z."""
    kappa = math.exp(-(noise.sigma_theta ** 2 + noise.sigma_phi ** 2) / 2)
    kappa_z = math.exp(-noise.sigma_theta ** 2 / 2)
    return kappa, kappa_z


def _bias_factors(noise):
    # expm1 keeps precision for the tiny angular sigmas of real radars
    xy = math.expm1(-(noise.sigma_theta ** 2 + noise.sigma_phi ** 2) / 2)
    z = math.expm1(-noise.sigma_theta ** 2 / 2)
    return np.array([xy, xy, z])


def bias_expectation_array(sph, noise):
    """E[noisy Cartesian - true Cartesian] for (n, 3) spherical rows."""
    return spherical_to_cartesian_array(sph) * _bias_factors(noise)


def bias_expectation(p, noise):
    """E[noisy Cartesian - true Cartesian] at a SphericalPoint, meters.

    Range noise alone is unbiased:

        >>> bias_expectation((10.0, math.pi / 2, 0.0), NoiseSpec(1, 0, 0))
        array([0., 0., 0.])

    """
    return bias_expectation_array(np.asarray(tuple(p), dtype=float), noise)


def debias_multiplicative(measured, noise):
    """Undo the mean shrinkage by dividing by (kappa, kappa, kappa_z).

    Inverse of ``x -> x + bias``: applied to spherical_to_cartesian(p) plus
    bias_expectation(p) it returns spherical_to_cartesian(p).
    """
    kappa, kappa_z = shrink_factors(noise)
    return np.asarray(measured, dtype=float) / np.array([kappa, kappa, kappa_z])


def spherical_jacobian_array(sph):
    """Jacobians d(x, y, z)/d(range, theta, phi), shape (n, 3, 3)."""
    sph = np.asarray(sph, dtype=float)
    rho, theta, phi = sph[..., 0], sph[..., 1], sph[..., 2]
    st, ct = np.sin(theta), np.cos(theta)
    sp, cp = np.sin(phi), np.cos(phi)
    jac = np.empty(sph.shape[:-1] + (3, 3))
    jac[..., 0, 0] = st * cp
    jac[..., 0, 1] = rho * ct * cp
    jac[..., 0, 2] = -rho * st * sp
    jac[..., 1, 0] = st * sp
    jac[..., 1, 1] = rho * ct * sp
    jac[..., 1, 2] = rho * st * cp
    jac[..., 2, 0] = ct
    jac[..., 2, 1] = -rho * st
    jac[..., 2, 2] = 0.0
    return jac


def spherical_jacobian(p):
    """3x3 Jacobian of the spherical-to-Cartesian map at a SphericalPoint.

    Columns are ordered (d/d range, d/d theta, d/d phi).
    """
    return spherical_jacobian_array(np.asarray(tuple(p), dtype=float))


class CartesianNoise(namedtuple('CartesianNoise', 'bias covariance')):
    """Mean (3,) and first-order covariance (3, 3) of Cartesian noise."""

    __slots__ = ()


def propagate_covariance_array(sph, noise):
    """Bias (n, 3) and covariance J S J^T (n, 3, 3) for spherical rows."""
    jac = spherical_jacobian_array(sph)
    variances = np.square(np.asarray(noise, dtype=float))
    cov = (jac * variances) @ np.swapaxes(jac, -1, -2)
    cov = (cov + np.swapaxes(cov, -1, -2)) / 2
    return CartesianNoise(bias_expectation_array(sph, noise), cov)


def propagate_covariance(p, noise):
    """Cartesian bias and covariance at a SphericalPoint.

    Only range noise gives a rank-1 covariance along the line of sight:

        >>> cov = propagate_covariance((2.0, 0.0, 0.0), NoiseSpec(1, 0, 0))
        >>> cov.covariance.tolist()
        [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 1.0]]

    """
    return propagate_covariance_array(np.asarray(tuple(p), dtype=float), noise)


def regularization(cov):
    """Ridge added before inversion: max(1e-12, 1e-9 * trace(cov))."""
    trace = np.trace(cov, axis1=-2, axis2=-1)
    return np.maximum(1e-12, 1e-9 * trace)


def regularized_weight(cov):
    """Inverse of cov + lambda I, via a Cholesky factor.

    Works on a single (3, 3) matrix or a stack (n, 3, 3).  Singular
    covariances (for example a point on the pole, or zero angular noise)
    still give a finite symmetric positive definite weight.
    """
    cov = np.asarray(cov, dtype=float)
    lam = regularization(cov)
    ridged = cov + np.asarray(lam)[..., None, None] * np.eye(3)
    chol_inv = np.linalg.inv(np.linalg.cholesky(ridged))
    weight = np.swapaxes(chol_inv, -1, -2) @ chol_inv
    return (weight + np.swapaxes(weight, -1, -2)) / 2


def whitening_factor(cov):
    """Upper-triangular U with U^T U = regularized_weight(cov)."""
    return np.swapaxes(np.linalg.cholesky(regularized_weight(cov)), -1, -2)
