"""
RANSAC around the EPnP initializer and the Mahalanobis refiner.

Each trial draws four distinct correspondences, solves them with EPnP,
refines the pose on the sample with the bias-compensated residual and
gates every correspondence on its squared Mahalanobis distance.  The trial
budget shrinks as better inlier ratios are seen.  The loop stops when the
budget is spent or the best inlier ratio reaches ``min_inlier_ratio``: that
ratio is an early-exit target, not a minimum quality requirement.
"""

# Copyright (c) 2026, the radarpnp contributors
#
# Released under the terms of the GNU GPL
# http://www.gnu.org/copyleft/gpl.html

import logging
import math
from collections import namedtuple

import numpy as np
from scipy.stats import chi2

from .epnp import epnp
from .errors import (
    ArityError, DegenerateConfigurationError, DomainError,
    InitializationError, RansacFailure)
from .solvers import (
    SolveOptions, correspondence_arrays, levenberg_marquardt,
    mahalanobis_model)


log = logging.getLogger(__name__)


SAMPLE_SIZE = 4

# 95% quantile of chi-square with 3 degrees of freedom.
DEFAULT_THRESHOLD = float(chi2.ppf(0.95, 3))

POLISH_ROUNDS = 3


class RansacOptions(namedtuple('RansacOptions', 'confidence sample_size'
                               ' min_inlier_ratio threshold max_trials_cap'
                               ' rng_seed polish solve_options')):
    """Settings of ransac_solve.

    ``threshold`` gates squared Mahalanobis residuals.  ``polish`` refines
    the final pose on the full inlier set.
    """

    __slots__ = ()

    def __new__(cls, confidence=0.99, sample_size=SAMPLE_SIZE,
                min_inlier_ratio=0.5, threshold=DEFAULT_THRESHOLD,
                max_trials_cap=10000, rng_seed=0, polish=True,
                solve_options=None):
        if not 0 < confidence < 1:
            raise DomainError("confidence must lie in (0, 1), got %r"
                              % (confidence, ))
        if sample_size != SAMPLE_SIZE:
            raise DomainError("sample size is fixed at %d" % SAMPLE_SIZE)
        if not 0 < min_inlier_ratio <= 1:
            raise DomainError("min_inlier_ratio must lie in (0, 1], got %r"
                              % (min_inlier_ratio, ))
        if not threshold > 0:
            raise DomainError("threshold must be positive, got %r"
                              % (threshold, ))
        if not max_trials_cap >= 1:
            raise DomainError("max_trials_cap must be at least 1, got %r"
                              % (max_trials_cap, ))
        return super(RansacOptions, cls).__new__(
            cls, float(confidence), int(sample_size), float(min_inlier_ratio),
            float(threshold), int(max_trials_cap), rng_seed, bool(polish),
            solve_options or SolveOptions())


class RansacResult(namedtuple('RansacResult', 'pose inlier_indices'
                              ' inlier_ratio trials_run history')):
    """Outcome of ransac_solve.

    ``history`` lists (trial, best inlier ratio, trial budget) after every
    trial that produced a model.
    """

    __slots__ = ()


def adaptive_trial_count(ratio, sample_size=SAMPLE_SIZE, confidence=0.99):
    """Trials needed to draw one all-inlier sample with the given confidence.

        >>> adaptive_trial_count(0.5, 4, 0.99)
        72
        >>> adaptive_trial_count(1.0)
        1

    """
    if ratio <= 0:
        return math.inf
    good = ratio ** sample_size
    if good >= 1:
        return 1
    return int(math.ceil(math.log(1 - confidence) / math.log1p(-good)))


def gate_residuals(model, pose):
    """Squared Mahalanobis residual of each point; inf behind the camera."""
    residuals = model.per_point(pose)
    return np.where(model.depths(pose) > 0, residuals, np.inf)


def ransac_solve(corrs, K, noise, opts=None):
    """Robust pose and inlier set from correspondences with outliers."""
    opts = opts or RansacOptions()
    corrs = list(corrs)
    n = len(corrs)
    if n < SAMPLE_SIZE:
        raise ArityError("need at least %d correspondences, got %d"
                         % (SAMPLE_SIZE, n))
    _, cartesian, pixels = correspondence_arrays(corrs)
    model = mahalanobis_model(corrs, K, noise)
    rng = np.random.default_rng(opts.rng_seed)

    best_ratio = 0.0
    best_pose = None
    best_inliers = None
    budget = opts.max_trials_cap
    trials = 0
    skipped = 0
    history = []
    while trials < budget and best_ratio < opts.min_inlier_ratio:
        sample = rng.choice(n, SAMPLE_SIZE, replace=False)
        try:
            init = epnp(cartesian[sample], pixels[sample], K)
            report = levenberg_marquardt(model.subset(sample), init,
                                         opts.solve_options, name='ransac')
        except (DegenerateConfigurationError, InitializationError) as e:
            skipped += 1
            log.debug("skipping sample %s: %s", sample.tolist(), e)
            if skipped >= opts.max_trials_cap:
                break
            continue
        trials += 1
        inliers = gate_residuals(model, report.pose) < opts.threshold
        ratio = np.count_nonzero(inliers) / n
        if ratio > best_ratio:
            best_ratio = ratio
            best_pose = report.pose
            best_inliers = inliers
            budget = min(budget, adaptive_trial_count(
                ratio, SAMPLE_SIZE, opts.confidence))
            log.debug("trial %d: inlier ratio %.3f, budget %d",
                      trials, ratio, budget)
        history.append((trials, best_ratio, budget))

    if best_pose is None:
        raise RansacFailure(
            "no minimal sample produced a model (%d degenerate samples)"
            % skipped)

    pose = best_pose
    inliers = best_inliers
    if opts.polish:
        pose, inliers = _polish(model, pose, inliers, opts)

    indices = tuple(int(i) for i in np.flatnonzero(inliers))
    log.info("RANSAC: %d trials, %d skipped samples, %d of %d inliers",
             trials, skipped, len(indices), n)
    return RansacResult(pose, indices, len(indices) / n, trials,
                        tuple(history))


def _polish(model, pose, inliers, opts):
    """Refine on the inlier set and re-gate until the set stops changing."""
    for _ in range(POLISH_ROUNDS):
        if np.count_nonzero(inliers) < SAMPLE_SIZE:
            break
        try:
            report = levenberg_marquardt(
                model.subset(np.flatnonzero(inliers)), pose,
                opts.solve_options, name='ransac-polish')
        except InitializationError as e:
            log.debug("polish failed: %s", e)
            break
        pose = report.pose
        regated = gate_residuals(model, pose) < opts.threshold
        if np.array_equal(regated, inliers):
            break
        inliers = regated
    return pose, gate_residuals(model, pose) < opts.threshold
