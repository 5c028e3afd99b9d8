"""
Synthetic scenes and the Monte-Carlo consistency experiment.

A scene samples true radar-frame points in a region, keeps those in front
of the camera at the ground-truth pose, perturbs their spherical
coordinates with Gaussian noise and projects the *true* points to pixels.

Seeding rules:

* a scene with ``rng_seed=s`` spawns three independent streams from
  ``SeedSequence(s)``: true points, spherical noise and pixel noise, so
  changing the noise level does not move the true points;
* trial ``k`` at point count ``n`` under master seed ``m`` uses the scene
  seed ``SeedSequence([m, n, k]).generate_state(1)[0]``; every solver of
  that trial sees the same scene.
"""

# Copyright (c) 2026, the radarpnp contributors
#
# Released under the terms of the GNU GPL
# http://www.gnu.org/copyleft/gpl.html

import logging
import math
from collections import namedtuple

import numpy as np
from scipy.spatial.transform import Rotation

from .errors import ArityError, DomainError, Error
from .geometry import (
    CameraIntrinsics, Pose, canonical_spherical_array,
    cartesian_to_spherical_array, project_points, rotation_error,
    spherical_to_cartesian_array, translation_error)
from .noise_model import RADAR_NOISE
from .solvers import REFINERS, Correspondence, get_solver


log = logging.getLogger(__name__)


# Minimum camera-frame depth of a generated point, meters.
MIN_DEPTH = 0.1

MAX_RESAMPLING_ROUNDS = 100

DEFAULT_SCHEDULE = (10, 20, 40, 80, 160, 320, 640, 1280)

DEFAULT_INTRINSICS = CameraIntrinsics(800.0, 800.0, 640.0, 480.0)

# Radar (x forward, y left, z up) to camera (x right, y down, z forward).
RADAR_TO_CAMERA_AXES = np.array([[0.0, -1.0, 0.0],
                                 [0.0, 0.0, -1.0],
                                 [1.0, 0.0, 0.0]])

ROTATION_OFFSET_DEGREES = 30.0

DEFAULT_TRANSLATION = (0.1, 0.05, 0.2)


def offset_pose(degrees=ROTATION_OFFSET_DEGREES,
                translation=DEFAULT_TRANSLATION):
    """Axis swap followed by a roll of ``degrees`` about the optical axis."""
    roll = Rotation.from_euler('z', degrees, degrees=True).as_matrix()
    return Pose(roll @ RADAR_TO_CAMERA_AXES, translation)


DEFAULT_POSE = offset_pose()


class ShellRegion(namedtuple('ShellRegion', 'range_min range_max theta_min'
                             ' theta_max phi_min phi_max')):
    """Spherical shell sector, sampled uniformly in volume.

    The azimuth interval may start below zero; samples are wrapped.
    """

    __slots__ = ()

    def sample(self, rng, n):
        """Return (n, 3) true spherical coordinates."""
        cubes = rng.uniform(self.range_min ** 3, self.range_max ** 3, n)
        cos_theta = rng.uniform(math.cos(self.theta_max),
                                math.cos(self.theta_min), n)
        phi = rng.uniform(self.phi_min, self.phi_max, n)
        sph = np.stack([np.cbrt(cubes), np.arccos(cos_theta), phi], axis=-1)
        return canonical_spherical_array(sph)


class BoxRegion(namedtuple('BoxRegion', 'lower upper')):
    """Axis-aligned box in the radar frame, sampled uniformly."""

    __slots__ = ()

    def sample(self, rng, n):
        points = rng.uniform(self.lower, self.upper, (n, 3))
        return cartesian_to_spherical_array(points)


DEFAULT_REGION = ShellRegion(2.0, 15.0, math.pi / 3, 2 * math.pi / 3,
                             -math.pi / 4, math.pi / 4)


class ScenarioSpec(namedtuple('ScenarioSpec', 'n_points pose_gt noise'
                              ' pixel_noise_sigma region K rng_seed')):
    """Everything needed to draw one synthetic scene."""

    __slots__ = ()

    def __new__(cls, n_points=10, pose_gt=DEFAULT_POSE, noise=RADAR_NOISE,
                pixel_noise_sigma=0.0, region=DEFAULT_REGION,
                K=DEFAULT_INTRINSICS, rng_seed=0):
        if n_points < 4:
            raise ArityError("a scene needs at least 4 points, got %d"
                             % n_points)
        if not pixel_noise_sigma >= 0:
            raise DomainError("pixel noise sigma must be non-negative")
        return super(ScenarioSpec, cls).__new__(
            cls, int(n_points), pose_gt, noise, float(pixel_noise_sigma),
            region, K, rng_seed)


class Scene(namedtuple('Scene', 'true_spherical measured_spherical pixels'
                       ' pose_gt')):
    """Arrays of one drawn scene: (n, 3), (n, 3) and (n, 2)."""

    __slots__ = ()

    @property
    def true_points(self):
        return spherical_to_cartesian_array(self.true_spherical)

    @property
    def measured_points(self):
        return spherical_to_cartesian_array(self.measured_spherical)


class TrialRecord(namedtuple('TrialRecord', 'n_points solver seed'
                             ' rotation_error translation_error converged')):
    """Errors of one solver on one scene; NaN errors mark a failed solve."""

    __slots__ = ()

    @classmethod
    def failed(cls, n_points, solver, seed):
        return cls(n_points, solver, seed, math.nan, math.nan, False)


def _visible_points(spec, rng):
    n = spec.n_points
    batch = max(2 * n, 64)
    kept = []
    count = 0
    for _ in range(MAX_RESAMPLING_ROUNDS):
        sph = spec.region.sample(rng, batch)
        depth = spec.pose_gt.transform(spherical_to_cartesian_array(sph))[:, 2]
        sph = sph[depth > MIN_DEPTH]
        kept.append(sph)
        count += len(sph)
        if count >= n:
            return np.concatenate(kept)[:n]
    raise DomainError("only %d of %d points visible after %d sampling rounds"
                      % (count, n, MAX_RESAMPLING_ROUNDS))


def draw_scene(spec):
    """Draw the arrays of a scene; deterministic in spec.rng_seed."""
    point_seed, noise_seed, pixel_seed = np.random.SeedSequence(
        spec.rng_seed).spawn(3)
    true_sph = _visible_points(spec, np.random.default_rng(point_seed))
    n = len(true_sph)
    noise_rng = np.random.default_rng(noise_seed)
    measured = true_sph + noise_rng.standard_normal((n, 3)) \
        * np.asarray(spec.noise)
    if np.any(measured[:, 0] <= 0):
        raise DomainError("range noise produced a non-positive range")
    measured = canonical_spherical_array(measured)
    pixels = project_points(spherical_to_cartesian_array(true_sph),
                            spec.pose_gt, spec.K)
    if spec.pixel_noise_sigma > 0:
        pixel_rng = np.random.default_rng(pixel_seed)
        pixels = pixels + pixel_rng.standard_normal((n, 2)) \
            * spec.pixel_noise_sigma
    return Scene(true_sph, measured, pixels, spec.pose_gt)


def generate_scene(spec):
    """Correspondences with noisy radar measurements, and the true pose."""
    scene = draw_scene(spec)
    corrs = [Correspondence(sph, px)
             for sph, px in zip(scene.measured_spherical, scene.pixels)]
    return corrs, scene.pose_gt


def trial_seed(master_seed, n_points, trial):
    """Scene seed of one cell of the experiment grid."""
    state = np.random.SeedSequence([master_seed, n_points, trial])
    return int(state.generate_state(1)[0])


def evaluate(solver_name, corrs, K, noise, pose_gt, n_points, seed,
             solve_options=None):
    """Solve and score one scene; solver errors give a failure record."""
    solver = get_solver(solver_name)(solve_options)
    try:
        report = solver.solve(corrs, K, noise)
    except (Error, np.linalg.LinAlgError) as e:
        log.info("%s failed on n=%d seed=%d: %s", solver_name, n_points,
                 seed, e)
        return TrialRecord.failed(n_points, solver_name, seed)
    return TrialRecord(
        n_points, solver_name, seed,
        rotation_error(report.pose.rotation, pose_gt.rotation),
        translation_error(report.pose.translation, pose_gt.translation),
        bool(report.converged))


def run_trial(base_spec, n_points, solver_name, seed, solve_options=None):
    """Rerun one (n, solver, seed) cell in isolation."""
    spec = base_spec._replace(n_points=n_points, rng_seed=seed)
    try:
        corrs, pose_gt = generate_scene(spec)
    except DomainError as e:
        log.info("no scene for n=%d seed=%d: %s", n_points, seed, e)
        return TrialRecord.failed(n_points, solver_name, seed)
    return evaluate(solver_name, corrs, spec.K, spec.noise, pose_gt,
                    n_points, seed, solve_options)


def run_consistency_experiment(base_spec, n_schedule=DEFAULT_SCHEDULE,
                               trials_per_n=100, solvers=REFINERS,
                               master_seed=None, solve_options=None):
    """Error records of every solver on every (n, trial) scene.

    The master seed defaults to ``base_spec.rng_seed``.  Records are sorted
    by (n_points, solver, seed).
    """
    if not n_schedule:
        raise DomainError("empty point-count schedule")
    if trials_per_n < 1:
        raise DomainError("need at least one trial per point count")
    if master_seed is None:
        master_seed = base_spec.rng_seed
    records = []
    for n in n_schedule:
        for trial in range(trials_per_n):
            seed = trial_seed(master_seed, n, trial)
            spec = base_spec._replace(n_points=int(n), rng_seed=seed)
            try:
                corrs, pose_gt = generate_scene(spec)
            except DomainError as e:
                log.info("no scene for n=%d seed=%d: %s", n, seed, e)
                records.extend(TrialRecord.failed(int(n), name, seed)
                               for name in solvers)
                continue
            for name in solvers:
                records.append(evaluate(name, corrs, spec.K, spec.noise,
                                        pose_gt, int(n), seed,
                                        solve_options))
        log.info("n=%d: %d trials done", n, trials_per_n)
    records.sort(key=lambda r: (r.n_points, r.solver, r.seed))
    return records


def subsample_experiment(corrs, k, repeats, solvers, K, noise, pose_gt,
                         seed=0, solve_options=None):
    """Errors of each solver on ``repeats`` random k-subsets of corrs.

    Repeat ``r`` draws its subset with ``SeedSequence([seed, k, r])`` and
    keeps the input order of the chosen correspondences.
    """
    corrs = list(corrs)
    if k < 4:
        raise ArityError("subsets need at least 4 correspondences, got %d"
                         % k)
    if k > len(corrs):
        raise ArityError("cannot draw %d of %d correspondences"
                         % (k, len(corrs)))
    records = []
    for repeat in range(repeats):
        subset_seed = trial_seed(seed, k, repeat)
        rng = np.random.default_rng(subset_seed)
        chosen = np.sort(rng.choice(len(corrs), k, replace=False))
        subset = [corrs[i] for i in chosen]
        for name in solvers:
            records.append(evaluate(name, subset, K, noise, pose_gt, k,
                                    subset_seed, solve_options))
    return records


class Summary(namedtuple('Summary', 'n_points solver trials failures'
                         ' rot_err_mean rot_err_median rot_err_iqr'
                         ' trans_err_mean trans_err_median trans_err_iqr')):
    """Error statistics of one (n_points, solver) group."""

    __slots__ = ()


def _stats(values):
    values = np.asarray(values, dtype=float)
    values = values[np.isfinite(values)]
    if not len(values):
        return math.nan, math.nan, math.nan
    q1, median, q3 = np.percentile(values, [25, 50, 75])
    return float(np.mean(values)), float(median), float(q3 - q1)


def summarize_records(records):
    """Per (n_points, solver) statistics, sorted like the records.

    Failed and non-converged records count as failures; the statistics use
    every record with finite errors.
    """
    groups = {}
    for record in records:
        groups.setdefault((record.n_points, record.solver), []).append(record)
    summary = []
    for (n, solver), group in sorted(groups.items()):
        failures = sum(1 for r in group if not r.converged)
        summary.append(Summary(
            n, solver, len(group), failures,
            *(_stats([r.rotation_error for r in group])
              + _stats([r.translation_error for r in group]))))
    return summary
