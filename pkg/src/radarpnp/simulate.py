#!/usr/bin/env python
"""
Run the Monte-Carlo consistency experiment and write trial records as CSV.

Usage: radarpnp simulate [options]

Every (point count, trial) cell draws one synthetic scene from the master
seed and runs each selected solver on it.  With ``--subsample K`` the
command instead draws one scene of ``--from-points`` correspondences and
solves ``--repeats`` random K-subsets of it.

The same options and seed always give the same bytes.
"""

# Copyright (c) 2026, the radarpnp contributors
#
# Released under the terms of the GNU GPL
# http://www.gnu.org/copyleft/gpl.html

import logging
import os
import sys

from . import config
from .errors import DomainError
from .fileformats import (
    write_csv_file, write_records, write_summary)
from .noise_model import RADAR_NOISE, NoiseSpec
from .simulation import (
    DEFAULT_INTRINSICS, DEFAULT_SCHEDULE, DEFAULT_TRANSLATION,
    ROTATION_OFFSET_DEGREES, ScenarioSpec, generate_scene, offset_pose,
    run_consistency_experiment, subsample_experiment, summarize_records)
from .solvers import REFINERS, get_solver


log = logging.getLogger(__name__)


NOISE_PRESETS = {
    'zero': NoiseSpec.zero(),
    'radar': RADAR_NOISE,
}


def parse_floats(text, what, count=None):
    """Parse a comma-separated list of floats.

        >>> parse_floats('0.1, 0.05,0.2', 'translation', 3)
        [0.1, 0.05, 0.2]
        >>> parse_floats('1,2', 'translation', 3)
        Traceback (most recent call last):
          ...
        ValueError: translation needs 3 values, got 2

    """
    try:
        values = [float(item) for item in text.split(',')]
    except ValueError:
        raise ValueError("bad %s: %r" % (what, text))
    if count is not None and len(values) != count:
        raise ValueError("%s needs %d values, got %d"
                         % (what, count, len(values)))
    return values


def parse_noise(text):
    """A preset name or three comma-separated sigmas."""
    if text in NOISE_PRESETS:
        return NOISE_PRESETS[text]
    try:
        return NoiseSpec(*parse_floats(text, 'noise', 3))
    except DomainError as e:
        raise ValueError(str(e))


def parse_args(argv):
    progname = os.path.basename(argv[0])
    parser = config.make_parser(
        progname, "usage: %prog [options]",
        "Runs solvers on synthetic radar-camera scenes and writes one CSV"
        " row of pose errors per solver and trial.")
    parser.add_option('--schedule',
                      default=','.join(str(n) for n in DEFAULT_SCHEDULE),
                      help="comma-separated point counts (default:"
                           " %default)")
    parser.add_option('--trials', type='int', default=100,
                      help="trials per point count (default: %default)")
    parser.add_option('--seed', type='int', default=0,
                      help="master seed (default: %default)")
    parser.add_option('-o', '--out', metavar='FILE',
                      help="write trial records here (default: stdout)")
    parser.add_option('--summary', metavar='FILE',
                      help="also write per (n, solver) error statistics")
    parser.add_option('--noise', default='radar',
                      help="radar noise: zero, radar or"
                           " SIGMA_RANGE,SIGMA_THETA,SIGMA_PHI"
                           " (default: %default)")
    parser.add_option('--pixel-noise', type='float', default=0.0,
                      metavar='PIXELS',
                      help="pixel noise sigma (default: %default)")
    parser.add_option('--solvers', default=','.join(REFINERS),
                      help="comma-separated solver names (default:"
                           " %default)")
    parser.add_option('--translation',
                      default=','.join(str(v) for v in DEFAULT_TRANSLATION),
                      metavar='X,Y,Z',
                      help="ground-truth translation in meters (default:"
                           " %default)")
    parser.add_option('--rotation-offset', type='float',
                      default=ROTATION_OFFSET_DEGREES, metavar='DEGREES',
                      help="roll about the optical axis on top of the axis"
                           " swap (default: %default)")
    parser.add_option('--subsample', type='int', metavar='K',
                      help="solve random K-subsets of one scene instead")
    parser.add_option('--repeats', type='int', default=100,
                      help="subsets drawn with --subsample (default:"
                           " %default)")
    parser.add_option('--from-points', type='int', default=20, metavar='N',
                      help="scene size for --subsample (default: %default)")
    config.add_intrinsics_options(parser)
    config.add_noise_options(parser)
    config.add_solver_options(parser)
    options, args = parser.parse_args(config.hoist_config_args(argv[1:]))
    if args:
        parser.error("too many arguments")
    try:
        options.schedule = [int(n) for n in options.schedule.split(',')]
    except ValueError:
        parser.error("bad schedule: %s" % options.schedule)
    if min(options.schedule) < 4 or options.from_points < 4:
        parser.error("scenes need at least 4 points")
    try:
        options.base_noise = parse_noise(options.noise)
        options.translation = parse_floats(options.translation,
                                           'translation', 3)
    except ValueError as e:
        parser.error(str(e))
    options.solvers = [name.strip() for name in options.solvers.split(',')]
    for name in options.solvers:
        try:
            get_solver(name)
        except DomainError as e:
            parser.error(str(e))
    if options.trials < 1:
        parser.error("--trials must be at least 1")
    if options.subsample is not None and options.repeats < 1:
        parser.error("--repeats must be at least 1")
    return progname, options


def scenario_from(options):
    return ScenarioSpec(
        n_points=max(options.schedule + [options.from_points]),
        pose_gt=offset_pose(options.rotation_offset, options.translation),
        noise=config.noise_from(options, options.base_noise),
        pixel_noise_sigma=options.pixel_noise,
        K=config.intrinsics_from(options, DEFAULT_INTRINSICS),
        rng_seed=options.seed)


def simulate(options):
    """Run the experiment selected by options; returns TrialRecords."""
    spec = scenario_from(options)
    solve_options = config.solve_options_from(options)
    if options.subsample is not None:
        corrs, pose_gt = generate_scene(
            spec._replace(n_points=options.from_points))
        log.info("subsampling %d of %d correspondences, %d repeats",
                 options.subsample, options.from_points, options.repeats)
        return subsample_experiment(corrs, options.subsample,
                                    options.repeats, options.solvers,
                                    spec.K, spec.noise, pose_gt,
                                    seed=options.seed,
                                    solve_options=solve_options)
    return run_consistency_experiment(spec, options.schedule, options.trials,
                                      options.solvers,
                                      master_seed=options.seed,
                                      solve_options=solve_options)


def main(argv=sys.argv):
    progname, options = parse_args(argv)
    config.setup_logging(options)

    def run():
        records = simulate(options)
        if options.out:
            write_csv_file(options.out, write_records, records)
        else:
            write_records(sys.stdout, records)
        if options.summary:
            write_csv_file(options.summary, write_summary,
                           summarize_records(records))

    config.run_reporting_errors(progname, run)


if __name__ == '__main__':
    main()
