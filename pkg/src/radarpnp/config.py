"""
Option handling shared by the radarpnp commands.

Config files hold command-line options, one or more per line; ``#``
starts a comment line.  For example::

    # camera
    --fx 800 --fy 800 --u0 640 --v0 480
    # radar datasheet
    --sigma-range 0.02 --sigma-theta 0.005 --sigma-phi 0.005

``-c FILE`` options are moved to the front of the argument list before
parsing, so options given on the command line override config values.
Without ``-c``, the file named by $RADARPNP_CONFIG is read.
"""

# Copyright (c) 2026, the radarpnp contributors
#
# Released under the terms of the GNU GPL
# http://www.gnu.org/copyleft/gpl.html

from __future__ import print_function

import logging
import optparse
import os
import shlex
import sys

from .errors import ConfigError, DomainError, Error, OutputError
from .fileformats import error_record, write_json_file
from .geometry import CameraIntrinsics
from .noise_model import RADAR_NOISE, NoiseSpec
from .robust import DEFAULT_THRESHOLD, RansacOptions
from .solvers import SolveOptions


CONFIG_ENV = 'RADARPNP_CONFIG'


def do_config_file(option, opt_str, value, parser):
    """Read options from a config file and feed them back to optparse."""
    options = []
    try:
        with open(value) as f:
            for line in f:
                line = line.strip()
                if not line or line.startswith('#'):
                    continue
                options.extend(shlex.split(line))
        # a config file including itself ends in a RuntimeError
        parser.rargs[:0] = options
    except IOError as e:
        raise optparse.OptionValueError("can't read config file: %s" % e)


def hoist_config_args(args, environ=os.environ):
    """Move config file options ahead of all other arguments.

        >>> hoist_config_args(['--fx', '900', '-c', 'cam.cfg', 'in.csv'],
        ...                   environ={})
        ['-c', 'cam.cfg', '--fx', '900', 'in.csv']
        >>> hoist_config_args(['in.csv'], environ={CONFIG_ENV: 'cam.cfg'})
        ['-c', 'cam.cfg', 'in.csv']

    """
    front = []
    rest = []
    args = list(args)
    i = 0
    while i < len(args):
        arg = args[i]
        if arg == '--':
            rest.extend(args[i:])
            break
        if arg in ('-c', '--config') and i + 1 < len(args):
            front.extend(args[i:i + 2])
            i += 2
            continue
        if arg.startswith('--config=') or (arg.startswith('-c')
                                           and not arg.startswith('--')
                                           and len(arg) > 2):
            front.append(arg)
        else:
            rest.append(arg)
        i += 1
    if not front and environ.get(CONFIG_ENV):
        front = ['-c', environ[CONFIG_ENV]]
    return front + rest


def make_parser(progname, usage, description):
    from ._version import __version__ as VERSION
    parser = optparse.OptionParser(usage, prog=progname, version=VERSION,
                                   description=description)
    parser.add_option('-c', '--config', action='callback', type='str',
                      metavar='FILE', callback=do_config_file,
                      help="read options from a config file (default:"
                           " $%s)" % CONFIG_ENV)
    parser.add_option('-v', '--verbose', action='count', default=0,
                      help="log more (repeat for debug output)")
    parser.add_option('-q', '--quiet', action='store_true', default=False,
                      help="log errors only")
    return parser


def add_intrinsics_options(parser):
    for name, what in [('fx', 'horizontal focal length'),
                       ('fy', 'vertical focal length'),
                       ('u0', 'principal point column'),
                       ('v0', 'principal point row')]:
        parser.add_option('--%s' % name, type='float', metavar='PIXELS',
                          help="camera %s in pixels" % what)


def add_noise_options(parser):
    parser.add_option('--sigma-range', type='float', metavar='METERS',
                      help="radar range noise (default: %s)"
                           % RADAR_NOISE.sigma_range)
    parser.add_option('--sigma-theta', type='float', metavar='RADIANS',
                      help="radar elevation noise (default: %s)"
                           % RADAR_NOISE.sigma_theta)
    parser.add_option('--sigma-phi', type='float', metavar='RADIANS',
                      help="radar azimuth noise (default: %s)"
                           % RADAR_NOISE.sigma_phi)


def add_solver_options(parser):
    defaults = SolveOptions()
    parser.add_option('--max-iterations', type='int',
                      default=defaults.max_iterations,
                      help="Levenberg-Marquardt iteration limit"
                           " (default: %default)")
    parser.add_option('--cost-tolerance', type='float',
                      default=defaults.cost_tolerance,
                      help="stop when the relative cost decrease falls"
                           " below this (default: %default)")
    parser.add_option('--param-tolerance', type='float',
                      default=defaults.param_tolerance,
                      help="stop when the step norm falls below this"
                           " (default: %default)")
    parser.add_option('--initial-damping', type='float',
                      default=defaults.initial_damping,
                      help="initial damping (default: %default)")


def add_ransac_options(parser):
    defaults = RansacOptions()
    parser.add_option('--confidence', type='float',
                      default=defaults.confidence,
                      help="RANSAC confidence (default: %default)")
    parser.add_option('--min-inlier-ratio', type='float',
                      default=defaults.min_inlier_ratio,
                      help="stop sampling once this inlier ratio is reached"
                           " (default: %default)")
    parser.add_option('--threshold', type='float', default=DEFAULT_THRESHOLD,
                      help="inlier gate on the squared Mahalanobis residual"
                           " (default: %.4f)" % DEFAULT_THRESHOLD)
    parser.add_option('--max-trials', type='int',
                      default=defaults.max_trials_cap,
                      help="RANSAC trial cap (default: %default)")
    parser.add_option('--no-polish', action='store_false', dest='polish',
                      default=True,
                      help="return the best minimal-sample model without"
                           " refining it on all inliers")


def setup_logging(options):
    if options.quiet:
        level = logging.ERROR
    else:
        level = max(logging.DEBUG, logging.WARNING - 10 * options.verbose)
    logging.basicConfig(level=level, stream=sys.stderr,
                        format='%(name)s: %(message)s')


def intrinsics_from(options, fallback=None):
    """Camera intrinsics from options, completed by fallback.

    Raises ConfigError if any value is missing or invalid.
    """
    values = []
    for i, name in enumerate(CameraIntrinsics._fields):
        value = getattr(options, name)
        if value is None and fallback is not None:
            value = fallback[i]
        if value is None:
            raise ConfigError(
                "missing camera intrinsics: give --fx, --fy, --u0 and --v0"
                " or an '# intrinsics:' line in the input file")
        values.append(value)
    try:
        return CameraIntrinsics(*values)
    except DomainError as e:
        raise ConfigError("bad camera intrinsics: %s" % e)


def noise_from(options, fallback=None, default=RADAR_NOISE):
    """Radar noise from options, completed by fallback, then default."""
    values = []
    for i, name in enumerate(['sigma_range', 'sigma_theta', 'sigma_phi']):
        value = getattr(options, name)
        if value is None:
            value = (fallback or default)[i]
        values.append(value)
    try:
        return NoiseSpec(*values)
    except DomainError as e:
        raise ConfigError("bad noise specification: %s" % e)


def solve_options_from(options):
    try:
        return SolveOptions(options.max_iterations, options.cost_tolerance,
                            options.param_tolerance, options.initial_damping)
    except DomainError as e:
        raise ConfigError("bad solver options: %s" % e)


def ransac_options_from(options, seed):
    try:
        return RansacOptions(
            confidence=options.confidence,
            min_inlier_ratio=options.min_inlier_ratio,
            threshold=options.threshold,
            max_trials_cap=options.max_trials,
            rng_seed=seed,
            polish=options.polish,
            solve_options=solve_options_from(options))
    except DomainError as e:
        raise ConfigError("bad RANSAC options: %s" % e)


def report_error(progname, error, output=None):
    """Print ``prog: message`` to stderr and exit with the error's code.

    If an output path was requested, a JSON error record goes there too.
    """
    if output:
        try:
            write_json_file(output, error_record(error))
        except OutputError:
            pass
    print("%s: %s" % (progname, error), file=sys.stderr)
    sys.exit(error.exit_code)


def run_reporting_errors(progname, func, output=None):
    try:
        return func()
    except Error as e:
        report_error(progname, e, output)
