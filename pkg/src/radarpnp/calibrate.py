#!/usr/bin/env python
"""
Estimate the radar-to-camera pose from a correspondence file.

Usage: radarpnp calibrate [options] [--input] correspondences.csv

The pipeline is: EPnP initialization (or RANSAC, with ``--ransac on``),
then refinement with the selected solver on the inlier set.  The result is
written as a JSON document to ``--output`` or stdout.

Exit status: 0 on success, 6 if the refinement did not converge (the output
is still written), and the code of the error otherwise (see
radarpnp.errors).
"""

# Copyright (c) 2026, the radarpnp contributors
#
# Released under the terms of the GNU GPL
# http://www.gnu.org/copyleft/gpl.html

import io
import logging
import os
import sys

import numpy as np

from . import config
from ._version import __version__ as VERSION
from .errors import (
    EXIT_NOT_CONVERGED, ArityError, DegenerateConfigurationError, OutputError,
    RansacFailure)
from .fileformats import (
    CalibrationOutput, load_correspondences, write_calibration)
from .robust import SAMPLE_SIZE, ransac_solve
from .solvers import SOLVERS, LinearSolver, mahalanobis_model


log = logging.getLogger(__name__)


def parse_args(argv):
    progname = os.path.basename(argv[0])
    parser = config.make_parser(
        progname, "usage: %prog [options] [--input] correspondences.csv",
        "Estimates the radar-to-camera rotation and translation from"
        " matched radar detections and pixels.")
    parser.add_option('-i', '--input', metavar='FILE',
                      help="correspondence CSV file")
    parser.add_option('-o', '--output', metavar='FILE',
                      help="write the calibration JSON here (default:"
                           " stdout)")
    parser.add_option('--ransac', choices=['on', 'off'], default='off',
                      help="reject outliers with RANSAC (on/off, default:"
                           " %default)")
    parser.add_option('--solver', default='3dupnp',
                      help="refinement solver: %s (default: %%default)"
                           % ', '.join(s.name for s in SOLVERS))
    parser.add_option('--seed', type='int', default=0,
                      help="RANSAC random seed (default: %default)")
    parser.add_option('--degrees', action='store_true', default=False,
                      help="angle columns are theta_deg and phi_deg")
    parser.add_option('--cartesian', action='store_true', default=False,
                      help="radar columns are x_m, y_m, z_m")
    config.add_intrinsics_options(parser)
    config.add_noise_options(parser)
    config.add_solver_options(parser)
    config.add_ransac_options(parser)
    options, args = parser.parse_args(config.hoist_config_args(argv[1:]))
    if options.input and args:
        parser.error("give the input file either with --input or as an"
                     " argument")
    if not options.input:
        if not args:
            parser.error("missing input file name")
        if len(args) > 1:
            parser.error("too many arguments")
        options.input = args[0]
    if options.degrees and options.cartesian:
        parser.error("--degrees and --cartesian are mutually exclusive")
    for solver in SOLVERS:
        if solver.name == options.solver:
            options.solver = solver
            break
    else:
        parser.error("unknown solver: %s" % options.solver)
    return progname, options


def calibrate(options):
    """Run the calibration pipeline; returns a CalibrationOutput."""
    table = load_correspondences(options.input, degrees=options.degrees,
                                 cartesian=options.cartesian)
    corrs = table.correspondences
    K = config.intrinsics_from(options, table.intrinsics)
    noise = config.noise_from(options, table.noise)
    if len(corrs) < SAMPLE_SIZE:
        raise ArityError("%s: need at least %d correspondences, got %d"
                         % (options.input, SAMPLE_SIZE, len(corrs)))
    solver = options.solver(config.solve_options_from(options))
    log.info("%d correspondences, solver %s, RANSAC %s", len(corrs),
             solver.name, options.ransac)

    ransac = None
    inliers = tuple(range(len(corrs)))
    try:
        if options.ransac == 'on':
            result = ransac_solve(corrs, K, noise,
                                  config.ransac_options_from(options,
                                                             options.seed))
            inliers = result.inlier_indices
            ransac = {'trials_run': result.trials_run,
                      'inlier_ratio': result.inlier_ratio}
            if len(inliers) < SAMPLE_SIZE:
                raise RansacFailure("only %d inliers at the RANSAC pose"
                                    % len(inliers))
            chosen = [corrs[i] for i in inliers]
            if isinstance(solver, LinearSolver):
                report = solver.solve(chosen, K, noise)
            else:
                report = solver.refine(chosen, K, noise, result.pose)
        else:
            report = solver.solve(corrs, K, noise)
    except np.linalg.LinAlgError as e:
        raise DegenerateConfigurationError("numerical failure: %s" % e)

    residuals = mahalanobis_model(corrs, K, noise).per_point(report.pose)
    return CalibrationOutput(report.pose, inliers, tuple(residuals),
                             solver.name, report.iterations,
                             report.final_cost, report.converged,
                             options.seed, ransac, VERSION)


def write_output(output, path=None):
    if path is None:
        write_calibration(sys.stdout, output)
        return
    try:
        with io.open(path, 'w', encoding='utf-8') as f:
            write_calibration(f, output)
    except (IOError, OSError) as e:
        raise OutputError("cannot write %s: %s" % (path, e))


def main(argv=sys.argv):
    progname, options = parse_args(argv)
    config.setup_logging(options)

    def run():
        output = calibrate(options)
        write_output(output, options.output)
        return output

    output = config.run_reporting_errors(progname, run, options.output)
    if not output.converged:
        sys.stderr.write("%s: %s did not converge after %d iterations\n"
                         % (progname, output.solver, output.iterations))
        sys.exit(EXIT_NOT_CONVERGED)


if __name__ == '__main__':
    main()
