#!/usr/bin/env python
"""
Check a correspondence file without solving anything.

Usage: radarpnp validate [options] [--input] correspondences.csv

Reports, one per line, ``file:line: severity: message`` for

* an unknown or missing header, malformed metadata comments;
* rows with the wrong number of fields or non-numeric values;
* ranges that are not positive, elevations outside [0, pi] and azimuths
  outside [0, 2*pi) (degrees with a degree header);
* duplicate rows;
* fewer than four usable rows;
* 3D points that are nearly collinear or coplanar.

Exit status: 0 for a clean file, 1 if there are only warnings, 3 if there
are errors.  The input file is only read.
"""

# Copyright (c) 2026, the radarpnp contributors
#
# Released under the terms of the GNU GPL
# http://www.gnu.org/copyleft/gpl.html

from __future__ import print_function

import io
import math
import os
import sys
from collections import namedtuple

from . import config
from .epnp import MIN_POINTS, point_spread
from .errors import EXIT_OK, EXIT_PARSE, EXIT_WARNINGS, ParseError
from .fileformats import CARTESIAN_COLUMNS, DEGREE_COLUMNS, scan_table
from .geometry import spherical_to_cartesian_array


# Smallest-to-largest singular value ratio of the centered points below
# which the geometry is reported as ill-conditioned.
CONDITIONING_WARNING = 1e-3

ERROR = 'error'
WARNING = 'warning'


class Diagnostic(namedtuple('Diagnostic', 'severity lineno message')):
    """One finding; lineno is None for whole-file findings."""

    __slots__ = ()

    def format(self, filename):
        if self.lineno is None:
            return '%s: %s: %s' % (filename, self.severity, self.message)
        return '%s:%d: %s: %s' % (filename, self.lineno, self.severity,
                                  self.message)


def check_row(columns, lineno, fields):
    """Diagnostics of one data row and its values, or None if unusable."""
    if len(fields) != len(columns):
        return [Diagnostic(ERROR, lineno, "expected %d fields, got %d"
                           % (len(columns), len(fields)))], None
    values = []
    for name, field in zip(columns, fields):
        try:
            value = float(field)
        except ValueError:
            return [Diagnostic(ERROR, lineno, "%s: not a number: %r"
                               % (name, field))], None
        if not math.isfinite(value):
            return [Diagnostic(ERROR, lineno, "%s: not finite: %r"
                               % (name, field))], None
        values.append(value)
    if columns == CARTESIAN_COLUMNS:
        if not any(values[:3]):
            return [Diagnostic(ERROR, lineno,
                               "radar point at the origin")], None
        return [], values
    if columns == DEGREE_COLUMNS:
        half, full, unit = 180.0, 360.0, 'deg'
    else:
        half, full, unit = math.pi, 2 * math.pi, 'rad'
    found = []
    rho, theta, phi = values[:3]
    if not rho > 0:
        found.append(Diagnostic(ERROR, lineno, "range %r is not positive"
                                % rho))
    if not 0 <= theta <= half:
        found.append(Diagnostic(ERROR, lineno, "elevation %r outside [0, %s]"
                                " %s" % (theta, 'pi' if unit == 'rad'
                                         else '180', unit)))
    if not 0 <= phi < full:
        found.append(Diagnostic(ERROR, lineno, "azimuth %r outside [0, %s) %s"
                                % (phi, '2*pi' if unit == 'rad' else '360',
                                   unit)))
    if found:
        return found, None
    return [], values


def _cartesian(columns, rows):
    if columns == CARTESIAN_COLUMNS:
        return [row[:3] for row in rows]
    sph = [row[:3] for row in rows]
    if columns == DEGREE_COLUMNS:
        sph = [(r, math.radians(t), math.radians(p)) for r, t, p in sph]
    return spherical_to_cartesian_array(sph)


def check_geometry(points):
    """Diagnostics of the spatial spread of the 3D points."""
    spread = point_spread(points)
    if not spread[0] > 0:
        return [Diagnostic(ERROR, None, "all 3D points coincide")]
    if spread[1] < CONDITIONING_WARNING * spread[0]:
        return [Diagnostic(WARNING, None,
                           "3D points are nearly collinear (singular value"
                           " ratio %.3g); the pose is ill-conditioned"
                           % (spread[1] / spread[0]))]
    if spread[2] < CONDITIONING_WARNING * spread[0]:
        return [Diagnostic(WARNING, None,
                           "3D points are nearly coplanar (singular value"
                           " ratio %.3g); the pose is ill-conditioned"
                           % (spread[2] / spread[0]))]
    return []


def validate_lines(f, filename=None):
    """Diagnostics of a correspondence file object, in line order."""
    try:
        metadata, columns, rows = scan_table(f, filename)
    except ParseError as e:
        # scan_table prefixes file and line itself
        message = str(e)
        if filename is not None and message.startswith(filename + ': '):
            message = message[len(filename) + 2:]
        return [Diagnostic(ERROR, None, message)]
    diagnostics = []
    usable = []
    seen = {}
    for lineno, fields in rows:
        found, values = check_row(columns, lineno, fields)
        diagnostics.extend(found)
        if values is None:
            continue
        key = tuple(values)
        if key in seen:
            diagnostics.append(Diagnostic(WARNING, lineno,
                                          "duplicate of line %d"
                                          % seen[key]))
            continue
        seen[key] = lineno
        usable.append(values)
    if len(usable) < MIN_POINTS:
        diagnostics.append(Diagnostic(
            ERROR, None, "%d usable correspondences, at least %d needed"
            % (len(usable), MIN_POINTS)))
    elif usable:
        diagnostics.extend(check_geometry(_cartesian(columns, usable)))
    if 'intrinsics' not in metadata:
        diagnostics.append(Diagnostic(
            WARNING, None, "no '# intrinsics:' line; calibrate will need"
            " --fx, --fy, --u0 and --v0"))
    return diagnostics


def exit_status(diagnostics):
    severities = set(d.severity for d in diagnostics)
    if ERROR in severities:
        return EXIT_PARSE
    if WARNING in severities:
        return EXIT_WARNINGS
    return EXIT_OK


def validate(path):
    try:
        with io.open(path, encoding='utf-8') as f:
            return validate_lines(f, path)
    except (IOError, UnicodeDecodeError) as e:
        return [Diagnostic(ERROR, None, "cannot read: %s" % e)]


def main(argv=sys.argv):
    progname = os.path.basename(argv[0])
    parser = config.make_parser(
        progname, "usage: %prog [options] [--input] correspondences.csv",
        "Checks a correspondence file for format errors, implausible"
        " values, duplicates and ill-conditioned geometry.")
    parser.add_option('-i', '--input', metavar='FILE',
                      help="correspondence CSV file")
    options, args = parser.parse_args(config.hoist_config_args(argv[1:]))
    if options.input and args:
        parser.error("give the input file either with --input or as an"
                     " argument")
    path = options.input or (args[0] if len(args) == 1 else None)
    if path is None:
        parser.error("missing input file name" if not args
                     else "too many arguments")
    config.setup_logging(options)

    diagnostics = validate(path)
    for d in diagnostics:
        print(d.format(path))
    errors = sum(1 for d in diagnostics if d.severity == ERROR)
    warnings = len(diagnostics) - errors
    if diagnostics:
        print("%s: %d error(s), %d warning(s)" % (path, errors, warnings))
    else:
        print("%s: ok" % path)
    status = exit_status(diagnostics)
    if status:
        sys.exit(status)


if __name__ == '__main__':
    main()
