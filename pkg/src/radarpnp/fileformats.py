"""
File formats: correspondence CSV, calibration JSON and trial-record CSV.

Correspondence files are UTF-8 CSV with a header line naming the columns,
``range_m,theta_rad,phi_rad,u_px,v_px`` by default.  Comment lines start
with ``#``; two of them, if they come before the header, carry metadata::

    # intrinsics: fx=800 fy=800 u0=640 v0=480
    # noise: sigma_range_m=0.02 sigma_theta_rad=0.005 sigma_phi_rad=0.005

Two more headers are understood: ``range_m,theta_deg,phi_deg,u_px,v_px``
(read with ``degrees=True``) and ``x_m,y_m,z_m,u_px,v_px`` (read with
``cartesian=True``) for Cartesian radar points, converted to spherical
form on reading.

Floats are written with ``repr`` so that reading back gives the same
values.
"""

# Copyright (c) 2026, the radarpnp contributors
#
# Released under the terms of the GNU GPL
# http://www.gnu.org/copyleft/gpl.html

import csv
import io
import json
import math
from collections import namedtuple

import numpy as np

from .errors import DomainError, OutputError, ParseError
from .geometry import CameraIntrinsics, Pose
from .noise_model import NoiseSpec
from .simulation import TrialRecord
from .solvers import Correspondence


SPHERICAL_COLUMNS = ('range_m', 'theta_rad', 'phi_rad', 'u_px', 'v_px')
DEGREE_COLUMNS = ('range_m', 'theta_deg', 'phi_deg', 'u_px', 'v_px')
CARTESIAN_COLUMNS = ('x_m', 'y_m', 'z_m', 'u_px', 'v_px')

RECORD_COLUMNS = ('n_points', 'solver', 'seed', 'rot_err_rad', 'trans_err_m',
                  'converged')

SUMMARY_COLUMNS = ('n_points', 'solver', 'trials', 'failures',
                   'rot_err_mean', 'rot_err_median', 'rot_err_iqr',
                   'trans_err_mean', 'trans_err_median', 'trans_err_iqr')

INTRINSICS_KEYS = ('fx', 'fy', 'u0', 'v0')
NOISE_KEYS = ('sigma_range_m', 'sigma_theta_rad', 'sigma_phi_rad')

CONSISTENCY_TOLERANCE = 1e-9


class CorrespondenceFile(namedtuple('CorrespondenceFile', 'correspondences'
                                    ' intrinsics noise columns')):
    """Parsed correspondence file; intrinsics and noise may be None."""

    __slots__ = ()


def fmt(value):
    """Format a float so that float(fmt(x)) == x."""
    return repr(float(value))


def _parse_assignments(text, keys, what, filename, lineno):
    values = {}
    for item in text.split():
        key, sep, value = item.partition('=')
        if not sep or key not in keys:
            raise ParseError("bad %s item %r" % (what, item), filename, lineno)
        try:
            values[key] = float(value)
        except ValueError:
            raise ParseError("bad %s value %r" % (what, item), filename,
                             lineno)
    missing = [k for k in keys if k not in values]
    if missing:
        raise ParseError("%s: missing %s" % (what, ', '.join(missing)),
                         filename, lineno)
    return [values[k] for k in keys]


def parse_metadata(line, filename=None, lineno=None):
    """Parse a ``# intrinsics:`` or ``# noise:`` comment.

    Returns ('intrinsics', CameraIntrinsics), ('noise', NoiseSpec) or None
    for any other comment.

        >>> parse_metadata('# intrinsics: fx=800 fy=810 u0=640 v0=480')
        ('intrinsics', CameraIntrinsics(fx=800.0, fy=810.0, u0=640.0, v0=480.0))
        >>> parse_metadata('# just a comment') is None
        True

    """
    text = line.lstrip('#').strip()
    key, sep, rest = text.partition(':')
    key = key.strip().lower()
    if not sep or key not in ('intrinsics', 'noise'):
        return None
    try:
        if key == 'intrinsics':
            return key, CameraIntrinsics(*_parse_assignments(
                rest, INTRINSICS_KEYS, key, filename, lineno))
        return key, NoiseSpec(*_parse_assignments(
            rest, NOISE_KEYS, key, filename, lineno))
    except DomainError as e:
        raise ParseError(str(e), filename, lineno)


def scan_table(f, filename=None, headers=None):
    """Split a CSV file into (metadata, columns, rows).

    ``rows`` is a list of (line number, list of fields).  Raises ParseError
    for a missing or unknown header.
    """
    if headers is None:
        headers = (SPHERICAL_COLUMNS, DEGREE_COLUMNS, CARTESIAN_COLUMNS)
    metadata = {}
    columns = None
    rows = []
    for lineno, line in enumerate(f, 1):
        line = line.strip()
        if not line:
            continue
        if line.startswith('#'):
            if columns is None:
                parsed = parse_metadata(line, filename, lineno)
                if parsed is not None:
                    metadata[parsed[0]] = parsed[1]
            continue
        fields = [field.strip() for field in next(csv.reader([line]))]
        if columns is None:
            columns = tuple(fields)
            if columns not in headers:
                raise ParseError("unknown header %r" % ','.join(fields),
                                 filename, lineno)
            continue
        rows.append((lineno, fields))
    if columns is None:
        raise ParseError("missing header line", filename)
    return metadata, columns, rows


def row_to_correspondence(columns, fields):
    """Build a Correspondence from one row; raises ValueError on bad data."""
    if len(fields) != len(columns):
        raise ValueError("expected %d fields, got %d"
                         % (len(columns), len(fields)))
    values = [float(field) for field in fields]
    if not all(math.isfinite(v) for v in values):
        raise ValueError("non-finite value")
    a, b, c, u, v = values
    if columns == CARTESIAN_COLUMNS:
        return Correspondence.from_cartesian((a, b, c), (u, v))
    if columns == DEGREE_COLUMNS:
        b, c = math.radians(b), math.radians(c)
    return Correspondence((a, b, c), (u, v))


def read_correspondences(f, filename=None, degrees=False, cartesian=False):
    """Parse a correspondence file object into a CorrespondenceFile.

    The header must match the mode: Cartesian columns with
    ``cartesian=True``, degree columns with ``degrees=True``, radians
    otherwise.
    """
    if cartesian:
        headers = [CARTESIAN_COLUMNS]
    elif degrees:
        headers = [DEGREE_COLUMNS]
    else:
        headers = [SPHERICAL_COLUMNS]
    metadata, columns, rows = scan_table(f, filename, headers)
    corrs = []
    for lineno, fields in rows:
        try:
            corrs.append(row_to_correspondence(columns, fields))
        except ValueError as e:
            # DomainError is a ValueError too
            raise ParseError(str(e), filename, lineno)
    return CorrespondenceFile(corrs, metadata.get('intrinsics'),
                              metadata.get('noise'), columns)


def load_correspondences(path, degrees=False, cartesian=False):
    try:
        with io.open(path, encoding='utf-8') as f:
            return read_correspondences(f, path, degrees=degrees,
                                        cartesian=cartesian)
    except (IOError, UnicodeDecodeError) as e:
        raise ParseError("cannot read: %s" % e, path)


def write_correspondences(f, corrs, intrinsics=None, noise=None):
    """Write correspondences in spherical form (radians)."""
    if intrinsics is not None:
        f.write('# intrinsics: %s\n' % ' '.join(
            '%s=%s' % (k, fmt(v)) for k, v in zip(INTRINSICS_KEYS,
                                                  intrinsics)))
    if noise is not None:
        f.write('# noise: %s\n' % ' '.join(
            '%s=%s' % (k, fmt(v)) for k, v in zip(NOISE_KEYS, noise)))
    f.write(','.join(SPHERICAL_COLUMNS) + '\n')
    for c in corrs:
        f.write(','.join(fmt(v) for v in tuple(c.radar_meas) + tuple(c.pixel))
                + '\n')


#
# Calibration output
#

class CalibrationOutput(namedtuple('CalibrationOutput', 'pose inlier_indices'
                                   ' per_point_residuals solver iterations'
                                   ' final_cost converged seed ransac'
                                   ' version')):
    """Result of a calibration run.

    ``ransac`` is None or a dict with ``trials_run`` and ``inlier_ratio``.
    """

    __slots__ = ()


def calibration_record(output):
    """JSON-ready dict of a CalibrationOutput."""
    pose = output.pose
    return {
        'program': {'name': 'radarpnp', 'version': output.version},
        'solver': {
            'name': output.solver,
            'iterations': int(output.iterations),
            'final_cost': float(output.final_cost),
            'converged': bool(output.converged),
            'seed': output.seed,
        },
        'rotation': {
            'matrix': pose.rotation.tolist(),
            'quaternion_wxyz': pose.as_quaternion().tolist(),
            'euler_xyz_rad': pose.as_euler().tolist(),
        },
        'translation_m': pose.translation.tolist(),
        'inlier_indices': [int(i) for i in output.inlier_indices],
        'per_point_squared_residuals': [
            float(r) for r in output.per_point_residuals],
        'ransac': output.ransac,
    }


def write_calibration(f, output):
    json.dump(calibration_record(output), f, indent=2, sort_keys=True)
    f.write('\n')


def read_calibration(f, filename=None):
    """Parse a calibration JSON document back into a CalibrationOutput.

    The quaternion and Euler angles must agree with the matrix.
    """
    try:
        doc = json.load(f)
        rotation = doc['rotation']
        pose = Pose(rotation['matrix'], doc['translation_m'])
        solver = doc['solver']
        output = CalibrationOutput(
            pose, tuple(int(i) for i in doc['inlier_indices']),
            tuple(float(r) for r in doc['per_point_squared_residuals']),
            solver['name'], int(solver['iterations']),
            float(solver['final_cost']), bool(solver['converged']),
            solver['seed'], doc['ransac'], doc['program']['version'])
        quaternion = np.array(rotation['quaternion_wxyz'], dtype=float)
        euler = np.array(rotation['euler_xyz_rad'], dtype=float)
    except (ValueError, KeyError, TypeError) as e:
        raise ParseError("malformed calibration output: %s" % e, filename)
    if abs(np.linalg.norm(quaternion) - 1) > CONSISTENCY_TOLERANCE:
        raise ParseError("quaternion is not a unit quaternion", filename)
    if not (np.allclose(Pose.from_quaternion(quaternion, (0, 0, 0)).rotation,
                        pose.rotation, rtol=0, atol=CONSISTENCY_TOLERANCE)
            and np.allclose(Pose.from_euler(euler).rotation, pose.rotation,
                            rtol=0, atol=CONSISTENCY_TOLERANCE)):
        raise ParseError("rotation matrix, quaternion and Euler angles"
                         " disagree", filename)
    return output


def error_record(error):
    return {'error': error.as_record()}


def write_json_file(path, doc):
    """Write a JSON document to path; raises OutputError on failure."""
    try:
        with io.open(path, 'w', encoding='utf-8') as f:
            json.dump(doc, f, indent=2, sort_keys=True)
            f.write('\n')
    except (IOError, OSError) as e:
        raise OutputError("cannot write %s: %s" % (path, e))


#
# Trial records
#

def _writer(f):
    return csv.writer(f, lineterminator='\n')


def write_records(f, records):
    """Write TrialRecords as CSV, in the given order."""
    writer = _writer(f)
    writer.writerow(RECORD_COLUMNS)
    for r in records:
        writer.writerow([r.n_points, r.solver, r.seed, fmt(r.rotation_error),
                         fmt(r.translation_error),
                         'true' if r.converged else 'false'])


def read_records(f, filename=None):
    """Parse a trial-record CSV back into TrialRecords."""
    reader = csv.reader(f)
    records = []
    for lineno, row in enumerate(reader, 1):
        if lineno == 1:
            if tuple(row) != RECORD_COLUMNS:
                raise ParseError("unknown header %r" % ','.join(row),
                                 filename, lineno)
            continue
        try:
            n, solver, seed, rot, trans, converged = row
            if converged not in ('true', 'false'):
                raise ValueError("converged must be true or false")
            records.append(TrialRecord(int(n), solver, int(seed), float(rot),
                                       float(trans), converged == 'true'))
        except ValueError as e:
            raise ParseError(str(e), filename, lineno)
    return records


def write_summary(f, summary):
    writer = _writer(f)
    writer.writerow(SUMMARY_COLUMNS)
    for s in summary:
        writer.writerow([s.n_points, s.solver, s.trials, s.failures]
                        + [fmt(v) for v in s[4:]])


def write_csv_file(path, write, rows):
    """Open path for writing and call ``write(f, rows)``."""
    try:
        with io.open(path, 'w', encoding='utf-8', newline='') as f:
            write(f, rows)
    except (IOError, OSError) as e:
        raise OutputError("cannot write %s: %s" % (path, e))

