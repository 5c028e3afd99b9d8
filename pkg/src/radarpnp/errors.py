"""
Error taxonomy shared by the library and the command-line tools.

Every application error derives from ``Error``.  The command-line tools
turn an ``Error`` into ``prog: message`` on stderr and exit with the
error's ``exit_code``:

    ==  ==========================================================
     0  success
     1  ``validate`` found warnings only
     2  usage error (bad command-line options)
     3  input file could not be parsed, or failed validation
     4  too few correspondences
     5  degenerate point configuration
     6  the nonlinear solver did not converge (output still written)
     7  RANSAC never produced a model
     8  output file could not be written
     9  missing or invalid configuration
    10  value out of its domain
    11  points behind the camera
    ==  ==========================================================

"""

# Copyright (c) 2026, the radarpnp contributors
#
# Released under the terms of the GNU GPL
# http://www.gnu.org/copyleft/gpl.html

EXIT_OK = 0
EXIT_WARNINGS = 1
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_ARITY = 4
EXIT_DEGENERATE = 5
EXIT_NOT_CONVERGED = 6
EXIT_RANSAC_FAILED = 7
EXIT_OUTPUT = 8
EXIT_CONFIG = 9
EXIT_DOMAIN = 10
EXIT_BEHIND_CAMERA = 11


class Error(Exception):
    """Application error."""

    exit_code = 1

    @property
    def kind(self):
        return self.__class__.__name__

    def as_record(self):
        """Machine-readable form of the error."""
        return {'kind': self.kind, 'message': str(self),
                'exit_code': self.exit_code}


class DomainError(Error, ValueError):
    """A value lies outside the domain of a type or an operation."""

    exit_code = EXIT_DOMAIN


class BehindCameraError(Error):
    """A point has non-positive depth in the camera frame."""

    exit_code = EXIT_BEHIND_CAMERA

    def __init__(self, message, index=None):
        Error.__init__(self, message)
        self.index = index


class InitializationError(Error):
    """The initial pose puts every point behind the camera."""

    exit_code = EXIT_BEHIND_CAMERA


class ArityError(Error):
    """Not enough correspondences for the requested operation."""

    exit_code = EXIT_ARITY


class DegenerateConfigurationError(Error):
    """The 3D points do not span enough dimensions for a unique pose."""

    exit_code = EXIT_DEGENERATE


class RansacFailure(Error):
    """No minimal sample ever yielded a valid model."""

    exit_code = EXIT_RANSAC_FAILED


class ParseError(Error):
    """A file does not follow its format."""

    exit_code = EXIT_PARSE

    def __init__(self, message, filename=None, lineno=None):
        if lineno is not None:
            message = 'line %d: %s' % (lineno, message)
        if filename is not None:
            message = '%s: %s' % (filename, message)
        Error.__init__(self, message)
        self.filename = filename
        self.lineno = lineno


class ConfigError(Error):
    """Configuration is missing or invalid."""

    exit_code = EXIT_CONFIG


class OutputError(Error):
    """An output file could not be written."""

    exit_code = EXIT_OUTPUT
