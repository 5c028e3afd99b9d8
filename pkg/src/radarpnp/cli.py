#!/usr/bin/env python
"""
The ``radarpnp`` command: dispatches to calibrate, simulate and validate.

Usage: radarpnp COMMAND [options]

``radarpnp COMMAND --help`` describes the options of each command.
"""

# Copyright (c) 2026, the radarpnp contributors
#
# Released under the terms of the GNU GPL
# http://www.gnu.org/copyleft/gpl.html

from __future__ import print_function

import os
import sys

from . import calibrate, simulate, validate
from ._version import __version__ as VERSION
from .errors import EXIT_USAGE


COMMANDS = [
    ('calibrate', calibrate.main,
     "estimate the radar-to-camera pose from a correspondence file"),
    ('simulate', simulate.main,
     "run the Monte-Carlo experiment on synthetic scenes"),
    ('validate', validate.main,
     "check a correspondence file"),
]


def usage(progname):
    lines = ["usage: %s COMMAND [options]" % progname, "", "commands:"]
    for name, _, help in COMMANDS:
        lines.append("  %-10s %s" % (name, help))
    lines.append("")
    lines.append("Use '%s COMMAND --help' for the options of a command."
                 % progname)
    return '\n'.join(lines)


def main(argv=sys.argv):
    progname = os.path.basename(argv[0])
    args = argv[1:]
    if not args:
        print(usage(progname), file=sys.stderr)
        sys.exit(EXIT_USAGE)
    command = args[0]
    if command in ('-h', '--help'):
        print(usage(progname))
        return
    if command == '--version':
        print(VERSION)
        return
    for name, command_main, _ in COMMANDS:
        if name == command:
            break
    else:
        print("%s: unknown command: %s" % (progname, command),
              file=sys.stderr)
        print(usage(progname), file=sys.stderr)
        sys.exit(EXIT_USAGE)
    command_main(['%s %s' % (progname, name)] + args[1:])


if __name__ == '__main__':
    main()
