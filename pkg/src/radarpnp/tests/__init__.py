# This is a Python package.
