#!/usr/bin/env python
import os
import re
from setuptools import setup


here = os.path.dirname(__file__)


def read(filename):
    with open(os.path.join(here, filename)) as f:
        return f.read()


long_description = read('README.rst') + '\n\n' + read('CHANGES.rst')

version_file = os.path.join(here, 'src/radarpnp/_version.py')
d = dict(re.findall('''(__version__) *= *'([^']*)''', read(version_file)))
version = d['__version__']

setup(
    name='radarpnp',
    version=version,
    author='the radarpnp contributors',
    license='GPL',
    platforms=['any'],
    description='Radar-camera extrinsic calibration with a bias-compensated'
                ' PnP solver',
    long_description=long_description,
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: GNU General Public License (GPL)',
        'Operating System :: OS Independent',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
        'Programming Language :: Python :: 3.12',
        'Programming Language :: Python :: Implementation :: CPython',
        'Topic :: Scientific/Engineering',
    ],
    python_requires='>=3.8',
    install_requires=[
        "numpy>=1.17",
        "scipy>=1.4",
    ],
    extras_require=dict(test=[
        "mock",
        "zope.testing",
        "zope.testrunner",
    ]),
    packages=['radarpnp', 'radarpnp.tests'],
    package_dir={'': 'src'},
    package_data={'radarpnp.tests': ['*.csv', '*.cfg']},
    include_package_data=True,
    entry_points="""
        [console_scripts]
        radarpnp = radarpnp.cli:main
    """,
    zip_safe=False,
)
