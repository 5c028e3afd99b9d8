import doctest
import io
import optparse
import os
import shutil
import sys
import tempfile
import unittest

import mock

from radarpnp.config import (
    CONFIG_ENV, add_intrinsics_options, add_noise_options,
    add_ransac_options, add_solver_options, do_config_file,
    hoist_config_args, intrinsics_from, make_parser, noise_from,
    ransac_options_from, report_error, solve_options_from)
from radarpnp.errors import ArityError, ConfigError
from radarpnp.geometry import CameraIntrinsics
from radarpnp.noise_model import RADAR_NOISE, NoiseSpec


here = os.path.dirname(__file__)
sample_cfg = os.path.join(here, 'sample.cfg')


def parser():
    p = make_parser('radarpnp test', '%prog [options]', 'Test parser.')
    add_intrinsics_options(p)
    add_noise_options(p)
    add_solver_options(p)
    add_ransac_options(p)
    return p


def parse(*args):
    stderr = sys.stderr
    try:
        sys.stderr = sys.stdout
        options, args = parser().parse_args(hoist_config_args(args,
                                                              environ={}))
        return options
    except SystemExit as e:
        print("SystemExit(%r)" % e.code)
    finally:
        sys.stderr = stderr


def doctest_config_file():
    """Test for do_config_file

        >>> options = parse('-c', sample_cfg)
        >>> options.fx, options.fy, options.u0, options.v0
        (800.0, 800.0, 640.0, 480.0)
        >>> options.sigma_range, options.sigma_theta, options.sigma_phi
        (0.02, 0.005, 0.005)

    The command line overrides the file, wherever -c appears:

        >>> parse('--fx', '900', '-c', sample_cfg).fx
        900.0

    """


def doctest_config_file_missing():
    """Test for do_config_file

        >>> parse('-c', '/no/such/file.cfg')
        Usage: radarpnp test [options]
        <BLANKLINE>
        radarpnp test: error: can't read config file: ...
        SystemExit(2)

    """


def doctest_config_file_bad_option():
    """Test for do_config_file

        >>> tmpdir = tempfile.mkdtemp(prefix='radarpnp-test-')
        >>> cfg = os.path.join(tmpdir, 'bad.cfg')
        >>> with open(cfg, 'w') as f:
        ...     _ = f.write('--fx eight-hundred\\n')
        >>> parse('-c', cfg)
        Usage: radarpnp test [options]
        <BLANKLINE>
        radarpnp test: error: option --fx: invalid floating-point value: 'eight-hundred'
        SystemExit(2)

        >>> shutil.rmtree(tmpdir)

    """


def doctest_report_error():
    """Test for report_error

        >>> stderr = sys.stderr
        >>> sys.stderr = sys.stdout
        >>> try:
        ...     report_error('radarpnp calibrate', ArityError('too few'))
        ... except SystemExit as e:
        ...     print("SystemExit(%r)" % e.code)
        ... finally:
        ...     sys.stderr = stderr
        radarpnp calibrate: too few
        SystemExit(4)

    """


class TestOptions(unittest.TestCase):

    def test_hoist_keeps_arguments_after_double_dash(self):
        self.assertEqual(hoist_config_args(['a', '--', '-c', 'x'],
                                           environ={}),
                         ['a', '--', '-c', 'x'])
        self.assertEqual(hoist_config_args(['a', '--config=x.cfg'],
                                           environ={}),
                         ['--config=x.cfg', 'a'])
        self.assertEqual(hoist_config_args(['a', '-cx.cfg'], environ={}),
                         ['-cx.cfg', 'a'])

    def test_command_line_config_beats_environment(self):
        self.assertEqual(hoist_config_args(['-c', 'a.cfg'],
                                           environ={CONFIG_ENV: 'b.cfg'}),
                         ['-c', 'a.cfg'])

    def test_environment(self):
        with mock.patch.dict(os.environ, {CONFIG_ENV: sample_cfg}):
            args = hoist_config_args(['in.csv'])
        options, args = parser().parse_args(args)
        self.assertEqual(args, ['in.csv'])
        self.assertEqual(options.u0, 640.0)

    def test_defaults(self):
        options = parser().parse_args([])[0]
        self.assertEqual(options.verbose, 0)
        self.assertFalse(options.quiet)
        self.assertTrue(options.polish)
        self.assertIsNone(options.fx)
        self.assertIsNone(options.sigma_range)
        self.assertEqual(solve_options_from(options).max_iterations, 100)

    def test_intrinsics(self):
        options = parser().parse_args(['--fx', '700'])[0]
        self.assertRaises(ConfigError, intrinsics_from, options)
        K = intrinsics_from(options, CameraIntrinsics(800, 800, 640, 480))
        self.assertEqual(K, CameraIntrinsics(700, 800, 640, 480))
        options = parser().parse_args(['--fx', '-1', '--fy', '1', '--u0',
                                       '0', '--v0', '0'])[0]
        with self.assertRaises(ConfigError) as cm:
            intrinsics_from(options)
        self.assertIn('bad camera intrinsics', str(cm.exception))

    def test_noise_precedence(self):
        from_file = NoiseSpec(0.1, 0.01, 0.01)
        options = parser().parse_args(['--sigma-phi', '0.02'])[0]
        self.assertEqual(noise_from(options, from_file),
                         NoiseSpec(0.1, 0.01, 0.02))
        self.assertEqual(noise_from(options),
                         NoiseSpec(RADAR_NOISE.sigma_range,
                                   RADAR_NOISE.sigma_theta, 0.02))
        options = parser().parse_args(['--sigma-range', '-1'])[0]
        self.assertRaises(ConfigError, noise_from, options)

    def test_solver_and_ransac_options(self):
        options = parser().parse_args(['--max-iterations', '0'])[0]
        self.assertRaises(ConfigError, solve_options_from, options)
        options = parser().parse_args(['--confidence', '1.5'])[0]
        self.assertRaises(ConfigError, ransac_options_from, options, 0)
        options = parser().parse_args(['--threshold', '11.5', '--no-polish',
                                       '--max-trials', '50'])[0]
        ransac = ransac_options_from(options, 3)
        self.assertEqual(ransac.threshold, 11.5)
        self.assertFalse(ransac.polish)
        self.assertEqual(ransac.max_trials_cap, 50)
        self.assertEqual(ransac.rng_seed, 3)

    def test_config_callback_splices_arguments(self):
        p = optparse.OptionParser()
        p.add_option('-c', action='callback', type='str',
                     callback=do_config_file)
        p.add_option('--fx', type='float')
        options, args = p.parse_args(['-c', sample_cfg, 'rest'])
        self.assertEqual(options.fx, 800.0)
        self.assertEqual(args, ['rest'])


class TestErrorRecords(unittest.TestCase):

    def setUp(self):
        self.tmpdir = tempfile.mkdtemp(prefix='radarpnp-test-')

    def tearDown(self):
        shutil.rmtree(self.tmpdir)

    def test_error_json(self):
        path = os.path.join(self.tmpdir, 'out.json')
        with mock.patch('sys.stderr', io.StringIO()) as stderr:
            with self.assertRaises(SystemExit) as cm:
                report_error('radarpnp calibrate', ConfigError('no K'), path)
        self.assertEqual(cm.exception.code, 9)
        self.assertEqual(stderr.getvalue(), 'radarpnp calibrate: no K\n')
        with open(path) as f:
            self.assertIn('"kind": "ConfigError"', f.read())

    def test_unwritable_error_json(self):
        path = os.path.join(self.tmpdir, 'missing', 'out.json')
        with mock.patch('sys.stderr', io.StringIO()):
            with self.assertRaises(SystemExit) as cm:
                report_error('radarpnp calibrate', ConfigError('no K'), path)
        self.assertEqual(cm.exception.code, 9)


def test_suite():
    optionflags = doctest.ELLIPSIS | doctest.REPORT_NDIFF
    loader = unittest.defaultTestLoader
    return unittest.TestSuite([
        doctest.DocTestSuite('radarpnp.config'),
        doctest.DocTestSuite(optionflags=optionflags),
        loader.loadTestsFromTestCase(TestOptions),
        loader.loadTestsFromTestCase(TestErrorRecords),
    ])
