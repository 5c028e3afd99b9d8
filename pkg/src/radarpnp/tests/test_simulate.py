import doctest
import io
import os
import shutil
import sys
import tempfile
import unittest

import mock

from radarpnp.fileformats import RECORD_COLUMNS, SUMMARY_COLUMNS, read_records
from radarpnp.simulate import main, parse_args, parse_noise, simulate
from radarpnp.noise_model import RADAR_NOISE, NoiseSpec


def run(*args):
    stderr = sys.stderr
    try:
        sys.stderr = sys.stdout
        main(['radarpnp simulate'] + list(args))
    except SystemExit as e:
        if e.code:
            print("SystemExit(%r)" % e.code)
    finally:
        sys.stderr = stderr


def doctest_main_bad_arguments():
    """Test for main

        >>> run('--schedule', '10,x')
        Usage: radarpnp simulate [options]
        <BLANKLINE>
        radarpnp simulate: error: bad schedule: 10,x
        SystemExit(2)

        >>> run('--schedule', '3,10')
        Usage: radarpnp simulate [options]
        <BLANKLINE>
        radarpnp simulate: error: scenes need at least 4 points
        SystemExit(2)

        >>> run('--solvers', '3dupnp,bundle')
        Usage: radarpnp simulate [options]
        <BLANKLINE>
        radarpnp simulate: error: unknown solver 'bundle' (choose from linear, 3dupnp, reproj, algebraic)
        SystemExit(2)

        >>> run('--trials', '0')
        Usage: radarpnp simulate [options]
        <BLANKLINE>
        radarpnp simulate: error: --trials must be at least 1
        SystemExit(2)

        >>> run('--subsample', '8', '--repeats', '0')
        Usage: radarpnp simulate [options]
        <BLANKLINE>
        radarpnp simulate: error: --repeats must be at least 1
        SystemExit(2)

        >>> run('--translation', '1,2')
        Usage: radarpnp simulate [options]
        <BLANKLINE>
        radarpnp simulate: error: translation needs 3 values, got 2
        SystemExit(2)

        >>> run('--noise', 'loud')
        Usage: radarpnp simulate [options]
        <BLANKLINE>
        radarpnp simulate: error: bad noise: 'loud'
        SystemExit(2)

        >>> run('records.csv')
        Usage: radarpnp simulate [options]
        <BLANKLINE>
        radarpnp simulate: error: too many arguments
        SystemExit(2)

    """


def doctest_main_small_experiment():
    """Test for main

        >>> run('--schedule', '6', '--trials', '2', '--noise', 'zero',
        ...     '--solvers', 'reproj', '--seed', '5')
        n_points,solver,seed,rot_err_rad,trans_err_m,converged
        6,reproj,...,...,...,true
        6,reproj,...,...,...,true

    """


class TestParseArgs(unittest.TestCase):

    def test_defaults(self):
        _, options = parse_args(['simulate'])
        self.assertEqual(options.schedule,
                         [10, 20, 40, 80, 160, 320, 640, 1280])
        self.assertEqual(options.trials, 100)
        self.assertEqual(options.solvers, ['3dupnp', 'reproj', 'algebraic'])
        self.assertEqual(options.base_noise, RADAR_NOISE)
        self.assertEqual(options.translation, [0.1, 0.05, 0.2])
        self.assertIsNone(options.subsample)

    def test_parse_noise(self):
        self.assertEqual(parse_noise('zero'), NoiseSpec.zero())
        self.assertEqual(parse_noise('0.1,0.01,0.02'),
                         NoiseSpec(0.1, 0.01, 0.02))
        self.assertRaises(ValueError, parse_noise, '-0.1,0.01,0.02')
        self.assertRaises(ValueError, parse_noise, '0.1')


class TestSimulate(unittest.TestCase):

    def setUp(self):
        self.tmpdir = tempfile.mkdtemp(prefix='radarpnp-test-')

    def tearDown(self):
        shutil.rmtree(self.tmpdir)

    def path(self, name):
        return os.path.join(self.tmpdir, name)

    def main(self, *args):
        stdout = io.StringIO()
        stderr = io.StringIO()
        code = 0
        with mock.patch('sys.stdout', stdout), \
                mock.patch('sys.stderr', stderr):
            try:
                main(['radarpnp simulate'] + list(args))
            except SystemExit as e:
                code = e.code or 0
        return code, stdout.getvalue(), stderr.getvalue()

    def read(self, name):
        with io.open(self.path(name)) as f:
            return f.read()

    def test_noise_free_runs_are_exact(self):
        code, stdout, stderr = self.main('--schedule', '8,12', '--trials',
                                         '3', '--noise', 'zero', '-o',
                                         self.path('records.csv'))
        self.assertEqual((code, stdout), (0, ''), stderr)
        with io.open(self.path('records.csv')) as f:
            records = read_records(f)
        self.assertEqual(len(records), 2 * 3 * 3)
        for r in records:
            self.assertTrue(r.converged, r)
            self.assertLess(r.rotation_error, 1e-6, r)
            self.assertLess(r.translation_error, 1e-6, r)

    def test_same_seed_same_bytes(self):
        args = ('--schedule', '10', '--trials', '4', '--seed', '9',
                '--pixel-noise', '0.5')
        self.main(*(args + ('-o', self.path('a.csv'))))
        self.main(*(args + ('-o', self.path('b.csv'))))
        self.assertEqual(self.read('a.csv'), self.read('b.csv'))
        self.main('--schedule', '10', '--trials', '4', '--seed', '10',
                  '--pixel-noise', '0.5', '-o', self.path('c.csv'))
        self.assertNotEqual(self.read('a.csv'), self.read('c.csv'))

    def test_summary(self):
        code, _, stderr = self.main('--schedule', '10,20', '--trials', '3',
                                    '--solvers', '3dupnp,algebraic', '-o',
                                    self.path('records.csv'), '--summary',
                                    self.path('summary.csv'))
        self.assertEqual(code, 0, stderr)
        lines = self.read('summary.csv').splitlines()
        self.assertEqual(lines[0], ','.join(SUMMARY_COLUMNS))
        self.assertEqual([tuple(line.split(',')[:3]) for line in lines[1:]],
                         [('10', '3dupnp', '3'), ('10', 'algebraic', '3'),
                          ('20', '3dupnp', '3'), ('20', 'algebraic', '3')])

    def test_stdout(self):
        code, stdout, _ = self.main('--schedule', '6', '--trials', '1')
        self.assertEqual(code, 0)
        lines = stdout.splitlines()
        self.assertEqual(lines[0], ','.join(RECORD_COLUMNS))
        self.assertEqual(len(lines), 4)

    def test_subsample(self):
        code, _, stderr = self.main('--subsample', '6', '--from-points', '15',
                                    '--repeats', '4', '--solvers', 'reproj',
                                    '-o', self.path('records.csv'))
        self.assertEqual(code, 0, stderr)
        with io.open(self.path('records.csv')) as f:
            records = read_records(f)
        self.assertEqual(len(records), 4)
        self.assertTrue(all(r.n_points == 6 for r in records))

    def test_subsample_larger_than_the_scene(self):
        code, _, stderr = self.main('--subsample', '30', '--from-points',
                                    '15', '--repeats', '2')
        self.assertEqual(code, 4)
        self.assertIn('cannot draw 30 of 15 correspondences', stderr)

    def test_unwritable_output(self):
        code, _, stderr = self.main('--schedule', '6', '--trials', '1', '-o',
                                    self.path('missing/records.csv'))
        self.assertEqual(code, 8)
        self.assertIn('radarpnp simulate: cannot write', stderr)

    def test_bad_intrinsics(self):
        code, _, stderr = self.main('--schedule', '6', '--trials', '1',
                                    '--fx', '-800')
        self.assertEqual(code, 9)
        self.assertIn('bad camera intrinsics', stderr)

    def test_pose_options(self):
        _, options = parse_args(['simulate', '--schedule', '8', '--trials',
                                 '2', '--noise', 'zero', '--rotation-offset',
                                 '-45', '--translation', '0.3,-0.1,0.05',
                                 '--fx', '1000'])
        records = simulate(options)
        self.assertEqual(len(records), 2 * 3)
        self.assertTrue(all(r.translation_error < 1e-6 for r in records))


def test_suite():
    optionflags = doctest.ELLIPSIS | doctest.REPORT_NDIFF
    loader = unittest.defaultTestLoader
    return unittest.TestSuite([
        doctest.DocTestSuite('radarpnp.simulate'),
        doctest.DocTestSuite(optionflags=optionflags),
        loader.loadTestsFromTestCase(TestParseArgs),
        loader.loadTestsFromTestCase(TestSimulate),
    ])
