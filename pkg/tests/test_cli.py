import io
import json
import os
import shutil
import tempfile
import unittest

from topoband.cli import _rewrite, run
from topoband.config import RunConfig
from topoband.errors import UsageError
from topoband.invariants import InvariantResult


class CliTest(unittest.TestCase):

    def setUp(self):
        self.tmpdir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmpdir)

    def path(self, name):
        return os.path.join(self.tmpdir, name)

    def run_cli(self, *argv):
        stdout, stderr = io.StringIO(), io.StringIO()
        status = run(list(argv), stdout, stderr)
        return status, stdout.getvalue(), stderr.getvalue()

    def test_chern_with_json_file(self):
        target = self.path('chern.json')
        status, out, err = self.run_cli('invariant', 'chern', '--model', 'qahe2d', '--m', '1',
                                        '--grid', '24', '--json', target)
        self.assertEqual(status, 0, err)
        with open(target) as f:
            written = json.load(f)
        self.assertEqual(written['value'], 1)
        self.assertEqual(written['grid'], 24)
        self.assertEqual(json.loads(out), written)
        self.assertEqual([name for name in os.listdir(self.tmpdir)], ['chern.json'])

    def test_identical_runs_write_identical_bytes(self):
        outputs = []
        for name in ('first.json', 'second.json'):
            target = self.path(name)
            status, out, err = self.run_cli('invariant', 'chern', '--model', 'qahe2d', '--m=-1.3',
                                            '--grid', '20', '--json', target)
            self.assertEqual(status, 0, err)
            with open(target, 'rb') as f:
                outputs.append((f.read(), out))
        self.assertEqual(outputs[0], outputs[1])
        restored = InvariantResult.from_dict(json.loads(outputs[0][0]))
        self.assertEqual((restored.name, restored.value, restored.grid), ('chern1', -1, 20))

    def test_gapless_model_is_a_contract_error(self):
        status, out, err = self.run_cli('invariant', 'chern', '--model', 'qahe2d', '--m', '0')
        self.assertEqual(status, 2)
        self.assertTrue(err.startswith('GapClosed'))
        self.assertEqual(out, '')

    def test_classify_table(self):
        status, out, _ = self.run_cli('classify', 'table')
        self.assertEqual(status, 0)
        lines = out.splitlines()
        self.assertTrue(lines[0].startswith('Cartan\\d'))
        self.assertEqual(lines[6].split(), ['DIII', '0', 'Z2', 'Z2', 'Z', '0', '0', '0', 'Z'])

    def test_classify_entry(self):
        status, out, err = self.run_cli('classify', 'entry', '--class', 'AII', '--dim', '3')
        self.assertEqual(status, 0, err)
        self.assertEqual(json.loads(out), dict(label='AII', dim=3, group='Z2', even=False))
        status, out, _ = self.run_cli('classify', 'entry', '--class=D', '--dim', '2', '--fmt', 'text')
        self.assertEqual(out, 'D d=2: Z\n')

    def test_classify_torus(self):
        status, out, _ = self.run_cli('classify', 'torus', '--class', 'AII', '--dim', '3')
        self.assertEqual(status, 0)
        self.assertEqual(json.loads(out)['band_and_weak'], 'Z ⊕ 3Z2')
        status, _, err = self.run_cli('classify', 'torus', '--class', 'A', '--dim', '2')
        self.assertEqual(status, 2)
        self.assertTrue(err.startswith('ComplexClassUnsupported'))

    def test_config_file_precedence(self):
        config = self.path('run.cfg')
        with open(config, 'w') as f:
            f.write("model=qahe2d m=-1\n# grid for quick runs\ngrid=12\n")
        status, out, err = self.run_cli('invariant', 'chern', '--config', config)
        self.assertEqual(status, 0, err)
        result = json.loads(out)
        self.assertEqual((result['value'], result['grid']), (-1, 12))
        status, out, _ = self.run_cli('invariant', 'chern', '--config', config, '--m', '1')
        result = json.loads(out)
        self.assertEqual((result['value'], result['grid']), (1, 12))

    def test_bad_config_file(self):
        config = self.path('bad.cfg')
        with open(config, 'w') as f:
            f.write("model=qahe2d colour=blue\n")
        status, _, err = self.run_cli('invariant', 'chern', '--config', config)
        self.assertEqual(status, 2)
        self.assertIn('colour', err)

    def test_usage_errors(self):
        self.assertEqual(self.run_cli()[0], 2)
        self.assertEqual(self.run_cli('bandstructure')[0], 2)
        status, _, err = self.run_cli('invariant', 'chern', '--model', 'graphene', '--m', '1')
        self.assertEqual(status, 2)
        self.assertTrue(err.startswith('UsageError'))
        status, _, err = self.run_cli('invariant', 'z2', '--model', 'doubled_qahe_trs', '--m', '1', '--grid', '23')
        self.assertEqual(status, 2)

    def test_edge_count(self):
        status, out, err = self.run_cli('edge', 'count', '--model', 'qahe2d', '--m', '1', '--samples', '101')
        self.assertEqual(status, 0, err)
        result = json.loads(out)
        self.assertEqual((result['n_plus'], result['n_minus']), (1, 0))

    def test_phase_diagram_csv(self):
        target = self.path('phases.csv')
        status, _, err = self.run_cli('phase-diagram', '--model', 'qahe2d', '--masses=-3,-1,1,3', '--csv', target)
        self.assertEqual(status, 0, err)
        with open(target) as f:
            lines = f.read().splitlines()
        self.assertEqual(lines[0], 'm_lo,m_hi,value')
        self.assertEqual([line.split(',')[-1] for line in lines[1:]], ['0', '-1', '1', '0'])

    def test_critical_points(self):
        status, out, err = self.run_cli('critical-points', '--model', 'qahe2d', '--mlo', '-1', '--mhi', '1')
        self.assertEqual(status, 0, err)
        self.assertEqual(len(json.loads(out)), 2)

    def test_symmetry_check(self):
        status, out, err = self.run_cli('symmetry', 'check', '--model', 'ssh1d', '--t1', '0.5', '--t2', '1')
        self.assertEqual(status, 0, err)
        self.assertEqual(json.loads(out)['classification']['cartan_label'], 'BDI')

    def test_help(self):
        status, out, _ = self.run_cli('--help')
        self.assertEqual(status, 0)
        self.assertIn('phase-diagram', out)
        self.assertIn('no worker-count option', out)

    def test_rewrite(self):
        self.assertEqual(_rewrite(['entry', '--class', 'AII', '--class=D']),
                         ['entry', '--label', 'AII', '--label=D'])


class RunConfigTest(unittest.TestCase):

    def test_defaults(self):
        cfg = RunConfig.resolve('gauss', dict(model='qahe2d', m=1.0))
        self.assertEqual(cfg['grid'], 48)
        self.assertEqual(cfg['format'], 'json')
        self.assertEqual(cfg.model_spec(), dict(model='qahe2d', m=1.0))

    def test_coercion_and_validation(self):
        self.assertEqual(RunConfig.resolve('chern', dict(grid='16'))['grid'], 16)
        with self.assertRaises(UsageError):
            RunConfig.resolve('chern', dict(grid='1.5'))
        with self.assertRaises(UsageError):
            RunConfig.resolve('chern', dict(grid=1))
        with self.assertRaises(UsageError):
            RunConfig.resolve('chern', dict(format='xml'))
        with self.assertRaises(UsageError):
            RunConfig.resolve('chern', {})['missing']

    def test_winding_grid(self):
        cfg = RunConfig.resolve('winding', dict(model='ssh1d'))
        self.assertEqual(cfg.winding_grid(1), 64)
        self.assertEqual(cfg.winding_grid(3), 20)
        with self.assertRaises(UsageError):
            cfg.winding_grid(2)
