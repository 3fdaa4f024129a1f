import json
import tempfile
from io import StringIO
from pathlib import Path

import numpy as np
import pandas as pd
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from recycling import conf
from recycling.dense_sim import save_density
from recycling.exceptions import ConfigError, OracleMismatchError
from recycling.harness import (
    ExperimentConfig,
    check_agreement,
    parse_plan,
    render_table,
    run_experiment,
    sweep_table,
)
from recycling.sequence_planner import LAMBDA_FLOOR
from recycling.state_factory import make_ghz


def run_command(*args, **options):
    out, err = StringIO(), StringIO()
    call_command(*args, stdout=out, stderr=err, **options)
    return out.getvalue(), err.getvalue()


def read_table(text):
    return pd.read_csv(StringIO(text), comment='#')


class HarnessTests(SimpleTestCase):

    def test_parse_plan(self):
        self.assertEqual(parse_plan('l1=0.05,eps=0.1'), (0.05, 0.1))
        self.assertEqual(parse_plan('l1=0.2'), (0.2, 0.05))
        for text in ('eps=0.1', 'l1=x', 'l2=0.3'):
            with self.assertRaises(ConfigError):
                parse_plan(text)

    def test_config_validation(self):
        with self.assertRaises(ConfigError):
            ExperimentConfig.from_options('ghz', 3, lambdas='0.5', plan='l1=0.1')
        with self.assertRaises(ConfigError):
            ExperimentConfig.from_options('ghz', 3)
        with self.assertRaises(ConfigError):
            ExperimentConfig.from_options('ghz', 11, lambdas='0.5', mode='dense')
        with self.assertRaises(ConfigError):
            ExperimentConfig.from_options('w', 3, lambdas='0.5')
        # analytic mode has no qubit ceiling
        config = ExperimentConfig.from_options('ghz', 40, lambdas='0.5,0.2')
        self.assertEqual(list(run_experiment(config)['k']), [1, 2])

    def test_mixed_plan_uses_scaled_schedule(self):
        config = ExperimentConfig.from_options('mixed:p1=0.8,p2=0.1,p3=0.1,alpha=0.25', 3,
                                               plan='l1=0.05,eps=0.05', mode='both')
        table = run_experiment(config)
        self.assertTrue(table['detected'].all())
        self.assertLess(check_agreement(table), 1e-9)

    def test_check_agreement(self):
        table = pd.DataFrame({'witness_value_analytic': [-0.1, 0.2], 'witness_value_dense': [-0.1, 0.2 + 1e-6]})
        with self.assertRaises(OracleMismatchError):
            check_agreement(table)
        self.assertEqual(check_agreement(table.assign(witness_value_dense=np.nan)), 0.0)

    def test_sweep_table(self):
        table = sweep_table(0.05, [0.5, 0.1])
        self.assertEqual(list(table.columns), ['lambda_1', 'max_detections'])
        with self.assertRaises(ConfigError):
            sweep_table(0.05, [0.5, 1.0])
        with self.assertRaises(ConfigError):
            sweep_table(0.05, [1e-170])
        self.assertGreaterEqual(sweep_table(0.05, [LAMBDA_FLOOR])['max_detections'][0], 1)

    def test_tiny_sharpness_detected_densely(self):
        config = ExperimentConfig.from_options('ghz', 3, lambdas='5e-15', mode='both')
        table = run_experiment(config)
        self.assertTrue(table['detected'][0])
        self.assertLess(table['witness_value_dense'][0], 0)

    def test_render_round_trip(self):
        table = pd.DataFrame({'k': [1, 2], 'value': [0.1 + 0.2, -1 / 3], 'dense': [np.nan, 2 / 7]})
        csv = pd.read_csv(StringIO(render_table(table, 'csv', 'h')), comment='#', float_precision='round_trip')
        self.assertEqual(list(csv['value']), list(table['value']))
        self.assertEqual(csv['dense'][1], 2 / 7)
        rows = json.loads(render_table(table, 'json'))
        self.assertEqual([row['value'] for row in rows], list(table['value']))
        self.assertEqual((rows[0]['k'], rows[0]['dense'], rows[1]['dense']), (1, None, 2 / 7))


class RunCommandTests(SimpleTestCase):

    def test_planned_ghz_both_modes(self):
        out, err = run_command('run', state='ghz', num_qubits=4, plan='l1=0.05,eps=0.05', mode='both')
        self.assertTrue(out.startswith('# gmerecycle-run v1 state=ghz N=4'))
        table = read_table(out)
        self.assertEqual(list(table.columns),
                         ['k', 'lambda_k', 'witness_value_analytic', 'witness_value_dense', 'detected', 'margin'])
        self.assertGreater(len(table), 3)
        self.assertTrue(table['detected'].all())
        np.testing.assert_allclose(table['witness_value_analytic'], table['witness_value_dense'], atol=1e-9)
        self.assertIn('✅', err)

    def test_sharp_measurements_lose_detection(self):
        out, _ = run_command('run', state='ghz', num_qubits=3, lambdas='1,1', mode='both')
        table = read_table(out)
        self.assertEqual(list(table['detected']), [True, False])
        self.assertAlmostEqual(table['witness_value_analytic'][1], 0.0)
        self.assertAlmostEqual(table['witness_value_dense'][1], 0.0, places=12)

    def test_cluster_first_observer(self):
        out, _ = run_command('run', state='cluster', num_qubits=5, lambdas='0.3')
        table = read_table(out)
        self.assertAlmostEqual(table['witness_value_analytic'][0], -0.3)
        self.assertTrue(table['witness_value_dense'].isna().all())

    def test_deterministic_output(self):
        args = dict(state='gghz:alpha=0.3', num_qubits=3, lambdas='0.4,0.2,0.6', mode='both', seed=3)
        self.assertEqual(run_command('run', **args)[0], run_command('run', **args)[0])

    def test_json_and_out_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'rows.json'
            out, err = run_command('run', state='ghz', num_qubits=3, lambdas='0.5,0.5',
                                   output_format='json', out=str(path))
            self.assertEqual(out, '')
            rows = json.loads(path.read_text())
        self.assertEqual(len(rows), 2)
        self.assertEqual(rows[0]['k'], 1)
        self.assertIsNone(rows[0]['witness_value_dense'])
        self.assertIn('rows.json', err)

    def test_errors_exit_nonzero(self):
        with self.assertRaises(CommandError):
            run_command('run', state='ghz', num_qubits=3, lambdas='0.5', plan='l1=0.1')
        with self.assertRaises(CommandError):
            run_command('run', state='ghz', num_qubits=12, lambdas='0.5', mode='dense')
        with self.assertRaises(CommandError):
            run_command('run', state='ghz', num_qubits=3, lambdas='1.5')


class SweepCommandTests(SimpleTestCase):

    def test_grid(self):
        out, _ = run_command('sweep', eps=0.05, grid='0.5,0.1,0.01,0.001')
        table = read_table(out)
        self.assertEqual(len(table), 4)
        counts = list(table['max_detections'])
        self.assertEqual(counts, sorted(counts))
        self.assertTrue(all(c >= 1 for c in counts))

    def test_bad_grid(self):
        with self.assertRaises(CommandError):
            run_command('sweep', grid='0.5,1.5')


class PlanCommandTests(SimpleTestCase):

    def test_plan_with_dense_validation(self):
        out, err = run_command('plan', n=6, eps=0.05, validate_qubits=3)
        table = read_table(out)
        self.assertEqual(list(table['k']), [1, 2, 3, 4, 5, 6])
        self.assertTrue(table['detected'].all())
        np.testing.assert_allclose(table['witness_value_analytic'], table['witness_value_dense'], atol=1e-9)
        self.assertTrue((table['lambda_k'] > table['threshold']).all())
        self.assertIn('bracket', err)

    def test_plan_rejects_large_validation(self):
        with self.assertRaises(CommandError):
            run_command('plan', n=2, validate_qubits=12)


class VerifyCommandTests(SimpleTestCase):

    def test_psd(self):
        out, err = run_command('verify', 'psd')
        self.assertTrue(out.startswith(f"# gmerecycle-verify v1 suite=psd seed={conf.get('GME_DEFAULT_SEED')}\n"))
        table = read_table(out)
        self.assertTrue(table['passed'].all())
        self.assertIn('✅', err)

    def test_biseparable_with_seed(self):
        out, _ = run_command('verify', 'biseparable', seed=7, samples=500)
        table = read_table(out)
        self.assertTrue(table['passed'].all())
        self.assertTrue((table['max_residual'] <= 1e-10).all())

    def test_recursion_reports_index(self):
        out, _ = run_command('verify', 'recursion', samples=10)
        self.assertIn('resolved product index = k-1', out)

    def test_unknown_suite(self):
        with self.assertRaises(CommandError):
            run_command('verify', 'bell')

    def test_density_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = save_density(make_ghz(3), Path(tmp) / 'ghz.json')
            _, err = run_command('verify', 'baseline', density=str(path))
            self.assertIn('N=3', err)
            broken = Path(tmp) / 'broken.json'
            broken.write_text('{"num_qubits": 1, "re": [[2, 0], [0, 0]], "im": [[0, 0], [0, 0]]}')
            with self.assertRaises(CommandError):
                run_command('verify', 'baseline', density=str(broken))
