import math

import numpy as np
from django.test import SimpleTestCase

from recycling.analytic_engine import (
    CorrelatorDecay,
    DetectionReport,
    cluster_witness_value,
    detection_condition_rhs,
    detection_scale,
    full_sequence_report,
    ghz_witness_value,
    mixed_ghz_witness_value,
    resolve_recursion_index,
    symbolic_witness_value,
    witness_value_for,
)
from recycling.dense_sim import expectation, luders_update
from recycling.exceptions import DomainError
from recycling.harness import dense_witness_values
from recycling.pauli_algebra import PauliString
from recycling.state_factory import CLUSTER, GHZ, MIXED_GHZ, StateFamily
from recycling.witness_factory import witness_for


class CorrelatorDecayTests(SimpleTestCase):

    def test_first_observer_is_undisturbed(self):
        decay = CorrelatorDecay(())
        self.assertEqual((decay.z_factor(1), decay.x_factor(1), decay.y_factor(1)), (1.0, 1.0, 1.0))
        self.assertEqual(decay.one_minus_z(1), 0.0)

    def test_factors(self):
        decay = CorrelatorDecay((0.6, 1.0))
        self.assertAlmostEqual(decay.z_factor(2), 0.9)
        self.assertAlmostEqual(decay.z_factor(3), 0.45)
        self.assertEqual(decay.x_factor(3), 0.25)
        self.assertAlmostEqual(decay.y_factor(2), 0.4)
        self.assertEqual(decay.y_factor(3), 0.0)

    def test_monotone_and_bounded(self):
        rng = np.random.default_rng(1)
        decay = CorrelatorDecay(rng.uniform(size=8))
        for name in ('z_factor', 'x_factor'):
            values = [getattr(decay, name)(k) for k in range(1, 10)]
            self.assertTrue(all(0 < v <= 1 for v in values))
            self.assertTrue(all(b <= a for a, b in zip(values, values[1:])))

    def test_tiny_sharpness_keeps_precision(self):
        decay = CorrelatorDecay((1e-9,))
        self.assertAlmostEqual(decay.one_minus_z(2) / 2.5e-19, 1.0, places=9)

    def test_too_few_values(self):
        with self.assertRaises(DomainError):
            CorrelatorDecay((0.5,)).z_factor(3)
        with self.assertRaises(DomainError):
            CorrelatorDecay((1.5,))


class ClosedFormTests(SimpleTestCase):

    def test_ghz_values(self):
        self.assertAlmostEqual(ghz_witness_value(1, (0.37,)), -0.37)
        self.assertEqual(ghz_witness_value(2, (1.0, 1.0)), 0.0)
        self.assertAlmostEqual(ghz_witness_value(2, (0.6, 1.0)), -0.4)

    def test_cluster_values(self):
        self.assertAlmostEqual(cluster_witness_value(1, (0.2,)), -0.2)
        self.assertEqual(cluster_witness_value(3, (1.0, 1.0, 1.0)), 0.5)
        rng = np.random.default_rng(4)
        for _ in range(200):
            lambdas = tuple(rng.uniform(size=5))
            for k in range(1, 6):
                self.assertEqual(cluster_witness_value(k, lambdas), ghz_witness_value(k, lambdas))

    def test_mixed_values(self):
        value = mixed_ghz_witness_value(2, (0.5, 1.0), 0.8, 0.25)
        self.assertAlmostEqual(value, -0.2795, delta=5e-4)
        self.assertAlmostEqual(mixed_ghz_witness_value(1, (0.3,), 0.8, 0.25), -2 * 0.8 * math.sqrt(0.1875) * 0.3)
        self.assertEqual(mixed_ghz_witness_value(3, (0.2, 0.3, 0.9), 1.0, 0.5), ghz_witness_value(3, (0.2, 0.3, 0.9)))
        with self.assertRaises(DomainError):
            mixed_ghz_witness_value(1, (0.3,), 0.8, 1.0)

    def test_domain_errors(self):
        with self.assertRaises(DomainError):
            ghz_witness_value(1, (1.2,))
        with self.assertRaises(DomainError):
            ghz_witness_value(3, (0.1, 0.2))
        with self.assertRaises(DomainError):
            ghz_witness_value(0, (0.1,))

    def test_monotone_in_current_sharpness(self):
        prefix = (0.3, 0.5)
        values = [ghz_witness_value(3, prefix + (s,)) for s in np.linspace(0, 1, 11)]
        self.assertTrue(all(b < a for a, b in zip(values, values[1:])))


class DetectionConditionTests(SimpleTestCase):

    def test_thresholds(self):
        self.assertEqual(detection_condition_rhs(1, ()), 0.0)
        self.assertAlmostEqual(detection_condition_rhs(2, (0.6,)), 1 - 0.8)
        self.assertAlmostEqual(detection_condition_rhs(2, (0.6,), scale=2.0), 0.4)
        # 임계값이 1 을 넘으면 어떤 λ_k 로도 검출 불가
        self.assertGreater(detection_condition_rhs(4, (1.0, 1.0, 1.0)), 1)

    def test_scale(self):
        self.assertEqual(detection_scale(1.0, 0.5), 1.0)
        self.assertAlmostEqual(detection_scale(0.5, 0.5), 2.0)
        with self.assertRaises(DomainError):
            detection_condition_rhs(2, (0.5,), scale=0.5)

    def test_sign_equivalence(self):
        rng = np.random.default_rng(8)
        for _ in range(500):
            lambdas = tuple(rng.uniform(size=4) ** 3)
            p1, alpha = rng.uniform(0.2, 1.0), rng.uniform(0.05, 0.95)
            scale = detection_scale(p1, alpha)
            for k in range(1, 5):
                detected = mixed_ghz_witness_value(k, lambdas, p1, alpha) < 0
                self.assertEqual(detected, lambdas[k - 1] > detection_condition_rhs(k, lambdas[:k - 1], scale))


class SequenceReportTests(SimpleTestCase):

    def test_reports(self):
        ghz = StateFamily(GHZ, 5)
        self.assertEqual([(r.observer_index, r.witness_value, r.detected) for r in full_sequence_report(ghz, (1, 1))],
                         [(1, -1.0, True), (2, 0.0, False)])
        [single] = full_sequence_report(ghz, (0.1,))
        self.assertTrue(single.detected)
        self.assertAlmostEqual(single.margin, 0.1)
        mixed = StateFamily(MIXED_GHZ, 5, alpha=0.5, p1=1.0, p2=0.0, p3=0.0)
        self.assertEqual(full_sequence_report(mixed, (0.2, 0.4)), full_sequence_report(ghz, (0.2, 0.4)))

    def test_report_row(self):
        row = DetectionReport(2, -0.25, 0.5).as_row()
        self.assertEqual(row, {'k': 2, 'lambda_k': 0.5, 'witness_value': -0.25, 'detected': True, 'margin': 0.25})


class OracleAgreementTests(SimpleTestCase):

    def test_analytic_matches_dense(self):
        rng = np.random.default_rng(21)
        for _ in range(10):
            lambdas = tuple(rng.uniform(size=5))
            for family in (GHZ, CLUSTER):
                for n in (3, 4, 5):
                    state = StateFamily(family, n)
                    dense = dense_witness_values(state, lambdas)
                    analytic = [witness_value_for(state, k, lambdas) for k in range(1, 6)]
                    np.testing.assert_allclose(dense, analytic, atol=1e-9)

    def test_mixed_matches_dense(self):
        lambdas = (0.5, 1.0, 0.3)
        for p1 in (0.5, 0.8, 1.0):
            for alpha in (0.1, 0.25, 0.5):
                rest = (1 - p1) / 2
                state = StateFamily(MIXED_GHZ, 3, alpha=alpha, p1=p1, p2=rest, p3=rest)
                np.testing.assert_allclose(
                    dense_witness_values(state, lambdas),
                    [witness_value_for(state, k, lambdas) for k in range(1, 4)],
                    atol=1e-9,
                )

    def test_symbolic_beyond_dense_limit(self):
        lambdas = (0.4, 0.7, 0.2)
        for family in (GHZ, CLUSTER):
            state = StateFamily(family, 12)
            value = symbolic_witness_value(state, witness_for(family, 12, lambdas[2]), lambdas[:2])
            self.assertAlmostEqual(value, witness_value_for(state, 3, lambdas), places=12)

    def test_symbolic_matches_dense(self):
        lambdas = (0.9, 0.35)
        state = StateFamily('gghz', 4, alpha=0.3)
        value = symbolic_witness_value(state, witness_for(GHZ, 4, lambdas[1]), lambdas[:1])
        self.assertAlmostEqual(value, dense_witness_values(state, lambdas)[1], places=12)

    def test_recursion_index_is_k_minus_one(self):
        lambdas = (0.8, 0.5, 0.95, 0.3)
        rho = StateFamily(GHZ, 4).density()
        probe = PauliString('IIZZ')
        observed = []
        for value in lambdas:
            observed.append(expectation(rho, probe))
            rho = luders_update(rho, value, 3)
        resolution = resolve_recursion_index(lambdas, observed)
        self.assertEqual(resolution.index, 'k-1')
        self.assertLess(resolution.residuals['k-1'], 1e-12)
        self.assertGreater(resolution.residuals['k'], 1e-3)
        self.assertIn('k-1', resolution.summary)
