import math

import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose

from recycling.dense_sim import expectation
from recycling.exceptions import CapacityError, DomainError
from recycling.pauli_algebra import PauliString, apply_pauli, commutes
from recycling.state_factory import (
    CLUSTER,
    GHZ,
    StateFamily,
    cluster_generator_candidates,
    cluster_vector,
    ising_gate,
    make_cluster,
    make_generalized_ghz,
    make_ghz,
    make_mixed_ghz,
    resolve_cluster_generator_form,
    stabilizer_generators,
)
from recycling.witness_factory import build_cluster_witness, build_ghz_witness


class GhzFamilyTests(SimpleTestCase):

    def test_ghz_corners(self):
        matrix = make_ghz(3).matrix
        expected = np.zeros((8, 8))
        expected[np.ix_([0, 7], [0, 7])] = 0.5
        assert_allclose(matrix, expected)

    def test_ghz_stabilizer_and_witness(self):
        for n in range(3, 9):
            rho = make_ghz(n)
            self.assertAlmostEqual(expectation(rho, PauliString('X' * n)), 1.0, places=12)
            self.assertAlmostEqual(expectation(rho, build_ghz_witness(n)), -1.0, places=12)

    def test_out_of_range(self):
        with self.assertRaises(CapacityError):
            make_ghz(2)
        with self.assertRaises(CapacityError):
            make_ghz(11)

    def test_generalized(self):
        assert_allclose(make_generalized_ghz(4, 0.5).matrix, make_ghz(4).matrix, atol=1e-15)
        alpha = 0.3
        rho = make_generalized_ghz(4, alpha)
        self.assertAlmostEqual(expectation(rho, PauliString('XXXX')), 2 * math.sqrt(alpha * (1 - alpha)), places=12)
        for m in range(1, 4):
            self.assertAlmostEqual(expectation(rho, PauliString.from_sites(4, {m - 1: 'Z', m: 'Z'})), 1.0, places=12)
        with self.assertRaises(DomainError):
            make_generalized_ghz(3, 1.0)

    def test_mixed(self):
        p1, p2, p3, alpha = 0.8, 0.1, 0.1, 0.4
        rho = make_mixed_ghz(3, p1, p2, p3, alpha)
        rho.validate_density()
        self.assertAlmostEqual(expectation(rho, PauliString('XXX')), 2 * p1 * math.sqrt(alpha * (1 - alpha)), places=12)
        self.assertAlmostEqual(expectation(rho, PauliString('IZZ')), 1.0, places=12)
        assert_allclose(make_mixed_ghz(3, 1, 0, 0, alpha).matrix, make_generalized_ghz(3, alpha).matrix, atol=1e-15)
        with self.assertRaises(DomainError):
            make_mixed_ghz(3, 0.5, 0.1, 0.1, alpha)
        with self.assertRaises(DomainError):
            make_mixed_ghz(3, 0.0, 0.5, 0.5, alpha)


class ClusterTests(SimpleTestCase):

    def test_ising_gate_is_controlled_z(self):
        assert_allclose(ising_gate(), np.diag([1, 1, 1, -1]), atol=1e-12)

    def test_first_generator(self):
        rho = make_cluster(3)
        self.assertAlmostEqual(expectation(rho, PauliString('XZI')), 1.0, places=12)

    def test_generators(self):
        self.assertEqual([g.letters for g in stabilizer_generators(CLUSTER, 3)], ['XZI', 'ZXZ', 'IZX'])
        self.assertEqual(stabilizer_generators(CLUSTER, 4)[-1].letters, 'IIZX')
        self.assertEqual([g.letters for g in stabilizer_generators(GHZ, 3)], ['XXX', 'ZZI', 'IZZ'])

    def test_generators_stabilize_and_commute(self):
        for n in range(3, 9):
            vector = cluster_vector(n)
            generators = stabilizer_generators(CLUSTER, n)
            for g in generators:
                assert_allclose(apply_pauli(g, vector), vector, atol=1e-12)
            for a in generators:
                for b in generators:
                    self.assertTrue(commutes(a, b))

    def test_printed_form_rejected(self):
        self.assertEqual(cluster_generator_candidates(4)['printed'][1].letters, 'ZXXI')
        for n in range(3, 7):
            resolution = resolve_cluster_generator_form(n)
            self.assertEqual(resolution.form, 'standard')
            self.assertEqual(resolution.failures['standard'], [])
            self.assertTrue(resolution.failures['printed'])
            self.assertIn('printed: fails', resolution.summary)

    def test_cluster_witness(self):
        self.assertAlmostEqual(expectation(make_cluster(4), build_cluster_witness(4)), -1.0, places=12)

    def test_unknown_family(self):
        with self.assertRaises(DomainError):
            stabilizer_generators('w', 3)


class StateFamilyTests(SimpleTestCase):

    def test_parse(self):
        state = StateFamily.parse('mixed:p1=0.8,p2=0.1,p3=0.1,alpha=0.4', 3)
        self.assertEqual((state.p1, state.p2, state.p3, state.alpha), (0.8, 0.1, 0.1, 0.4))
        self.assertEqual(StateFamily.parse('gghz:alpha=0.3', 5).alpha, 0.3)
        self.assertEqual(StateFamily.parse('cluster', 4).witness_family, CLUSTER)
        self.assertEqual(StateFamily.parse('gghz:alpha=0.3', 5).witness_family, GHZ)

    def test_parse_errors(self):
        for text in ('w', 'gghz', 'ghz:alpha=0.2', 'gghz:alpha=x', 'mixed:p1=0.5'):
            with self.assertRaises(DomainError):
                StateFamily.parse(text, 3)
        with self.assertRaises(DomainError):
            StateFamily('ghz', 2)

    def test_label_round_trip(self):
        state = StateFamily.parse('mixed:p1=0.8,p2=0.1,p3=0.1,alpha=0.4', 3)
        self.assertEqual(StateFamily.parse(state.label, 3), state)

    def test_symbolic_expectations_match_dense(self):
        rng = np.random.default_rng(9)
        states = [
            StateFamily(GHZ, 4),
            StateFamily('gghz', 4, alpha=0.3),
            StateFamily('mixed', 4, alpha=0.25, p1=0.6, p2=0.3, p3=0.1),
            StateFamily(CLUSTER, 4),
        ]
        for state in states:
            rho = state.density()
            for _ in range(60):
                pauli = PauliString(''.join(rng.choice(list('IXYZ'), size=4)))
                self.assertAlmostEqual(state.pauli_expectation(pauli), expectation(rho, pauli), places=12)

    def test_symbolic_cluster_stabilizers_beyond_dense_limit(self):
        state = StateFamily(CLUSTER, 14)
        for g in stabilizer_generators(CLUSTER, 14):
            self.assertEqual(state.pauli_expectation(g), 1.0)
        self.assertEqual(state.pauli_expectation(PauliString('Z' + 'I' * 13)), 0.0)
