import math
from unittest.mock import patch

import numpy as np
from django.test import SimpleTestCase

from numerics.exceptions import DeflationFailure, NotUnitary
from numerics.linalg import operator_distance, random_unitary
from simulator.propagator import propagate_operator
from timeenergy.cost import evaluate_cost
from transfer.schedule import TimeEnergyOptimal, UniformL

from .factorization import (
    StageCoords,
    factorization_to_schedule,
    factorize_unitary,
    reconstruct,
    stage_operator,
    stage_rows,
)


def _random_stage(rng, k):
    return StageCoords(
        k=k,
        theta=rng.uniform(0.0, math.pi / 2, k - 1),
        phi=rng.uniform(-math.pi, math.pi, k - 1),
    )


def _embed(row, n_dim):
    v = np.zeros(n_dim, dtype=np.complex128)
    v[n_dim - row.shape[0]:] = row
    return v


def _degenerate_unitary(n_dim, seed):
    """V·diag(phases)·V† with every eigenphase repeated."""
    v = random_unitary(n_dim, seed)
    phases = np.repeat(np.linspace(-2.5, 2.5, (n_dim + 1) // 2), 2)[:n_dim]
    return (v * np.exp(1j * phases)) @ v.conj().T


class StageRowsTests(SimpleTestCase):
    def test_two_level_rows(self):
        rows = stage_rows(StageCoords(k=2, theta=[math.pi / 4], phi=[0.0]))
        h = 1 / math.sqrt(2)
        np.testing.assert_allclose(rows, [[h, h], [h, -h]], atol=1e-15)

    def test_zero_angles(self):
        np.testing.assert_allclose(stage_rows(StageCoords(k=2, theta=[0.0], phi=[0.0])), [[1, 0], [0, -1]], atol=1e-15)

    def test_orthonormal(self):
        rng = np.random.default_rng(5)
        for k in range(2, 9):
            rows = stage_rows(_random_stage(rng, k))
            np.testing.assert_allclose(rows @ rows.conj().T, np.eye(k), atol=1e-12)


class StageOperatorTests(SimpleTestCase):
    def test_two_level(self):
        sc = StageCoords(k=2, theta=[math.pi / 4], phi=[0.0])
        rows = stage_rows(sc)
        _, w = stage_operator(sc, 2)
        np.testing.assert_allclose(w @ rows[0], [1, 0], atol=1e-15)
        np.testing.assert_allclose(np.abs(w @ rows[1]), [0, 1], atol=1e-15)

    def test_leaves_leading_levels_alone(self):
        rng = np.random.default_rng(7)
        _, w = stage_operator(_random_stage(rng, 3), 5)
        np.testing.assert_allclose(w[:2, :2], np.eye(2), atol=1e-12)
        np.testing.assert_allclose(w[:2, 2:], 0, atol=1e-12)
        np.testing.assert_allclose(w[2:, :2], 0, atol=1e-12)

    def test_rotation_layout(self):
        rng = np.random.default_rng(8)
        rotations, _ = stage_operator(_random_stage(rng, 4), 6)
        self.assertEqual([r.channel.label for r in rotations], ["Z4", "Z5", "Z6", "Y5", "Y4", "Y3"])

    def test_rows_map_to_basis_states(self):
        rng = np.random.default_rng(9)
        for _ in range(200):
            k = int(rng.integers(2, 9))
            n_dim = int(rng.integers(k, 9))
            offset = n_dim - k
            sc = _random_stage(rng, k)
            rows = stage_rows(sc)
            _, w = stage_operator(sc, n_dim)
            np.testing.assert_array_equal(w[:offset, :offset], np.eye(offset))
            image = w @ _embed(rows[0], n_dim)
            self.assertAlmostEqual(image[offset], 1.0, delta=1e-10)
            for j in range(2, k + 1):
                image = w @ _embed(rows[j - 1], n_dim)
                self.assertAlmostEqual(abs(image[offset + j - 1]), 1.0, delta=1e-10)


class FactorizeUnitaryTests(SimpleTestCase):
    def test_identity(self):
        f = factorize_unitary(np.eye(4))
        np.testing.assert_allclose(f.phases, np.zeros(4), atol=1e-14)
        for sc in f.stages:
            np.testing.assert_allclose(sc.theta, 0, atol=1e-14)
            np.testing.assert_allclose(sc.phi, 0, atol=1e-14)
        np.testing.assert_allclose(reconstruct(f), np.eye(4), atol=1e-12)

    def test_diagonal_phase_gate(self):
        u = np.diag([1, 1j])
        f = factorize_unitary(u)
        np.testing.assert_allclose(f.phases, [0, math.pi / 2], atol=1e-14)
        np.testing.assert_allclose(f.stages[0].theta, [0.0], atol=1e-14)
        np.testing.assert_allclose(f.stages[0].phi, [0.0], atol=1e-14)
        schedule = factorization_to_schedule(f, UniformL(1.0), prune=True)
        self.assertEqual(schedule.step_count, 1)
        self.assertTrue(all(p.channel.is_phase for p in schedule.steps[0]))
        np.testing.assert_allclose(propagate_operator(schedule), u, atol=1e-12)

    def test_sign_matrix(self):
        u = np.diag([1.0, -1.0])
        np.testing.assert_allclose(reconstruct(factorize_unitary(u)), u, atol=1e-12)

    def test_random_examples(self):
        for n_dim, seed in ((5, 13), (6, 21)):
            u = random_unitary(n_dim, seed)
            self.assertLessEqual(operator_distance(reconstruct(factorize_unitary(u)), u), 1e-8)

    def test_stage_layout(self):
        f = factorize_unitary(random_unitary(5, 3))
        self.assertEqual([sc.k for sc in f.stages], [5, 4, 3, 2])
        for sc in f.stages:
            self.assertTrue(np.all((sc.theta >= 0) & (sc.theta <= math.pi / 2)))
            self.assertTrue(np.all((sc.phi > -math.pi) & (sc.phi <= math.pi)))
            rows = stage_rows(sc)
            np.testing.assert_allclose(rows @ rows.conj().T, np.eye(sc.k), atol=1e-12)

    def test_reconstruction_battery(self):
        for n_dim in range(2, 9):
            for seed in range(50):
                u = random_unitary(n_dim, 1000 * n_dim + seed)
                f = factorize_unitary(u)
                self.assertLessEqual(operator_distance(reconstruct(f), u), 1e-8)
                schedule = factorization_to_schedule(f, UniformL(1.0))
                self.assertEqual(schedule.step_count, n_dim * (n_dim + 1) - 1)
                self.assertLessEqual(operator_distance(propagate_operator(schedule), u), 1e-8)

    def test_degenerate_spectra(self):
        cases = [_degenerate_unitary(n_dim, seed) for n_dim in range(2, 9) for seed in range(5)]
        cases.append(np.kron(random_unitary(2, 40), np.eye(2)))
        cases.append(np.kron(np.eye(3), random_unitary(2, 41)))
        for u in cases:
            f = factorize_unitary(u)
            self.assertLessEqual(operator_distance(reconstruct(f), u), 1e-8)
            schedule = factorization_to_schedule(f, UniformL(1.0))
            self.assertLessEqual(operator_distance(propagate_operator(schedule), reconstruct(f)), 1e-10)

    def test_not_unitary(self):
        with self.assertRaises(NotUnitary):
            factorize_unitary([[1, 1], [0, 1]])

    @patch("unitary.factorization.stage_operator")
    def test_deflation_failure(self, mock_stage):
        mock_stage.return_value = ([], np.eye(3))
        with self.assertRaises(DeflationFailure):
            factorize_unitary(random_unitary(3, 4))


class FactorizationScheduleTests(SimpleTestCase):
    def test_step_counts(self):
        self.assertEqual(factorization_to_schedule(factorize_unitary(random_unitary(2, 1)), UniformL(1.0)).step_count, 5)
        u = random_unitary(4, 2)
        schedule = factorization_to_schedule(factorize_unitary(u), TimeEnergyOptimal(2.0))
        self.assertEqual(schedule.step_count, 19)
        self.assertLessEqual(operator_distance(propagate_operator(schedule), u), 1e-8)

    def test_identity_with_pruning(self):
        schedule = factorization_to_schedule(factorize_unitary(np.eye(3)), UniformL(1.0), prune=True)
        self.assertEqual(schedule.step_count, 0)

    def test_nonnegative_time(self):
        u = random_unitary(3, 5)
        schedule = factorization_to_schedule(factorize_unitary(u), UniformL(1.0), nonnegative_time=True)
        self.assertTrue(all(p.amplitude >= 0 for step in schedule.steps for p in step))
        self.assertLessEqual(operator_distance(propagate_operator(schedule), u), 1e-8)

    def test_time_bound(self):
        for seed in range(10):
            u = random_unitary(5, seed)
            schedule = factorization_to_schedule(factorize_unitary(u), TimeEnergyOptimal(1.0))
            self.assertEqual(schedule.meta["kind"], "unitary")
            report = evaluate_cost(schedule, 1.0)
            self.assertLessEqual(report.t_f, report.t_f_bound)
            self.assertLessEqual(report.energy, report.E_bound)
