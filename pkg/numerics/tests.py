import math
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase, override_settings

from .exceptions import NotUnit, NotUnitary, ScheduleFormatError, ShapeMismatch
from .fileio import read_matrix, read_state, write_matrix, write_state
from .linalg import (
    as_unit_vector,
    eig_unitary,
    operator_distance,
    random_unitary,
    spectral_sum,
    unitarity_defect,
    wrap_phase,
)


class EigUnitaryTests(SimpleTestCase):
    def test_identity(self):
        phases, vectors = eig_unitary(np.eye(3))
        np.testing.assert_allclose(phases, np.zeros(3), atol=1e-14)
        np.testing.assert_allclose(vectors.conj().T @ vectors, np.eye(3), atol=1e-12)

    def test_diagonal_sign_matrix(self):
        phases, vectors = eig_unitary(np.diag([1.0, -1.0]))
        np.testing.assert_allclose(phases, [0.0, math.pi], atol=1e-14)
        np.testing.assert_allclose(np.abs(vectors), np.eye(2), atol=1e-14)

    def test_random_reconstruction(self):
        u = random_unitary(4, 7)
        phases, vectors = eig_unitary(u)
        self.assertLessEqual(operator_distance(spectral_sum(phases, vectors), u), 1e-10)
        self.assertTrue(np.all(np.diff(phases) >= 0))
        self.assertTrue(np.all(phases > -math.pi))
        self.assertTrue(np.all(phases <= math.pi))

    def test_vectors_orthonormal_and_phase_fixed(self):
        for seed in range(10):
            u = random_unitary(5, seed)
            _, vectors = eig_unitary(u)
            np.testing.assert_allclose(vectors.conj().T @ vectors, np.eye(5), atol=1e-10)
            for j in range(5):
                lead = vectors[np.flatnonzero(np.abs(vectors[:, j]) > 1e-12)[0], j]
                self.assertAlmostEqual(lead.imag, 0.0, places=12)
                self.assertGreater(lead.real, 0.0)

    def test_degenerate_spectrum(self):
        v = random_unitary(6, 3)
        u = v @ np.diag(np.exp(1j * np.array([0.3, 0.3, 0.3, -1.2, -1.2, 2.0]))) @ v.conj().T
        phases, vectors = eig_unitary(u)
        np.testing.assert_allclose(vectors.conj().T @ vectors, np.eye(6), atol=1e-10)
        self.assertLessEqual(operator_distance(spectral_sum(phases, vectors), u), 1e-10)

    def test_rejects_non_unitary(self):
        with self.assertRaises(NotUnitary):
            eig_unitary(np.array([[1.0, 1.0], [0.0, 1.0]]))

    @override_settings(PULSE_UNITARY_TOL=1e-3)
    def test_unitary_tolerance_comes_from_settings(self):
        u = random_unitary(3, 1) * (1 + 1e-5)
        phases, _ = eig_unitary(u)
        self.assertEqual(len(phases), 3)


class OperatorDistanceTests(SimpleTestCase):
    def test_identical(self):
        self.assertEqual(operator_distance(np.eye(2), np.eye(2)), 0.0)

    def test_eigenvalue_gap(self):
        self.assertAlmostEqual(operator_distance(np.eye(2), np.diag([1.0, -1.0])), 2.0)

    def test_small_perturbation(self):
        u = random_unitary(4, 3)
        self.assertAlmostEqual(operator_distance(u, u + 1e-6 * np.eye(4)), 1e-6, delta=1e-12)

    def test_shape_mismatch(self):
        with self.assertRaises(ShapeMismatch):
            operator_distance(np.eye(2), np.eye(3))


class RandomUnitaryTests(SimpleTestCase):
    def test_scalar_case(self):
        u = random_unitary(1, 42)
        self.assertEqual(u.shape, (1, 1))
        self.assertAlmostEqual(abs(u[0, 0]), 1.0, places=14)

    def test_deterministic(self):
        np.testing.assert_array_equal(random_unitary(4, 7), random_unitary(4, 7))

    def test_unitarity(self):
        self.assertLessEqual(unitarity_defect(random_unitary(6, 11)), 1e-12)


class HelperTests(SimpleTestCase):
    def test_wrap_phase_half_open(self):
        self.assertEqual(wrap_phase(-math.pi), math.pi)
        self.assertEqual(wrap_phase(math.pi), math.pi)
        self.assertAlmostEqual(wrap_phase(3 * math.pi / 2), -math.pi / 2)

    def test_unit_vector_check(self):
        with self.assertRaises(NotUnit):
            as_unit_vector([1.0, 1.0])
        as_unit_vector([0.6, 0.8j])


class FileFormatTests(SimpleTestCase):
    def test_matrix_file_is_lossless(self):
        u = random_unitary(3, 5)
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "u.mat"
            write_matrix(path, u)
            self.assertEqual(path.read_text().splitlines()[0], "3 3")
            np.testing.assert_array_equal(read_matrix(path), u)

    def test_state_file(self):
        c = np.array([0.5, 0.5j, 0.5 + 0.5j])
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "c.state"
            write_state(path, c)
            np.testing.assert_array_equal(read_state(path), c)

    def test_malformed_state(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "bad.state"
            path.write_text("3\n1 0\n0 0\n")
            with self.assertRaises(ScheduleFormatError):
                read_state(path)

    def test_unwritable_path(self):
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertRaises(ScheduleFormatError):
                write_state(Path(tmp) / "missing" / "c.state", [1, 0])
            with self.assertRaises(ScheduleFormatError):
                write_matrix(Path(tmp) / "missing" / "u.mat", np.eye(2))
