import math

import numpy as np
from django.test import SimpleTestCase

from numerics.exceptions import DimensionTooSmall
from numerics.linalg import random_unit_vector

from .coords import (
    HypersphericalCoords,
    basis_state,
    from_hyperspherical,
    to_hyperspherical,
    uniform_superposition,
)

W_STATE_THETA = (1.2490, 1.2310, 1.2094, 1.1832, 1.1503, 1.1071, 1.0472, 0.9553, 0.7854)


def _assert_in_range(test, h):
    test.assertTrue(np.all(h.theta >= 0.0))
    test.assertTrue(np.all(h.theta <= math.pi / 2))
    test.assertTrue(np.all(h.phi > -math.pi))
    test.assertTrue(np.all(h.phi <= math.pi))


class ToHypersphericalTests(SimpleTestCase):
    def test_basis_state(self):
        h = to_hyperspherical([1, 0, 0])
        np.testing.assert_array_equal(h.theta, [0.0, 0.0])
        np.testing.assert_array_equal(h.phi, [0.0, 0.0])

    def test_worked_example(self):
        h = to_hyperspherical([0.5, 0.5j, 0.5 + 0.5j])
        np.testing.assert_allclose(h.theta, [math.pi / 3, 0.955317], atol=1e-6)
        np.testing.assert_allclose(h.phi, [math.pi / 2, math.pi / 4], atol=1e-12)

    def test_w_state_angles(self):
        h = to_hyperspherical(uniform_superposition(10))
        np.testing.assert_allclose(h.theta, W_STATE_THETA, atol=1e-4)
        np.testing.assert_array_equal(h.phi, np.zeros(9))

    def test_dimension_too_small(self):
        with self.assertRaises(DimensionTooSmall):
            to_hyperspherical([1.0])

    def test_global_phase_removed(self):
        c = np.exp(0.7j) * np.array([0.6, 0.8j])
        np.testing.assert_allclose(from_hyperspherical(to_hyperspherical(c)), [0.6, 0.8j], atol=1e-12)

    def test_round_trip_random(self):
        rng = np.random.default_rng(0)
        for n_dim in range(2, 17):
            for _ in range(1000):
                c = random_unit_vector(n_dim, rng)
                h = to_hyperspherical(c)
                _assert_in_range(self, h)
                expected = np.exp(-1j * np.angle(c[0])) * c
                self.assertLessEqual(np.max(np.abs(from_hyperspherical(h) - expected)), 1e-10)

    def test_round_trip_with_embedded_zeros(self):
        rng = np.random.default_rng(1)
        for n_dim in range(2, 17):
            for _ in range(50):
                c = random_unit_vector(n_dim, rng)
                c[rng.random(n_dim) < 0.4] = 0.0
                if not np.any(c):
                    c[-1] = 1.0
                c /= np.linalg.norm(c)
                h = to_hyperspherical(c)
                _assert_in_range(self, h)
                expected = np.exp(-1j * np.angle(c[0])) * c
                self.assertLessEqual(np.max(np.abs(from_hyperspherical(h) - expected)), 1e-10)

    def test_trailing_zeros_give_zero_angles(self):
        h = to_hyperspherical([0.0, 1j, 0.0, 0.0])
        np.testing.assert_allclose(h.theta, [math.pi / 2, 0.0, 0.0], atol=1e-15)
        np.testing.assert_allclose(h.phi, [math.pi / 2, 0.0, 0.0], atol=1e-15)


class FromHypersphericalTests(SimpleTestCase):
    def test_all_sines(self):
        c = from_hyperspherical(HypersphericalCoords([math.pi / 2, math.pi / 2], [0.0, 0.0]))
        np.testing.assert_allclose(c, [0, 0, 1], atol=1e-15)

    def test_two_level(self):
        c = from_hyperspherical(HypersphericalCoords([math.pi / 4], [math.pi / 2]))
        np.testing.assert_allclose(c, [1 / math.sqrt(2), 1j / math.sqrt(2)], atol=1e-15)

    def test_worked_example_round_trip(self):
        h = to_hyperspherical([0.5, 0.5j, 0.5 + 0.5j])
        np.testing.assert_allclose(from_hyperspherical(h), [0.5, 0.5j, 0.5 + 0.5j], atol=1e-12)

    def test_reverse_round_trip(self):
        rng = np.random.default_rng(2)
        for n_dim in range(2, 17):
            for _ in range(100):
                h = HypersphericalCoords(
                    rng.uniform(0.01, math.pi / 2 - 0.01, n_dim - 1),
                    rng.uniform(-math.pi + 0.01, math.pi, n_dim - 1),
                )
                c = from_hyperspherical(h)
                self.assertAlmostEqual(np.linalg.norm(c), 1.0, delta=1e-12)
                self.assertGreaterEqual(c[0].real, 0.0)
                back = to_hyperspherical(c)
                np.testing.assert_allclose(back.theta, h.theta, atol=1e-10)
                np.testing.assert_allclose(back.phi, h.phi, atol=1e-10)

    def test_helpers(self):
        np.testing.assert_array_equal(basis_state(3, 2), [0, 1, 0])
        self.assertAlmostEqual(np.linalg.norm(uniform_superposition(7)), 1.0, places=14)
