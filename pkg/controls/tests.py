import itertools
import math

import numpy as np
from django.test import SimpleTestCase

from numerics.exceptions import BadIndex

from .channels import (
    TRANSFER,
    ChannelKind,
    ControlChannel,
    Rotation,
    apply_rotation,
    euler_step_count,
    generator,
    numerical_rotation_unitary,
    parse_channel,
    rotation_unitary,
    state_euler_rotation_count,
)


class GeneratorTests(SimpleTestCase):
    def test_phase_generator(self):
        np.testing.assert_array_equal(generator(ControlChannel("Z", 2, 3)), np.diag([0, 1, 0]))

    def test_y_generator(self):
        expected = np.array([[0, -1j, 0], [1j, 0, 0], [0, 0, 0]])
        np.testing.assert_array_equal(generator(ControlChannel("Y", 1, 3)), expected)

    def test_x_generator(self):
        np.testing.assert_array_equal(generator(ControlChannel("X", 1, 2)), [[0, 1], [1, 0]])

    def test_generators_hermitian(self):
        for kind, index in [("Z", 1), ("Z", 4), ("X", 2), ("Y", 3)]:
            g = generator(ControlChannel(kind, index, 4))
            np.testing.assert_array_equal(g, g.conj().T)

    def test_bad_index(self):
        with self.assertRaises(BadIndex):
            ControlChannel("Y", 3, 3)
        with self.assertRaises(BadIndex):
            ControlChannel("Z", 0, 3)
        with self.assertRaises(BadIndex):
            ControlChannel("Z", 1, 3).check(TRANSFER)


class ChannelLabelTests(SimpleTestCase):
    def test_parse_and_label(self):
        channel = parse_channel("y2", 4)
        self.assertEqual(channel.kind, ChannelKind.Y)
        self.assertEqual(channel.index, 2)
        self.assertEqual(channel.label, "Y2")

    def test_rejects_garbage(self):
        with self.assertRaises(BadIndex):
            parse_channel("W1", 3)


class RotationUnitaryTests(SimpleTestCase):
    def test_phase_rotation(self):
        alpha = 0.37
        u = rotation_unitary(Rotation(ControlChannel("Z", 2, 3), alpha))
        np.testing.assert_allclose(u, np.diag([1, np.exp(-1j * alpha), 1]), atol=1e-15)

    def test_y_rotation(self):
        alpha = 0.81
        u = rotation_unitary(Rotation(ControlChannel("Y", 1, 3), alpha))
        expected = np.array([
            [math.cos(alpha), -math.sin(alpha), 0],
            [math.sin(alpha), math.cos(alpha), 0],
            [0, 0, 1],
        ])
        np.testing.assert_allclose(u, expected, atol=1e-15)

    def test_zero_angle_is_identity(self):
        for kind, index in [("Z", 3), ("X", 1), ("Y", 2)]:
            u = rotation_unitary(Rotation(ControlChannel(kind, index, 3), 0.0))
            np.testing.assert_array_equal(u, np.eye(3))

    def test_angle_normalization_keeps_sign(self):
        rotation = Rotation(ControlChannel("Z", 2, 2), -5 * math.pi / 2)
        self.assertAlmostEqual(rotation.angle, -math.pi / 2)

    def test_inverse(self):
        rng = np.random.default_rng(4)
        for kind in ChannelKind:
            channel = ControlChannel(kind, 2, 4)
            rotation = Rotation(channel, rng.uniform(-2 * math.pi, 2 * math.pi))
            product = rotation_unitary(rotation) @ rotation_unitary(rotation.inverse())
            np.testing.assert_allclose(product, np.eye(4), atol=1e-14)

    def test_matches_numerical_exponential(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            dim = int(rng.integers(2, 9))
            kind = str(rng.choice(["X", "Y", "Z"]))
            high = dim if kind == "Z" else dim - 1
            rotation = Rotation(ControlChannel(kind, int(rng.integers(1, high + 1)), dim),
                                rng.uniform(-2 * math.pi, 2 * math.pi))
            np.testing.assert_allclose(
                rotation_unitary(rotation), numerical_rotation_unitary(rotation), atol=1e-12
            )

    def test_apply_rotation_matches_matrix(self):
        rng = np.random.default_rng(6)
        c = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        for kind, index in [("Z", 5), ("X", 3), ("Y", 4)]:
            rotation = Rotation(ControlChannel(kind, index, 5), 1.1)
            np.testing.assert_allclose(apply_rotation(rotation, c), rotation_unitary(rotation) @ c,
                                       atol=1e-14)

    def test_phase_rotations_commute(self):
        for dim in range(2, 9):
            for m, n in itertools.combinations(range(1, dim + 1), 2):
                a = rotation_unitary(Rotation(ControlChannel("Z", m, dim), 0.3 * m))
                b = rotation_unitary(Rotation(ControlChannel("Z", n, dim), -0.7 * n))
                np.testing.assert_array_equal(a @ b, b @ a)


class ComparisonCountTests(SimpleTestCase):
    def test_euler_counts_exceed_hyperspherical(self):
        for dim in range(2, 30):
            self.assertGreater(euler_step_count(dim), dim * (dim + 1) - 1)
        self.assertEqual(state_euler_rotation_count(3), 6)
