import csv
import math
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from controls.channels import ControlChannel
from hypersphere.coords import basis_state
from numerics.exceptions import DimMismatch, NonCommutingStep, NonpositiveAmplitude, ScheduleFormatError
from numerics.linalg import random_unit_vector
from transfer.schedule import Pulse, Schedule, UniformL, to_schedule
from transfer.sequence import sequential_steps
from transfer.synthesis import synthesize_transfer, w_state_sequence

from .propagator import (
    concat_schedules,
    fidelity,
    inverse_schedule,
    propagate,
    propagate_operator,
    scale_schedule,
    step_unitary,
    write_trajectory_csv,
)


def _random_pulse(rng, dim):
    kind = str(rng.choice(["X", "Y", "Z"]))
    high = dim if kind == "Z" else dim - 1
    channel = ControlChannel(kind, int(rng.integers(1, high + 1)), dim)
    return Pulse(channel, float(rng.uniform(-3.0, 3.0)), float(rng.uniform(0.0, 3.0)))


def _random_schedule(rng, dim, steps):
    return Schedule(dim=dim, steps=tuple((_random_pulse(rng, dim),) for _ in range(steps)))


def _w_state_table():
    """Amplitudes after each pulse of the ten-level W-state ladder."""
    table = np.zeros((10, 10))
    for n in range(10):
        table[:n, n] = 1 / math.sqrt(10)
        table[n, n] = math.sqrt((10 - n) / 10)
    return table


class StepUnitaryTests(SimpleTestCase):
    def test_single_y_pulse(self):
        u = step_unitary([Pulse(ControlChannel("Y", 1, 2), 1.0, math.pi / 2)], 2)
        np.testing.assert_allclose(u, [[0, -1], [1, 0]], atol=1e-15)

    def test_concurrent_phase_pulses(self):
        step = [
            Pulse(ControlChannel("Z", 2, 3), 1.0, math.pi / 2),
            Pulse(ControlChannel("Z", 3, 3), 0.5, math.pi / 2),
        ]
        expected = np.diag([1, np.exp(-1j * math.pi / 2), np.exp(-1j * math.pi / 4)])
        np.testing.assert_allclose(step_unitary(step, 3), expected, atol=1e-15)
        np.testing.assert_allclose(step_unitary(step, 3, validate=True), expected, atol=1e-12)

    def test_closed_form_matches_eigendecomposition(self):
        rng = np.random.default_rng(500)
        for _ in range(500):
            dim = int(rng.integers(2, 9))
            step = [_random_pulse(rng, dim)]
            np.testing.assert_allclose(
                step_unitary(step, dim), step_unitary(step, dim, validate=True), atol=1e-12
            )

    def test_non_commuting_step(self):
        step = [
            Pulse(ControlChannel("Y", 1, 3), 1.0, 0.5),
            Pulse(ControlChannel("Z", 3, 3), 1.0, 0.5),
        ]
        with self.assertRaises(NonCommutingStep):
            step_unitary(step, 3)

    def test_dimension_mismatch(self):
        with self.assertRaises(DimMismatch):
            step_unitary([Pulse(ControlChannel("Y", 1, 2), 1.0, 0.5)], 3)


class PropagateTests(SimpleTestCase):
    def test_empty_schedule(self):
        psi0 = [0.6, 0.8j]
        trajectory = propagate(Schedule(dim=2, steps=()), psi0)
        self.assertEqual(len(trajectory.states), 1)
        np.testing.assert_array_equal(trajectory.final, psi0)
        np.testing.assert_array_equal(trajectory.times, [0.0])

    def test_w_state_table(self):
        schedule = to_schedule(sequential_steps(w_state_sequence(10)), UniformL(1.0))
        self.assertEqual(schedule.step_count, 9)
        trajectory = propagate(schedule, basis_state(10, 1))
        np.testing.assert_allclose(trajectory.amplitudes(), _w_state_table(), atol=1e-4)

    def test_worked_example(self):
        target = [0.5, 0.5j, 0.5 + 0.5j]
        seq = synthesize_transfer([1, 0, 0], target)
        trajectory = propagate(to_schedule(sequential_steps(seq), UniformL(1.0)), [1, 0, 0])
        self.assertGreaterEqual(fidelity(trajectory.final, target), 1 - 1e-10)
        self.assertTrue(np.all(np.diff(trajectory.times) >= 0))

    def test_norm_preserved(self):
        rng = np.random.default_rng(21)
        schedule = _random_schedule(rng, 6, 1000)
        trajectory = propagate(schedule, random_unit_vector(6, rng))
        for state in trajectory.states:
            self.assertAlmostEqual(np.linalg.norm(state), 1.0, delta=1e-10)

    def test_dimension_mismatch(self):
        with self.assertRaises(DimMismatch):
            propagate(Schedule(dim=3, steps=()), [1, 0])


class PropagateOperatorTests(SimpleTestCase):
    def test_empty_schedule(self):
        np.testing.assert_array_equal(propagate_operator(Schedule(dim=4, steps=())), np.eye(4))

    def test_schedule_then_inverse(self):
        rng = np.random.default_rng(22)
        schedule = _random_schedule(rng, 5, 40)
        round_trip = concat_schedules(schedule, inverse_schedule(schedule))
        np.testing.assert_allclose(propagate_operator(round_trip), np.eye(5), atol=1e-10)

    def test_composition(self):
        rng = np.random.default_rng(23)
        first, second = _random_schedule(rng, 4, 15), _random_schedule(rng, 4, 15)
        np.testing.assert_allclose(
            propagate_operator(concat_schedules(first, second)),
            propagate_operator(second) @ propagate_operator(first),
            atol=1e-12,
        )

    def test_concat_dimension_mismatch(self):
        with self.assertRaises(DimMismatch):
            concat_schedules(Schedule(dim=2, steps=()), Schedule(dim=3, steps=()))


class PulseAreaTests(SimpleTestCase):
    def test_scaling_keeps_step_unitaries(self):
        rng = np.random.default_rng(24)
        schedule = _random_schedule(rng, 5, 100)
        for factor in (0.3, 2.5):
            scaled = scale_schedule(schedule, factor)
            for step, scaled_step in zip(schedule.steps, scaled.steps):
                np.testing.assert_allclose(step_unitary(step, 5), step_unitary(scaled_step, 5), atol=1e-12)

    def test_nonpositive_factor(self):
        with self.assertRaises(NonpositiveAmplitude):
            scale_schedule(Schedule(dim=2, steps=()), 0.0)


class FidelityTests(SimpleTestCase):
    def test_examples(self):
        v = np.array([0.6, 0.8j])
        self.assertAlmostEqual(fidelity(v, v), 1.0, places=15)
        self.assertEqual(fidelity(basis_state(3, 1), basis_state(3, 2)), 0.0)
        self.assertAlmostEqual(fidelity(v, np.exp(1j * math.pi / 3) * v), 1.0, places=15)

    def test_dimension_mismatch(self):
        with self.assertRaises(DimMismatch):
            fidelity([1, 0], [1, 0, 0])


class TrajectoryCsvTests(SimpleTestCase):
    def test_rows_and_columns(self):
        schedule = to_schedule(sequential_steps(w_state_sequence(3)), UniformL(1.0))
        trajectory = propagate(schedule, basis_state(3, 1))
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "trajectory.csv"
            write_trajectory_csv(path, trajectory)
            with path.open(newline="") as handle:
                rows = list(csv.reader(handle))
        self.assertEqual(rows[0], ["time", "re1", "im1", "re2", "im2", "re3", "im3"])
        self.assertEqual(len(rows), schedule.step_count + 2)
        self.assertEqual(float(rows[1][0]), 0.0)
        self.assertEqual(float(rows[1][1]), 1.0)
        self.assertAlmostEqual(float(rows[-1][0]), schedule.total_duration, places=12)

    def test_unwritable_path(self):
        trajectory = propagate(Schedule(dim=2, steps=()), [1, 0])
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertRaises(ScheduleFormatError):
                write_trajectory_csv(Path(tmp) / "missing" / "trajectory.csv", trajectory)
