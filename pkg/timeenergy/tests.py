import math

import numpy as np
from django.test import SimpleTestCase

from controls.channels import ControlChannel, Rotation
from hypersphere.coords import basis_state, uniform_superposition
from numerics.exceptions import NonpositiveAmplitude, NonpositiveLambda
from numerics.linalg import random_unit_vector
from transfer.schedule import Pulse, Schedule, TimeEnergyOptimal, UniformL, to_schedule
from transfer.sequence import Family, RotationSequence
from transfer.synthesis import apply_x_phase_correction, compress_concurrent, synthesize_transfer

from .cost import (
    concurrent_cost,
    concurrent_time,
    concurrent_time_bound,
    evaluate_cost,
    optimal_amplitude,
    product_bound,
    scan_amplitudes,
    sequential_cost,
    sequential_time,
    sequential_time_bound,
    time_energy_product,
    unitary_angle_bound,
    unitary_time_bound,
)

WORKED_TARGET = [0.5, 0.5j, 0.5 + 0.5j]


def _random_sequences(count, seed, family=Family.YZ):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n_dim = int(rng.integers(2, 9))
        seq = synthesize_transfer(random_unit_vector(n_dim, rng), random_unit_vector(n_dim, rng), family=family)
        if family == Family.XZ:
            seq = apply_x_phase_correction(seq)
        yield seq


def _phase_only_sequence(head, tail):
    """N=3 sequence with the given phase blocks and zero population angles."""
    def z(n, angle):
        return Rotation(ControlChannel("Z", n, 3), angle)

    def y(n):
        return Rotation(ControlChannel("Y", n, 3), 0.0)

    rotations = [z(3, head[1]), z(2, head[0]), y(2), y(1), y(2), z(2, tail[0]), z(3, tail[1])]
    return RotationSequence(dim=3, rotations=rotations)


class OptimalAmplitudeTests(SimpleTestCase):
    def test_closed_form(self):
        self.assertEqual(optimal_amplitude(4), 2.0)
        self.assertEqual(optimal_amplitude(1), 1.0)
        self.assertEqual(optimal_amplitude(0.25), 0.5)

    def test_nonpositive_lambda(self):
        for lam in (0.0, -1.0):
            with self.assertRaises(NonpositiveLambda):
                optimal_amplitude(lam)


class EvaluateCostTests(SimpleTestCase):
    def test_single_pulse(self):
        schedule = Schedule(dim=2, steps=((Pulse(ControlChannel("Y", 1, 2), 2.0, math.pi / 4),),))
        report = evaluate_cost(schedule, 4.0)
        self.assertAlmostEqual(report.t_f, math.pi / 4, places=14)
        self.assertAlmostEqual(report.energy, math.pi, places=14)
        self.assertAlmostEqual(report.J, 2 * math.pi, places=14)
        self.assertEqual(report.product, report.t_f * report.energy)

    def test_empty_schedule(self):
        report = evaluate_cost(Schedule(dim=3, steps=()), 2.5)
        self.assertEqual((report.t_f, report.energy, report.J), (0.0, 0.0, 0.0))

    def test_two_level_flip(self):
        report = sequential_cost(synthesize_transfer([1, 0], [0, 1]), 1.0)
        self.assertAlmostEqual(report.t_f, math.pi / 2, places=14)
        self.assertAlmostEqual(report.J, math.pi, places=14)

    def test_nonpositive_lambda(self):
        with self.assertRaises(NonpositiveLambda):
            evaluate_cost(Schedule(dim=2, steps=()), 0.0)

    def test_as_dict_keys(self):
        report = sequential_cost(synthesize_transfer([1, 0], [0, 1]), 1.0)
        self.assertEqual(
            set(report.as_dict()),
            {"lambda", "t_f", "E", "J", "t_f_bound", "J_bound", "E_bound", "product", "product_bound"},
        )
        self.assertEqual(len(report.lines()), 9)


class SequenceTimeTests(SimpleTestCase):
    def test_two_level_flip(self):
        self.assertAlmostEqual(sequential_time(synthesize_transfer([1, 0], [0, 1]), 1.0), math.pi / 2, places=15)

    def test_worked_example(self):
        seq = synthesize_transfer([1, 0, 0], WORKED_TARGET)
        self.assertAlmostEqual(sequential_time(seq, 1.0), sum(abs(a) for a in seq.angles), places=14)
        self.assertLessEqual(sequential_time(seq, 1.0), 11 * math.pi / 2)

    def test_concurrent_takes_block_maxima(self):
        seq = _phase_only_sequence((math.pi, math.pi), (math.pi, math.pi))
        self.assertAlmostEqual(concurrent_time(seq, 2.0), math.pi, places=14)

    def test_concurrent_never_slower(self):
        for seq in _random_sequences(20, 31):
            self.assertLessEqual(concurrent_time(seq, 1.5), sequential_time(seq, 1.5) + 1e-12)

    def test_concurrent_matches_schedule_duration(self):
        rng = np.random.default_rng(6)
        seq = synthesize_transfer(random_unit_vector(6, rng), random_unit_vector(6, rng))
        schedule = to_schedule(compress_concurrent(seq), UniformL(0.8))
        self.assertAlmostEqual(concurrent_time(seq, 0.8), schedule.total_duration, places=12)

    def test_nonpositive_amplitude(self):
        with self.assertRaises(NonpositiveAmplitude):
            sequential_time(synthesize_transfer([1, 0], [0, 1]), 0.0)


class TimeEnergyProductTests(SimpleTestCase):
    def test_two_level_flip(self):
        seq = synthesize_transfer([1, 0], [0, 1])
        self.assertAlmostEqual(time_energy_product(seq), math.pi ** 2 / 4, places=14)
        for lam in (0.1, 1.0, 10.0):
            self.assertAlmostEqual(sequential_cost(seq, lam).product, math.pi ** 2 / 4, places=12)

    def test_identical_states(self):
        c = uniform_superposition(5)
        self.assertEqual(time_energy_product(synthesize_transfer(c, c, prune=True)), 0.0)

    def test_lambda_invariance(self):
        for seq in _random_sequences(10, 17):
            expected = time_energy_product(seq)
            products = [sequential_cost(seq, lam).product for lam in (1e-4, 0.1, 1.0, 10.0, 100.0)]
            spread = (max(products) - min(products)) / expected
            self.assertLessEqual(spread, 1e-9)
            self.assertAlmostEqual(products[2] / expected, 1.0, places=12)
            self.assertLessEqual(expected, product_bound(seq.dim))


class ConcurrentCostTests(SimpleTestCase):
    def test_head_block_amplitudes(self):
        seq = _phase_only_sequence((math.pi, math.pi / 2), (0.0, 0.0))
        schedule = to_schedule(compress_concurrent(seq), TimeEnergyOptimal(1.0))
        head = {p.channel.label: p for p in schedule.steps[0]}
        self.assertAlmostEqual(head["Z2"].duration, math.pi, places=14)
        self.assertAlmostEqual(head["Z2"].amplitude, 1.0, places=14)
        self.assertAlmostEqual(head["Z3"].amplitude, 0.5, places=14)
        report = concurrent_cost(seq, 1.0)
        self.assertAlmostEqual(report.t_f, math.pi, places=14)
        self.assertAlmostEqual(report.energy, (1 + 0.25) * math.pi, places=13)

    def test_zero_phases_match_sequential(self):
        seq = synthesize_transfer(basis_state(4, 1), uniform_superposition(4))
        concurrent = concurrent_cost(seq, 2.0)
        sequential = sequential_cost(seq, 2.0)
        self.assertAlmostEqual(concurrent.t_f, sequential.t_f, places=14)
        self.assertAlmostEqual(concurrent.energy, sequential.energy, places=14)
        self.assertAlmostEqual(concurrent.J, sequential.J, places=14)

    def test_never_worse_than_sequential(self):
        rng = np.random.default_rng(55)
        for _ in range(20):
            seq = synthesize_transfer(random_unit_vector(5, rng), random_unit_vector(5, rng))
            self.assertLessEqual(concurrent_cost(seq, 1.0).J, sequential_cost(seq, 1.0).J + 1e-12)


class OptimalityTests(SimpleTestCase):
    def test_grid_minimum_at_sqrt_lambda(self):
        for lam in (0.25, 1.0, 4.0):
            grid = [math.sqrt(lam) * ((10 + k) / 20) for k in range(21)]
            for seq in _random_sequences(20, 101):
                scan = scan_amplitudes(seq, lam, grid)
                best = scan[10][1]
                for k, (_, value) in enumerate(scan):
                    if k != 10:
                        self.assertGreater(value, best)

    def test_optimum_identities(self):
        for lam in (0.25, 1.0, 4.0):
            for seq in _random_sequences(20, 202):
                report = sequential_cost(seq, lam)
                self.assertLessEqual(abs(report.J - 2 * lam * report.t_f), 1e-12 * report.J)
                self.assertLessEqual(abs(report.energy - lam * report.t_f), 1e-12 * report.energy)


class BoundTests(SimpleTestCase):
    def test_bounds_hold(self):
        for family in Family:
            for seq in _random_sequences(40, 303, family):
                amplitude = 1.7
                self.assertLessEqual(sequential_time(seq, amplitude), sequential_time_bound(seq.dim, amplitude))
                self.assertLessEqual(concurrent_time(seq, amplitude), concurrent_time_bound(seq.dim, amplitude))
                for report in (sequential_cost(seq, 2.0), concurrent_cost(seq, 2.0)):
                    self.assertLessEqual(report.t_f, report.t_f_bound)
                    self.assertLessEqual(report.energy, report.E_bound)
                    self.assertLessEqual(report.J, report.J_bound)
                    self.assertLessEqual(report.product, report.product_bound)
                self.assertLessEqual(concurrent_cost(seq, 2.0).J, sequential_cost(seq, 2.0).J + 1e-12)

    def test_unitary_bounds(self):
        self.assertAlmostEqual(unitary_time_bound(2, 1.0), 4 * math.pi, places=14)
        self.assertAlmostEqual(unitary_time_bound(3, 2.0), 4 * math.pi, places=14)
        self.assertAlmostEqual(unitary_angle_bound(2), 5 * math.pi, places=14)
        self.assertAlmostEqual(unitary_angle_bound(3), 12 * math.pi, places=14)

    def test_unitary_schedule_uses_unitary_bounds(self):
        step = (Pulse(ControlChannel("Y", 1, 3), 2.0, math.pi / 4),)
        schedule = Schedule(dim=3, steps=(step,), meta={"kind": "unitary", "amplitude": 2.0})
        report = evaluate_cost(schedule, 1.0)
        self.assertAlmostEqual(report.t_f_bound, unitary_time_bound(3, 2.0), places=14)
        self.assertAlmostEqual(report.E_bound, 2.0 * unitary_angle_bound(3), places=14)
