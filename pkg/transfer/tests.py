import math
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from controls.channels import ChannelKind, ControlChannel, Rotation, apply_rotation
from hypersphere.coords import basis_state, to_hyperspherical, uniform_superposition
from numerics.exceptions import (
    DimMismatch,
    NonCommutingStep,
    NonpositiveAmplitude,
    NonpositiveLambda,
    NotUnit,
    ScheduleFormatError,
    WrongFamily,
)
from numerics.linalg import random_unit_vector
from simulator.propagator import fidelity, propagate, propagate_operator

from .schedule import (
    Pulse,
    Schedule,
    TimeEnergyOptimal,
    UniformL,
    read_schedule,
    to_schedule,
    write_schedule,
)
from .sequence import CONCURRENT, CorrectionVariant, Family, GroupedSequence, sequential_steps
from .synthesis import (
    apply_x_phase_correction,
    compress_concurrent,
    synthesize_transfer,
    w_state_sequence,
)

W_STATE_THETA = (1.2490, 1.2310, 1.2094, 1.1832, 1.1503, 1.1071, 1.0472, 0.9553, 0.7854)
WORKED_TARGET = np.array([0.5, 0.5j, 0.5 + 0.5j])


def _synthesize(c0, cs, family):
    seq = synthesize_transfer(c0, cs, family=family)
    if family == Family.XZ:
        seq = apply_x_phase_correction(seq)
    return seq


class SynthesizeTransferTests(SimpleTestCase):
    def test_two_level_flip(self):
        seq = synthesize_transfer([1, 0], [0, 1])
        self.assertEqual([r.channel.label for r in seq], ["Z2", "Y1", "Z2"])
        np.testing.assert_allclose(seq.angles, [0.0, math.pi / 2, 0.0], atol=1e-15)
        self.assertEqual(len(seq), 4 * 2 - 5)

    def test_worked_example(self):
        seq = synthesize_transfer([1, 0, 0], WORKED_TARGET)
        self.assertEqual(len(seq), 7)
        tail = seq.rotations[-3:]
        self.assertEqual([r.channel.label for r in tail], ["Y2", "Z2", "Z3"])
        np.testing.assert_allclose([r.angle for r in tail], [0.955317, -math.pi / 2, -math.pi / 4], atol=1e-6)
        self.assertGreaterEqual(fidelity(seq.apply([1, 0, 0]), WORKED_TARGET), 1 - 1e-10)

    def test_w_state_is_nine_y_rotations(self):
        seq = synthesize_transfer(basis_state(10, 1), uniform_superposition(10), prune=True)
        self.assertEqual([r.channel.label for r in seq], [f"Y{n}" for n in range(1, 10)])
        np.testing.assert_allclose(seq.angles, W_STATE_THETA, atol=1e-4)

    def test_dimension_mismatch(self):
        with self.assertRaises(DimMismatch):
            synthesize_transfer([1, 0], [0, 0, 1])

    def test_rejects_unnormalized(self):
        with self.assertRaises(NotUnit):
            synthesize_transfer([1, 1], [0, 1])

    def test_identical_states(self):
        c = uniform_superposition(4)
        seq = synthesize_transfer(c, c)
        self.assertEqual(len(seq), 11)
        np.testing.assert_array_equal(seq.angles, np.zeros(11))
        self.assertEqual(len(synthesize_transfer(c, c, prune=True)), 0)

    def test_completeness(self):
        rng = np.random.default_rng(2024)
        for n_dim in range(2, 13):
            for _ in range(200):
                c0 = random_unit_vector(n_dim, rng)
                cs = random_unit_vector(n_dim, rng)
                for family in Family:
                    seq = _synthesize(c0, cs, family)
                    self.assertEqual(len(seq), 4 * n_dim - 5)
                    self.assertGreaterEqual(fidelity(seq.apply(c0), cs), 1 - 1e-10)
                    grouped = compress_concurrent(seq)
                    self.assertEqual(grouped.step_count, 2 * n_dim - 1)
                    self.assertGreaterEqual(fidelity(grouped.unitary() @ c0, cs), 1 - 1e-10)

    def test_step_postconditions(self):
        rng = np.random.default_rng(3)
        for n_dim in range(3, 9):
            c0 = random_unit_vector(n_dim, rng)
            cs = random_unit_vector(n_dim, rng)
            seq = synthesize_transfer(c0, cs)
            state = np.array(c0)
            for rotation in seq.rotations[:n_dim - 1]:
                state = apply_rotation(rotation, state)
            np.testing.assert_allclose(to_hyperspherical(state).phi, np.zeros(n_dim - 1), atol=1e-10)
            for rotation in seq.rotations[n_dim - 1:2 * n_dim - 3]:
                state = apply_rotation(rotation, state)
            np.testing.assert_allclose(to_hyperspherical(state).theta[1:], np.zeros(n_dim - 2), atol=1e-10)

    def test_pruning_keeps_action(self):
        rng = np.random.default_rng(8)
        for n_dim in range(2, 9):
            c0 = random_unit_vector(n_dim, rng)
            c0[rng.random(n_dim) < 0.3] = 0.0
            if not np.any(c0):
                c0[0] = 1.0
            c0 /= np.linalg.norm(c0)
            cs = random_unit_vector(n_dim, rng)
            full = synthesize_transfer(c0, cs)
            pruned = synthesize_transfer(c0, cs, prune=True)
            self.assertLessEqual(len(pruned), len(full))
            self.assertLessEqual(
                abs(fidelity(full.apply(c0), cs) - fidelity(pruned.apply(c0), cs)), 1e-12
            )

    def test_x_family_magnitudes_match_y_family(self):
        rng = np.random.default_rng(9)
        for n_dim in range(2, 10):
            c0 = random_unit_vector(n_dim, rng)
            cs = random_unit_vector(n_dim, rng)
            y_final = synthesize_transfer(c0, cs, family=Family.YZ).apply(c0)
            x_final = synthesize_transfer(c0, cs, family=Family.XZ).apply(c0)
            np.testing.assert_allclose(np.abs(x_final), np.abs(y_final), atol=1e-12)


class XPhaseCorrectionTests(SimpleTestCase):
    def test_two_level_global_phase_only(self):
        seq = synthesize_transfer([1, 0], [0, 1], family=Family.XZ)
        np.testing.assert_allclose(seq.apply([1, 0]), [0, -1j], atol=1e-15)
        corrected = apply_x_phase_correction(seq)
        self.assertAlmostEqual(fidelity(corrected.apply([1, 0]), [0, 1]), 1.0, places=14)

    def test_three_level_uniform_target(self):
        target = uniform_superposition(3)
        seq = synthesize_transfer(basis_state(3, 1), target, family=Family.XZ)
        self.assertLess(fidelity(seq.apply(basis_state(3, 1)), target), 0.5)
        corrected = apply_x_phase_correction(seq)
        self.assertEqual(corrected.phase_correction, CorrectionVariant.FORMULA)
        self.assertGreaterEqual(fidelity(corrected.apply(basis_state(3, 1)), target), 1 - 1e-10)
        self.assertTrue(all(r.channel.kind == ChannelKind.Z for r in corrected.rotations[len(seq) - 2:]))

    def test_w_state_with_x_rotations(self):
        seq = w_state_sequence(10, Family.XZ)
        final = seq.apply(basis_state(10, 1))
        self.assertGreaterEqual(fidelity(final, uniform_superposition(10)), 1 - 1e-10)

    def test_identical_states_fall_back_to_residual(self):
        c = uniform_superposition(3)
        corrected = apply_x_phase_correction(synthesize_transfer(c, c, family=Family.XZ))
        self.assertEqual(corrected.phase_correction, CorrectionVariant.RESIDUAL)
        self.assertGreaterEqual(fidelity(corrected.apply(c), c), 1 - 1e-10)

    def test_correction_is_idempotent(self):
        corrected = w_state_sequence(4, Family.XZ)
        self.assertIs(apply_x_phase_correction(corrected), corrected)

    def test_wrong_family(self):
        with self.assertRaises(WrongFamily):
            apply_x_phase_correction(synthesize_transfer([1, 0], [0, 1]))


class CompressConcurrentTests(SimpleTestCase):
    def test_three_level_step_count(self):
        grouped = compress_concurrent(synthesize_transfer([1, 0, 0], WORKED_TARGET))
        self.assertEqual(grouped.step_count, 5)
        self.assertEqual(grouped.execution, CONCURRENT)
        self.assertEqual(len(grouped.steps[0]), 2)
        self.assertEqual(len(grouped.steps[-1]), 2)

    def test_w_state_has_no_phase_blocks(self):
        self.assertEqual(compress_concurrent(w_state_sequence(10)).step_count, 9)

    def test_product_unchanged(self):
        rng = np.random.default_rng(5)
        seq = synthesize_transfer(random_unit_vector(5, rng), random_unit_vector(5, rng))
        np.testing.assert_allclose(compress_concurrent(seq).unitary(), seq.unitary(), atol=1e-12)


class WStateSequenceTests(SimpleTestCase):
    def test_two_levels(self):
        seq = w_state_sequence(2)
        self.assertEqual([r.channel.label for r in seq], ["Y1"])
        self.assertAlmostEqual(seq.angles[0], math.pi / 4, places=14)

    def test_ten_levels(self):
        np.testing.assert_allclose(w_state_sequence(10).angles, W_STATE_THETA, atol=1e-4)


class ToScheduleTests(SimpleTestCase):
    def test_single_rotation(self):
        grouped = GroupedSequence(dim=2, steps=((Rotation(ControlChannel("Y", 1, 2), math.pi / 2),),))
        schedule = to_schedule(grouped, UniformL(2.0))
        self.assertEqual(schedule.pulse_count, 1)
        pulse = schedule.steps[0][0]
        self.assertEqual(pulse.amplitude, 2.0)
        self.assertAlmostEqual(pulse.duration, math.pi / 4, places=15)

    def test_negative_angle_runs_forward(self):
        grouped = GroupedSequence(dim=2, steps=((Rotation(ControlChannel("Z", 2, 2), -math.pi / 2),),))
        pulse = to_schedule(grouped, UniformL(1.0), nonnegative_time=True).steps[0][0]
        self.assertEqual(pulse.amplitude, 1.0)
        self.assertAlmostEqual(pulse.duration, 3 * math.pi / 2, places=14)
        signed = to_schedule(grouped, UniformL(1.0)).steps[0][0]
        self.assertEqual(signed.amplitude, -1.0)
        self.assertAlmostEqual(signed.duration, math.pi / 2, places=15)

    def test_concurrent_phase_block(self):
        block = (
            Rotation(ControlChannel("Z", 2, 3), math.pi / 2),
            Rotation(ControlChannel("Z", 3, 3), math.pi / 4),
        )
        schedule = to_schedule(GroupedSequence(dim=3, steps=(block,)), UniformL(1.0))
        self.assertEqual(schedule.step_count, 1)
        step = schedule.steps[0]
        self.assertAlmostEqual(schedule.step_duration(step), math.pi / 2, places=15)
        self.assertEqual([p.amplitude for p in step], [1.0, 0.5])
        np.testing.assert_allclose(
            propagate_operator(schedule),
            np.diag([1, np.exp(-1j * math.pi / 2), np.exp(-1j * math.pi / 4)]),
            atol=1e-15,
        )

    def test_schedule_reproduces_sequence(self):
        rng = np.random.default_rng(12)
        for family in Family:
            seq = _synthesize(random_unit_vector(6, rng), random_unit_vector(6, rng), family)
            for grouped in (sequential_steps(seq), compress_concurrent(seq)):
                for nonnegative in (False, True):
                    schedule = to_schedule(grouped, TimeEnergyOptimal(0.7), nonnegative_time=nonnegative)
                    np.testing.assert_allclose(propagate_operator(schedule), seq.unitary(), atol=1e-10)

    def test_meta(self):
        schedule = to_schedule(compress_concurrent(w_state_sequence(3)), TimeEnergyOptimal(4.0))
        self.assertEqual(schedule.meta["amplitude_rule"], "time-energy-optimal")
        self.assertEqual(schedule.meta["lambda"], 4.0)
        self.assertEqual(schedule.meta["amplitude"], 2.0)
        self.assertEqual(schedule.meta["execution"], CONCURRENT)
        self.assertEqual(schedule.meta["family"], "YZ")

    def test_nonpositive_rules(self):
        with self.assertRaises(NonpositiveAmplitude):
            UniformL(0.0)
        with self.assertRaises(NonpositiveLambda):
            TimeEnergyOptimal(-1.0)


class ScheduleTests(SimpleTestCase):
    def test_mixed_step_rejected(self):
        with self.assertRaises(NonCommutingStep):
            Schedule(dim=3, steps=((
                Pulse(ControlChannel("Y", 1, 3), 1.0, 0.5),
                Pulse(ControlChannel("Z", 2, 3), 1.0, 0.5),
            ),))

    def test_repeated_level_rejected(self):
        with self.assertRaises(NonCommutingStep):
            Schedule(dim=3, steps=((
                Pulse(ControlChannel("Z", 2, 3), 1.0, 0.5),
                Pulse(ControlChannel("Z", 2, 3), -1.0, 0.5),
            ),))

    def test_negative_duration_rejected(self):
        with self.assertRaises(ScheduleFormatError):
            Pulse(ControlChannel("Z", 2, 3), 1.0, -0.1)

    def test_json_round_trip(self):
        rng = np.random.default_rng(14)
        c0, cs = random_unit_vector(4, rng), random_unit_vector(4, rng)
        schedule = to_schedule(compress_concurrent(synthesize_transfer(c0, cs)), UniformL(1.3))
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "s.json"
            write_schedule(path, schedule)
            loaded = read_schedule(path)
        self.assertEqual(loaded, schedule)
        self.assertEqual(loaded.meta, schedule.meta)
        self.assertEqual(fidelity(propagate(loaded, c0).final, cs), fidelity(propagate(schedule, c0).final, cs))

    def test_malformed_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "bad.json"
            path.write_text('{"dim": 2, "steps": [[{"channel": "Q1"}]]}')
            with self.assertRaises(ScheduleFormatError):
                read_schedule(path)

    def test_unwritable_path(self):
        schedule = to_schedule(sequential_steps(w_state_sequence(3)), UniformL(1.0))
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertRaises(ScheduleFormatError):
                write_schedule(Path(tmp) / "missing" / "s.json", schedule)
