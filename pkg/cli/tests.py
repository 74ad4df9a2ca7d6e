import json
import math
import tempfile
from io import StringIO
from pathlib import Path
from unittest.mock import patch

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, override_settings

from hypersphere.coords import basis_state, uniform_superposition
from numerics.fileio import write_matrix, write_state
from numerics.linalg import random_unitary
from transfer.schedule import read_schedule

from .config import RunConfig
from .runner import run
from .verification import PropertyResult, verify_suite

WORKED_TARGET = [0.5, 0.5j, 0.5 + 0.5j]


def _output_value(output, prefix):
    for line in output.splitlines():
        if line.startswith(prefix):
            return line[len(prefix):].strip()
    raise AssertionError(f"no line starting with {prefix!r} in:\n{output}")


class CommandTestCase(SimpleTestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()

    def state_file(self, name, c):
        path = self.tmp / name
        write_state(path, c)
        return str(path)

    def matrix_file(self, name, a):
        path = self.tmp / name
        write_matrix(path, a)
        return str(path)

    def call(self, *args, **options):
        out = StringIO()
        call_command(*args, stdout=out, stderr=StringIO(), **options)
        return out.getvalue()


class RunConfigTests(SimpleTestCase):
    def test_lambda_and_amplitude_conflict(self):
        with self.assertRaises(CommandError) as cm:
            RunConfig.from_options("wstate", n=3, lam=1.0, amplitude=2.0)
        self.assertEqual(cm.exception.returncode, 2)

    def test_unknown_command(self):
        with self.assertRaises(CommandError) as cm:
            RunConfig.from_options("compile")
        self.assertEqual(cm.exception.returncode, 2)

    def test_missing_required_option(self):
        with self.assertRaises(CommandError) as cm:
            RunConfig.from_options("synthesize", initial="a.state")
        self.assertEqual(cm.exception.returncode, 2)
        self.assertIn("target", str(cm.exception))

    def test_ignores_framework_options(self):
        config = RunConfig.from_options("verify", verbosity=1, traceback=False, seed=3)
        self.assertEqual(config.seed, 3)

    @override_settings(PULSE_DEFAULT_LAMBDA=4.0)
    def test_default_lambda_from_settings(self):
        config = RunConfig.from_options("wstate", n=3)
        self.assertEqual(config.cost_lambda, 4.0)
        self.assertEqual(config.amplitude_rule().meta()["amplitude"], 2.0)

    def test_call_args(self):
        args, options = RunConfig(command="coords", state="c.state", places=3).call_args()
        self.assertEqual(args, ["c.state"])
        self.assertEqual(options, {"places": 3})


class CoordsCommandTests(CommandTestCase):
    def test_uniform_superposition(self):
        output = self.call("coords", self.state_file("w.state", uniform_superposition(10)))
        self.assertEqual(_output_value(output, "N:"), "10")
        theta = [float(x) for x in _output_value(output, "theta:").split(",")]
        self.assertEqual(len(theta), 9)
        self.assertAlmostEqual(theta[0], math.acos(1 / math.sqrt(10)), places=6)
        self.assertAlmostEqual(theta[-1], math.pi / 4, places=6)
        self.assertEqual(_output_value(output, "phi:"), ",".join(["0.000000"] * 9))

    def test_places(self):
        output = self.call("coords", self.state_file("b.state", [0, 1]), places=2)
        self.assertEqual(_output_value(output, "theta:"), "1.57")


class SynthesizeCommandTests(CommandTestCase):
    def test_pruned_flip(self):
        out = self.tmp / "flip.json"
        output = self.call(
            "synthesize",
            initial=self.state_file("a.state", basis_state(2, 1)),
            target=self.state_file("b.state", basis_state(2, 2)),
            out=str(out),
            prune=True,
            lam=1.0,
        )
        self.assertIn("fidelity:", output)
        schedule = read_schedule(out)
        self.assertEqual(schedule.step_count, 1)
        (pulse,) = schedule.steps[0]
        self.assertEqual(pulse.channel.label, "Y1")
        self.assertAlmostEqual(pulse.amplitude, 1.0, places=15)
        self.assertAlmostEqual(pulse.duration, math.pi / 2, places=15)
        self.assertEqual(schedule.meta["amplitude_rule"], "time-energy-optimal")

    def test_xz_concurrent_worked_example(self):
        out = self.tmp / "worked.json"
        output = self.call(
            "synthesize",
            initial=self.state_file("a.state", basis_state(3, 1)),
            target=self.state_file("b.state", WORKED_TARGET),
            out=str(out),
            family="xz",
            concurrent=True,
            amplitude=2.0,
        )
        self.assertIn("phase correction:", output)
        self.assertIn("fidelity:", output)
        schedule = read_schedule(out)
        self.assertEqual(schedule.meta["execution"], "concurrent")
        self.assertEqual(schedule.meta["amplitude"], 2.0)
        self.assertEqual(schedule.step_count, 5)

    def test_dimension_mismatch_is_usage_error(self):
        config = RunConfig(
            command="synthesize",
            initial=self.state_file("a.state", basis_state(2, 1)),
            target=self.state_file("b.state", basis_state(3, 2)),
            out=str(self.tmp / "x.json"),
        )
        stderr = StringIO()
        self.assertEqual(run(config, stdout=StringIO(), stderr=stderr), 2)
        self.assertIn("DimMismatch", stderr.getvalue())
        self.assertFalse((self.tmp / "x.json").exists())

    def test_lambda_with_amplitude_exit_status(self):
        config = RunConfig(
            command="synthesize",
            initial=self.state_file("a.state", basis_state(2, 1)),
            target=self.state_file("b.state", basis_state(2, 2)),
            out=str(self.tmp / "x.json"),
            lam=1.0,
            amplitude=1.0,
        )
        self.assertEqual(run(config, stdout=StringIO(), stderr=StringIO()), 2)

    @override_settings(PULSE_FIDELITY_TOL=-1.0)
    def test_failed_fidelity_exit_status(self):
        config = RunConfig(
            command="synthesize",
            initial=self.state_file("a.state", basis_state(2, 1)),
            target=self.state_file("b.state", basis_state(2, 2)),
            out=str(self.tmp / "x.json"),
        )
        stderr = StringIO()
        self.assertEqual(run(config, stdout=StringIO(), stderr=stderr), 1)
        self.assertIn("fidelity", stderr.getvalue())

    def test_unwritable_output_exit_status(self):
        config = RunConfig(
            command="synthesize",
            initial=self.state_file("a.state", basis_state(2, 1)),
            target=self.state_file("b.state", basis_state(2, 2)),
            out="/nonexistent/dir/s.json",
        )
        stderr = StringIO()
        self.assertEqual(run(config, stdout=StringIO(), stderr=stderr), 2)
        self.assertIn("ScheduleFormatError", stderr.getvalue())

    def test_output_is_reproducible(self):
        paths = [self.tmp / "first.json", self.tmp / "second.json"]
        for path in paths:
            self.call(
                "synthesize",
                initial=self.state_file("a.state", basis_state(3, 1)),
                target=self.state_file("b.state", WORKED_TARGET),
                out=str(path),
                family="xz",
                concurrent=True,
                lam=0.5,
            )
        self.assertEqual(paths[0].read_bytes(), paths[1].read_bytes())


class SimulateCommandTests(CommandTestCase):
    def setUp(self):
        super().setUp()
        self.schedule = str(self.tmp / "flip.json")
        self.call(
            "synthesize",
            initial=self.state_file("a.state", basis_state(2, 1)),
            target=self.state_file("b.state", basis_state(2, 2)),
            out=self.schedule,
        )

    def test_state_and_trajectory(self):
        trajectory = self.tmp / "trajectory.csv"
        output = self.call(
            "simulate",
            schedule=self.schedule,
            initial=str(self.tmp / "a.state"),
            target=str(self.tmp / "b.state"),
            trajectory=str(trajectory),
        )
        self.assertIn("fidelity:", output)
        rows = trajectory.read_text().splitlines()
        self.assertEqual(rows[0], "time,re1,im1,re2,im2")
        self.assertEqual(len(rows), read_schedule(self.schedule).step_count + 2)

    def test_wrong_target_exit_status(self):
        config = RunConfig(
            command="simulate",
            schedule=self.schedule,
            initial=str(self.tmp / "a.state"),
            target=str(self.tmp / "a.state"),
        )
        self.assertEqual(run(config, stdout=StringIO(), stderr=StringIO()), 1)

    def test_wrong_unitary_exit_status(self):
        config = RunConfig(
            command="simulate",
            schedule=self.schedule,
            unitary=self.matrix_file("eye.mat", np.eye(2)),
        )
        self.assertEqual(run(config, stdout=StringIO(), stderr=StringIO()), 1)

    def test_malformed_schedule(self):
        bad = self.tmp / "bad.json"
        bad.write_text("{not json")
        config = RunConfig(command="simulate", schedule=str(bad))
        stderr = StringIO()
        self.assertEqual(run(config, stdout=StringIO(), stderr=stderr), 2)
        self.assertIn("ScheduleFormatError", stderr.getvalue())

    def test_unwritable_trajectory_exit_status(self):
        config = RunConfig(
            command="simulate",
            schedule=self.schedule,
            initial=str(self.tmp / "a.state"),
            trajectory="/nonexistent/dir/t.csv",
        )
        stderr = StringIO()
        self.assertEqual(run(config, stdout=StringIO(), stderr=stderr), 2)
        self.assertIn("ScheduleFormatError", stderr.getvalue())


class OptimizeCommandTests(CommandTestCase):
    def test_json_report(self):
        schedule = str(self.tmp / "flip.json")
        self.call(
            "synthesize",
            initial=self.state_file("a.state", basis_state(2, 1)),
            target=self.state_file("b.state", basis_state(2, 2)),
            out=schedule,
            prune=True,
            lam=1.0,
        )
        report = json.loads(self.call("optimize", schedule=schedule, lam=1.0, json=True))
        self.assertEqual(report["lambda"], 1.0)
        self.assertAlmostEqual(report["t_f"], math.pi / 2, places=14)
        self.assertAlmostEqual(report["E"], math.pi / 2, places=14)
        self.assertAlmostEqual(report["J"], math.pi, places=14)
        self.assertLessEqual(report["t_f"], report["t_f_bound"])

    def test_text_report(self):
        schedule = str(self.tmp / "flip.json")
        self.call(
            "synthesize",
            initial=self.state_file("a.state", basis_state(2, 1)),
            target=self.state_file("b.state", basis_state(2, 2)),
            out=schedule,
        )
        output = self.call("optimize", schedule=schedule, lam=2.0)
        self.assertEqual(len(output.splitlines()), 9)
        self.assertTrue(output.startswith("lambda"))


class DecomposeCommandTests(CommandTestCase):
    def test_identity(self):
        output = self.call("decompose", unitary=self.matrix_file("eye.mat", np.eye(3)))
        self.assertEqual(_output_value(output, "steps:"), "11")
        self.assertLess(float(_output_value(output, "residual:")), 1e-12)

    def test_identity_pruned(self):
        output = self.call("decompose", unitary=self.matrix_file("eye.mat", np.eye(3)), prune=True)
        self.assertEqual(_output_value(output, "steps:"), "0")

    def test_random_unitary_round_trip(self):
        u = random_unitary(4, 7)
        out = self.tmp / "u.json"
        output = self.call(
            "decompose",
            unitary=self.matrix_file("u.mat", u),
            out=str(out),
            report=True,
            amplitude=1.5,
        )
        self.assertIn("eigenphases:", output)
        self.assertIn("stage 4:", output)
        self.assertLessEqual(float(_output_value(output, "residual:")), 1e-8)
        self.assertEqual(read_schedule(out).step_count, 19)

        simulated = self.call("simulate", schedule=str(out), unitary=str(self.tmp / "u.mat"))
        self.assertLessEqual(float(_output_value(simulated, "residual:")), 1e-8)

    def test_not_unitary(self):
        config = RunConfig(command="decompose", unitary=self.matrix_file("bad.mat", [[1, 1], [0, 1]]))
        stderr = StringIO()
        self.assertEqual(run(config, stdout=StringIO(), stderr=stderr), 2)
        self.assertIn("NotUnitary", stderr.getvalue())

    def test_output_is_reproducible(self):
        unitary = self.matrix_file("u.mat", random_unitary(4, 11))
        paths = [self.tmp / "first.json", self.tmp / "second.json"]
        for path in paths:
            self.call("decompose", unitary=unitary, out=str(path), lam=2.0)
        self.assertEqual(paths[0].read_bytes(), paths[1].read_bytes())

    def test_unwritable_output_exit_status(self):
        config = RunConfig(
            command="decompose",
            unitary=self.matrix_file("eye.mat", np.eye(2)),
            out="/nonexistent/dir/s.json",
        )
        self.assertEqual(run(config, stdout=StringIO(), stderr=StringIO()), 2)


class WStateCommandTests(CommandTestCase):
    def test_four_levels(self):
        out = self.tmp / "w.json"
        output = self.call("wstate", n=4, out=str(out))
        self.assertIn("fidelity:", output)
        self.assertIn("n=1  1.0000 0.5000 0.5000 0.5000", output)
        self.assertEqual(read_schedule(out).step_count, 3)

    def test_xz_concurrent(self):
        output = self.call("wstate", n=5, family="xz", concurrent=True, amplitude=1.0)
        self.assertIn("fidelity:", output)

    def test_too_small(self):
        self.assertEqual(run(RunConfig(command="wstate", n=1), stdout=StringIO(), stderr=StringIO()), 2)

    def test_fidelity_from_written_file(self):
        out = self.tmp / "w.json"
        with patch("cli.management.commands.wstate.read_schedule", wraps=read_schedule) as mock_read:
            output = self.call("wstate", n=3, out=str(out))
        mock_read.assert_called_once_with(str(out))
        self.assertIn("fidelity:", output)

    def test_unwritable_output_exit_status(self):
        config = RunConfig(command="wstate", n=3, out="/nonexistent/dir/w.json")
        stderr = StringIO()
        self.assertEqual(run(config, stdout=StringIO(), stderr=stderr), 2)
        self.assertIn("ScheduleFormatError", stderr.getvalue())


class VerificationTests(SimpleTestCase):
    def test_small_suite_passes(self):
        report = verify_suite(seed=1, pairs=2, unitaries=1, max_dim=4)
        self.assertTrue(report.passed, report.render())
        names = [r.name for r in report.results]
        self.assertIn("transfer.fidelity.xz.concurrent", names)
        self.assertIn("unitary.reconstruction", names)
        self.assertTrue(report.render().endswith(f"{len(names)}/{len(names)} properties passed"))

    def test_render_is_deterministic(self):
        first = verify_suite(seed=5, pairs=2, unitaries=1, max_dim=3).render()
        second = verify_suite(seed=5, pairs=2, unitaries=1, max_dim=3).render()
        self.assertEqual(first, second)
        self.assertTrue(first.startswith("verify seed=5 pairs=2 unitaries=1 max_dim=3"))

    def test_negative_scale_fails_tolerance_properties(self):
        report = verify_suite(seed=0, pairs=1, unitaries=1, max_dim=2, tolerance_scale=-1.0)
        self.assertFalse(report.passed)
        for result in report.results:
            self.assertEqual(result.passed, result.exact)

    def test_exact_property(self):
        self.assertTrue(PropertyResult("count", 0.0, 0.0, 3, exact=True, scale=-1.0).passed)
        self.assertFalse(PropertyResult("count", 1.0, 0.0, 3, exact=True).passed)

    @override_settings(PULSE_VERIFY_TOLERANCE_SCALE=-1.0)
    def test_corrupted_tolerance_exit_status(self):
        config = RunConfig(command="verify", pairs=1, unitaries=1, max_dim=2)
        stdout = StringIO()
        self.assertEqual(run(config, stdout=stdout, stderr=StringIO()), 1)
        self.assertIn("FAIL", stdout.getvalue())

    @override_settings(PULSE_VERIFY_PAIRS=1, PULSE_VERIFY_UNITARIES=1, PULSE_VERIFY_MAX_DIM=3)
    def test_command_exit_status(self):
        stdout = StringIO()
        self.assertEqual(run(RunConfig(command="verify", seed=2), stdout=stdout, stderr=StringIO()), 0)
        self.assertIn("all properties passed", stdout.getvalue())

    def test_covers_cost_and_special_inputs(self):
        report = verify_suite(seed=3, pairs=1, unitaries=1, max_dim=3)
        self.assertTrue(report.passed, report.render())
        names = {r.name for r in report.results}
        for name in (
            "timeenergy.product_invariance",
            "timeenergy.concurrent_bound_ratio",
            "timeenergy.concurrent_gain",
            "unitary.special_residual",
            "wstate.theta",
            "wstate.amplitudes",
        ):
            self.assertIn(name, names)
        cases = {r.name: r.cases for r in report.results}
        # identity, diagonal and degenerate input per dimension
        self.assertEqual(cases["unitary.special_residual"], 6)
        self.assertEqual(cases["unitary.step_count"], 8)

    @patch("cli.verification.W_STATE_PEAKS", (1.0,) * 10)
    def test_wrong_w_state_table_reported(self):
        report = verify_suite(seed=0, pairs=1, unitaries=1, max_dim=2)
        failed = {r.name for r in report.results if not r.passed}
        self.assertEqual(failed, {"wstate.amplitudes"})

    @patch("cli.verification.operator_distance", return_value=1.0)
    def test_reconstruction_failure_reported(self, mock_distance):
        report = verify_suite(seed=0, pairs=1, unitaries=1, max_dim=2)
        failed = {r.name for r in report.results if not r.passed}
        self.assertEqual(failed, {"unitary.reconstruction", "unitary.schedule_residual", "unitary.special_residual"})
