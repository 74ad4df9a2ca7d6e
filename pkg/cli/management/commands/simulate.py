"""
Propagate a state (or the identity) through a schedule file.
"""
from numerics.exceptions import DimMismatch
from numerics.fileio import read_matrix, read_state
from numerics.linalg import operator_distance
from simulator.propagator import fidelity, propagate, propagate_operator, write_trajectory_csv
from transfer.schedule import read_schedule

from ...base import PulseCommand


class Command(PulseCommand):
    help = "Propagates a state through a schedule and reports the final state"
    command_name = "simulate"

    def add_arguments(self, parser):
        parser.add_argument("--schedule", type=str, required=True, help="Schedule file (JSON)")
        parser.add_argument("--initial", type=str, help="Initial state file")
        parser.add_argument("--target", type=str, help="Expected final state; prints the fidelity")
        parser.add_argument("--unitary", type=str, help="Expected schedule unitary; prints the residual")
        parser.add_argument("--trajectory", type=str, help="CSV file for the intermediate states")

    def run(self, config):
        schedule = read_schedule(config.schedule)
        self.stdout.write(f"N: {schedule.dim}, steps: {schedule.step_count}, duration: {schedule.total_duration:.6f}")

        if config.initial:
            trajectory = propagate(schedule, read_state(config.initial))
            for n, z in enumerate(trajectory.final, start=1):
                self.stdout.write(f"  c{n} = {z.real:+.6f} {z.imag:+.6f}i")
            if config.trajectory:
                write_trajectory_csv(config.trajectory, trajectory)
                self.stdout.write(f"trajectory: {config.trajectory}")
            if config.target:
                self.check_fidelity(fidelity(trajectory.final, read_state(config.target)))

        if config.unitary:
            expected = read_matrix(config.unitary)
            if expected.shape != (schedule.dim, schedule.dim):
                raise DimMismatch(f"unitary is {expected.shape}, schedule has N={schedule.dim}")
            self.check_residual(operator_distance(propagate_operator(schedule), expected))
