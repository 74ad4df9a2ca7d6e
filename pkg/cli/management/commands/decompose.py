"""
Factor a unitary matrix file into a bang-bang schedule.
"""
from numerics.fileio import read_matrix
from numerics.linalg import operator_distance
from simulator.propagator import propagate_operator
from transfer.schedule import read_schedule, write_schedule
from unitary.factorization import factorization_to_schedule, factorize_unitary

from ...base import PulseCommand, add_amplitude_arguments


class Command(PulseCommand):
    help = "Factors a unitary into phase blocks and Y rotations and emits the schedule"
    command_name = "decompose"

    def add_arguments(self, parser):
        parser.add_argument("--unitary", type=str, required=True, help="Matrix file: 'N M' then entries")
        parser.add_argument("--out", type=str, help="Schedule file to write (JSON)")
        parser.add_argument("--report", action="store_true", help="Print eigenphases and stage angles")
        add_amplitude_arguments(parser)
        parser.add_argument("--prune", action="store_true", help="Drop zero-angle rotations and empty steps")
        parser.add_argument(
            "--nonnegative-time",
            action="store_true",
            help="Realize negative angles as gamma + 2*pi with positive amplitude",
        )

    def run(self, config):
        u = read_matrix(config.unitary)
        factorization = factorize_unitary(u)
        schedule = factorization_to_schedule(
            factorization,
            config.amplitude_rule(),
            prune=config.prune,
            nonnegative_time=config.nonnegative_time,
        )

        if config.report:
            phases = ",".join(f"{p:.6f}" for p in factorization.phases)
            self.stdout.write(f"eigenphases: {phases}")
            for sc in factorization.stages:
                theta = ",".join(f"{t:.6f}" for t in sc.theta)
                phi = ",".join(f"{p:.6f}" for p in sc.phi)
                self.stdout.write(f"stage {sc.k}: theta={theta} phi={phi}")
        self.stdout.write(f"N: {factorization.dim}")
        self.stdout.write(f"steps: {schedule.step_count}")

        if config.out:
            write_schedule(config.out, schedule)
            schedule = read_schedule(config.out)
            self.stdout.write(f"schedule: {config.out}")
        self.check_residual(operator_distance(propagate_operator(schedule), u))
