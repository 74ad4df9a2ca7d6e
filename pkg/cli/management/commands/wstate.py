"""
Prepare the N-level W-state from |1⟩.
"""
from hypersphere.coords import basis_state, uniform_superposition
from simulator.propagator import fidelity, propagate, write_trajectory_csv
from transfer.schedule import read_schedule, to_schedule, write_schedule
from transfer.sequence import sequential_steps
from transfer.synthesis import compress_concurrent, w_state_sequence

from ...base import PulseCommand, add_amplitude_arguments, add_family_argument


class Command(PulseCommand):
    help = "Builds the rotation ladder preparing the uniform superposition from |1>"
    command_name = "wstate"

    def add_arguments(self, parser):
        parser.add_argument("--n", type=int, required=True, help="Number of levels N >= 2")
        add_family_argument(parser)
        add_amplitude_arguments(parser)
        parser.add_argument(
            "--concurrent",
            action="store_true",
            help="Run the final phase corrections as one step",
        )
        parser.add_argument("--out", type=str, help="Schedule file to write (JSON)")
        parser.add_argument("--trajectory", type=str, help="CSV file for the intermediate states")

    def run(self, config):
        seq = w_state_sequence(config.n, config.family_choice)
        grouped = compress_concurrent(seq) if config.concurrent else sequential_steps(seq)
        schedule = to_schedule(grouped, config.amplitude_rule())

        for rotation in seq:
            self.stdout.write(f"  {rotation}")
        if config.out:
            write_schedule(config.out, schedule)
            schedule = read_schedule(config.out)
            self.stdout.write(f"schedule: {config.out}")

        trajectory = propagate(schedule, basis_state(config.n, 1))
        self.stdout.write("|c_n| per level, one column per step:")
        for n, row in enumerate(trajectory.amplitudes(), start=1):
            self.stdout.write(f"  n={n:<3d}" + " ".join(f"{a:.4f}" for a in row))

        if config.trajectory:
            write_trajectory_csv(config.trajectory, trajectory)
            self.stdout.write(f"trajectory: {config.trajectory}")
        self.check_fidelity(fidelity(trajectory.final, uniform_superposition(config.n)))
