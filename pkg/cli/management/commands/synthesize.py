"""
Synthesize a bang-bang schedule steering one state to another.
"""
from numerics.fileio import read_state
from simulator.propagator import fidelity, propagate
from transfer.schedule import read_schedule, to_schedule, write_schedule
from transfer.sequence import Family, sequential_steps
from transfer.synthesis import apply_x_phase_correction, compress_concurrent, synthesize_transfer

from ...base import PulseCommand, add_amplitude_arguments, add_family_argument


class Command(PulseCommand):
    help = "Synthesizes the rotation sequence and timed schedule for a state transfer"
    command_name = "synthesize"

    def add_arguments(self, parser):
        parser.add_argument("--initial", type=str, required=True, help="Initial state file")
        parser.add_argument("--target", type=str, required=True, help="Target state file")
        add_family_argument(parser)
        add_amplitude_arguments(parser)
        parser.add_argument("--prune", action="store_true", help="Drop zero-angle rotations")
        parser.add_argument(
            "--concurrent",
            action="store_true",
            help="Run the leading and trailing phase blocks as one step each",
        )
        parser.add_argument(
            "--nonnegative-time",
            action="store_true",
            help="Realize negative angles as gamma + 2*pi with positive amplitude",
        )
        parser.add_argument("--out", type=str, required=True, help="Schedule file to write (JSON)")

    def run(self, config):
        c0 = read_state(config.initial)
        cs = read_state(config.target)
        seq = synthesize_transfer(c0, cs, family=config.family_choice, prune=config.prune)
        if seq.family == Family.XZ:
            seq = apply_x_phase_correction(seq)
            self.stdout.write(f"phase correction: {seq.phase_correction}")

        grouped = compress_concurrent(seq) if config.concurrent else sequential_steps(seq)
        schedule = to_schedule(grouped, config.amplitude_rule(), nonnegative_time=config.nonnegative_time)
        write_schedule(config.out, schedule)

        self.stdout.write(f"rotations: {len(seq)}")
        for rotation in seq:
            self.stdout.write(f"  {rotation}")
        self.stdout.write(f"steps: {schedule.step_count} ({grouped.execution})")
        self.stdout.write(f"amplitude: {schedule.amplitude:.6f}")
        self.stdout.write(f"duration: {schedule.total_duration:.6f}")

        written = read_schedule(config.out)
        self.check_fidelity(fidelity(propagate(written, c0).final, cs))
        self.stdout.write(self.style.SUCCESS(f"Wrote {config.out}"))
