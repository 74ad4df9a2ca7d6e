"""
Seeded property battery over every synthesis path.
"""
from django.core.management.base import CommandError

from ...base import PulseCommand
from ...verification import verify_suite


class Command(PulseCommand):
    help = "Runs the seeded verification suite and prints pass/fail per property"
    command_name = "verify"

    def add_arguments(self, parser):
        parser.add_argument("--seed", type=int, default=0, help="Seed for every random case")
        parser.add_argument("--pairs", type=int, help="Random state pairs per dimension")
        parser.add_argument("--unitaries", type=int, help="Random unitaries per dimension")
        parser.add_argument("--max-dim", type=int, help="Largest dimension exercised")

    def run(self, config):
        report = verify_suite(
            seed=config.seed,
            pairs=config.pairs,
            unitaries=config.unitaries,
            max_dim=config.max_dim,
        )
        self.stdout.write(report.render())
        if not report.passed:
            failed = ", ".join(r.name for r in report.results if not r.passed)
            raise CommandError(f"verification failed: {failed}", returncode=1)
        self.stdout.write(self.style.SUCCESS("all properties passed"))
