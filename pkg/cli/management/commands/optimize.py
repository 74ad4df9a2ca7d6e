"""
Time-energy report for a schedule file.
"""
import json

from timeenergy.cost import evaluate_cost
from transfer.schedule import read_schedule

from ...base import PulseCommand


class Command(PulseCommand):
    help = "Evaluates the time-energy performance index of a schedule"
    command_name = "optimize"

    def add_arguments(self, parser):
        parser.add_argument("--schedule", type=str, required=True, help="Schedule file (JSON)")
        parser.add_argument("--lambda", dest="lam", type=float, help="Time/energy cost ratio")
        parser.add_argument("--json", action="store_true", help="Print the report as JSON")

    def run(self, config):
        report = evaluate_cost(read_schedule(config.schedule), config.cost_lambda)
        if config.json:
            self.stdout.write(json.dumps(report.as_dict(), indent=2, sort_keys=True))
            return
        for line in report.lines():
            self.stdout.write(line)
