"""
Print the hyperspherical coordinates of a state file.
"""
from hypersphere.coords import to_hyperspherical
from numerics.fileio import read_state

from ...base import PulseCommand


class Command(PulseCommand):
    help = "Prints the hyperspherical angles (theta, phi) of a state"
    command_name = "coords"

    def add_arguments(self, parser):
        parser.add_argument("state", type=str, help="State file: 'N' then N lines 're im'")
        parser.add_argument("--places", type=int, default=6, help="Decimal places in the output")

    def run(self, config):
        coords = to_hyperspherical(read_state(config.state))
        theta, phi = coords.format(config.places)
        self.stdout.write(f"N: {coords.dim}")
        self.stdout.write(f"theta: {theta}")
        self.stdout.write(f"phi: {phi}")
