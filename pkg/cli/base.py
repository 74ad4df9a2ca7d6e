"""
Common plumbing for the pulse management commands.

Library errors become usage errors (exit status 2); a propagated result
that misses its threshold becomes a validation failure (exit status 1).
"""
import logging

from django.core.management.base import BaseCommand, CommandError

from numerics.conf import pulse_setting
from numerics.exceptions import PulseSynthesisError

from .config import RunConfig

logger = logging.getLogger(__name__)


def add_amplitude_arguments(parser):
    group = parser.add_mutually_exclusive_group()
    group.add_argument(
        "--lambda",
        dest="lam",
        type=float,
        help="Time/energy cost ratio; pulses run at the optimal amplitude sqrt(lambda)",
    )
    group.add_argument(
        "--amplitude",
        type=float,
        help="Uniform pulse amplitude L in rad/time",
    )


def add_family_argument(parser):
    parser.add_argument(
        "--family",
        type=str.lower,
        choices=["yz", "xz"],
        default="yz",
        help="Population channels: Y (yz) or X with phase correction (xz)",
    )


class PulseCommand(BaseCommand):
    """Subclasses set ``command_name`` and implement ``run(config)``."""

    command_name = None

    def handle(self, *args, **options):
        config = RunConfig.from_options(self.command_name, **options)
        try:
            self.run(config)
        except PulseSynthesisError as exc:
            logger.error(f"{self.command_name} failed: {type(exc).__name__}: {exc}")
            raise CommandError(f"{type(exc).__name__}: {exc}", returncode=2) from exc

    def run(self, config: RunConfig):
        raise NotImplementedError

    def check_fidelity(self, value: float):
        tol = pulse_setting("PULSE_FIDELITY_TOL", 1e-10)
        if 1.0 - value > tol:
            raise CommandError(f"fidelity {value:.15f} is below 1 - {tol:.1e}", returncode=1)
        self.stdout.write(self.style.SUCCESS(f"fidelity: {value:.15f}"))

    def check_residual(self, value: float):
        tol = pulse_setting("PULSE_RESIDUAL_TOL", 1e-8)
        if value > tol:
            raise CommandError(f"reconstruction residual {value:.3e} exceeds {tol:.1e}", returncode=1)
        self.stdout.write(self.style.SUCCESS(f"residual: {value:.3e}"))
