"""
Run configuration shared by the management commands and ``run``.
"""
from dataclasses import dataclass, fields

from django.core.management.base import CommandError

from numerics.conf import pulse_setting
from transfer.schedule import TimeEnergyOptimal, UniformL
from transfer.sequence import Family

COMMAND_OPTIONS = {
    "coords": ("places",),
    "synthesize": (
        "initial", "target", "family", "lam", "amplitude",
        "prune", "concurrent", "nonnegative_time", "out",
    ),
    "simulate": ("schedule", "initial", "target", "unitary", "trajectory"),
    "optimize": ("schedule", "lam", "json"),
    "decompose": ("unitary", "out", "report", "lam", "amplitude", "prune", "nonnegative_time"),
    "wstate": ("n", "family", "lam", "amplitude", "concurrent", "out", "trajectory"),
    "verify": ("seed", "pairs", "unitaries", "max_dim"),
}

REQUIRED_OPTIONS = {
    "coords": ("state",),
    "synthesize": ("initial", "target", "out"),
    "simulate": ("schedule",),
    "optimize": ("schedule",),
    "decompose": ("unitary",),
    "wstate": ("n",),
    "verify": (),
}


@dataclass(frozen=True)
class RunConfig:
    command: str
    state: str | None = None
    initial: str | None = None
    target: str | None = None
    schedule: str | None = None
    unitary: str | None = None
    out: str | None = None
    trajectory: str | None = None
    family: str = "yz"
    lam: float | None = None
    amplitude: float | None = None
    prune: bool = False
    concurrent: bool = False
    nonnegative_time: bool = False
    json: bool = False
    report: bool = False
    seed: int = 0
    n: int | None = None
    places: int = 6
    pairs: int | None = None
    unitaries: int | None = None
    max_dim: int | None = None

    @classmethod
    def from_options(cls, command, **options) -> "RunConfig":
        """
        Build a config from parsed command options, ignoring Django's own
        options (verbosity, settings, ...).
        """
        if command not in COMMAND_OPTIONS:
            raise CommandError(f"unknown command {command!r}", returncode=2)
        known = {f.name for f in fields(cls)}
        values = {k: v for k, v in options.items() if k in known and v is not None}
        config = cls(command=command, **values)
        config.validate()
        return config

    def validate(self) -> None:
        missing = [name for name in REQUIRED_OPTIONS[self.command] if getattr(self, name) is None]
        if missing:
            raise CommandError(f"{self.command} needs: {', '.join(missing)}", returncode=2)
        if self.lam is not None and self.amplitude is not None:
            raise CommandError("give either --lambda or --amplitude, not both", returncode=2)
        if self.family.upper() not in Family.values:
            raise CommandError(f"unknown family {self.family!r}; use yz or xz", returncode=2)

    @property
    def family_choice(self) -> Family:
        return Family(self.family.upper())

    @property
    def cost_lambda(self) -> float:
        if self.lam is not None:
            return self.lam
        return pulse_setting("PULSE_DEFAULT_LAMBDA", 1.0)

    def amplitude_rule(self):
        if self.amplitude is not None:
            return UniformL(self.amplitude)
        return TimeEnergyOptimal(self.cost_lambda)

    def call_args(self) -> tuple[list, dict]:
        """Positional arguments and options for ``call_command``."""
        args = [self.state] if self.command == "coords" and self.state else []
        options = {}
        for name in COMMAND_OPTIONS[self.command]:
            value = getattr(self, name)
            if value is not None:
                options[name] = value
        return args, options
