"""
Timed piecewise-constant control programs.

A Schedule is an ordered list of steps; every pulse in a step runs for the
same duration. Amplitudes are in rad/time with ħ = 1, so a pulse of
amplitude L lasting t rotates its channel by the angle L·t.
"""
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

from controls.channels import ControlChannel, parse_channel
from numerics.exceptions import (
    BadIndex,
    NonCommutingStep,
    NonpositiveAmplitude,
    NonpositiveLambda,
    ScheduleFormatError,
)

from .sequence import GroupedSequence

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Pulse:
    channel: ControlChannel
    amplitude: float
    duration: float

    def __post_init__(self):
        if not math.isfinite(self.duration) or self.duration < 0:
            raise ScheduleFormatError(f"pulse on {self.channel.label} has duration {self.duration}")
        if not math.isfinite(self.amplitude):
            raise ScheduleFormatError(f"pulse on {self.channel.label} has amplitude {self.amplitude}")

    @property
    def area(self) -> float:
        return self.amplitude * self.duration

    def as_dict(self) -> dict:
        return {
            "channel": self.channel.label,
            "amplitude": self.amplitude,
            "duration": self.duration,
        }


def check_step(step) -> None:
    """Concurrent pulses must all be phase pulses on distinct levels."""
    if len(step) <= 1:
        return
    levels = set()
    for pulse in step:
        if not pulse.channel.is_phase:
            raise NonCommutingStep(f"{pulse.channel.label} cannot share a step with other pulses")
        if pulse.channel.index in levels:
            raise NonCommutingStep(f"{pulse.channel.label} appears twice in one step")
        levels.add(pulse.channel.index)
    durations = {pulse.duration for pulse in step}
    if len(durations) > 1:
        raise ScheduleFormatError("pulses within one step must share a duration")


@dataclass(frozen=True)
class Schedule:
    dim: int
    steps: tuple
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        steps = tuple(tuple(step) for step in self.steps)
        for step in steps:
            for pulse in step:
                if pulse.channel.dim != self.dim:
                    raise BadIndex(f"{pulse.channel.label} built for N={pulse.channel.dim}, schedule has N={self.dim}")
            check_step(step)
        object.__setattr__(self, "steps", steps)
        object.__setattr__(self, "meta", dict(self.meta))

    @property
    def step_count(self) -> int:
        return len(self.steps)

    @property
    def pulse_count(self) -> int:
        return sum(len(step) for step in self.steps)

    def step_duration(self, step) -> float:
        return max((pulse.duration for pulse in step), default=0.0)

    @property
    def total_duration(self) -> float:
        return math.fsum(self.step_duration(step) for step in self.steps)

    @property
    def amplitude(self) -> float:
        """The nominal amplitude L the schedule was built with."""
        if "amplitude" in self.meta:
            return float(self.meta["amplitude"])
        return max((abs(p.amplitude) for step in self.steps for p in step), default=0.0)

    def as_dict(self) -> dict:
        return {
            "dim": self.dim,
            "steps": [[pulse.as_dict() for pulse in step] for step in self.steps],
            "meta": self.meta,
        }


@dataclass(frozen=True)
class UniformL:
    """Every pulse at the same amplitude L."""
    value: float

    def __post_init__(self):
        if not self.value > 0:
            raise NonpositiveAmplitude(f"amplitude must be positive, got {self.value}")

    def amplitude(self) -> float:
        return float(self.value)

    def meta(self) -> dict:
        return {"amplitude_rule": "uniform", "amplitude": float(self.value)}


@dataclass(frozen=True)
class TimeEnergyOptimal:
    """Amplitude minimizing the time-energy index for cost ratio λ."""
    lam: float

    def __post_init__(self):
        if not self.lam > 0:
            raise NonpositiveLambda(f"lambda must be positive, got {self.lam}")

    def amplitude(self) -> float:
        from timeenergy.cost import optimal_amplitude

        return optimal_amplitude(self.lam)

    def meta(self) -> dict:
        return {
            "amplitude_rule": "time-energy-optimal",
            "lambda": float(self.lam),
            "amplitude": self.amplitude(),
        }


def _forward_angle(angle: float, nonnegative_time: bool) -> float:
    if nonnegative_time and angle < 0:
        return angle + TWO_PI
    return angle


def to_schedule(grouped: GroupedSequence, rule, nonnegative_time=False) -> Schedule:
    """
    Turn grouped rotations into timed pulses.

    A single rotation γ becomes a pulse of amplitude sign(γ)·L lasting |γ|/L
    (or amplitude +L lasting (γ+2π)/L for negative γ when
    ``nonnegative_time`` is set). A concurrent phase step runs for
    max|γ_n|/L with per-channel amplitude γ_n/t.
    """
    amplitude = rule.amplitude()
    if not amplitude > 0:
        raise NonpositiveAmplitude(f"amplitude must be positive, got {amplitude}")

    steps = []
    for group in grouped.steps:
        angles = [_forward_angle(r.angle, nonnegative_time) for r in group]
        if len(group) == 1:
            angle = angles[0]
            sign = -1.0 if angle < 0 else 1.0
            steps.append((Pulse(group[0].channel, sign * amplitude, abs(angle) / amplitude),))
            continue
        duration = max(abs(a) for a in angles) / amplitude
        if duration == 0.0:
            steps.append(tuple(Pulse(r.channel, amplitude, 0.0) for r in group))
        else:
            steps.append(tuple(Pulse(r.channel, a / duration, duration) for r, a in zip(group, angles)))

    meta = {
        "family": str(grouped.family),
        "kind": grouped.kind,
        "execution": grouped.execution,
        "nonnegative_time": bool(nonnegative_time),
    }
    meta.update(rule.meta())
    return Schedule(dim=grouped.dim, steps=tuple(steps), meta=meta)


def write_schedule(path, schedule: Schedule) -> None:
    """JSON with full float precision; key order is fixed so output is reproducible."""
    try:
        Path(path).write_text(json.dumps(schedule.as_dict(), indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise ScheduleFormatError(f"cannot write schedule {path}: {exc}") from exc


def schedule_from_dict(data: dict) -> Schedule:
    try:
        dim = int(data["dim"])
        steps = tuple(
            tuple(
                Pulse(
                    parse_channel(p["channel"], dim),
                    float(p["amplitude"]),
                    float(p["duration"]),
                )
                for p in step
            )
            for step in data["steps"]
        )
    except (KeyError, TypeError, ValueError, BadIndex) as exc:
        raise ScheduleFormatError(f"malformed schedule: {exc}") from exc
    return Schedule(dim=dim, steps=steps, meta=data.get("meta", {}))


def read_schedule(path) -> Schedule:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ScheduleFormatError(f"cannot read schedule {path}: {exc}") from exc
    return schedule_from_dict(data)
