"""
Exact propagation of piecewise-constant schedules.

Each step is a constant Hamiltonian H = Σ L·G over its pulses, so its
propagator is exp(-i·t·H) exactly; the trajectory is the ordered product of
step unitaries, with no time integration involved.
"""
import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.linalg

from controls.channels import ChannelKind, Rotation, apply_rotation, generator, rotation_unitary
from numerics.exceptions import DimMismatch, NonpositiveAmplitude, ScheduleFormatError
from numerics.linalg import as_unit_vector, as_vector
from transfer.schedule import Pulse, Schedule, check_step

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Trajectory:
    states: tuple
    times: np.ndarray = field(repr=False)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def amplitudes(self) -> np.ndarray:
        """Matrix of |c_n| with one column per recorded state."""
        return np.abs(np.column_stack(self.states))


def _check_dims(step, dim):
    for pulse in step:
        if pulse.channel.dim != dim:
            raise DimMismatch(f"{pulse.channel.label} built for N={pulse.channel.dim}, step has N={dim}")


def step_hamiltonian(step, dim: int) -> np.ndarray:
    h = np.zeros((dim, dim), dtype=np.complex128)
    for pulse in step:
        h += pulse.amplitude * generator(pulse.channel)
    return h


def step_unitary(step, dim: int, validate: bool = False) -> np.ndarray:
    """
    exp(-i·t·H_step). Single pulses and all-Z steps use the closed form;
    ``validate`` instead diagonalizes the Hermitian step Hamiltonian.
    """
    step = tuple(step)
    _check_dims(step, dim)
    check_step(step)
    if not step:
        return np.eye(dim, dtype=np.complex128)

    duration = max(p.duration for p in step)
    if validate:
        w, v = scipy.linalg.eigh(step_hamiltonian(step, dim))
        return (v * np.exp(-1j * duration * w)) @ v.conj().T

    if len(step) == 1:
        pulse = step[0]
        return rotation_unitary(Rotation(pulse.channel, pulse.area))
    diagonal = np.ones(dim, dtype=np.complex128)
    for pulse in step:
        diagonal[pulse.channel.index - 1] *= np.exp(-1j * pulse.area)
    return np.diag(diagonal)


def _apply_step(step, state, dim):
    if len(step) == 1 and step[0].channel.kind != ChannelKind.Z:
        pulse = step[0]
        return apply_rotation(Rotation(pulse.channel, pulse.area), state)
    return step_unitary(step, dim) @ state


def propagate(schedule: Schedule, psi0) -> Trajectory:
    psi = as_unit_vector(psi0)
    if psi.shape[0] != schedule.dim:
        raise DimMismatch(f"initial state has N={psi.shape[0]}, schedule has N={schedule.dim}")

    states = [psi.copy()]
    times = [0.0]
    for step in schedule.steps:
        psi = _apply_step(step, psi, schedule.dim)
        states.append(psi)
        times.append(times[-1] + schedule.step_duration(step))
    logger.debug(f"Propagated N={schedule.dim} state through {schedule.step_count} steps")
    return Trajectory(states=tuple(states), times=np.array(times))


def propagate_operator(schedule: Schedule) -> np.ndarray:
    """Ordered product of step unitaries; later steps multiply on the left."""
    u = np.eye(schedule.dim, dtype=np.complex128)
    for step in schedule.steps:
        u = step_unitary(step, schedule.dim) @ u
    return u


def fidelity(a, b) -> float:
    """|⟨a|b⟩|², insensitive to global phase."""
    a = as_vector(a)
    b = as_vector(b)
    if a.shape != b.shape:
        raise DimMismatch(f"cannot compare states of dimension {a.shape[0]} and {b.shape[0]}")
    return float(min(1.0, abs(np.vdot(a, b)) ** 2))


def concat_schedules(first: Schedule, second: Schedule) -> Schedule:
    """``first`` followed by ``second``."""
    if first.dim != second.dim:
        raise DimMismatch(f"cannot concatenate N={first.dim} and N={second.dim} schedules")
    return Schedule(dim=first.dim, steps=first.steps + second.steps, meta=first.meta)


def inverse_schedule(schedule: Schedule) -> Schedule:
    """Reverse step order and negate every amplitude."""
    steps = tuple(
        tuple(Pulse(p.channel, -p.amplitude, p.duration) for p in step)
        for step in reversed(schedule.steps)
    )
    return Schedule(dim=schedule.dim, steps=steps, meta=schedule.meta)


def scale_schedule(schedule: Schedule, factor: float) -> Schedule:
    """Multiply amplitudes by ``factor`` and divide durations by it; pulse areas are unchanged."""
    if not factor > 0:
        raise NonpositiveAmplitude(f"scale factor must be positive, got {factor}")
    steps = tuple(
        tuple(Pulse(p.channel, p.amplitude * factor, p.duration / factor) for p in step)
        for step in schedule.steps
    )
    meta = dict(schedule.meta)
    if "amplitude" in meta:
        meta["amplitude"] = meta["amplitude"] * factor
    return Schedule(dim=schedule.dim, steps=steps, meta=meta)


def write_trajectory_csv(path, trajectory: Trajectory) -> None:
    """One row per recorded state: time, then re/im of every amplitude."""
    dim = trajectory.states[0].shape[0]
    header = ["time"]
    for n in range(1, dim + 1):
        header += [f"re{n}", f"im{n}"]
    rows = [header]
    for time, state in zip(trajectory.times, trajectory.states):
        row = [f"{time:.15g}"]
        for z in state:
            row += [f"{z.real:.15g}", f"{z.imag:.15g}"]
        rows.append(row)
    try:
        with Path(path).open("w", newline="") as handle:
            csv.writer(handle).writerows(rows)
    except OSError as exc:
        raise ScheduleFormatError(f"cannot write trajectory {path}: {exc}") from exc
