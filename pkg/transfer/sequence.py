"""
Rotation sequences produced by the synthesis routines.

A RotationSequence is the flat, ordered list of elementary rotations; a
GroupedSequence partitions rotations into steps whose members run at the
same time (only commuting phase rotations ever share a step).
"""
from dataclasses import dataclass, field

import numpy as np
from django.db import models

from controls.channels import Rotation, apply_rotation, rotation_unitary
from numerics.exceptions import NonCommutingStep

SEQUENTIAL = "sequential"
CONCURRENT = "concurrent"


class Family(models.TextChoices):
    YZ = "YZ", "Y population / Z phase"
    XZ = "XZ", "X population / Z phase"


class CorrectionVariant(models.TextChoices):
    NONE = "", "Uncorrected"
    FORMULA = "formula", "Closed-form quarter-turn correction"
    RESIDUAL = "residual", "Residual phase cancellation"


@dataclass(frozen=True)
class RotationSequence:
    dim: int
    rotations: tuple
    family: str = Family.YZ
    initial: np.ndarray | None = field(default=None, compare=False, repr=False)
    target: np.ndarray | None = field(default=None, compare=False, repr=False)
    pruned: bool = False
    phase_correction: str = CorrectionVariant.NONE

    def __post_init__(self):
        object.__setattr__(self, "rotations", tuple(self.rotations))
        object.__setattr__(self, "family", Family(self.family))

    def __len__(self):
        return len(self.rotations)

    def __iter__(self):
        return iter(self.rotations)

    @property
    def angles(self) -> np.ndarray:
        return np.array([r.angle for r in self.rotations], dtype=np.float64)

    @property
    def total_angle(self) -> float:
        """Σ|γ_k|, the pulse area of the whole sequence."""
        return float(np.sum(np.abs(self.angles)))

    def apply(self, c) -> np.ndarray:
        """Propagate a state through the rotations, first rotation first."""
        state = np.array(c, dtype=np.complex128)
        for rotation in self.rotations:
            state = apply_rotation(rotation, state)
        return state

    def unitary(self) -> np.ndarray:
        u = np.eye(self.dim, dtype=np.complex128)
        for rotation in self.rotations:
            u = rotation_unitary(rotation) @ u
        return u


def merge_phase_step(rotations) -> tuple:
    """
    Collapse a set of commuting phase rotations into one rotation per channel.
    """
    merged = {}
    for rotation in rotations:
        if not rotation.channel.is_phase:
            raise NonCommutingStep(f"{rotation.channel.label} cannot run concurrently")
        merged[rotation.channel] = merged.get(rotation.channel, 0.0) + rotation.angle
    return tuple(Rotation(channel, angle) for channel, angle in merged.items())


@dataclass(frozen=True)
class GroupedSequence:
    dim: int
    steps: tuple
    family: str = Family.YZ
    kind: str = "transfer"
    execution: str = SEQUENTIAL

    def __post_init__(self):
        steps = []
        for step in self.steps:
            step = tuple(step)
            if len(step) > 1:
                step = merge_phase_step(step)
            steps.append(step)
        object.__setattr__(self, "steps", tuple(steps))

    @property
    def step_count(self) -> int:
        return len(self.steps)

    @property
    def rotation_count(self) -> int:
        return sum(len(step) for step in self.steps)

    def rotations(self):
        for step in self.steps:
            yield from step

    def unitary(self) -> np.ndarray:
        u = np.eye(self.dim, dtype=np.complex128)
        for rotation in self.rotations():
            u = rotation_unitary(rotation) @ u
        return u


def sequential_steps(seq: RotationSequence) -> GroupedSequence:
    """One step per rotation."""
    return GroupedSequence(
        dim=seq.dim,
        steps=tuple((rotation,) for rotation in seq.rotations),
        family=seq.family,
        execution=SEQUENTIAL,
    )
