"""
Control channels Z_n, X_n, Y_n and their closed-form rotations.

    Z_n = |n⟩⟨n|
    X_n = |n+1⟩⟨n| + |n⟩⟨n+1|
    Y_n = i(|n+1⟩⟨n| - |n⟩⟨n+1|)

Levels are 1-based throughout, matching the channel labels "Z2", "Y1", ...
A rotation by γ on a channel is exp(-iγG) for its generator G.
"""
import math
import re
from dataclasses import dataclass

import numpy as np
from django.db import models

from numerics.exceptions import BadIndex

TWO_PI = 2.0 * math.pi

TRANSFER = "transfer"
UNITARY = "unitary"

_LABEL_RE = re.compile(r"^\s*([ZXYzxy])\s*(\d+)\s*$")


class ChannelKind(models.TextChoices):
    Z = "Z", "Phase"
    X = "X", "Population (X)"
    Y = "Y", "Population (Y)"


@dataclass(frozen=True)
class ControlChannel:
    kind: str
    index: int
    dim: int

    def __post_init__(self):
        object.__setattr__(self, "kind", ChannelKind(self.kind))
        self.check(UNITARY)

    def check(self, context=UNITARY):
        """
        Validate the index for its kind. Z_1 only exists when synthesizing
        unitaries; state transfer uses Z_2..Z_N.
        """
        if self.dim < 1:
            raise BadIndex(f"dimension must be positive, got {self.dim}")
        if self.kind == ChannelKind.Z:
            low = 2 if context == TRANSFER else 1
            high = self.dim
        else:
            low, high = 1, self.dim - 1
        if not low <= self.index <= high:
            raise BadIndex(
                f"{self.kind}{self.index} is outside {low}..{high} for N={self.dim} ({context})"
            )
        return self

    @property
    def label(self) -> str:
        return f"{self.kind.value}{self.index}"

    @property
    def is_phase(self) -> bool:
        return self.kind == ChannelKind.Z

    def __str__(self):
        return self.label


def parse_channel(label: str, dim: int) -> ControlChannel:
    match = _LABEL_RE.match(label)
    if not match:
        raise BadIndex(f"unrecognized channel label {label!r}")
    return ControlChannel(match.group(1).upper(), int(match.group(2)), dim)


def normalize_angle(angle: float) -> float:
    """Reduce into (-2π, 2π) keeping the sign of the angle."""
    return math.fmod(float(angle), TWO_PI)


@dataclass(frozen=True)
class Rotation:
    channel: ControlChannel
    angle: float

    def __post_init__(self):
        object.__setattr__(self, "angle", normalize_angle(self.angle))

    def inverse(self) -> "Rotation":
        return Rotation(self.channel, -self.angle)

    def __str__(self):
        return f"({self.channel.label}, {self.angle:.6f})"


def generator(channel: ControlChannel) -> np.ndarray:
    """Dense Hermitian generator of the channel."""
    channel.check(UNITARY)
    n = channel.index - 1
    g = np.zeros((channel.dim, channel.dim), dtype=np.complex128)
    if channel.kind == ChannelKind.Z:
        g[n, n] = 1.0
    elif channel.kind == ChannelKind.X:
        g[n + 1, n] = 1.0
        g[n, n + 1] = 1.0
    else:
        g[n + 1, n] = 1j
        g[n, n + 1] = -1j
    return g


def rotation_unitary(rotation: Rotation) -> np.ndarray:
    """exp(-iγG) in closed form."""
    channel = rotation.channel
    channel.check(UNITARY)
    gamma = rotation.angle
    n = channel.index - 1
    u = np.eye(channel.dim, dtype=np.complex128)
    if channel.kind == ChannelKind.Z:
        u[n, n] = np.exp(-1j * gamma)
        return u
    c, s = math.cos(gamma), math.sin(gamma)
    if channel.kind == ChannelKind.Y:
        u[n, n], u[n, n + 1] = c, -s
        u[n + 1, n], u[n + 1, n + 1] = s, c
    else:
        u[n, n], u[n, n + 1] = c, -1j * s
        u[n + 1, n], u[n + 1, n + 1] = -1j * s, c
    return u


def apply_rotation(rotation: Rotation, c: np.ndarray) -> np.ndarray:
    """Apply a rotation to a state vector without building the full matrix."""
    channel = rotation.channel
    n = channel.index - 1
    out = np.array(c, dtype=np.complex128)
    gamma = rotation.angle
    if channel.kind == ChannelKind.Z:
        out[n] *= np.exp(-1j * gamma)
        return out
    block = rotation_unitary(Rotation(ControlChannel(channel.kind, 1, 2), gamma))
    out[n:n + 2] = block @ out[n:n + 2]
    return out


def numerical_rotation_unitary(rotation: Rotation) -> np.ndarray:
    """exp(-iγG) through the eigendecomposition of the Hermitian generator."""
    w, v = np.linalg.eigh(generator(rotation.channel))
    return (v * np.exp(-1j * rotation.angle * w)) @ v.conj().T


def sequence_unitary(rotations, dim: int) -> np.ndarray:
    """Ordered product of rotations; the first rotation acts first."""
    u = np.eye(dim, dtype=np.complex128)
    for rotation in rotations:
        u = rotation_unitary(rotation) @ u
    return u


def euler_step_count(dim: int) -> int:
    """Steps of the Euler-per-Givens factorization of an N×N unitary."""
    return 3 * dim * (dim + 1) // 2


def state_euler_rotation_count(dim: int) -> int:
    """Rotations of the Euler-per-subspace state transfer decomposition."""
    return 3 * (dim - 1)
