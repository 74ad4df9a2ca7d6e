"""
Bang-bang factorization of an N×N unitary.

U is diagonalized as Σ e^{iφ_j}|u_j⟩⟨u_j|. A ladder of stage operators
W_N, …, W_2 then maps each eigenvector onto a basis state: stage k reads
the hyperspherical coordinates of eigenvector N-k+1 restricted to its last
k coordinates and rotates it onto |N-k+1⟩ without touching the levels
already fixed. With T = W_2 ··· W_N,

    U = T† · diag(e^{iφ_1}, …, e^{iφ_N}) · T

and the whole product runs in N(N+1)-1 steps when each stage's phase block
is one concurrent step.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from controls.channels import ChannelKind, ControlChannel, Rotation, sequence_unitary
from hypersphere.coords import HypersphericalCoords, from_hyperspherical, to_hyperspherical
from numerics.conf import pulse_setting
from numerics.exceptions import DeflationFailure, DimensionTooSmall
from numerics.linalg import adjoint, as_matrix, eig_unitary, fix_global_phase
from transfer.schedule import to_schedule
from transfer.sequence import CONCURRENT, GroupedSequence

logger = logging.getLogger(__name__)

UNITARY_KIND = "unitary"


@dataclass(frozen=True)
class StageCoords:
    """Angles of stage k: theta in [0, π/2] and phi in (-π, π], k-1 of each."""
    k: int
    theta: np.ndarray
    phi: np.ndarray

    def __post_init__(self):
        theta = np.array(self.theta, dtype=np.float64).ravel()
        phi = np.array(self.phi, dtype=np.float64).ravel()
        if self.k < 2 or theta.size != self.k - 1 or phi.size != self.k - 1:
            raise DimensionTooSmall(f"stage {self.k} needs {self.k - 1} angles of each kind")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", phi)


@dataclass(frozen=True)
class UnitaryFactorization:
    dim: int
    phases: np.ndarray
    stages: tuple


def stage_rows(sc: StageCoords) -> np.ndarray:
    """
    The k orthonormal rows of stage ``sc`` as a k×k matrix. Row 1 is the
    vector with the stage's coordinates; rows j ≥ 2 complete the basis.
    """
    k = sc.k
    theta, phi = sc.theta, sc.phi
    rows = np.zeros((k, k), dtype=np.complex128)
    rows[0] = from_hyperspherical(HypersphericalCoords(theta=theta, phi=phi))
    for j in range(2, k + 1):
        lead_phase = 1.0 if j == 2 else np.exp(1j * phi[j - 3])
        rows[j - 1, j - 2] = lead_phase * math.sin(theta[j - 2])
        for m in range(j, k + 1):
            sines = math.prod(math.sin(t) for t in theta[j - 1:m - 1])
            closing = math.cos(theta[m - 1]) if m < k else 1.0
            rows[j - 1, m - 1] = -np.exp(1j * phi[m - 2]) * math.cos(theta[j - 2]) * sines * closing
    return rows


def stage_rotations(sc: StageCoords, n_dim: int) -> tuple[list, list]:
    """(phase block, Y ladder) of the stage operator acting on the last k levels."""
    offset = n_dim - sc.k
    block = [
        Rotation(ControlChannel(ChannelKind.Z, offset + j + 1, n_dim), sc.phi[j - 1])
        for j in range(1, sc.k)
    ]
    ladder = [
        Rotation(ControlChannel(ChannelKind.Y, offset + j, n_dim), -sc.theta[j - 1])
        for j in range(sc.k - 1, 0, -1)
    ]
    return block, ladder


def stage_operator(sc: StageCoords, n_dim: int):
    """
    Rotations and matrix of the stage operator. It sends the first row of
    the stage (embedded on the last k levels) to |N-k+1⟩, row j to
    -|N-k+j⟩, and leaves |1⟩ … |N-k⟩ alone.
    """
    if sc.k > n_dim:
        raise DimensionTooSmall(f"stage {sc.k} does not fit in N={n_dim}")
    block, ladder = stage_rotations(sc, n_dim)
    rotations = block + ladder
    return rotations, sequence_unitary(rotations, n_dim)


def _central_block(phases, n_dim: int) -> list:
    return [
        Rotation(ControlChannel(ChannelKind.Z, n, n_dim), -phases[n - 1])
        for n in range(1, n_dim + 1)
    ]


def factorize_unitary(u) -> UnitaryFactorization:
    u = as_matrix(u)
    n_dim = u.shape[0]
    if n_dim < 2 or u.shape[1] != n_dim:
        raise DimensionTooSmall(f"factorization needs a square N >= 2 matrix, got {u.shape}")
    deflation_tol = pulse_setting("PULSE_DEFLATION_TOL", 1e-8)

    phases, vectors = eig_unitary(u)
    images = np.array(vectors, dtype=np.complex128)
    stages = []
    for k in range(n_dim, 1, -1):
        offset = n_dim - k
        v = fix_global_phase(images[offset:, offset])
        coords = to_hyperspherical(v)
        sc = StageCoords(k=k, theta=coords.theta, phi=coords.phi)
        _, w = stage_operator(sc, n_dim)
        images = w @ images
        _check_deflated(images[:, offset], offset, deflation_tol)
        logger.debug(f"Stage k={k}: theta={np.round(sc.theta, 6)}, phi={np.round(sc.phi, 6)}")
        stages.append(sc)
    _check_deflated(images[:, n_dim - 1], n_dim - 1, deflation_tol)

    return UnitaryFactorization(dim=n_dim, phases=np.array(phases), stages=tuple(stages))


def _check_deflated(column, level, tol):
    stray = np.delete(column, level)
    deviation = float(np.linalg.norm(stray)) if stray.size else 0.0
    if deviation > tol:
        raise DeflationFailure(
            f"eigenvector {level + 1} left {deviation:.3e} outside |{level + 1}⟩ (tolerance {tol:.1e})"
        )


def transform(f: UnitaryFactorization) -> np.ndarray:
    """T = W_2 ··· W_N, stage N acting first."""
    t = np.eye(f.dim, dtype=np.complex128)
    for sc in f.stages:
        _, w = stage_operator(sc, f.dim)
        t = w @ t
    return t


def reconstruct(f: UnitaryFactorization) -> np.ndarray:
    t = transform(f)
    block = sequence_unitary(_central_block(f.phases, f.dim), f.dim)
    return adjoint(t) @ block @ t


def factorization_steps(f: UnitaryFactorization, prune=False, prune_tol=None) -> GroupedSequence:
    """
    T, the central block and T† as grouped steps: every phase block is one
    step, every Y rotation its own step. T† mirrors T with negated angles.
    """
    if prune_tol is None:
        prune_tol = pulse_setting("PULSE_PRUNE_TOL", 1e-12)

    forward = []
    for sc in f.stages:
        block, ladder = stage_rotations(sc, f.dim)
        forward.append(tuple(block))
        forward.extend((rotation,) for rotation in ladder)
    mirror = [tuple(r.inverse() for r in reversed(step)) for step in reversed(forward)]
    steps = forward + [tuple(_central_block(f.phases, f.dim))] + mirror

    if prune:
        steps = [tuple(r for r in step if abs(r.angle) >= prune_tol) for step in steps]
        steps = [step for step in steps if step]
    return GroupedSequence(
        dim=f.dim,
        steps=tuple(steps),
        kind=UNITARY_KIND,
        execution=CONCURRENT,
    )


def factorization_to_schedule(f: UnitaryFactorization, rule, prune=False, nonnegative_time=False):
    grouped = factorization_steps(f, prune=prune)
    logger.debug(f"Unitary schedule for N={f.dim}: {grouped.step_count} steps (pruned={prune})")
    return to_schedule(grouped, rule, nonnegative_time=nonnegative_time)
