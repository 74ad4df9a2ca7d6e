"""
Bang-bang state transfer between two pure states.

Both states are expressed in hyperspherical coordinates; the rotation
sequence then undoes the initial phases, collapses the initial state onto
span{|1⟩, |2⟩}, rotates within that plane, expands into the target
magnitudes and finally applies the target phases. For N levels that is
4N-5 rotations:

    Z_{n+1}(φ_n⁰)          n = N-1 … 1
    P_n(-θ_n⁰)             n = N-1 … 2
    P_1(θ_1ˢ - θ_1⁰)
    P_n(θ_nˢ)              n = 2 … N-1
    Z_{n+1}(-φ_nˢ)         n = 1 … N-1

where P is the Y channel (YZ family) or the X channel (XZ family).
"""
import logging
import math

import numpy as np

from controls.channels import TRANSFER, ChannelKind, ControlChannel, Rotation
from hypersphere.coords import basis_state, to_hyperspherical, uniform_superposition
from numerics.conf import pulse_setting
from numerics.exceptions import DimMismatch, DimensionTooSmall, WrongFamily
from numerics.linalg import as_unit_vector, wrap_phase
from simulator.propagator import fidelity

from .sequence import (
    CONCURRENT,
    CorrectionVariant,
    Family,
    GroupedSequence,
    RotationSequence,
)

logger = logging.getLogger(__name__)

HALF_PI = math.pi / 2.0


def _quarter_turns(level: int) -> float:
    """π/2·((level-1) mod 4): the phase an X ladder leaves on |level⟩."""
    return HALF_PI * ((level - 1) % 4)


def synthesize_transfer(c0, cs, family=Family.YZ, prune=False, prune_tol=None) -> RotationSequence:
    """
    Rotation sequence steering ``c0`` to ``cs`` up to a global phase.

    For the XZ family the head phase block also absorbs the quarter-turn
    phases the X ladder introduces, so the populations come out right and
    only relative phases remain for apply_x_phase_correction.
    """
    family = Family(family)
    if prune_tol is None:
        prune_tol = pulse_setting("PULSE_PRUNE_TOL", 1e-12)
    zero_tol = pulse_setting("PULSE_ZERO_TOL", 1e-12)

    c0 = as_unit_vector(c0)
    cs = as_unit_vector(cs)
    if c0.shape != cs.shape:
        raise DimMismatch(f"initial state has N={c0.shape[0]}, target has N={cs.shape[0]}")
    n_dim = c0.shape[0]
    if n_dim < 2:
        raise DimensionTooSmall(f"state transfer needs N >= 2, got {n_dim}")

    population = ChannelKind.Y if family == Family.YZ else ChannelKind.X

    def phase(level, angle):
        return Rotation(ControlChannel(ChannelKind.Z, level, n_dim).check(TRANSFER), angle)

    def pop(index, angle):
        return Rotation(ControlChannel(population, index, n_dim), angle)

    identical = 1.0 - fidelity(c0, cs) <= zero_tol
    h0 = to_hyperspherical(c0)
    hs = to_hyperspherical(cs)
    if identical:
        logger.debug("Initial and target states coincide; emitting a zero-angle sequence")
        h0 = hs = to_hyperspherical(basis_state(n_dim, 1))
    th0, ph0 = h0.theta, h0.phi
    ths, phs = hs.theta, hs.phi

    rotations = []
    for n in range(n_dim - 1, 0, -1):
        angle = ph0[n - 1]
        if family == Family.XZ and not identical and abs(c0[n]) > zero_tol:
            angle = wrap_phase(angle + _quarter_turns(n + 1))
        rotations.append(phase(n + 1, angle))
    for n in range(n_dim - 1, 1, -1):
        rotations.append(pop(n, -th0[n - 1]))
    rotations.append(pop(1, ths[0] - th0[0]))
    for n in range(2, n_dim):
        rotations.append(pop(n, ths[n - 1]))
    for n in range(1, n_dim):
        rotations.append(phase(n + 1, -phs[n - 1]))

    if prune:
        rotations = [r for r in rotations if abs(r.angle) >= prune_tol]

    logger.debug(
        f"Synthesized {family} transfer for N={n_dim}: {len(rotations)} rotations"
        f" (pruned={prune})"
    )
    return RotationSequence(
        dim=n_dim,
        rotations=tuple(rotations),
        family=family,
        initial=c0,
        target=cs,
        pruned=prune,
    )


def _merge_tail_corrections(seq: RotationSequence, corrections: dict, prune_tol: float):
    """
    Add per-level phase corrections into the trailing phase block, appending a
    new rotation where the block has no rotation for that level.
    """
    rotations = list(seq.rotations)
    tail_start = len(rotations)
    while tail_start > 0 and rotations[tail_start - 1].channel.is_phase:
        tail_start -= 1

    for level, angle in corrections.items():
        for i in range(len(rotations) - 1, tail_start - 1, -1):
            if rotations[i].channel.index == level:
                merged = wrap_phase(rotations[i].angle + angle)
                rotations[i] = Rotation(rotations[i].channel, merged)
                break
        else:
            if not seq.pruned or abs(angle) >= prune_tol:
                rotations.append(Rotation(ControlChannel(ChannelKind.Z, level, seq.dim), angle))
    return tuple(rotations)


def _residual_corrections(seq: RotationSequence, zero_tol: float) -> dict:
    """Per-level Z angles cancelling the relative phase error of the final state."""
    final = seq.apply(seq.initial)
    target = seq.target
    significant = [
        k for k in range(seq.dim) if abs(target[k]) > zero_tol and abs(final[k]) > zero_tol
    ]
    if not significant:
        return {}
    errors = {k: float(np.angle(final[k] / target[k])) for k in significant}
    reference = errors[0] if 0 in errors else errors[significant[0]]
    return {k + 1: wrap_phase(errors[k] - reference) for k in significant if k > 0}


def apply_x_phase_correction(seq: RotationSequence, fidelity_tol=None) -> RotationSequence:
    """
    Cancel the relative phases left by X-channel population rotations.

    The quarter-turn formula -π/2·((n-1) mod 4) on Z_n is tried first and
    checked by propagating the recorded initial state; if it does not reach
    the target the residual per-level phase error is cancelled directly.
    Corrections are merged into the final phase block.
    """
    if seq.family != Family.XZ:
        raise WrongFamily(f"phase correction applies to XZ sequences, got {seq.family}")
    if seq.phase_correction:
        return seq
    if fidelity_tol is None:
        fidelity_tol = pulse_setting("PULSE_FIDELITY_TOL", 1e-10)
    prune_tol = pulse_setting("PULSE_PRUNE_TOL", 1e-12)
    zero_tol = pulse_setting("PULSE_ZERO_TOL", 1e-12)

    formula = {level: -_quarter_turns(level) for level in range(2, seq.dim + 1)}
    corrected = RotationSequence(
        dim=seq.dim,
        rotations=_merge_tail_corrections(seq, formula, prune_tol),
        family=seq.family,
        initial=seq.initial,
        target=seq.target,
        pruned=seq.pruned,
        phase_correction=CorrectionVariant.FORMULA,
    )
    if seq.initial is None or seq.target is None:
        logger.debug("No recorded states; quarter-turn correction applied without validation")
        return corrected

    achieved = corrected.apply(seq.initial)
    if _phases_match(achieved, seq.target, fidelity_tol):
        return corrected

    logger.warning(
        f"Quarter-turn correction did not reach the target (N={seq.dim}); "
        "cancelling the residual phase error instead"
    )
    residual = _residual_corrections(seq, zero_tol)
    return RotationSequence(
        dim=seq.dim,
        rotations=_merge_tail_corrections(seq, residual, prune_tol),
        family=seq.family,
        initial=seq.initial,
        target=seq.target,
        pruned=seq.pruned,
        phase_correction=CorrectionVariant.RESIDUAL,
    )


def _phases_match(achieved, target, fidelity_tol) -> bool:
    return 1.0 - fidelity(achieved, target) <= fidelity_tol


def compress_concurrent(seq) -> GroupedSequence:
    """
    Group the leading and trailing runs of phase rotations into one step
    each; every population rotation stays a step of its own.
    """
    rotations = list(seq.rotations)
    head = 0
    while head < len(rotations) and rotations[head].channel.is_phase:
        head += 1
    tail = len(rotations)
    while tail > head and rotations[tail - 1].channel.is_phase:
        tail -= 1

    steps = []
    if head:
        steps.append(tuple(rotations[:head]))
    steps.extend((rotation,) for rotation in rotations[head:tail])
    if tail < len(rotations):
        steps.append(tuple(rotations[tail:]))
    return GroupedSequence(
        dim=seq.dim,
        steps=tuple(steps),
        family=seq.family,
        execution=CONCURRENT,
    )


def w_state_sequence(n_dim: int, family=Family.YZ) -> RotationSequence:
    """
    Pruned transfer from |1⟩ to the uniform superposition. The YZ family
    needs only the N-1 population rotations; the XZ family adds the final
    phase corrections.
    """
    family = Family(family)
    seq = synthesize_transfer(
        basis_state(n_dim, 1), uniform_superposition(n_dim), family=family, prune=True
    )
    if family == Family.XZ:
        seq = apply_x_phase_correction(seq)
    return seq
