"""
Complex hyperspherical coordinates of unit vectors.

A unit vector c in C^N is written, up to a global phase, as

    c_1 = cos θ_1
    c_n = e^{iφ_{n-1}} sin θ_1 … sin θ_{n-1} cos θ_n      (1 < n < N)
    c_N = e^{iφ_{N-1}} sin θ_1 … sin θ_{N-1}

with 0 ≤ θ_n ≤ π/2 and -π < φ_n ≤ π. The global phase is not stored.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from numerics.conf import pulse_setting
from numerics.exceptions import DimensionTooSmall, NotUnit
from numerics.linalg import as_vector, wrap_phase

logger = logging.getLogger(__name__)

HALF_PI = math.pi / 2.0


@dataclass(frozen=True)
class HypersphericalCoords:
    theta: np.ndarray
    phi: np.ndarray

    def __post_init__(self):
        theta = np.array(self.theta, dtype=np.float64).ravel()
        phi = np.array(self.phi, dtype=np.float64).ravel()
        if theta.shape != phi.shape or theta.size < 1:
            raise DimensionTooSmall(
                f"theta and phi must both have length N-1 >= 1, got {theta.size} and {phi.size}"
            )
        theta.setflags(write=False)
        phi.setflags(write=False)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", phi)

    @property
    def dim(self) -> int:
        return self.theta.size + 1

    def format(self, places: int = 6) -> tuple[str, str]:
        """The CLI rendering: two comma-separated radian lists."""
        return (
            ",".join(f"{x:.{places}f}" for x in self.theta),
            ",".join(f"{x:.{places}f}" for x in self.phi),
        )


def to_hyperspherical(c, zero_tol=None) -> HypersphericalCoords:
    """
    Hyperspherical coordinates of a complex vector.

    The input is renormalized and its first component rotated onto the
    non-negative real axis. Once the running sine product drops below
    ``zero_tol`` every remaining amplitude is zero and the remaining angles
    are set to 0.
    """
    if zero_tol is None:
        zero_tol = pulse_setting("PULSE_ZERO_TOL", 1e-12)
    c = as_vector(c)
    n_dim = c.shape[0]
    if n_dim < 2:
        raise DimensionTooSmall(f"hyperspherical coordinates need N >= 2, got {n_dim}")
    norm = np.linalg.norm(c)
    if norm == 0.0:
        raise NotUnit("cannot parametrize the zero vector")

    c = c / norm
    c = np.exp(-1j * np.angle(c[0])) * c
    phi = np.array(wrap_phase(np.angle(c[1:])), dtype=np.float64)
    a = np.abs(c)

    # tail[k] = ||a[k:]|| is the running sine product s_k; arccos(a_k / s_k)
    # is evaluated as atan2(s_{k+1}, a_k), which stays accurate near 0 and π/2.
    tail = np.sqrt(np.cumsum((a ** 2)[::-1])[::-1])
    theta = np.zeros(n_dim - 1)
    for k in range(n_dim - 1):
        if k > 0 and tail[k] < zero_tol:
            theta[k:] = 0.0
            phi[k - 1:] = 0.0
            break
        theta[k] = math.atan2(tail[k + 1], a[k])
    else:
        if tail[-1] < zero_tol:
            phi[-1] = 0.0

    return HypersphericalCoords(theta=np.clip(theta, 0.0, HALF_PI), phi=phi)


def from_hyperspherical(h: HypersphericalCoords) -> np.ndarray:
    """Unit vector of the coordinates, first component real and non-negative."""
    n_dim = h.dim
    c = np.empty(n_dim, dtype=np.complex128)
    s = 1.0
    c[0] = math.cos(h.theta[0])
    for n in range(1, n_dim):
        s *= math.sin(h.theta[n - 1])
        radial = s * math.cos(h.theta[n]) if n < n_dim - 1 else s
        c[n] = np.exp(1j * h.phi[n - 1]) * radial
    return c


def basis_state(n_dim: int, level: int) -> np.ndarray:
    """|level⟩ for 1-based ``level``."""
    c = np.zeros(n_dim, dtype=np.complex128)
    c[level - 1] = 1.0
    return c


def uniform_superposition(n_dim: int) -> np.ndarray:
    """The W-state amplitudes: every level weighted 1/sqrt(N)."""
    return np.full(n_dim, 1.0 / math.sqrt(n_dim), dtype=np.complex128)
