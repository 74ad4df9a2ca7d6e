"""
Dense complex linear algebra shared by every other app.

Matrices and vectors are plain ``numpy`` arrays of dtype ``complex128``;
the aliases below only document intent.
"""
import logging
import math

import numpy as np
import numpy.typing as npt
import scipy.linalg

from .conf import pulse_setting
from .exceptions import DimensionTooSmall, NotUnit, NotUnitary, ShapeMismatch

logger = logging.getLogger(__name__)

ComplexMatrix = npt.NDArray[np.complex128]
ComplexVector = npt.NDArray[np.complex128]
RealVector = npt.NDArray[np.float64]

TWO_PI = 2.0 * math.pi


def as_matrix(a) -> ComplexMatrix:
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ShapeMismatch(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    return m


def as_vector(c) -> ComplexVector:
    v = np.asarray(c, dtype=np.complex128)
    if v.ndim != 1 or v.shape[0] < 1:
        raise ShapeMismatch(f"expected a non-empty 1-D vector, got shape {v.shape}")
    return v


def is_unit(c, tol=None) -> bool:
    if tol is None:
        tol = pulse_setting("PULSE_UNIT_TOL", 1e-10)
    return abs(np.linalg.norm(c) - 1.0) <= tol


def as_unit_vector(c, tol=None) -> ComplexVector:
    """Return ``c`` as a complex vector, raising NotUnit if it is not normalized."""
    v = as_vector(c)
    if not is_unit(v, tol):
        raise NotUnit(f"state norm is {np.linalg.norm(v):.3e}, expected 1")
    return v


def wrap_phase(x):
    """Reduce angles into the half-open interval (-pi, pi]."""
    y = np.mod(np.asarray(x, dtype=np.float64) + math.pi, TWO_PI) - math.pi
    y = np.where(y <= -math.pi, math.pi, y)
    if np.ndim(y) == 0:
        return float(y)
    return y


def adjoint(a) -> ComplexMatrix:
    return np.conj(np.asarray(a)).T


def unitarity_defect(u) -> float:
    """Spectral norm of U†U - I."""
    u = as_matrix(u)
    if u.shape[0] != u.shape[1]:
        return math.inf
    return float(np.linalg.norm(adjoint(u) @ u - np.eye(u.shape[0]), 2))


def operator_distance(a, b) -> float:
    """Spectral norm (largest singular value) of A - B."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.shape != b.shape:
        raise ShapeMismatch(f"cannot compare shapes {a.shape} and {b.shape}")
    if a.ndim == 1:
        return float(np.linalg.norm(a - b))
    return float(np.linalg.norm(a - b, 2))


def fix_global_phase(v, zero_tol=None) -> ComplexVector:
    """
    Rotate ``v`` so that its first component of magnitude above ``zero_tol``
    is real and positive. A vector with no such component is returned as is.
    """
    if zero_tol is None:
        zero_tol = pulse_setting("PULSE_ZERO_TOL", 1e-12)
    v = np.array(v, dtype=np.complex128)
    significant = np.flatnonzero(np.abs(v) > zero_tol)
    if significant.size:
        lead = v[significant[0]]
        v *= np.conj(lead) / abs(lead)
    return v


def _phase_clusters(phases, tol):
    """Group sorted phases whose neighbours lie within ``tol`` (cyclically)."""
    clusters = [[0]]
    for j in range(1, len(phases)):
        if phases[j] - phases[j - 1] <= tol:
            clusters[-1].append(j)
        else:
            clusters.append([j])
    if len(clusters) > 1 and phases[0] + TWO_PI - phases[-1] <= tol:
        clusters[0] = clusters.pop() + clusters[0]
    return clusters


def eig_unitary(u, cluster_tol=None):
    """
    Eigendecomposition of a unitary matrix.

    Uses the complex Schur form, which is diagonal for normal matrices, so
    the eigenvectors come out orthonormal even for repeated eigenvalues.

    Returns:
        (phases, vectors): phases sorted ascending in (-pi, pi] and the
        matching orthonormal eigenvectors as columns, each with its first
        non-negligible component real and positive.
    """
    u = as_matrix(u)
    unitary_tol = pulse_setting("PULSE_UNITARY_TOL", 1e-10)
    if cluster_tol is None:
        cluster_tol = pulse_setting("PULSE_CLUSTER_TOL", 1e-8)

    defect = unitarity_defect(u)
    if defect > unitary_tol:
        raise NotUnitary(f"||U†U - I|| = {defect:.3e} exceeds {unitary_tol:.1e}")

    schur_form, basis = scipy.linalg.schur(u, output="complex")
    phases = wrap_phase(np.angle(np.diag(schur_form)))
    phases = np.atleast_1d(phases)
    order = np.argsort(phases, kind="stable")
    phases = phases[order]
    vectors = np.array(basis[:, order], dtype=np.complex128)

    for cluster in _phase_clusters(phases, cluster_tol):
        if len(cluster) > 1:
            logger.debug(f"Re-orthonormalizing eigenphase cluster of size {len(cluster)}")
            q, _ = scipy.linalg.qr(vectors[:, cluster], mode="economic")
            vectors[:, cluster] = q

    for j in range(vectors.shape[1]):
        vectors[:, j] = fix_global_phase(vectors[:, j])

    return phases, vectors


def spectral_sum(phases, vectors) -> ComplexMatrix:
    """Rebuild Σ_j exp(i·phase_j) |v_j⟩⟨v_j|."""
    vectors = as_matrix(vectors)
    return (vectors * np.exp(1j * np.asarray(phases))) @ adjoint(vectors)


def random_unitary(n: int, seed: int) -> ComplexMatrix:
    """Seeded Haar-distributed unitary from the QR factorization of a Ginibre matrix."""
    if n < 1:
        raise DimensionTooSmall(f"unitary dimension must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2.0)
    q, r = scipy.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_unit_vector(n: int, rng: np.random.Generator) -> ComplexVector:
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return v / np.linalg.norm(v)
