"""
Time-energy performance index of bang-bang schedules.

    J = λ·t_f + E,    E = Σ_steps (Σ_pulses L²)·t

For a sequence of rotations run one at a time at a common amplitude L,
J(L) = Σ|γ_k|·(λ/L + L), minimized at L = √λ where J = 2λ·t_f and the
product t_f·E = (Σ|γ_k|)² no longer depends on λ.
"""
import logging
import math
from dataclasses import asdict, dataclass

from numerics.exceptions import NonpositiveAmplitude, NonpositiveLambda
from transfer.schedule import Schedule, TimeEnergyOptimal, UniformL, to_schedule
from transfer.sequence import CONCURRENT, sequential_steps
from transfer.synthesis import compress_concurrent

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TimeEnergyReport:
    lam: float
    t_f: float
    energy: float
    J: float
    t_f_bound: float
    J_bound: float
    E_bound: float
    product: float
    product_bound: float

    def as_dict(self) -> dict:
        data = asdict(self)
        data["lambda"] = data.pop("lam")
        data["E"] = data.pop("energy")
        return data

    def lines(self) -> list[str]:
        """Aligned ``key  value`` rows for terminal output."""
        data = self.as_dict()
        order = ["lambda", "t_f", "t_f_bound", "E", "E_bound", "J", "J_bound", "product", "product_bound"]
        width = max(len(key) for key in order)
        return [f"{key:<{width}}  {data[key]:.12g}" for key in order]


def _check_lambda(lam) -> float:
    lam = float(lam)
    if not lam > 0:
        raise NonpositiveLambda(f"lambda must be positive, got {lam}")
    return lam


def _check_amplitude(amplitude) -> float:
    amplitude = float(amplitude)
    if not amplitude > 0:
        raise NonpositiveAmplitude(f"amplitude must be positive, got {amplitude}")
    return amplitude


def optimal_amplitude(lam) -> float:
    """The amplitude √λ minimizing J for every rotation."""
    return math.sqrt(_check_lambda(lam))


def sequential_time_bound(n_dim: int, amplitude: float) -> float:
    return (6 * n_dim - 7) * math.pi / (2.0 * amplitude)


def concurrent_time_bound(n_dim: int, amplitude: float) -> float:
    return (2 * n_dim + 3) * math.pi / (2.0 * amplitude)


def unitary_time_bound(n_dim: int, amplitude: float) -> float:
    """
    Longest duration of a signed-amplitude unitary schedule. Each of the
    N-1 stages runs its phase block as one step of at most π and k-1 Y
    rotations of at most π/2; the stages run forward and mirrored around
    one central phase step of at most π.
    """
    return (n_dim * (n_dim - 1) / 2 + 2 * n_dim - 1) * math.pi / amplitude


def unitary_angle_bound(n_dim: int) -> float:
    """Largest Σ|γ| of a factored unitary: N(N-1) Y angles ≤ π/2, N(N-1) + N phases ≤ π."""
    return (3 * n_dim * (n_dim - 1) / 2 + n_dim) * math.pi


def product_bound(n_dim: int) -> float:
    return (6 * n_dim - 7) ** 2 * math.pi ** 2 / 4.0


def _bounds(schedule: Schedule, amplitude: float) -> tuple[float, float]:
    """(t_f bound, E bound) for the schedule's dimension, kind and execution."""
    n_dim = schedule.dim
    if schedule.meta.get("kind") == "unitary":
        return unitary_time_bound(n_dim, amplitude), amplitude * unitary_angle_bound(n_dim)
    if schedule.meta.get("execution") == CONCURRENT:
        t_bound = concurrent_time_bound(n_dim, amplitude)
    else:
        t_bound = sequential_time_bound(n_dim, amplitude)
    return t_bound, amplitude * (6 * n_dim - 7) * math.pi / 2.0


def evaluate_cost(schedule: Schedule, lam) -> TimeEnergyReport:
    lam = _check_lambda(lam)
    t_f = 0.0
    energy = 0.0
    for step in schedule.steps:
        duration = schedule.step_duration(step)
        t_f += duration
        energy += math.fsum(pulse.amplitude ** 2 for pulse in step) * duration

    amplitude = schedule.amplitude
    if amplitude > 0:
        t_bound, e_bound = _bounds(schedule, amplitude)
    else:
        t_bound = e_bound = 0.0

    report = TimeEnergyReport(
        lam=lam,
        t_f=t_f,
        energy=energy,
        J=lam * t_f + energy,
        t_f_bound=t_bound,
        J_bound=lam * t_bound + e_bound,
        E_bound=e_bound,
        product=t_f * energy,
        product_bound=t_bound * e_bound,
    )
    logger.debug(f"Cost of N={schedule.dim} schedule at lambda={lam}: J={report.J:.6g}")
    return report


def sequential_time(seq, amplitude) -> float:
    """Duration of the sequence run one rotation at a time at amplitude L."""
    return seq.total_angle / _check_amplitude(amplitude)


def concurrent_time(seq, amplitude) -> float:
    """Duration when the leading and trailing phase blocks each run as one step."""
    amplitude = _check_amplitude(amplitude)
    grouped = compress_concurrent(seq)
    return math.fsum(max(abs(r.angle) for r in step) for step in grouped.steps) / amplitude


def time_energy_product(seq) -> float:
    """t_f·E at the optimal amplitude; independent of λ."""
    return seq.total_angle ** 2


def sequential_cost(seq, lam) -> TimeEnergyReport:
    schedule = to_schedule(sequential_steps(seq), TimeEnergyOptimal(lam))
    return evaluate_cost(schedule, lam)


def concurrent_cost(seq, lam) -> TimeEnergyReport:
    """
    Cost of the compressed sequence at amplitude √λ. Each phase block runs
    for t = max|φ_n|/√λ with amplitudes φ_n/t, so no block pulse is
    stronger than it needs to be; empty blocks take no time.
    """
    schedule = to_schedule(compress_concurrent(seq), TimeEnergyOptimal(lam))
    return evaluate_cost(schedule, lam)


def scan_amplitudes(seq, lam, amplitudes) -> list[tuple[float, float]]:
    """J(L) of the sequentially executed sequence for each amplitude on a grid."""
    lam = _check_lambda(lam)
    grouped = sequential_steps(seq)
    scan = []
    for amplitude in amplitudes:
        report = evaluate_cost(to_schedule(grouped, UniformL(amplitude)), lam)
        scan.append((float(amplitude), report.J))
    return scan
