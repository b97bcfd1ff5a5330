"""Scalar estimates from circuits: exact readout, shot sampling, and
maximum-likelihood amplitude estimation over Grover powers.

The MLAE estimator measures Q^p U |0> for a geometric power schedule,
where Q = U R0 U^dag R0 and R0 flips the phase of the all-zeros state;
the all-zeros probability at power p is sin^2((2p+1) theta) with
sin(theta) = |<0|U|0>|.  The joint likelihood over all powers is
maximized on a fixed grid of amplitude values.  Total U-applications are
counted as shots * (2p+1) summed over the schedule and stay below
c * eps^-1 * ln(2/delta) with c = 41 (see estimate_amplitude_mlae).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .moments import build_moment_circuit, encoding_error_bound
from .qsim import Circuit, PhaseOracle, measure_shots, run
from .sampler import SamplerConfig

__all__ = [
    "EstimationError",
    "EstimationConfig",
    "ExactMode",
    "ShotsMode",
    "MlaeMode",
    "MomentRequest",
    "MomentEstimate",
    "MlaeResult",
    "hoeffding_exponent",
    "exact_amplitude",
    "estimate_amplitude_shots",
    "estimate_amplitude_mlae",
    "estimate_moment",
    "REPORT_CSV_HEADER",
]

REPORT_CSV_HEADER = "mode,s,m,m_theta,shots,queries,estimate,bound,seed"

_IMAG_TOL = 1e-9


class EstimationError(RuntimeError):
    pass


@dataclass(frozen=True)
class ExactMode:
    name: str = "exact"


@dataclass(frozen=True)
class ShotsMode:
    shots: int
    seed: int
    name: str = "shots"

    def __post_init__(self):
        if self.shots < 1:
            raise ValueError("shot count must be >= 1")


@dataclass(frozen=True)
class MlaeMode:
    shots_per_power: int | None = None
    seed: int = 0
    powers: tuple[int, ...] | None = None
    name: str = "mlae"


@dataclass(frozen=True)
class EstimationConfig:
    epsilon: float
    delta: float
    mode: ExactMode | ShotsMode | MlaeMode = field(default_factory=ExactMode)

    def __post_init__(self):
        if not (0 < self.epsilon < 1):
            raise ValueError("epsilon must lie in (0, 1)")
        if not (0 < self.delta < 1):
            raise ValueError("delta must lie in (0, 1)")


@dataclass(frozen=True)
class MomentRequest:
    """An order-s mixed moment of the weighted field values."""

    weights: tuple
    sampler: SamplerConfig
    sample_exponent: int

    @property
    def order(self) -> int:
        return len(self.weights)

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("moment order must be >= 1")
        if self.sample_exponent < 0:
            raise ValueError("sample exponent must be >= 0")


@dataclass(frozen=True)
class MomentEstimate:
    mode: str
    order: int
    sample_exponent: int
    angle_width: int
    shots: int
    queries: int
    estimate: float
    bound: float
    seed: int

    def csv_row(self) -> str:
        return (
            f"{self.mode},{self.order},{self.sample_exponent},{self.angle_width},"
            f"{self.shots},{self.queries},{self.estimate!r},{self.bound!r},{self.seed}"
        )


def hoeffding_exponent(epsilon: float, delta: float) -> int:
    """Smallest m with 2^m >= max(1, ceil(eps^-2 ln(2/delta))) samples.

    That sample count makes the mean of [-1, 1]-bounded variables accurate
    to eps with probability 1 - delta.
    """
    if not (0 < epsilon <= 1) or not (0 < delta < 1):
        raise ValueError("epsilon must lie in (0, 1] and delta in (0, 1)")
    need = max(1, math.ceil(epsilon**-2 * math.log(2.0 / delta)))
    return max(0, (need - 1).bit_length())


def exact_amplitude(circuit: Circuit) -> tuple[float, float]:
    """Signed all-zeros amplitude of circuit|0...0> and its magnitude.

    Every constructed circuit has a real all-zeros amplitude; a residual
    imaginary part above 1e-9 indicates a construction bug.
    """
    state = run(circuit)
    amp = complex(state.amplitudes[0])
    if abs(amp.imag) > _IMAG_TOL:
        raise EstimationError(f"all-zeros amplitude {amp!r} is not real")
    return amp.real, abs(amp.real)


def estimate_amplitude_shots(circuit: Circuit, shots: int, seed: int) -> float:
    """sqrt of the all-zeros outcome frequency; estimates |<0|U|0>|."""
    state = run(circuit)
    hist = measure_shots(state, [range(circuit.n_qubits)], shots, seed)
    zeros = hist.get((0,), 0)
    return math.sqrt(zeros / shots)


def _grover_gates(circuit: Circuit) -> list:
    flip = PhaseOracle(
        np.arange(1 << circuit.n_qubits) == 0, tuple(range(circuit.n_qubits))
    )
    inv = circuit.inverse()
    return [flip] + inv.gates + [flip] + circuit.gates


def _power_schedule(epsilon: float) -> tuple[int, ...]:
    top = 1
    while top < 1.0 / (4.0 * epsilon):
        top *= 2
    powers = [0]
    p = 1
    while p <= top:
        powers.append(p)
        p *= 2
    return tuple(powers)


@dataclass(frozen=True)
class MlaeResult:
    estimate: float
    queries: int
    powers: tuple[int, ...]
    shots_per_power: int
    counts: tuple[int, ...]
    likelihood_width: float


def _mlae_counts(circuit: Circuit, powers, shots: int, seed: int) -> list[int]:
    grover = _grover_gates(circuit)
    counts = []
    for i, p in enumerate(powers):
        amplified = Circuit(dict(circuit.registers), [], circuit.n_qubits)
        amplified.gates = list(circuit.gates) + grover * p
        state = run(amplified)
        hist = measure_shots(state, [range(circuit.n_qubits)], shots, [seed, i, p])
        counts.append(hist.get((0,), 0))
    return counts


def _grid_mle(powers, counts, shots: int, resolution: float):
    lam = np.arange(0.0, 1.0 + resolution, resolution)
    lam = np.minimum(lam, 1.0)
    theta = np.arcsin(lam)
    log_l = np.zeros_like(lam)
    tiny = 1e-300
    for p, h in zip(powers, counts):
        good = np.sin((2 * p + 1) * theta) ** 2
        log_l += h * np.log(good + tiny) + (shots - h) * np.log(1.0 - good + tiny)
    best = int(np.argmax(log_l))
    within = log_l >= log_l[best] - 0.5
    width = float(within.sum() * resolution)
    return float(lam[best]), width


def estimate_amplitude_mlae(circuit: Circuit, config: EstimationConfig) -> MlaeResult:
    """Maximum-likelihood amplitude estimation over a geometric power schedule.

    Defaults: top power is the smallest power of two >= 1/(4 eps), and each
    power gets ceil(10 ln(2/delta)) shots.  The query count is then at most
        shots * (4 * top + log2(top) + 2) <= 41 * eps^-1 * ln(2/delta),
    linear in 1/eps as required.  If the top-power counts are degenerate
    (all zeros or all ones while the fitted amplitude predicts an interior
    probability), the schedule is widened by one more power and retried
    once before giving up.
    """
    mode = config.mode if isinstance(config.mode, MlaeMode) else MlaeMode()
    powers = mode.powers or _power_schedule(config.epsilon)
    shots = mode.shots_per_power or math.ceil(10 * math.log(2.0 / config.delta))
    resolution = config.epsilon / 10.0

    for attempt in range(2):
        counts = _mlae_counts(circuit, powers, shots, mode.seed)
        estimate, width = _grid_mle(powers, counts, shots, resolution)
        top_count = counts[-1]
        predicted = math.sin((2 * powers[-1] + 1) * math.asin(estimate)) ** 2
        degenerate = top_count in (0, shots) and 0.02 < predicted < 0.98
        if not degenerate:
            queries = shots * sum(2 * p + 1 for p in powers)
            return MlaeResult(estimate, queries, tuple(powers), shots,
                              tuple(counts), width)
        powers = tuple(powers) + (2 * powers[-1] if powers[-1] else 1,)
    raise EstimationError(
        f"degenerate top-power counts persist after widening (counts={counts})"
    )


def estimate_moment(request: MomentRequest, config: EstimationConfig,
                    allow_small_m: bool = False) -> MomentEstimate:
    """Estimate |E[lambda_1 ... lambda_s]| with an explicit error bound.

    The reported bound combines the Hoeffding term of the 2^m pseudo-sample
    mean, the fixed-point encoding term s pi 2^-w, and the estimator's own
    tolerance.  The sample exponent must satisfy the Hoeffding sizing for
    (epsilon, delta) unless allow_small_m is set.
    """
    m = request.sample_exponent
    needed = hoeffding_exponent(config.epsilon, config.delta)
    if m < needed and not allow_small_m:
        raise ValueError(
            f"sample exponent {m} below the Hoeffding requirement {needed}; "
            "pass allow_small_m=True to override"
        )
    base = request.sampler
    if base.sample_exponent != m:
        base = SamplerConfig(
            base.points, base.transformation, base.kernel, base.grid,
            base.pcg_params, base.master_seed, m, base.angle_width, base.clt_bits,
        )
    configs = [base] * request.order
    circuit = build_moment_circuit(configs, list(request.weights))

    stat = math.sqrt(math.log(2.0 / config.delta) / (1 << m))
    encoding = encoding_error_bound(request.order, base.angle_width)

    mode = config.mode
    if isinstance(mode, ExactMode):
        _, mag = exact_amplitude(circuit)
        return MomentEstimate("exact", request.order, m, base.angle_width,
                              0, 1, mag, stat + encoding, 0)
    if isinstance(mode, ShotsMode):
        est = estimate_amplitude_shots(circuit, mode.shots, mode.seed)
        spread = math.sqrt(max(est**2 * (1 - est**2), 1.0 / mode.shots) / mode.shots)
        est_tol = 3.0 * spread / (2.0 * max(est, 1.0 / math.sqrt(mode.shots)))
        return MomentEstimate("shots", request.order, m, base.angle_width,
                              mode.shots, mode.shots, est,
                              stat + encoding + est_tol, mode.seed)
    result = estimate_amplitude_mlae(circuit, config)
    return MomentEstimate("mlae", request.order, m, base.angle_width,
                          result.shots_per_power, result.queries,
                          result.estimate, stat + encoding + config.epsilon,
                          mode.seed)
