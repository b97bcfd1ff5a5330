"""Amplitude encoding: diagonal scaling of basis states by a classical function.

For a classical C: [n] -> [-1, 1] the encoder acts as
    |0>_flag |0>_angle |j>  ->  C~(j) |0>|0>|j> + sqrt(1 - C~(j)^2) |1>|0>|j>
where C~(j) = cos(pi * theta(j) / 2^w) and theta(j) = floor(2^w * arccos(C(j)) / pi)
is written to (and uncomputed from) the angle register by an XOR oracle.
The per-index error satisfies |C~(j) - C(j)| <= pi * 2^(-w).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qsim import Circuit, Controlled, FunctionOracle, RotationY, max_qubits

__all__ = [
    "AngleRegisterSpec",
    "angle_width_for",
    "theta_table",
    "encoded_value",
    "encoder_gates",
    "build_amplitude_encoder",
]


@dataclass(frozen=True)
class AngleRegisterSpec:
    """Width of the fixed-point angle register."""

    width: int

    def __post_init__(self):
        if not (2 <= self.width <= 16):
            raise ValueError("angle register width must lie in [2, 16]")


def angle_width_for(epsilon: float) -> int:
    """Smallest angle-register width guaranteeing encoding error <= epsilon.

    Returns ceil(log2(pi / (1 - cos(epsilon)))).
    """
    if not (0 < epsilon < 1):
        raise ValueError("epsilon must lie in (0, 1)")
    return math.ceil(math.log2(math.pi / (1 - math.cos(epsilon))))


def theta_table(values: np.ndarray, angle_width: int) -> np.ndarray:
    """Fixed-point angles floor(2^w * arccos(v) / pi) for v in [-1, 1].

    Values are clamped to [-1, 1] to absorb 1-ulp overshoot of the
    transformation; the angle is clamped to 2^w - 1 so that v = -1 stays
    representable (the induced error is below the encoder bound).
    """
    spec = AngleRegisterSpec(angle_width)
    values = np.asarray(values, float)
    if np.any(np.abs(values) > 1.0 + 1e-9):
        bad = values[np.abs(values) > 1.0 + 1e-9][0]
        raise ValueError(f"encoded values must lie in [-1, 1]; got {bad!r}")
    clipped = np.clip(values, -1.0, 1.0)
    scale = 1 << spec.width
    theta = np.floor(scale * np.arccos(clipped) / np.pi).astype(np.int64)
    return np.minimum(theta, scale - 1)


def encoded_value(theta: np.ndarray, angle_width: int) -> np.ndarray:
    """The amplitude cos(pi * theta / 2^w) realized for a fixed-point angle."""
    return np.cos(np.pi * np.asarray(theta, float) / (1 << angle_width))


def encoder_gates(theta: np.ndarray, flag: int, angle_qubits: tuple[int, ...],
                  input_qubits: tuple[int, ...]) -> list:
    """Gate sequence of one diagonal-scaling block at explicit qubit positions.

    oracle (write theta), one controlled RY per angle bit, oracle (uncompute).
    """
    width = len(angle_qubits)
    oracle = FunctionOracle(theta, input_qubits, angle_qubits)
    gates: list = [oracle]
    for t, q in enumerate(angle_qubits):
        angle = 2.0 ** (-width + 1 + t) * math.pi
        gates.append(Controlled(RotationY(angle, flag), ((q, True),)))
    gates.append(oracle)
    return gates


def build_amplitude_encoder(values, angle_width: int) -> Circuit:
    """Encoder circuit over registers (flag: 1, angle: w, index: log2 n).

    ``values`` is the table of C over [n]; n must be a power of two.
    """
    values = np.asarray(values, float)
    n = values.size
    if n < 1 or n & (n - 1):
        raise ValueError("the number of encoded values must be a power of two")
    index_width = n.bit_length() - 1
    total = 1 + angle_width + index_width
    if total > max_qubits():
        raise ValueError(f"{total} qubits exceeds the simulator cap")
    theta = theta_table(values, angle_width)
    circuit = Circuit()
    flag = circuit.add_register("flag", 1)[0]
    angle_qs = tuple(circuit.add_register("angle", angle_width))
    index_qs = tuple(circuit.add_register("index", index_width))
    circuit.extend(encoder_gates(theta, flag, angle_qs, index_qs))
    return circuit
