"""Linear quantities of interest and their preparation circuits.

A quantity of interest is a weighted sum sum_j q_j Z(x_j) with |q|_1 = 1.
Preparation splits q into magnitudes and signs: a rotation tree prepares
amplitudes sqrt(|q_j|), and a separate phase oracle flips the negative-
weight indices.
"""

from __future__ import annotations

import math

import numpy as np

from .qsim import Circuit, Controlled, Hadamard, PhaseOracle, RotationY

__all__ = [
    "QoiWeights",
    "state_prep_gates",
    "phase_flip_gate",
    "build_state_prep",
    "build_phase_flip",
]

_L1_TOL = 1e-12


class QoiWeights:
    """Weight vector with |q|_1 = 1, zero-padded to a power of two."""

    def __init__(self, weights):
        q = np.asarray(weights, float)
        if q.ndim != 1 or q.size == 0:
            raise ValueError("weights must be a non-empty vector")
        l1 = float(np.abs(q).sum())
        if abs(l1 - 1.0) > _L1_TOL:
            raise ValueError(f"|q|_1 = {l1!r} must equal 1 within {_L1_TOL}")
        padded = 1 << max(0, int(q.size - 1).bit_length())
        self.weights = np.zeros(padded)
        self.weights[: q.size] = q
        self.magnitudes = np.abs(self.weights)
        self.signs = np.where(self.weights < 0, -1, 1).astype(np.int64)

    @property
    def size(self) -> int:
        return self.weights.size

    @property
    def index_width(self) -> int:
        return self.size.bit_length() - 1

    @classmethod
    def uniform(cls, n: int) -> "QoiWeights":
        return cls(np.full(n, 1.0 / n))

    @classmethod
    def point_mass(cls, n: int, j: int) -> "QoiWeights":
        q = np.zeros(n)
        q[j] = 1.0
        return cls(q)


def _tree_angles(mags: np.ndarray) -> list[tuple[int, int, float]]:
    """(level, prefix, angle) for each rotation-tree node with weight > 0.

    Level 0 splits on the most significant index bit; ``prefix`` holds the
    already-fixed high bits.  Zero-weight subtrees get angle 0 and are
    dropped.
    """
    width = mags.size.bit_length() - 1
    out = []
    for level in range(width):
        block = mags.size >> level
        for prefix in range(1 << level):
            node = mags[prefix * block : (prefix + 1) * block]
            total = node.sum()
            if total <= 0.0:
                continue
            p0 = node[: block // 2].sum() / total
            angle = 2.0 * math.acos(min(1.0, math.sqrt(p0)))
            out.append((level, prefix, angle))
    return out


def state_prep_gates(q: QoiWeights, index_qubits: tuple[int, ...]) -> list:
    """Rotation-tree gates preparing amplitudes sqrt(|q_j|) on the register.

    Uniform full-support weights reduce to a plain Hadamard layer.
    """
    width = len(index_qubits)
    if q.index_width != width:
        raise ValueError("weight vector size does not match the index register")
    if width == 0:
        return []
    if np.allclose(q.magnitudes, 1.0 / q.size, atol=1e-15):
        return [Hadamard(t) for t in index_qubits]
    gates: list = []
    for level, prefix, angle in _tree_angles(q.magnitudes):
        if angle == 0.0:
            continue
        target = index_qubits[width - 1 - level]
        rot = RotationY(angle, target)
        if level == 0:
            gates.append(rot)
        else:
            # controls are the already-decided high bits; prefix bit 0 is the msb
            controls = tuple(
                (index_qubits[width - 1 - b], bool((prefix >> (level - 1 - b)) & 1))
                for b in range(level)
            )
            gates.append(Controlled(rot, controls))
    return gates


def phase_flip_gate(q: QoiWeights, index_qubits: tuple[int, ...]) -> PhaseOracle | None:
    """Phase oracle |j> -> sign(q_j)|j>; None when every sign is positive."""
    if q.index_width != len(index_qubits):
        raise ValueError("weight vector size does not match the index register")
    flags = q.signs < 0
    if not flags.any():
        return None
    return PhaseOracle(flags, index_qubits)


def build_state_prep(q: QoiWeights) -> Circuit:
    circuit = Circuit()
    index_qs = tuple(circuit.add_register("index", q.index_width))
    circuit.extend(state_prep_gates(q, index_qs))
    return circuit


def build_phase_flip(q: QoiWeights) -> Circuit:
    circuit = Circuit()
    index_qs = tuple(circuit.add_register("index", q.index_width))
    gate = phase_flip_gate(q, index_qs)
    if gate is not None:
        circuit.append(gate)
    return circuit
