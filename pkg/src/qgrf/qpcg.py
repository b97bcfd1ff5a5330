"""Gate-level circuit of one PCG step.

Applied to a basis seed |s>|0>, the circuit leaves |next_state>|word> where
``next_state`` is the advanced LCG state and ``word`` is its output
permutation -- bit-exactly the classical ``pcg_word(params, s, 1)``.  The
modular affine step is a basis permutation; the xorshift extraction is
CNOTs; the data-dependent rotation is a cascade of Fredkin gates built
from CNOT + Toffoli.
"""

from __future__ import annotations

import numpy as np

from .prng import PcgParams
from .qsim import BasisPermutation, Circuit, Controlled, PauliX

__all__ = ["build_quantum_pcg"]

_MAX_STATE_BITS = 8


def _cnot(control: int, target: int) -> Controlled:
    return Controlled(PauliX(target), ((control, True),))


def _fredkin(control: int, a: int, b: int) -> list:
    """Controlled swap of qubits a and b."""
    return [
        _cnot(b, a),
        Controlled(PauliX(b), ((control, True), (a, True))),
        _cnot(b, a),
    ]


def build_quantum_pcg(params: PcgParams) -> Circuit:
    """Circuit computing |s>|0> -> |A(s)>|permute(A(s))> for the affine map A."""
    m = params.state_bits
    if m > _MAX_STATE_BITS:
        raise ValueError(f"quantum PCG supports at most {_MAX_STATE_BITS} state bits")
    w = params.output_bits
    circuit = Circuit()
    state_qs = tuple(circuit.add_register("state", m))
    word_qs = tuple(circuit.add_register("word", w))

    mod = params.modulus
    affine = (params.multiplier * np.arange(mod, dtype=np.int64) + params.increment) % mod
    circuit.append(BasisPermutation(affine, state_qs))

    # untied word bits: word_i = u_i XOR u_{i + xorshift}
    for i in range(w):
        circuit.append(_cnot(state_qs[i], word_qs[i]))
        src = i + params.xorshift
        if src < m:
            circuit.append(_cnot(state_qs[src], word_qs[i]))

    # rotate the word right by one position when the state's top bit is set
    top = state_qs[m - 1]
    for i in range(w - 1):
        circuit.extend(_fredkin(top, word_qs[i], word_qs[i + 1]))
    return circuit
