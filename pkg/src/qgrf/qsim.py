"""Dense statevector simulator.

Qubit t corresponds to bit t of the basis index (little endian), so the
basis state |5> on three qubits sits at amplitude index 5.  The gate set
is exactly what the circuit constructors need: H, X, Z, RY, controlled
single-qubit gates, basis permutations, XOR function oracles, and phase
oracles.  Oracles are evaluated per basis state at application time from
precomputed tables.

A StateVector has a single owner; distinct states may be processed
concurrently but one state must not be mutated from several threads.
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "MAX_QUBITS_ENV",
    "max_qubits",
    "StateVector",
    "Hadamard",
    "PauliX",
    "PauliZ",
    "RotationY",
    "Controlled",
    "BasisPermutation",
    "FunctionOracle",
    "PhaseOracle",
    "Circuit",
    "run",
    "amplitude",
    "measure_shots",
    "inverse",
    "SimulationError",
]

MAX_QUBITS_ENV = "QGRF_MAX_QUBITS"
_DEFAULT_MAX_QUBITS = 26
_NORM_TOL = 1e-10
_NORM_ABORT = 1e-8


class SimulationError(RuntimeError):
    pass


def max_qubits() -> int:
    """Simulator qubit cap; override with the QGRF_MAX_QUBITS variable."""
    raw = os.environ.get(MAX_QUBITS_ENV)
    if raw is None:
        return _DEFAULT_MAX_QUBITS
    value = int(raw)
    if value < 1:
        raise ValueError(f"{MAX_QUBITS_ENV} must be >= 1")
    return value


class StateVector:
    """2^n complex amplitudes with unit norm."""

    def __init__(self, amplitudes: np.ndarray):
        amps = np.asarray(amplitudes, complex)
        n = int(amps.size - 1).bit_length()
        if amps.size != 1 << n or amps.size < 1:
            raise ValueError("amplitude count must be a power of two")
        if n > max_qubits():
            raise ValueError(f"{n} qubits exceeds the cap of {max_qubits()}")
        nrm = np.linalg.norm(amps)
        if abs(nrm - 1.0) > _NORM_TOL:
            raise ValueError(f"state norm {nrm!r} is not 1 within {_NORM_TOL}")
        self.amplitudes = amps
        self.n_qubits = n

    @classmethod
    def zero(cls, n_qubits: int) -> "StateVector":
        return cls.basis(n_qubits, 0)

    @classmethod
    def basis(cls, n_qubits: int, index: int) -> "StateVector":
        if n_qubits > max_qubits():
            raise ValueError(f"{n_qubits} qubits exceeds the cap of {max_qubits()}")
        if not (0 <= index < 1 << n_qubits):
            raise ValueError("basis index out of range")
        amps = np.zeros(1 << n_qubits, complex)
        amps[index] = 1.0
        return cls(amps)

    def copy(self) -> "StateVector":
        return StateVector(self.amplitudes.copy())


def amplitude(state: StateVector, basis_index: int) -> complex:
    """The stored amplitude of one computational basis state."""
    if not (0 <= basis_index < state.amplitudes.size):
        raise ValueError("basis index out of range")
    return complex(state.amplitudes[basis_index])


def _table_hash(arr: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(arr).tobytes()).hexdigest()[:12]


def _extract(idx: np.ndarray, qubits: tuple[int, ...]) -> np.ndarray:
    """Pack the listed qubits' bits of each basis index into small integers."""
    out = np.zeros_like(idx)
    for pos, q in enumerate(qubits):
        out |= ((idx >> q) & 1) << pos
    return out


@dataclass(frozen=True, eq=False)
class Hadamard:
    target: int

    def inverse(self) -> "Hadamard":
        return self

    def dump(self) -> str:
        return f"H {self.target}"


@dataclass(frozen=True, eq=False)
class PauliX:
    target: int

    def inverse(self) -> "PauliX":
        return self

    def dump(self) -> str:
        return f"X {self.target}"


@dataclass(frozen=True, eq=False)
class PauliZ:
    target: int

    def inverse(self) -> "PauliZ":
        return self

    def dump(self) -> str:
        return f"Z {self.target}"


@dataclass(frozen=True, eq=False)
class RotationY:
    """RY(angle): |0> -> cos(angle/2)|0> + sin(angle/2)|1>."""

    angle: float
    target: int

    def inverse(self) -> "RotationY":
        return RotationY(-self.angle, self.target)

    def dump(self) -> str:
        return f"RY {self.target} angle={self.angle!r}"


_SINGLE_QUBIT = (Hadamard, PauliX, PauliZ, RotationY)


@dataclass(frozen=True, eq=False)
class Controlled:
    """Single-qubit gate applied where every control matches its polarity."""

    base: object
    controls: tuple[tuple[int, bool], ...]

    def __post_init__(self):
        if not isinstance(self.base, _SINGLE_QUBIT):
            raise ValueError("controlled gates wrap single-qubit gates only")
        if not self.controls:
            raise ValueError("controlled gate needs at least one control")
        qubits = [q for q, _ in self.controls]
        if len(set(qubits)) != len(qubits) or self.base.target in qubits:
            raise ValueError("control qubits must be distinct from each other and the target")

    def inverse(self) -> "Controlled":
        return Controlled(self.base.inverse(), self.controls)

    def dump(self) -> str:
        ctl = ",".join(f"{q}:{int(p)}" for q, p in self.controls)
        return f"CTRL({self.base.dump()}) controls={ctl}"


@dataclass(frozen=True, eq=False)
class BasisPermutation:
    """|v> -> |table[v]> on the listed qubits (bit i of v is qubits[i])."""

    table: np.ndarray
    qubits: tuple[int, ...]

    def __post_init__(self):
        table = np.asarray(self.table, np.int64)
        object.__setattr__(self, "table", table)
        k = len(self.qubits)
        if table.shape != (1 << k,):
            raise ValueError("permutation table size must be 2^len(qubits)")
        if k <= 20 and (np.sort(table) != np.arange(1 << k)).any():
            raise ValueError("permutation table is not a bijection")

    def inverse(self) -> "BasisPermutation":
        inv = np.empty_like(self.table)
        inv[self.table] = np.arange(self.table.size)
        return BasisPermutation(inv, self.qubits)

    def dump(self) -> str:
        qs = ",".join(map(str, self.qubits))
        return f"PERM {qs} hash={_table_hash(self.table)}"


@dataclass(frozen=True, eq=False)
class FunctionOracle:
    """|x>|y> -> |x>|y XOR table[x]>; self-inverse by construction."""

    table: np.ndarray
    input_qubits: tuple[int, ...]
    output_qubits: tuple[int, ...]

    def __post_init__(self):
        table = np.asarray(self.table, np.int64)
        object.__setattr__(self, "table", table)
        if table.shape != (1 << len(self.input_qubits),):
            raise ValueError("oracle table size must be 2^len(input_qubits)")
        if table.size and (table.min() < 0 or table.max() >= 1 << len(self.output_qubits)):
            raise ValueError("oracle values exceed the output register")
        if set(self.input_qubits) & set(self.output_qubits):
            raise ValueError("oracle input and output registers must be disjoint")

    def inverse(self) -> "FunctionOracle":
        return self

    def dump(self) -> str:
        i = ",".join(map(str, self.input_qubits))
        o = ",".join(map(str, self.output_qubits))
        return f"ORACLE in={i} out={o} hash={_table_hash(self.table)}"


@dataclass(frozen=True, eq=False)
class PhaseOracle:
    """|v> -> -|v> where flags[v] is set, on the listed qubits."""

    flags: np.ndarray
    qubits: tuple[int, ...]

    def __post_init__(self):
        flags = np.asarray(self.flags, bool)
        object.__setattr__(self, "flags", flags)
        if flags.shape != (1 << len(self.qubits),):
            raise ValueError("flag table size must be 2^len(qubits)")

    def inverse(self) -> "PhaseOracle":
        return self

    def dump(self) -> str:
        qs = ",".join(map(str, self.qubits))
        return f"PHASE {qs} hash={_table_hash(self.flags)}"


def _variant(gate) -> str:
    if isinstance(gate, Controlled):
        return f"CTRL({_variant(gate.base)})"
    return type(gate).__name__


@dataclass
class Circuit:
    """Named contiguous registers plus an ordered gate list."""

    registers: dict[str, range] = field(default_factory=dict)
    gates: list = field(default_factory=list)
    _width: int = 0

    def add_register(self, name: str, width: int) -> range:
        if name in self.registers:
            raise ValueError(f"register {name!r} already exists")
        if width < 0:
            raise ValueError("register width must be >= 0")
        reg = range(self._width, self._width + width)
        self.registers[name] = reg
        self._width += width
        return reg

    def register(self, name: str) -> range:
        return self.registers[name]

    @property
    def n_qubits(self) -> int:
        return self._width

    def _check_qubits(self, qubits) -> None:
        for q in qubits:
            if not (0 <= q < self._width):
                raise ValueError(f"qubit {q} outside declared registers")

    def append(self, gate) -> None:
        if isinstance(gate, _SINGLE_QUBIT):
            self._check_qubits([gate.target])
        elif isinstance(gate, Controlled):
            self._check_qubits([gate.base.target] + [q for q, _ in gate.controls])
        elif isinstance(gate, BasisPermutation):
            self._check_qubits(gate.qubits)
        elif isinstance(gate, FunctionOracle):
            self._check_qubits(gate.input_qubits + gate.output_qubits)
        elif isinstance(gate, PhaseOracle):
            self._check_qubits(gate.qubits)
        else:
            raise TypeError(f"unknown gate: {gate!r}")
        self.gates.append(gate)

    def extend(self, gates) -> None:
        for g in gates:
            self.append(g)

    def h(self, target: int) -> None:
        self.append(Hadamard(target))

    def x(self, target: int) -> None:
        self.append(PauliX(target))

    def z(self, target: int) -> None:
        self.append(PauliZ(target))

    def ry(self, angle: float, target: int) -> None:
        self.append(RotationY(angle, target))

    def inverse(self) -> "Circuit":
        inv = Circuit(dict(self.registers), [], self._width)
        inv.gates = [g.inverse() for g in reversed(self.gates)]
        return inv

    def gate_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for g in self.gates:
            key = _variant(g)
            counts[key] = counts.get(key, 0) + 1
        return counts

    def dump(self) -> str:
        lines = [
            f"# register {name} {reg.start}:{reg.stop}"
            for name, reg in self.registers.items()
        ]
        lines += [g.dump() for g in self.gates]
        return "\n".join(lines) + "\n"


def _apply_single(amps: np.ndarray, n: int, gate) -> np.ndarray:
    t = gate.target
    view = amps.reshape(-1, 2, 1 << t)
    a0 = view[:, 0, :].copy()
    a1 = view[:, 1, :]
    if isinstance(gate, Hadamard):
        s = np.sqrt(0.5)
        view[:, 0, :] = s * (a0 + a1)
        view[:, 1, :] = s * (a0 - a1)
    elif isinstance(gate, PauliX):
        view[:, 0, :] = a1
        view[:, 1, :] = a0
    elif isinstance(gate, PauliZ):
        view[:, 1, :] = -a1
    else:  # RotationY
        c, s = np.cos(gate.angle / 2), np.sin(gate.angle / 2)
        view[:, 0, :] = c * a0 - s * a1
        view[:, 1, :] = s * a0 + c * a1
    return amps


def _apply_controlled(amps: np.ndarray, n: int, gate: Controlled) -> np.ndarray:
    # slice out the control-matching subspace as strided views (axis i of the
    # reshaped tensor is qubit n-1-i, since bit 0 is the fastest axis)
    view = amps.reshape((2,) * n)
    sel: list = [slice(None)] * n
    for q, pol in gate.controls:
        sel[n - 1 - q] = 1 if pol else 0
    t = gate.base.target
    s0, s1 = list(sel), list(sel)
    s0[n - 1 - t] = 0
    s1[n - 1 - t] = 1
    v0, v1 = view[tuple(s0)], view[tuple(s1)]
    base = gate.base
    if isinstance(base, Hadamard):
        r = np.sqrt(0.5)
        a0 = v0.copy()
        v0 += v1
        v0 *= r
        v1 -= a0
        v1 *= -r
    elif isinstance(base, PauliX):
        a0 = v0.copy()
        v0[...] = v1
        v1[...] = a0
    elif isinstance(base, PauliZ):
        v1 *= -1
    else:
        c, s = np.cos(base.angle / 2), np.sin(base.angle / 2)
        a0 = v0.copy()
        v0 *= c
        v0 -= s * v1
        v1 *= c
        v1 += s * a0
    return amps


def _index_map(gate, n: int, idx: np.ndarray) -> np.ndarray:
    """Destination basis index per source index; cached per qubit count."""
    cache = getattr(gate, "_index_map_cache", None)
    if cache is not None and cache[0] == n:
        return cache[1]
    if isinstance(gate, BasisPermutation):
        qubits = gate.qubits
        v = _extract(idx, qubits)
        delta = v ^ gate.table[v]
    else:
        v = _extract(idx, gate.input_qubits)
        delta = gate.table[v]
        qubits = gate.output_qubits
    j = idx.copy()
    for pos, q in enumerate(qubits):
        j ^= ((delta >> pos) & 1) << q
    object.__setattr__(gate, "_index_map_cache", (n, j))
    return j


def _phase_signs(gate: PhaseOracle, n: int, idx: np.ndarray) -> np.ndarray:
    cache = getattr(gate, "_signs_cache", None)
    if cache is not None and cache[0] == n:
        return cache[1]
    v = _extract(idx, gate.qubits)
    signs = np.where(gate.flags[v], -1.0, 1.0)
    object.__setattr__(gate, "_signs_cache", (n, signs))
    return signs


def _apply_gate(amps: np.ndarray, n: int, idx: np.ndarray, gate) -> np.ndarray:
    if isinstance(gate, _SINGLE_QUBIT):
        return _apply_single(amps, n, gate)
    if isinstance(gate, Controlled):
        return _apply_controlled(amps, n, gate)
    if isinstance(gate, (BasisPermutation, FunctionOracle)):
        out = np.empty_like(amps)
        out[_index_map(gate, n, idx)] = amps
        return out
    if isinstance(gate, PhaseOracle):
        amps *= _phase_signs(gate, n, idx)
        return amps
    raise TypeError(f"unknown gate: {gate!r}")


def run(circuit: Circuit, initial: StateVector | None = None,
        counts: dict[str, int] | None = None) -> StateVector:
    """Apply the circuit's gates in order to |0...0> or the given state.

    Aborts if the norm drifts beyond 1e-8 (indicating a broken gate).
    When ``counts`` is given, it is incremented per applied gate variant.
    """
    n = circuit.n_qubits
    if initial is None:
        initial = StateVector.zero(n)
    if initial.n_qubits != n:
        raise SimulationError(
            f"state has {initial.n_qubits} qubits, circuit declares {n}"
        )
    amps = initial.amplitudes.copy()
    idx = np.arange(amps.size, dtype=np.int64)
    for gate in circuit.gates:
        amps = _apply_gate(amps, n, idx, gate)
        if counts is not None:
            key = _variant(gate)
            counts[key] = counts.get(key, 0) + 1
        nrm = np.linalg.norm(amps)
        if abs(nrm - 1.0) > _NORM_ABORT:
            raise SimulationError(f"norm drifted to {nrm!r} after {gate.dump()}")
    return StateVector(amps)


def measure_shots(state: StateVector, qubit_groups, shots: int, rng_seed: int) -> dict:
    """Sample the marginal distribution of the listed qubit groups.

    Returns a histogram mapping tuples of group outcomes to counts; the
    sampling generator is dedicated and fully determined by ``rng_seed``.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    groups = [tuple(g) for g in qubit_groups]
    flat = tuple(q for g in groups for q in g)
    if len(set(flat)) != len(flat):
        raise ValueError("measured qubits must be distinct")
    probs = np.abs(state.amplitudes) ** 2
    idx = np.arange(probs.size, dtype=np.int64)
    packed = _extract(idx, flat)
    joint = np.bincount(packed, weights=probs, minlength=1 << len(flat))
    joint /= joint.sum()
    rng = np.random.default_rng(rng_seed)
    outcomes = rng.choice(joint.size, size=shots, p=joint)
    values, counts = np.unique(outcomes, return_counts=True)
    hist: dict[tuple[int, ...], int] = {}
    for v, c in zip(values, counts):
        key = []
        pos = 0
        for g in groups:
            key.append(int((v >> pos) & ((1 << len(g)) - 1)))
            pos += len(g)
        hist[tuple(key)] = int(c)
    return hist


def inverse(circuit: Circuit) -> Circuit:
    """Reversed gate order with each gate inverted."""
    return circuit.inverse()
