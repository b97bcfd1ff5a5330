"""Seekable permuted congruential generator (PCG) with bit-exact semantics.

The generator is deliberately tiny: a full-period LCG on ``M`` state bits
followed by an xorshift-and-rotate output permutation emitting ``w`` bits
per step.  The exact constants are immaterial; what matters is that the
classical stream defined here is frozen, seekable in O(log t), and equals
the gate-level circuit built in :mod:`qgrf.qpcg` bit for bit.

Stream conventions (frozen):
  * step t produces ``word(t) = permute(state_t)`` where ``state_0`` is the
    seed itself;
  * bit j of the stream is bit ``j mod w`` (LSB first) of ``word(j // w)``;
  * sample k's derived seed is the M-bit stream slice starting at bit k*M,
    assembled LSB first.
"""

from __future__ import annotations

from dataclasses import dataclass

from scipy.stats import norm

__all__ = [
    "PcgParams",
    "SeedIndex",
    "default_params",
    "pcg_state_at",
    "pcg_word",
    "pcg_bit",
    "pcg_bits",
    "derive_seed",
    "inverse_cdf_sample",
]


@dataclass(frozen=True)
class PcgParams:
    """LCG state size/constants plus the output permutation descriptor.

    state update: s -> (multiplier * s + increment) mod 2^state_bits
    output word:  low ``output_bits`` bits of s XOR (s >> xorshift),
                  rotated right by the top ``s`` bit.
    """

    state_bits: int
    multiplier: int
    increment: int
    output_bits: int = 4
    xorshift: int = 2

    def __post_init__(self):
        m = self.state_bits
        if m < 2:
            raise ValueError("state_bits must be >= 2")
        if not (1 <= self.output_bits <= m):
            raise ValueError("output_bits must lie in [1, state_bits]")
        if self.multiplier % 4 != 1:
            raise ValueError("multiplier must be 1 mod 4 for a full-period LCG")
        if self.increment % 2 != 1:
            raise ValueError("increment must be odd for a full-period LCG")
        if not (0 <= self.xorshift < m):
            raise ValueError("xorshift out of range")

    @property
    def modulus(self) -> int:
        return 1 << self.state_bits


@dataclass(frozen=True)
class SeedIndex:
    """A (seed, stream index) pair addressing one output bit."""

    seed: int
    index: int

    def validate(self, params: PcgParams) -> None:
        if not (0 <= self.seed < params.modulus):
            raise ValueError("seed out of range for state size")
        if self.index < 0:
            raise ValueError("stream index must be >= 0")


def default_params(state_bits: int = 6) -> PcgParams:
    """Frozen default constants for a given state size.

    M = 6 matches the scaled-down generator used by the experiments
    (multiplier 45 = 5 mod 8, increment 35).  Other sizes use the same
    congruence classes so the full-period property is preserved.
    """
    if state_bits == 6:
        return PcgParams(state_bits=6, multiplier=45, increment=35)
    mod = 1 << state_bits
    mult = (8 * (mod // 13) + 5) % mod
    inc = (2 * (mod // 7) + 1) % mod
    return PcgParams(state_bits=state_bits, multiplier=mult, increment=inc)


def pcg_state_at(params: PcgParams, seed: int, steps: int) -> int:
    """LCG state after ``steps`` steps from ``seed``, in O(log steps).

    Computed by repeated squaring of the affine map x -> a x + c, so it is
    bit-identical to sequential stepping.
    """
    if steps < 0:
        raise ValueError("steps must be >= 0")
    mod = params.modulus
    seed %= mod
    a, c = params.multiplier, params.increment
    acc_a, acc_c = 1, 0  # composed map x -> acc_a x + acc_c
    t = steps
    while t:
        if t & 1:
            acc_a, acc_c = (a * acc_a) % mod, (a * acc_c + c) % mod
        a, c = (a * a) % mod, (a * c + c) % mod
        t >>= 1
    return (acc_a * seed + acc_c) % mod


def _permute(params: PcgParams, state: int) -> int:
    """Output permutation: xorshift, truncate to w bits, rotate by top bit."""
    w = params.output_bits
    mask = (1 << w) - 1
    v = (state ^ (state >> params.xorshift)) & mask
    rot = (state >> (params.state_bits - 1)) & 1
    if rot:
        v = ((v >> 1) | (v << (w - 1))) & mask
    return v


def pcg_word(params: PcgParams, seed: int, step: int) -> int:
    """The w-bit output word of step ``step`` (step 0 permutes the seed)."""
    return _permute(params, pcg_state_at(params, seed, step))


def pcg_bit(params: PcgParams, seed: int, index: int) -> int:
    """Bit ``index`` of the output stream (LSB-first within each word)."""
    SeedIndex(seed, index).validate(params)
    word = pcg_word(params, seed, index // params.output_bits)
    return (word >> (index % params.output_bits)) & 1


def pcg_bits(params: PcgParams, seed: int, start: int, count: int) -> list[int]:
    """``count`` consecutive stream bits starting at ``start``.

    Seeks once, then steps sequentially; equals per-bit pcg_bit calls.
    """
    if count < 0:
        raise ValueError("count must be >= 0")
    SeedIndex(seed, start).validate(params)
    w = params.output_bits
    mod = params.modulus
    a, c = params.multiplier, params.increment
    step = start // w
    state = pcg_state_at(params, seed, step)
    word = _permute(params, state)
    pos = start % w
    out: list[int] = []
    for _ in range(count):
        out.append((word >> pos) & 1)
        pos += 1
        if pos == w:
            pos = 0
            state = (a * state + c) % mod
            word = _permute(params, state)
    return out


def derive_seed(params: PcgParams, seed: int, sample_index: int) -> int:
    """Seed for sample ``sample_index``: the M stream bits at offset k*M.

    Bits are assembled LSB first into a new M-bit seed.  Collisions between
    derived seeds are permitted (the generator is tiny).
    """
    m = params.state_bits
    if not (0 <= sample_index < params.modulus):
        raise ValueError("sample index must lie in [0, 2^state_bits)")
    bits = pcg_bits(params, seed, sample_index * m, m)
    out = 0
    for i, b in enumerate(bits):
        out |= b << i
    return out


def inverse_cdf_sample(j: int, state_bits: int) -> float:
    """Standard-normal quantile of the j-th of 2^M equi-probable cells.

    Returns Phi^{-1}((j + 1/2) / 2^M); the half-integer offset keeps the
    output finite and symmetric about zero.
    """
    if not (0 <= j < (1 << state_bits)):
        raise ValueError("j out of range")
    p = (j + 0.5) / (1 << state_bits)
    return float(norm.ppf(p))
