"""The pseudo-sample pipeline and its quantum sampler circuit.

One classical pipeline produces transformed field values Z^(k)(x_j) for
2^m pseudo-samples: sample k draws its noise from a seed derived from the
master seed, shares one noise grid across all evaluation points, and
feeds the encoder.  The quantum sampler is the amplitude encoding of that
exact pipeline over a combined (index, sample) input register, so circuit
amplitudes and classical values can be compared sample for sample.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .encoder import AngleRegisterSpec, encoder_gates, theta_table
from .fields import Transformation, evaluate_field
from .grids import GridSpec, union_index_set
from .kernels import ConvolutionKernel
from .noise import CltBits, noise_for_sample
from .prng import PcgParams, default_params
from .qsim import Circuit, max_qubits

__all__ = ["SamplerConfig", "ClassicalSampler", "build_sampler"]


@dataclass(frozen=True)
class SamplerConfig:
    """Everything needed to reproduce the sampler classically or as a circuit.

    ``points`` are padded to a power of two by repeating the last point;
    padded entries carry zero weight in every quantity of interest.
    """

    points: tuple[tuple[float, ...], ...]
    transformation: Transformation
    kernel: ConvolutionKernel
    grid: GridSpec
    pcg_params: PcgParams
    master_seed: int
    sample_exponent: int
    angle_width: int = 8
    clt_bits: int = 4

    def __post_init__(self):
        AngleRegisterSpec(self.angle_width)
        if self.sample_exponent < 0:
            raise ValueError("sample exponent must be >= 0")
        if self.clt_bits < 1:
            raise ValueError("clt_bits must be >= 1")
        if not self.transformation.amplitude_safe:
            raise ValueError(
                f"transformation range [{self.transformation.lo}, "
                f"{self.transformation.hi}] must lie within [-1, 1]"
            )
        if (1 << self.sample_exponent) > self.pcg_params.modulus:
            raise ValueError("2^m samples exceed the PCG seed space; use more state bits")
        if not self.points:
            raise ValueError("at least one evaluation point is required")

    @classmethod
    def for_grid_points(cls, points, transformation, kernel, grid,
                        master_seed: int, sample_exponent: int,
                        angle_width: int = 8, clt_bits: int = 4,
                        pcg_params: PcgParams | None = None) -> "SamplerConfig":
        pts = [tuple(float(v) for v in np.atleast_1d(p)) for p in points]
        n = len(pts)
        padded = 1 << max(0, (n - 1).bit_length())
        pts += [pts[-1]] * (padded - n)
        if pcg_params is None:
            pcg_params = default_params(6)
        return cls(tuple(pts), transformation, kernel, grid, pcg_params,
                   master_seed, sample_exponent, angle_width, clt_bits)

    @property
    def n_points(self) -> int:
        return len(self.points)

    @property
    def index_width(self) -> int:
        n = self.n_points
        if n & (n - 1):
            raise ValueError("point count must be a power of two (use for_grid_points)")
        return n.bit_length() - 1

    @property
    def n_samples(self) -> int:
        return 1 << self.sample_exponent


class ClassicalSampler:
    """Same-seed classical evaluation of the pseudo-sample pipeline."""

    def __init__(self, config: SamplerConfig):
        self.config = config
        self.union_indices = union_index_set(config.grid, config.points)

    def noise_for(self, sample_index: int):
        base = CltBits(self.config.clt_bits, self.config.pcg_params, 0)
        return noise_for_sample(self.union_indices, base,
                                self.config.master_seed, sample_index)

    @cached_property
    def field_values(self) -> np.ndarray:
        """Y^(k)(x_j) as an array of shape (n_samples, n_points)."""
        cfg = self.config
        out = np.empty((cfg.n_samples, cfg.n_points))
        for k in range(cfg.n_samples):
            noise = self.noise_for(k)
            for j, x in enumerate(cfg.points):
                out[k, j] = evaluate_field(cfg.kernel, cfg.grid, noise, x)
        return out

    @cached_property
    def transformed_values(self) -> np.ndarray:
        """Z^(k)(x_j) = rho(Y^(k)(x_j)), shape (n_samples, n_points)."""
        return self.config.transformation.apply(self.field_values)

    def oracle_values(self) -> np.ndarray:
        """Encoder input table over the combined (index, sample) register.

        Entry v = j + (k << index_width) holds Z^(k)(x_j).
        """
        return self.transformed_values.reshape(-1)

    def qoi_values(self, weights) -> np.ndarray:
        """lambda(Z^(k)) for each sample, for a QoiWeights-compatible vector."""
        w = np.asarray(getattr(weights, "weights", weights), float)
        if w.size != self.config.n_points:
            raise ValueError("weight vector does not match the point count")
        return self.transformed_values @ w


def build_sampler(config: SamplerConfig) -> Circuit:
    """Sampler circuit over registers (flag, angle, index, sample).

    For every basis input |j, k> with flag and angle clear, the flag-0
    amplitude equals the classical Z^(k)(x_j) up to the fixed-point
    encoding error pi * 2^(-angle_width).
    """
    index_w = config.index_width
    total = 1 + config.angle_width + index_w + config.sample_exponent
    if total > max_qubits():
        raise ValueError(
            f"sampler needs {total} qubits, exceeding the cap of {max_qubits()}"
        )
    values = ClassicalSampler(config).oracle_values()
    theta = theta_table(values, config.angle_width)
    circuit = Circuit()
    flag = circuit.add_register("flag", 1)[0]
    angle_qs = tuple(circuit.add_register("angle", config.angle_width))
    index_qs = tuple(circuit.add_register("index", index_w))
    sample_qs = tuple(circuit.add_register("sample", config.sample_exponent))
    circuit.extend(encoder_gates(theta, flag, angle_qs, index_qs + sample_qs))
    return circuit
