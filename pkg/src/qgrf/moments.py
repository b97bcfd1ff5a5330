"""Sample-mean and mixed-moment circuits plus their classical oracles.

The mean circuit sandwiches the sampler between weight preparation and its
inverse; its all-zeros amplitude is the mean of 2^m pseudo-samples of the
quantity of interest.  The mixed-moment circuit runs one branch per factor
with separate flag/index registers while sharing the sample register (and,
to save qubits, the uncomputed angle register); its all-zeros amplitude is
the mean of the product of the branch quantities.
"""

from __future__ import annotations

import numpy as np

from .encoder import encoder_gates, theta_table
from .qoi import QoiWeights, phase_flip_gate, state_prep_gates
from .qsim import Circuit, Hadamard, max_qubits
from .sampler import ClassicalSampler, SamplerConfig

__all__ = [
    "build_mean_circuit",
    "build_moment_circuit",
    "classical_mean",
    "classical_moment",
    "encoding_error_bound",
]


def encoding_error_bound(order: int, angle_width: int) -> float:
    """Worst-case fixed-point encoding error of an order-s moment circuit."""
    return order * np.pi * 2.0 ** (-angle_width)


def _check_shared(configs: list[SamplerConfig]) -> None:
    first = configs[0]
    for cfg in configs[1:]:
        if cfg.master_seed != first.master_seed:
            raise ValueError("all branches must share the master seed")
        if cfg.sample_exponent != first.sample_exponent:
            raise ValueError("all branches must share the sample register width")
        if cfg.angle_width != first.angle_width:
            raise ValueError("all branches must share the angle register width")
        if cfg.pcg_params != first.pcg_params:
            raise ValueError("all branches must share the PCG parameters")


def build_moment_circuit(configs, weights) -> Circuit:
    """Mixed-moment circuit over (angle, sample, flag0, index0, flag1, ...).

    Branch ell prepares its weights on index_ell, applies its sampler with
    the shared sample register, and unprepares.  With s = 1 this is exactly
    the mean circuit.
    """
    configs = list(configs)
    weights = [q if isinstance(q, QoiWeights) else QoiWeights(q) for q in weights]
    if len(configs) != len(weights) or not configs:
        raise ValueError("need one weight vector per sampler branch")
    _check_shared(configs)
    for cfg, q in zip(configs, weights):
        if q.size != cfg.n_points:
            raise ValueError("weight vector size does not match the sampler points")

    m = configs[0].sample_exponent
    angle_w = configs[0].angle_width
    total = angle_w + m + sum(1 + cfg.index_width for cfg in configs)
    if total > max_qubits():
        raise ValueError(
            f"moment circuit needs {total} qubits, exceeding the cap of {max_qubits()}"
        )

    circuit = Circuit()
    angle_qs = tuple(circuit.add_register("angle", angle_w))
    sample_qs = tuple(circuit.add_register("sample", m))
    branch_regs = []
    for ell, cfg in enumerate(configs):
        flag = circuit.add_register(f"flag{ell}", 1)[0]
        index_qs = tuple(circuit.add_register(f"index{ell}", cfg.index_width))
        branch_regs.append((flag, index_qs))

    for q in sample_qs:
        circuit.append(Hadamard(q))
    for cfg, q, (flag, index_qs) in zip(configs, weights, branch_regs):
        prep = state_prep_gates(q, index_qs)
        flip = phase_flip_gate(q, index_qs)
        circuit.extend(prep)
        if flip is not None:
            circuit.append(flip)
        theta = theta_table(ClassicalSampler(cfg).oracle_values(), angle_w)
        circuit.extend(encoder_gates(theta, flag, angle_qs, index_qs + sample_qs))
        circuit.extend(g.inverse() for g in reversed(prep))
    for q in sample_qs:
        circuit.append(Hadamard(q))
    return circuit


def build_mean_circuit(config: SamplerConfig, weights) -> Circuit:
    """Sample-mean circuit: the all-zeros amplitude is the mean over 2^m
    pseudo-samples of the weighted field values, up to encoding error."""
    return build_moment_circuit([config], [weights])


def classical_mean(config: SamplerConfig, weights) -> float:
    """Same-seed classical oracle for the mean circuit (unquantized values)."""
    q = weights if isinstance(weights, QoiWeights) else QoiWeights(weights)
    lam = ClassicalSampler(config).qoi_values(q)
    return float(lam.mean())


def classical_moment(configs, weights) -> float:
    """Same-seed classical oracle for the mixed-moment circuit."""
    configs = list(configs)
    qs = [q if isinstance(q, QoiWeights) else QoiWeights(q) for q in weights]
    _check_shared(configs)
    product = np.ones(configs[0].n_samples)
    for cfg, q in zip(configs, qs):
        product *= ClassicalSampler(cfg).qoi_values(q)
    return float(product.mean())
