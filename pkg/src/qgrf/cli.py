"""Command-line experiments: deterministic, seed-driven, CSV/PGM artifacts.

Every subcommand is a pure function of its flags and seeds; repeated
invocations produce byte-identical artifacts.  The exit code is 0 iff all
internal verification gates pass.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import artifacts
from .encoder import encoded_value, theta_table
from .estimation import (
    REPORT_CSV_HEADER,
    EstimationConfig,
    ExactMode,
    MlaeMode,
    MomentRequest,
    ShotsMode,
    estimate_moment,
)
from .experiments import (
    balanced_step,
    box_noise,
    covariance_model,
    evaluate_on_axes,
    mc_product_reference,
    run_convergence,
)
from .fields import cosine_transform, sigmoid_transform, two_phase_transform
from .grids import GridSpec
from .kernels import CovarianceSpec, gaussian_kernel
from .moments import classical_moment
from .noise import SeededGauss
from .prng import default_params, pcg_word
from .qpcg import build_quantum_pcg
from .qsim import Circuit, Hadamard, StateVector, run
from .sampler import ClassicalSampler, SamplerConfig, build_sampler

_TRANSFORMS = {
    "cos": cosine_transform,
    "sigmoid": lambda: sigmoid_transform(1.0),
    "sigmoid11": lambda: sigmoid_transform(11.0),
    "two-phase": lambda: two_phase_transform(0.1, 1.0, 10.0, 0.0),
}


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _gate(checks: list[tuple[str, bool]]) -> int:
    failed = [name for name, ok in checks if not ok]
    for name, ok in checks:
        print(f"  [{'PASS' if ok else 'FAIL'}] {name}")
    return 1 if failed else 0


def cmd_field_sample(args) -> int:
    out = _out_dir(args)
    cov = CovarianceSpec("gaussian", args.variance, args.xi, 2)
    kernel = gaussian_kernel(cov)
    h = args.grid_h if args.grid_h else balanced_step(args.xi, args.radius)
    n = args.size
    axis = np.arange(n) / n
    pad = math.floor(args.radius) * h + h
    noise = box_noise(h, -pad, 1.0 + pad, 2, SeededGauss(args.seed))
    field = evaluate_on_axes(kernel, h, noise, [axis, axis], radius=args.radius)

    rho = _TRANSFORMS[args.transform]()
    transformed = rho.apply(field)
    params = {
        "cmd": "field-sample", "xi": args.xi, "variance": args.variance,
        "grid_h": h, "radius": args.radius, "size": n, "seed": args.seed,
        "transform": args.transform,
    }
    pts = np.array([(x, y) for x in axis for y in axis])
    artifacts.write_csv(out / "field.csv", ",".join(["x0", "x1", "value"]),
                        artifacts.field_csv_rows(pts, field.reshape(-1)), params)
    artifacts.write_csv(out / "field_transformed.csv", "x0,x1,value",
                        artifacts.field_csv_rows(pts, transformed.reshape(-1)), params)
    span = 3.5 * math.sqrt(args.variance)
    artifacts.write_pgm(out / "field.pgm", field, -span, span, "gaussian field")
    artifacts.write_pgm(out / "field_transformed.pgm", transformed, rho.lo, rho.hi,
                        f"transform={rho.name}")
    print(f"field range [{field.min():.4f}, {field.max():.4f}] "
          f"(3*sqrt(C) = {3 * math.sqrt(args.variance):.4f})")
    checks = [
        ("transformed values inside declared range",
         bool(np.all((transformed >= rho.lo) & (transformed <= rho.hi)))),
    ]
    return _gate(checks)


def cmd_converge(args) -> int:
    out = _out_dir(args)
    levels = [int(v) for v in args.levels.split(",")]
    rows = run_convergence(args.xi, args.variance, args.fine_h, levels,
                           args.samples, args.seed)
    params = {
        "cmd": "converge", "xi": args.xi, "variance": args.variance,
        "fine_h": args.fine_h, "levels": args.levels, "samples": args.samples,
        "seed": args.seed,
    }
    artifacts.write_csv(
        out / "convergence.csv",
        "r,mean_sup_error,ell,coarse_h,balanced_radius",
        [(r.radius, r.mean_sup_error, r.ell, r.coarse_h, r.balanced) for r in rows],
        params,
    )
    ordered = sorted(rows, key=lambda r: r.radius)
    for r in ordered:
        print(f"  ell={r.ell:3d} r={r.radius:8.3f} r_bal={r.balanced:7.3f} "
              f"mean sup error={r.mean_sup_error:.3e}")
    errors = [r.mean_sup_error for r in ordered]
    checks = [
        ("mean sup-error strictly decreasing in the radius",
         all(a > b for a, b in zip(errors, errors[1:]))),
    ]
    return _gate(checks)


def cmd_pcg(args) -> int:
    out = _out_dir(args)
    if args.state_bits > 8:
        print("state size above 8 bits is rejected (quantum compilation cap)")
        return 1
    params = default_params(args.state_bits)
    steps = params.modulus
    w = params.output_bits
    words = [pcg_word(params, args.seed, t) for t in range(steps)]
    bits = [(word >> b) & 1 for word in words for b in range(w)]
    meta = {
        "cmd": "pcg", "state_bits": args.state_bits, "multiplier": params.multiplier,
        "increment": params.increment, "output_bits": w, "seed": args.seed,
    }
    artifacts.write_csv(
        out / "pcg_table.csv", "step,word_bits",
        [(t, format(word, f"0{w}b")) for t, word in enumerate(words)], meta,
    )
    total = len(bits)
    width = 1 << ((total - 1).bit_length() // 2)
    height = -(-total // width)
    img = np.zeros(width * height)
    img[:total] = bits
    artifacts.write_pgm(out / "pcg_bits.pgm", img.reshape(height, width), 0.0, 1.0,
                        "pcg output bits")
    print(f"emitted {total} bits ({steps} words of {w} bits)")
    checks = []
    if args.verify_quantum:
        circuit = build_quantum_pcg(params)
        matches = 0
        first_bad = None
        for seed in range(params.modulus):
            state = run(circuit, StateVector.basis(circuit.n_qubits, seed))
            hot = np.flatnonzero(np.abs(state.amplitudes) > 0.5)
            ok = False
            if hot.size == 1:
                basis = int(hot[0])
                got_state = basis & (params.modulus - 1)
                got_word = basis >> params.state_bits
                ok = (got_word == pcg_word(params, seed, 1)
                      and got_state == (params.multiplier * seed + params.increment) % params.modulus)
            if ok:
                matches += 1
            elif first_bad is None:
                first_bad = seed
        print(f"quantum vs classical: {matches}/{params.modulus} seeds match"
              + ("" if first_bad is None else f" (first mismatch at seed {first_bad})"))
        checks.append(("quantum PCG reproduces the classical words",
                       matches == params.modulus))
    return _gate(checks)


def cmd_quantum_field(args) -> int:
    out = _out_dir(args)
    n = args.size
    cov = CovarianceSpec("gaussian", args.variance, args.xi, 2)
    kernel = gaussian_kernel(cov)
    h = args.grid_h if args.grid_h else balanced_step(args.xi, args.radius)
    grid = GridSpec(h, radius=args.radius, dimension=2, norm=args.norm,
                    centering="centered_at_x")
    points = [(i / n, j / n) for i in range(n) for j in range(n)]
    config = SamplerConfig.for_grid_points(
        points, _TRANSFORMS[args.transform](), kernel, grid,
        master_seed=args.seed, sample_exponent=0, angle_width=args.m_theta,
    )
    circuit = build_sampler(config)
    index_reg = circuit.register("index")
    # superpose the index register so one run exposes every amplitude
    probe = Circuit(dict(circuit.registers),
                    [Hadamard(q) for q in index_reg] + list(circuit.gates),
                    circuit.n_qubits)
    state = run(probe)
    scale = math.sqrt(len(points))
    quantum = np.array([
        scale * state.amplitudes[j << index_reg.start].real for j in range(len(points))
    ]).reshape(n, n)
    classical = ClassicalSampler(config).transformed_values[0].reshape(n, n)
    diff = float(np.max(np.abs(quantum - classical)))
    bound = math.pi * 2.0 ** (-args.m_theta)

    meta = {
        "cmd": "quantum-field", "xi": args.xi, "variance": args.variance,
        "grid_h": h, "radius": args.radius, "size": n, "seed": args.seed,
        "m_theta": args.m_theta, "transform": args.transform,
    }
    pts = np.asarray(points)
    artifacts.write_csv(out / "quantum_field.csv", "x0,x1,value",
                        artifacts.field_csv_rows(pts, quantum.reshape(-1)), meta)
    artifacts.write_csv(out / "classical_field.csv", "x0,x1,value",
                        artifacts.field_csv_rows(pts, classical.reshape(-1)), meta)
    rho = _TRANSFORMS[args.transform]()
    artifacts.write_pgm(out / "quantum_field.pgm", quantum, rho.lo, rho.hi, "quantum")
    artifacts.write_pgm(out / "classical_field.pgm", classical, rho.lo, rho.hi, "classical")
    print(f"max |quantum - classical| = {diff:.3e} (bound {bound:.3e})")
    return _gate([("amplitudes match the classical pipeline", diff <= bound)])


def cmd_covariance(args) -> int:
    out = _out_dir(args)
    model_ref = covariance_model(args.xi, args.variance, args.size, args.radius)
    rho = cosine_transform()
    ref, ref_se, ref_l, ref_r = mc_product_reference(
        model_ref, rho, args.mc_samples, args.seed + 1,
    )
    print(f"classical reference on {args.size}x{args.size} grid: "
          f"E[lam_L lam_R] = {ref:.4f} +- {ref_se:.4f}")

    desk = covariance_model(args.xi, args.variance, args.quantum_size, args.radius)
    config = SamplerConfig.for_grid_points(
        desk.points, rho, desk.kernel, desk.grid,
        master_seed=args.seed, sample_exponent=args.m, angle_width=args.m_theta,
    )
    request = MomentRequest((desk.left, desk.right), config, args.m)
    exact = estimate_moment(
        request, EstimationConfig(0.25, 0.05, ExactMode()), allow_small_m=True
    )
    oracle = classical_moment([config] * 2, [desk.left, desk.right])
    print(f"moment circuit exact amplitude = {exact.estimate:.4f}; "
          f"classical same-seed oracle = {oracle:.4f}")

    if args.mode == "shots":
        mode = ShotsMode(args.shots, args.seed + 2)
    elif args.mode == "mlae":
        mode = MlaeMode(seed=args.seed + 2)
    else:
        mode = ExactMode()
    measured = estimate_moment(
        request, EstimationConfig(0.25, 0.05, mode), allow_small_m=True
    )
    print(measured.csv_row())

    singles = []
    for q in (desk.left, desk.right):
        single = estimate_moment(
            MomentRequest((q,), config, args.m),
            EstimationConfig(0.25, 0.05, ExactMode()), allow_small_m=True,
        )
        singles.append(single.estimate)
    cov_est = exact.estimate - singles[0] * singles[1]
    print(f"E[lam_L] = {singles[0]:.4f}  E[lam_R] = {singles[1]:.4f}  "
          f"covariance estimate = {cov_est:.4f}")

    meta = {
        "cmd": "covariance", "xi": args.xi, "variance": args.variance,
        "radius": args.radius, "size": args.size, "quantum_size": args.quantum_size,
        "m": args.m, "m_theta": args.m_theta, "mode": args.mode,
        "mc_samples": args.mc_samples, "seed": args.seed,
        "reference": ref, "reference_se": ref_se, "oracle": oracle,
        "covariance": cov_est,
    }
    artifacts.write_csv(out / "covariance_report.csv", REPORT_CSV_HEADER,
                        [exact.csv_row(), measured.csv_row()], meta)

    tol = 2 * math.pi * 2.0 ** (-args.m_theta) + 1e-9
    checks = [
        ("moment amplitude matches the classical same-seed oracle",
         abs(exact.estimate - abs(oracle)) <= tol),
        ("exact amplitude within the Hoeffding envelope of the reference",
         abs(exact.estimate - ref) <= 0.25),
        ("measured estimate within 0.02 of the exact amplitude",
         abs(measured.estimate - exact.estimate) <= 0.02),
    ]
    return _gate(checks)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qgrf",
        description="Transformed Gaussian random fields, quantum sampling, and moment estimation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, xi=0.075, variance=1.0):
        p.add_argument("--xi", type=float, default=xi, help="correlation length")
        p.add_argument("--variance", type=float, default=variance, help="field variance C")
        p.add_argument("--seed", type=int, default=7)
        p.add_argument("--out", default="qgrf-out", help="artifact directory")

    p = sub.add_parser("field-sample", help="one realization of the (transformed) field")
    common(p, xi=0.07, variance=4.0)
    p.add_argument("--grid-h", type=float, default=None)
    p.add_argument("--radius", type=float, default=4.0)
    p.add_argument("--norm", choices=["max", "euclidean"], default="max")
    p.add_argument("--size", type=int, default=128, help="raster size per axis")
    p.add_argument("--transform", choices=sorted(_TRANSFORMS), default="sigmoid11")
    p.set_defaults(fn=cmd_field_sample)

    p = sub.add_parser("converge", help="coarse-grid convergence experiment")
    common(p)
    p.add_argument("--fine-h", type=float, default=1 / 120)
    p.add_argument("--levels", default="4,6,8,12", help="comma-separated coarsening factors")
    p.add_argument("--samples", type=int, default=30, help="realizations per level")
    p.set_defaults(fn=cmd_converge)

    p = sub.add_parser("pcg", help="PCG bit table and quantum verification")
    p.add_argument("--state-bits", type=int, default=6)
    p.add_argument("--seed", type=int, default=11, help="generator seed in [0, 2^M)")
    p.add_argument("--out", default="qgrf-out")
    p.add_argument("--verify-quantum", action="store_true")
    p.set_defaults(fn=cmd_pcg)

    p = sub.add_parser("quantum-field", help="field realization read from the sampler circuit")
    common(p, xi=math.sqrt(1 / 8), variance=1.0)
    p.add_argument("--grid-h", type=float, default=None)
    p.add_argument("--radius", type=float, default=2.0)
    p.add_argument("--norm", choices=["max", "euclidean"], default="max")
    p.add_argument("--size", type=int, default=16, help="evaluation grid per axis")
    p.add_argument("--m-theta", type=int, default=8)
    p.add_argument("--transform", choices=sorted(_TRANSFORMS), default="cos")
    p.set_defaults(fn=cmd_quantum_field)

    p = sub.add_parser("covariance", help="mixed-moment estimate of half-domain averages")
    common(p, xi=math.sqrt(1 / 8), variance=1.0)
    p.add_argument("--radius", type=int, default=2)
    p.add_argument("--size", type=int, default=16, help="reference grid per axis")
    p.add_argument("--quantum-size", type=int, default=4, help="circuit grid per axis")
    p.add_argument("--m", type=int, default=5, help="sample register width")
    p.add_argument("--m-theta", type=int, default=8)
    p.add_argument("--shots", type=int, default=10_000)
    p.add_argument("--mode", choices=["exact", "shots", "mlae"], default="shots")
    p.add_argument("--mc-samples", type=int, default=1_000_000, dest="mc_samples")
    p.set_defaults(fn=cmd_covariance)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
