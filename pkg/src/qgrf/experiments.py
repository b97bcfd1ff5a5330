"""Vectorized engines behind the CLI experiments.

Separable (tensor-product) kernels on tensor grids are evaluated with
per-axis weight matrices so that whole rasters and large Monte Carlo
batches reduce to matrix products; the pointwise contract in
:mod:`qgrf.fields` is the reference these fast paths are tested against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fields import Transformation
from .grids import GridSpec, union_index_set
from .kernels import ConvolutionKernel, CovarianceSpec, gaussian_kernel
from .noise import (
    DEFAULT_INDEX_CAP,
    OsRandom,
    SeededGauss,
    WhiteNoiseGrid,
    coarsen_noise,
    sample_noise,
)
from .qoi import QoiWeights

__all__ = [
    "box_noise",
    "evaluate_on_axes",
    "weight_matrix",
    "balanced_step",
    "truncation_radius",
    "balanced_radius",
    "ConvergenceRow",
    "run_convergence",
    "FieldModel",
    "covariance_model",
    "mc_product_reference",
]


def box_noise(h: float, lo: float, hi: float, dimension: int, descriptor,
              cap: int = DEFAULT_INDEX_CAP) -> WhiteNoiseGrid:
    """Noise on the full lattice Z^d intersected with the box [lo, hi]^d.

    Equivalent to sample_noise over the enumerated box but without
    materializing the index tuples, so it scales to reference lattices.
    """
    k0 = math.ceil(lo / h)
    k1 = math.floor(hi / h)
    shape = (k1 - k0 + 1,) * dimension
    count = int(np.prod(shape))
    if count > cap:
        raise ValueError(f"box lattice has {count} points, exceeding the cap {cap}")
    if isinstance(descriptor, SeededGauss):
        values = np.random.default_rng(descriptor.seed).standard_normal(count)
    elif isinstance(descriptor, OsRandom):
        values = np.random.default_rng().standard_normal(count)
    else:
        return sample_noise(
            [tuple(j) for j in np.stack(np.meshgrid(
                *[np.arange(k0, k1 + 1)] * dimension, indexing="ij"
            ), axis=-1).reshape(-1, dimension)],
            descriptor,
        )
    return WhiteNoiseGrid(None, values, descriptor, box=((k0,) * dimension, shape))


def _axis_matrix(kernel: ConvolutionKernel, h: float, xs: np.ndarray,
                 lattice: np.ndarray, radius: float | None) -> np.ndarray:
    """Per-axis weights g(x - j h), optionally windowed to |j - floor(x/h)| <= r."""
    mat = kernel.axis_factor(xs[:, None] - lattice[None, :] * h)
    if radius is not None:
        centers = np.floor(xs / h).astype(int)
        reach = int(math.floor(radius))
        mask = np.abs(centers[:, None] - lattice[None, :]) <= reach
        mat = mat * mask
    return mat


def evaluate_on_axes(kernel: ConvolutionKernel, h: float, noise: WhiteNoiseGrid,
                     axes: list[np.ndarray], radius: float | None = None) -> np.ndarray:
    """Field values on the tensor grid of ``axes`` from box-shaped noise.

    Computes h^(d/2) * amplitude * prod-axis contractions of the noise box;
    ``radius`` applies a centered max-norm window per point (None = use the
    full noise box, the conforming reference evaluation).
    """
    if kernel.axis_factor is None:
        raise ValueError("separable evaluation needs a kernel axis factor")
    lo, shape = noise.box
    d = len(shape)
    if len(axes) != d:
        raise ValueError("axis count does not match the noise dimension")
    arr = noise.as_box_array()
    for ax in range(d):
        lattice = np.arange(lo[ax], lo[ax] + shape[ax])
        mat = _axis_matrix(kernel, h, np.asarray(axes[ax], float), lattice, radius)
        arr = np.tensordot(mat, arr, axes=([1], [ax]))
        arr = np.moveaxis(arr, 0, ax)
    return kernel.amplitude * h ** (d / 2) * arr


def weight_matrix(kernel: ConvolutionKernel, grid: GridSpec, points) -> tuple[np.ndarray, list]:
    """Rows w[i, :] with Y(x_i) = w[i] @ noise_values for the shared union grid.

    Matches evaluate_field for every point: entries outside a point's
    window are zero.
    """
    pts = np.atleast_2d(np.asarray(points, float))
    indices = union_index_set(grid, pts)
    idx = np.asarray(indices, float)
    d = grid.dimension
    h = grid.h
    reach = int(math.floor(grid.radius))
    w = np.zeros((len(pts), len(indices)))
    for i, x in enumerate(pts):
        vals = np.array([kernel(x, j * h) for j in idx])
        if grid.centering == "centered_at_x":
            center = np.asarray(grid.center_for(x), float)
            if grid.norm == "max":
                inside = np.max(np.abs(idx - center), axis=1) <= reach
            else:
                inside = np.sum((idx - center) ** 2, axis=1) <= grid.radius**2
        else:
            if grid.norm == "max":
                inside = np.max(np.abs(idx), axis=1) <= reach
            else:
                inside = np.sum(idx**2, axis=1) <= grid.radius**2
        w[i] = h ** (d / 2) * vals * inside
    return w, indices


def truncation_radius(xi: float, coarse_h: float) -> float:
    """Index-window radius 2 pi xi^2 / h'^2 (the padding used in print)."""
    return 2.0 * math.pi * xi**2 / coarse_h**2


def balanced_radius(xi: float, coarse_h: float) -> float:
    """Radius pi xi^2 / (2 h'^2) that balances truncation against aliasing.

    At step h' = xi sqrt(pi / (2 r)) the covariance error of the truncated
    trapezoidal sum decays like exp(-pi r) in this radius, which is the
    convention the convergence plot is calibrated against.
    """
    return 0.5 * math.pi * xi**2 / coarse_h**2


def balanced_step(xi: float, radius: float) -> float:
    """Grid step xi sqrt(pi / (2 r)) paired with balanced_radius."""
    return xi * math.sqrt(math.pi / (2.0 * radius))


@dataclass(frozen=True)
class ConvergenceRow:
    ell: int
    coarse_h: float
    radius: float
    balanced: float
    mean_sup_error: float


def run_convergence(xi: float, variance: float, fine_h: float, levels,
                    n_realizations: int, seed: int,
                    oversample: tuple[float, float] = (-5.0, 6.0),
                    domain: tuple[float, float] = (0.0, 1.0),
                    dimension: int = 2) -> list[ConvergenceRow]:
    """Error of coarse sinc-interpolated fields against the fine reference.

    Per realization: draw fine noise on the oversampled lattice, evaluate
    the conforming reference at the fine grid points of the domain, then
    for each coarsening factor project the noise, evaluate with a centered
    max-norm window of the printed truncation radius, and record the sup
    error.  Rows report the mean over realizations.
    """
    cov = CovarianceSpec("gaussian", variance, xi, dimension)
    kernel = gaussian_kernel(cov)
    lo, hi = oversample
    d0, d1 = domain
    eval_axis = np.arange(round((d1 - d0) / fine_h) + 1) * fine_h + d0
    axes = [eval_axis] * dimension
    fine_grid = GridSpec(fine_h, radius=1, dimension=dimension)  # only d is used below

    sums = {ell: 0.0 for ell in levels}
    for real in range(n_realizations):
        fine = box_noise(fine_h, lo, hi, dimension, SeededGauss([seed, real]))
        reference = evaluate_on_axes(kernel, fine_h, fine, axes, radius=None)
        for ell in levels:
            coarse_h = ell * fine_h
            coarse = coarsen_noise(fine, fine_grid, ell)
            r_trunc = truncation_radius(xi, coarse_h)
            approx = evaluate_on_axes(kernel, coarse_h, coarse, axes, radius=r_trunc)
            sums[ell] += float(np.max(np.abs(reference - approx)))

    rows = []
    for ell in levels:
        coarse_h = ell * fine_h
        rows.append(ConvergenceRow(
            ell=ell,
            coarse_h=coarse_h,
            radius=truncation_radius(xi, coarse_h),
            balanced=balanced_radius(xi, coarse_h),
            mean_sup_error=sums[ell] / n_realizations,
        ))
    return rows


@dataclass(frozen=True)
class FieldModel:
    """Shared geometry of the two-half-averages experiment."""

    kernel: ConvolutionKernel
    grid: GridSpec
    points: list
    left: QoiWeights
    right: QoiWeights


def covariance_model(xi: float, variance: float, grid_points: int,
                     radius: int = 2) -> FieldModel:
    """Model for averaging a transformed field over left/right half-domains.

    Points are the grid [N]^2 / N on the unit square; the quadrature step
    follows the balanced rule for the given window radius.
    """
    cov = CovarianceSpec("gaussian", variance, xi, 2)
    kernel = gaussian_kernel(cov)
    h = balanced_step(xi, radius)
    grid = GridSpec(h, radius=radius, dimension=2, norm="max", centering="centered_at_x")
    n = grid_points
    points = [(i / n, j / n) for i in range(n) for j in range(n)]
    xs = np.array([p[0] for p in points])
    left = (xs < 0.5 - 1e-12).astype(float)
    right = 1.0 - left
    return FieldModel(kernel, grid, points,
                      QoiWeights(left / left.sum()), QoiWeights(right / right.sum()))


def mc_product_reference(model: FieldModel, transformation: Transformation,
                         samples: int, seed: int, batch: int = 100_000):
    """Monte Carlo estimate of E[lambda_left * lambda_right] with true normals.

    Returns (mean, standard_error, mean_left, mean_right).
    """
    wts, _ = weight_matrix(model.kernel, model.grid, model.points)
    rho = transformation.apply
    qL = model.left.weights
    qR = model.right.weights
    rng = np.random.default_rng(seed)
    total = 0.0
    total_sq = 0.0
    total_l = 0.0
    total_r = 0.0
    done = 0
    while done < samples:
        b = min(batch, samples - done)
        noise = rng.standard_normal((wts.shape[1], b))
        z = rho(wts @ noise)
        lam_l = qL @ z
        lam_r = qR @ z
        prod = lam_l * lam_r
        total += prod.sum()
        total_sq += (prod**2).sum()
        total_l += lam_l.sum()
        total_r += lam_r.sum()
        done += b
    mean = total / samples
    var = max(total_sq / samples - mean**2, 0.0)
    return mean, math.sqrt(var / samples), total_l / samples, total_r / samples
