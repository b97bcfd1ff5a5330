"""Pointwise evaluation of the discretized moving-average field.

The discretized field at x is the truncated quadrature
    Y(x) = h^(d/2) * sum_j f(x, j h) W_j
over the grid's index window (centered at floor(x/h) for centered grids).
All operations are pure functions of immutable inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .grids import GridSpec, index_set
from .kernels import ConvolutionKernel
from .noise import WhiteNoiseGrid

__all__ = [
    "evaluate_field",
    "discrete_covariance",
    "Transformation",
    "transform_field",
    "cosine_transform",
    "sigmoid_transform",
    "two_phase_transform",
]


def evaluate_field(kernel: ConvolutionKernel, grid: GridSpec,
                   noise: WhiteNoiseGrid, x) -> float:
    """Field value h^(d/2) * sum_j f(x, j h) W_j over the window of ``x``.

    Raises MissingNoiseError if the noise grid does not cover the window;
    indices are never silently zero-filled.
    """
    x = np.atleast_1d(np.asarray(x, float))
    if x.size != grid.dimension:
        raise ValueError("point dimension does not match grid")
    if grid.centering == "centered_at_x" and not kernel.stationary:
        raise ValueError("centered windows require a stationary kernel")
    window = index_set(grid, grid.center_for(x))
    h = grid.h
    total = 0.0
    for j in window:
        total += kernel(x, np.asarray(j, float) * h) * noise.value_at(j)
    return h ** (grid.dimension / 2) * total


def discrete_covariance(kernel: ConvolutionKernel, grid: GridSpec, x, y) -> float:
    """Covariance of the discretized field: h^d * sum_j f(x, jh) f(y, jh).

    The sum runs over the intersection of the windows of x and y, matching
    the covariance of evaluate_field at those two points.
    """
    x = np.atleast_1d(np.asarray(x, float))
    y = np.atleast_1d(np.asarray(y, float))
    wx = index_set(grid, grid.center_for(x))
    if grid.centering == "centered_at_x":
        window = sorted(set(wx) & set(index_set(grid, grid.center_for(y))))
    else:
        window = wx
    h = grid.h
    total = 0.0
    for j in window:
        s = np.asarray(j, float) * h
        total += kernel(x, s) * kernel(y, s)
    return h**grid.dimension * total


@dataclass(frozen=True)
class Transformation:
    """Pointwise map applied to the Gaussian field, with its declared range."""

    name: str
    fn: Callable[[float], float]
    lo: float
    hi: float
    array_fn: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError("declared range must satisfy lo < hi")

    def __call__(self, value: float) -> float:
        return self.fn(value)

    def apply(self, values: np.ndarray) -> np.ndarray:
        """Elementwise application; uses the vectorized form when available."""
        if self.array_fn is not None:
            return self.array_fn(np.asarray(values, float))
        return np.vectorize(self.fn, otypes=[float])(values)

    @property
    def amplitude_safe(self) -> bool:
        """Whether the range fits the [-1, 1] amplitude window."""
        return self.lo >= -1.0 and self.hi <= 1.0


def transform_field(value: float, transformation: Transformation) -> float:
    return transformation.fn(value)


def _sigmoid(v: float) -> float:
    if v >= 0:
        return 1.0 / (1.0 + math.exp(-v))
    e = math.exp(v)
    return e / (1.0 + e)


def _sigmoid_array(v: np.ndarray) -> np.ndarray:
    out = np.empty_like(v)
    pos = v >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-v[pos]))
    e = np.exp(v[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def cosine_transform() -> Transformation:
    return Transformation("cos", math.cos, -1.0, 1.0, array_fn=np.cos)


def sigmoid_transform(scale: float = 1.0) -> Transformation:
    """scale * sigmoid(v), with range (0, scale)."""
    if not scale > 0:
        raise ValueError("scale must be positive")
    return Transformation(f"sigmoid*{scale:g}", lambda v: scale * _sigmoid(v),
                          0.0, scale, array_fn=lambda v: scale * _sigmoid_array(v))


def two_phase_transform(z0: float, z1: float, a: float, b: float) -> Transformation:
    """Two-phase map z0 + (z1 - z0) * sigmoid(a v - b).

    Models a material whose property takes values near z0 or z1 depending
    on which side of the cutoff the field falls; ``a`` sets the width of
    the transition layer.
    """
    if not z0 < z1:
        raise ValueError("two-phase transform needs z0 < z1")
    if not a > 0:
        raise ValueError("transition sharpness a must be positive")

    def fn(v: float) -> float:
        return z0 + (z1 - z0) * _sigmoid(a * v - b)

    def afn(v: np.ndarray) -> np.ndarray:
        return z0 + (z1 - z0) * _sigmoid_array(a * v - b)

    return Transformation(f"two_phase({z0:g},{z1:g},{a:g},{b:g})", fn, z0, z1,
                          array_fn=afn)
