"""Covariance models, convolution kernels, and the sinc interpolation kernel.

A random field with a prescribed stationary covariance is realized as a
moving average: the convolution of a kernel ``f`` with white noise, where
``f`` is a convolutional square root of the covariance (``f^T * f = c``).
This module provides the Gaussian (squared-exponential) family in closed
form plus the sinc function used to discretize the white-noise integral.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "CovarianceSpec",
    "ConvolutionKernel",
    "gaussian_kernel",
    "sinc",
    "sinc_complex_modulus",
]

# Below this threshold sin(pi s)/(pi s) is replaced by its Taylor value to
# avoid 0/0 at lattice points.
_SINC_EPS = 1e-8


@dataclass(frozen=True)
class CovarianceSpec:
    """Parameters of a stationary covariance function.

    kind: covariance family; only "gaussian" is supported, i.e.
        c(x, y) = variance * exp(-|x - y|^2 / (2 correlation_length^2)).
    """

    kind: str
    variance: float
    correlation_length: float
    dimension: int

    def __post_init__(self):
        if self.kind != "gaussian":
            raise ValueError(f"unsupported covariance kind: {self.kind!r}")
        if not self.variance > 0:
            raise ValueError("variance must be positive")
        if not self.correlation_length > 0:
            raise ValueError("correlation_length must be positive")
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")

    def evaluate(self, x, y) -> float:
        """Covariance c(x, y) of the modeled field."""
        lag2 = float(np.sum((np.asarray(x, float) - np.asarray(y, float)) ** 2))
        return self.variance * math.exp(-lag2 / (2 * self.correlation_length**2))


@dataclass(frozen=True)
class ConvolutionKernel:
    """Evaluable moving-average kernel f(x, s) with decay metadata.

    ``gamma`` and ``beta`` document an exponential envelope
    |f(x, s)| <= gamma * exp(-beta |x - s|); they are metadata used by
    diagnostics, not by the evaluation itself.  ``axis_factor``, when
    present, is a 1-d factor g with f(x, s) = amplitude * prod_k g(x_k - s_k)
    and enables separable grid evaluation.
    """

    evaluator: Callable[[np.ndarray, np.ndarray], float]
    dimension: int
    stationary: bool
    gamma: float
    beta: float
    amplitude: float = 1.0
    axis_factor: Callable[[np.ndarray], np.ndarray] | None = None

    def __call__(self, x, s) -> float:
        return self.evaluator(np.asarray(x, float), np.asarray(s, float))


def gaussian_kernel(cov: CovarianceSpec) -> ConvolutionKernel:
    """Convolutional square root of the Gaussian covariance.

    Returns the stationary kernel
        f(x, s) = sqrt(C) * (xi^2 pi / 2)^(-d/4) * exp(-|x - s|^2 / xi^2),
    whose self-convolution reproduces ``cov`` exactly.
    """
    if cov.kind != "gaussian":
        raise ValueError("gaussian_kernel requires a gaussian CovarianceSpec")
    xi = cov.correlation_length
    d = cov.dimension
    amp = math.sqrt(cov.variance) * (xi**2 * math.pi / 2) ** (-d / 4)

    def evaluator(x: np.ndarray, s: np.ndarray) -> float:
        lag2 = float(np.sum((x - s) ** 2))
        return amp * math.exp(-lag2 / xi**2)

    def axis_factor(t: np.ndarray) -> np.ndarray:
        return np.exp(-np.asarray(t, float) ** 2 / xi**2)

    # exp(-t^2/xi^2) <= e * exp(-2t/xi) for all t >= 0 (complete the square),
    # so (gamma, beta) = (e * amp, 2/xi) is a valid envelope.
    return ConvolutionKernel(
        evaluator=evaluator,
        dimension=d,
        stationary=True,
        gamma=math.e * amp,
        beta=2.0 / xi,
        amplitude=amp,
        axis_factor=axis_factor,
    )


def _sinc1(t: np.ndarray) -> np.ndarray:
    """sin(pi t) / (pi t) with a 4th-order Taylor branch near t = 0."""
    t = np.asarray(t, float)
    small = np.abs(t) < _SINC_EPS
    safe = np.where(small, 1.0, t)
    z = np.pi * t
    taylor = 1.0 - z**2 / 6.0 + z**4 / 120.0
    return np.where(small, taylor, np.sin(np.pi * safe) / (np.pi * safe))


def sinc(s) -> float | np.ndarray:
    """Multidimensional sinc: product over components of sin(pi s_k)/(pi s_k).

    Accepts a scalar, a length-d vector, or an array whose last axis is the
    component axis; reduces over that axis.
    """
    s = np.asarray(s, float)
    if s.ndim == 0:
        return float(_sinc1(s))
    out = np.prod(_sinc1(s), axis=-1)
    return float(out) if out.ndim == 0 else out


def sinc_axis(t) -> np.ndarray:
    """Elementwise 1-d sinc, used to build separable coarsening matrices."""
    return _sinc1(t)


def sinc_complex_modulus(x: float, y: float) -> float:
    """|sinc(x + iy)| = |sin(pi (x + iy))| / (pi |x + iy|), with value 1 at 0.

    Satisfies the envelope |sinc(x + iy)| <= 2 exp(pi |y|).
    """
    z = complex(x, y)
    if abs(z) < _SINC_EPS:
        w = np.pi * z
        return abs(1.0 - w**2 / 6.0 + w**4 / 120.0)
    return abs(np.sin(np.pi * z)) / (np.pi * abs(z))
