"""Truncated integer lattices used to discretize the white-noise integral."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

__all__ = ["GridSpec", "index_set", "union_index_set"]

_NORMS = ("euclidean", "max")
_CENTERINGS = ("fixed_origin", "centered_at_x")


@dataclass(frozen=True)
class GridSpec:
    """Quadrature lattice: step ``h``, truncation radius ``radius`` (in index
    units), truncation norm, and whether the index window is fixed at the
    origin or follows the evaluation point (stationary kernels only)."""

    h: float
    radius: float
    dimension: int
    norm: str = "max"
    centering: str = "fixed_origin"

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError("grid size h must be positive")
        if not self.radius >= 0:
            raise ValueError("truncation radius must be >= 0")
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        if self.norm not in _NORMS:
            raise ValueError(f"norm must be one of {_NORMS}")
        if self.centering not in _CENTERINGS:
            raise ValueError(f"centering must be one of {_CENTERINGS}")

    def center_for(self, x) -> tuple[int, ...]:
        """Index window center for evaluation point ``x``."""
        if self.centering == "fixed_origin":
            return (0,) * self.dimension
        x = np.atleast_1d(np.asarray(x, float))
        return tuple(int(math.floor(v / self.h)) for v in x)


def index_set(grid: GridSpec, center: tuple[int, ...] | None = None) -> list[tuple[int, ...]]:
    """All lattice points j with |j - center| <= radius in the grid's norm,
    in lexicographic order.

    ``center`` must be omitted (or zero) for fixed-origin grids.
    """
    d = grid.dimension
    if center is None:
        center = (0,) * d
    center = tuple(int(c) for c in center)
    if len(center) != d:
        raise ValueError("center has wrong dimension")
    if grid.centering == "fixed_origin" and any(c != 0 for c in center):
        raise ValueError("fixed_origin grids only support center = 0")

    reach = int(math.floor(grid.radius))
    axes = [range(c - reach, c + reach + 1) for c in center]
    if grid.norm == "max":
        return [tuple(j) for j in itertools.product(*axes)]
    r2 = grid.radius**2
    return [
        tuple(j)
        for j in itertools.product(*axes)
        if sum((a - c) ** 2 for a, c in zip(j, center)) <= r2
    ]


def union_index_set(grid: GridSpec, points) -> list[tuple[int, ...]]:
    """Union of the index windows of all evaluation points, lexicographic.

    For fixed-origin grids this is just the grid's index set; for centered
    grids it is the union of the windows centered at each point, which is
    the set a shared noise grid must cover.
    """
    if grid.centering == "fixed_origin":
        return index_set(grid)
    seen: set[tuple[int, ...]] = set()
    for x in points:
        seen.update(index_set(grid, grid.center_for(x)))
    return sorted(seen)
