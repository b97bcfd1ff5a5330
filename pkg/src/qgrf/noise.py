"""White-noise lattices: generation descriptors, storage, and coarsening.

A :class:`WhiteNoiseGrid` holds one standard-normal-ish sample per lattice
index.  The stream position of an index is its lexicographic rank within
the generated index set, so a grid generated once over a union of windows
serves every evaluation point with consistent values.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .grids import GridSpec, index_set, union_index_set
from .kernels import sinc_axis
from .prng import PcgParams, derive_seed, inverse_cdf_sample, pcg_bits

__all__ = [
    "OsRandom",
    "SeededGauss",
    "PcgInverseCdf",
    "CltBits",
    "WhiteNoiseGrid",
    "MissingNoiseError",
    "clt_value",
    "sample_noise",
    "coarsen_noise",
    "DEFAULT_INDEX_CAP",
]

DEFAULT_INDEX_CAP = 1 << 24


class MissingNoiseError(KeyError):
    """An evaluation needed a noise index the grid does not cover."""


@dataclass(frozen=True)
class OsRandom:
    """OS-entropy normals; the only non-reproducible descriptor."""


@dataclass(frozen=True)
class SeededGauss:
    """Bulk reproducible normals from a seeded 64-bit generator.

    Used for large classical grids (references, Monte Carlo) where the
    toy PCG modes would be impractically slow and statistically weak.
    """

    seed: int


@dataclass(frozen=True)
class PcgInverseCdf:
    """Normals via the inverse CDF of M-bit PCG words: index of rank i uses
    stream bits [i*M, (i+1)*M)."""

    params: PcgParams
    seed: int


@dataclass(frozen=True)
class CltBits:
    """Central-limit normals from raw PCG bits: the index of rank i maps to
    n_bits^(-1/2) * sum(1 - 2 b) over stream bits [i*n_bits, (i+1)*n_bits)."""

    n_bits: int
    params: PcgParams
    seed: int

    def __post_init__(self):
        if self.n_bits < 1:
            raise ValueError("n_bits must be >= 1")


@dataclass(frozen=True)
class Coarsened:
    """Provenance marker for grids produced by coarsen_noise."""

    factor: int
    source: object


class WhiteNoiseGrid:
    """Samples on a finite set of integer lattice indices.

    ``values`` is aligned with the lexicographic order of ``indices``.  When
    the index set is a full box, ``box`` holds (lo, shape) and lookups are
    arithmetic; otherwise a dict is built lazily.
    """

    def __init__(self, indices, values: np.ndarray, descriptor,
                 box: tuple[tuple[int, ...], tuple[int, ...]] | None = None):
        self._indices = list(indices) if indices is not None else None
        self.values = np.asarray(values, float)
        self.descriptor = descriptor
        self.box = box
        self._lookup: dict[tuple[int, ...], int] | None = None
        if self._indices is not None and len(self._indices) != self.values.size:
            raise ValueError("indices and values length mismatch")
        if box is not None:
            lo, shape = box
            if self.values.size != int(np.prod(shape)):
                raise ValueError("box shape inconsistent with value count")

    @property
    def size(self) -> int:
        return self.values.size

    @property
    def dimension(self) -> int:
        if self.box is not None:
            return len(self.box[0])
        return len(self._indices[0])

    @property
    def indices(self) -> list[tuple[int, ...]]:
        if self._indices is None:
            lo, shape = self.box
            ranges = [range(l, l + s) for l, s in zip(lo, shape)]
            self._indices = [tuple(j) for j in itertools.product(*ranges)]
        return self._indices

    def value_at(self, index: tuple[int, ...]) -> float:
        if self.box is not None:
            lo, shape = self.box
            flat = 0
            for j, l, s in zip(index, lo, shape):
                off = j - l
                if not (0 <= off < s):
                    raise MissingNoiseError(index)
                flat = flat * s + off
            return float(self.values[flat])
        if self._lookup is None:
            self._lookup = {j: i for i, j in enumerate(self.indices)}
        try:
            return float(self.values[self._lookup[index]])
        except KeyError:
            raise MissingNoiseError(index) from None

    def covers(self, indices) -> bool:
        try:
            for j in indices:
                self.value_at(tuple(j))
        except MissingNoiseError:
            return False
        return True

    def as_box_array(self) -> np.ndarray:
        """Values reshaped to the box extents (C order = lexicographic)."""
        if self.box is None:
            raise ValueError("grid is not box-shaped")
        return self.values.reshape(self.box[1])


def _detect_box(indices) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
    if not indices:
        return None
    arr = np.asarray(indices, int)
    lo = arr.min(axis=0)
    hi = arr.max(axis=0)
    shape = tuple(int(v) for v in hi - lo + 1)
    if len(indices) == int(np.prod(shape)):
        return tuple(int(v) for v in lo), shape
    return None


def clt_value(bits) -> float:
    """Central-limit normal approximation n^(-1/2) * sum_k (1 - 2 b_k)."""
    bits = np.asarray(bits, float)
    if bits.size < 1:
        raise ValueError("clt_value needs at least one bit")
    return float((1.0 - 2.0 * bits).sum() / math.sqrt(bits.size))


def _pcg_stream_values(descriptor, count: int) -> np.ndarray:
    if isinstance(descriptor, PcgInverseCdf):
        m = descriptor.params.state_bits
        bits = pcg_bits(descriptor.params, descriptor.seed, 0, count * m)
        vals = np.empty(count)
        for i in range(count):
            v = 0
            for t in range(m):
                v |= bits[i * m + t] << t
            vals[i] = inverse_cdf_sample(v, m)
        return vals
    n = descriptor.n_bits
    bits = np.asarray(
        pcg_bits(descriptor.params, descriptor.seed, 0, count * n), float
    )
    return (1.0 - 2.0 * bits).reshape(count, n).sum(axis=1) / math.sqrt(n)


def sample_noise(grid, descriptor, points=None, cap: int = DEFAULT_INDEX_CAP) -> WhiteNoiseGrid:
    """Generate one sample per index of the grid's index set.

    ``grid`` may be a :class:`GridSpec` (fixed-origin uses its own window;
    centered grids additionally need the evaluation ``points`` to form the
    union window) or an explicit sequence of index tuples.  PCG-backed
    modes are deterministic functions of (seed, index) via the
    lexicographic-rank stream map; regeneration is bit-identical.
    """
    if isinstance(grid, GridSpec):
        if grid.centering == "centered_at_x":
            if points is None:
                raise ValueError("centered grids need evaluation points to fix the index set")
            indices = union_index_set(grid, points)
        else:
            indices = index_set(grid)
    else:
        indices = sorted(tuple(int(v) for v in j) for j in grid)
    count = len(indices)
    if count > cap:
        raise ValueError(f"index set has {count} points, exceeding the cap {cap}")
    box = _detect_box(indices)

    if isinstance(descriptor, OsRandom):
        values = np.random.default_rng().standard_normal(count)
    elif isinstance(descriptor, SeededGauss):
        values = np.random.default_rng(descriptor.seed).standard_normal(count)
    elif isinstance(descriptor, (PcgInverseCdf, CltBits)):
        values = _pcg_stream_values(descriptor, count)
    else:
        raise TypeError(f"unknown noise descriptor: {descriptor!r}")
    return WhiteNoiseGrid(indices, values, descriptor, box=box)


def noise_for_sample(grid, base: CltBits | PcgInverseCdf, master_seed: int,
                     sample_index: int, points=None) -> WhiteNoiseGrid:
    """Noise grid for pseudo-sample ``sample_index``: same index set, seed
    derived from the master seed at offset sample_index * state_bits."""
    seed = derive_seed(base.params, master_seed, sample_index)
    if isinstance(base, CltBits):
        desc = CltBits(base.n_bits, base.params, seed)
    else:
        desc = PcgInverseCdf(base.params, seed)
    return sample_noise(grid, desc, points=points)


def coarsen_noise(fine: WhiteNoiseGrid, fine_grid: GridSpec, ell: int) -> WhiteNoiseGrid:
    """Project fine noise onto a grid coarsened by the integer factor ``ell``.

    The coarse sample at index j is
        ell^(-d/2) * sum_k sinc(k/ell - j) * W_k
    over all fine indices k; this is the trapezoidal quadrature of the
    white-noise integral defining the coarse-lattice variables.  The coarse
    index set is {j : ell*j in the fine index set}, so ell = 1 is the
    identity.
    """
    if ell < 1:
        raise ValueError("coarsening factor must be >= 1")
    d = fine.dimension
    scale = ell ** (-d / 2)
    if fine.box is not None:
        lo, shape = fine.box
        clo = tuple(int(math.ceil(l / ell)) for l in lo)
        chi = tuple(int(math.floor((l + s - 1) / ell)) for l, s in zip(lo, shape))
        cshape = tuple(h - l + 1 for l, h in zip(clo, chi))
        arr = fine.as_box_array()
        # separable kernel: contract one axis at a time
        for ax in range(d):
            fine_pos = np.arange(lo[ax], lo[ax] + shape[ax]) / ell
            coarse_pos = np.arange(clo[ax], chi[ax] + 1)
            mat = sinc_axis(fine_pos[None, :] - coarse_pos[:, None])
            arr = np.tensordot(mat, arr, axes=([1], [ax]))
            arr = np.moveaxis(arr, 0, ax)
        values = scale * arr.reshape(-1)
        return WhiteNoiseGrid(None, values, Coarsened(ell, fine.descriptor),
                              box=(clo, cshape))

    fine_idx = np.asarray(fine.indices, float)
    coarse_indices = sorted(
        {tuple(int(v) // ell for v in j) for j in fine.indices
         if all(v % ell == 0 for v in j)}
    )
    values = np.empty(len(coarse_indices))
    for i, j in enumerate(coarse_indices):
        w = np.prod(sinc_axis(fine_idx / ell - np.asarray(j, float)), axis=1)
        values[i] = scale * float(w @ fine.values)
    return WhiteNoiseGrid(coarse_indices, values, Coarsened(ell, fine.descriptor),
                          box=_detect_box(coarse_indices))
