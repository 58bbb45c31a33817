"""2D signal container, anti-diagonal layers, and sparsity bookkeeping.

Conventions used across the package:

* signals are real M x N matrices stored row-major as float64;
* cell positions are 1-based pairs (i, j) with 1 <= i <= M, 1 <= j <= N;
* the m-th layer of a matrix is the anti-diagonal {(i, j) : i + j - 1 = m},
  so an M x N matrix has M + N - 1 layers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Signal2D",
    "SupportSet",
    "SparsityVector",
    "best_s_term",
    "threshold_support",
    "sparsity_vector",
    "layer_of",
    "layer_sizes",
]


@dataclass(frozen=True)
class Signal2D:
    """A real M x N matrix; the unit every other module operates on.

    The wrapped array is coerced to a read-only row-major float64 copy, so a
    Signal2D can be shared freely across worker threads.
    """

    entries: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.entries, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"expected a 2D matrix, got shape {arr.shape}")
        if not np.isfinite(arr).all():
            raise ValueError("signal entries must be finite")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape


@dataclass(frozen=True)
class SupportSet:
    """A set of occupied cells of an M x N grid, 1-based.

    ``cells`` is an (n, 2) int64 array sorted in row-major order; it is the
    canonical representation, so equal supports compare equal.
    """

    cells: np.ndarray
    shape: tuple[int, int]

    def __post_init__(self):
        m, n = self.shape
        cells = np.asarray(self.cells, dtype=np.int64).reshape(-1, 2)
        if cells.size:
            if cells[:, 0].min() < 1 or cells[:, 0].max() > m:
                raise ValueError("row index out of range")
            if cells[:, 1].min() < 1 or cells[:, 1].max() > n:
                raise ValueError("column index out of range")
        flat = (cells[:, 0] - 1) * n + (cells[:, 1] - 1)
        order = np.argsort(flat, kind="stable")
        flat = flat[order]
        if flat.size and (np.diff(flat) == 0).any():
            raise ValueError("duplicate cells in support")
        cells = cells[order].copy()
        cells.setflags(write=False)
        object.__setattr__(self, "cells", cells)

    @classmethod
    def from_mask(cls, mask: np.ndarray) -> "SupportSet":
        """Build a support from a boolean occupancy matrix."""
        mask = np.asarray(mask, dtype=bool)
        ii, jj = np.nonzero(mask)
        cells = np.column_stack([ii + 1, jj + 1])
        return cls(cells, mask.shape)

    def to_mask(self) -> np.ndarray:
        mask = np.zeros(self.shape, dtype=bool)
        if len(self):
            mask[self.cells[:, 0] - 1, self.cells[:, 1] - 1] = True
        return mask

    def to_set(self) -> set[tuple[int, int]]:
        return {(int(i), int(j)) for i, j in self.cells}

    def __len__(self) -> int:
        return self.cells.shape[0]

    def __contains__(self, cell) -> bool:
        i, j = cell
        return bool(((self.cells[:, 0] == i) & (self.cells[:, 1] == j)).any())

    def __eq__(self, other) -> bool:
        if not isinstance(other, SupportSet):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.cells, other.cells)


@dataclass(frozen=True)
class SparsityVector:
    """Per-column nonzero counts s_1..s_N of a support, plus their sum."""

    counts: np.ndarray
    total: int = field(init=False)

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64).reshape(-1)
        if counts.size < 1:
            raise ValueError("need at least one column")
        if (counts < 0).any():
            raise ValueError("counts must be nonnegative")
        counts = counts.copy()
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "total", int(counts.sum()))

    def chebyshev(self) -> int:
        """Largest per-column count (the max norm of the vector)."""
        return int(self.counts.max())

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparsityVector):
            return NotImplemented
        return np.array_equal(self.counts, other.counts)


def best_s_term(x: Signal2D, s: int) -> tuple[Signal2D, SupportSet]:
    """Keep the s largest-magnitude entries of x, zeroing the rest.

    Ties are broken by ascending row-major index, which makes the result
    deterministic. Returns the truncated signal and the kept positions.
    """
    m, n = x.shape
    if not 0 <= s <= m * n:
        raise ValueError(f"s must be in [0, {m * n}], got {s}")
    flat = x.entries.ravel()
    # stable sort on descending magnitude keeps row-major order among ties
    order = np.argsort(-np.abs(flat), kind="stable")
    keep = np.sort(order[:s])
    out = np.zeros(m * n)
    out[keep] = flat[keep]
    cells = np.column_stack([keep // n + 1, keep % n + 1])
    return Signal2D(out.reshape(m, n)), SupportSet(cells, (m, n))


def threshold_support(x: Signal2D, tau: float) -> SupportSet:
    """Cells whose magnitude is at least tau."""
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    return SupportSet.from_mask(np.abs(x.entries) >= tau)


def sparsity_vector(sup: SupportSet) -> SparsityVector:
    """Count support cells per column."""
    n = sup.shape[1]
    counts = np.bincount(sup.cells[:, 1] - 1, minlength=n) if len(sup) else np.zeros(n, dtype=np.int64)
    return SparsityVector(counts)


def layer_of(i: int, j: int) -> int:
    """Layer index of cell (i, j): the anti-diagonal number i + j - 1."""
    if i < 1 or j < 1:
        raise ValueError("cell indices are 1-based")
    return i + j - 1


def layer_sizes(m: int, n: int) -> np.ndarray:
    """Cell count of each layer 1..m+n-1 of an m x n grid."""
    layers = np.arange(1, m + n)
    return np.minimum.reduce([layers, np.full_like(layers, m), np.full_like(layers, n), m + n - layers])
