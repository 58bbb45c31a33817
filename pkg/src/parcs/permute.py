"""Cell permutations of 2D signals: zigzag scan, group scan, and balancing.

A permutation here rearranges the entries of an M x N matrix within the same
shape. The scan-based constructions rank all cells in some order and then
refill the matrix row by row with that sequence, which is how the zigzag
(JPEG-style) reordering spreads each anti-diagonal layer across columns.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Signal2D, SupportSet, SparsityVector, best_s_term, sparsity_vector

__all__ = [
    "PermutationMap",
    "identity_permutation",
    "zigzag_permutation",
    "group_scan_permutation",
    "is_acceptable",
    "is_optimal_sparsity",
    "construct_optimal_permutation",
]


@dataclass(frozen=True)
class PermutationMap:
    """A bijection on the cells of an M x N grid.

    ``dest_flat[f]`` is the destination (row-major, 0-based) of the cell with
    row-major index f. The constructor rejects non-bijective tables. ``tag``
    names the construction so measurement streams can be checked against the
    permutation used to produce them.
    """

    shape: tuple[int, int]
    dest_flat: np.ndarray
    tag: str = "custom"

    def __post_init__(self):
        m, n = self.shape
        dest = np.asarray(self.dest_flat, dtype=np.int64).reshape(-1)
        if dest.size != m * n:
            raise ValueError("destination table size must equal cell count")
        seen = np.zeros(m * n, dtype=bool)
        if dest.min() < 0 or dest.max() >= m * n:
            raise ValueError("destination index out of range")
        seen[dest] = True
        if not seen.all():
            raise ValueError("destination table is not a bijection")
        dest = dest.copy()
        dest.setflags(write=False)
        object.__setattr__(self, "dest_flat", dest)

    def dest_of(self, i: int, j: int) -> tuple[int, int]:
        """Destination cell of source cell (i, j), 1-based."""
        m, n = self.shape
        if not (1 <= i <= m and 1 <= j <= n):
            raise ValueError(f"cell ({i}, {j}) outside {m} x {n} grid")
        f = self.dest_flat[(i - 1) * n + (j - 1)]
        return int(f // n + 1), int(f % n + 1)

    def inverse(self) -> "PermutationMap":
        inv = np.empty_like(self.dest_flat)
        inv[self.dest_flat] = np.arange(self.dest_flat.size)
        return PermutationMap(self.shape, inv, tag=f"{self.tag}-inverse")

    def compose(self, other: "PermutationMap") -> "PermutationMap":
        """Map applying ``other`` first, then this map."""
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return PermutationMap(self.shape, self.dest_flat[other.dest_flat],
                              tag=f"{self.tag}*{other.tag}")

    def apply(self, x: Signal2D) -> Signal2D:
        """Permute the entries of x."""
        if x.shape != self.shape:
            raise ValueError(f"signal shape {x.shape} != permutation shape {self.shape}")
        out = np.empty(x.rows * x.cols)
        out[self.dest_flat] = x.entries.ravel()
        return Signal2D(out.reshape(self.shape))

    def apply_support(self, sup: SupportSet) -> SupportSet:
        """Image of a support under the permutation (values never touched)."""
        if sup.shape != self.shape:
            raise ValueError(f"support shape {sup.shape} != permutation shape {self.shape}")
        m, n = self.shape
        if not len(sup):
            return SupportSet(np.empty((0, 2), dtype=np.int64), self.shape)
        src = (sup.cells[:, 0] - 1) * n + (sup.cells[:, 1] - 1)
        dst = self.dest_flat[src]
        return SupportSet(np.column_stack([dst // n + 1, dst % n + 1]), self.shape)


def identity_permutation(m: int, n: int) -> PermutationMap:
    """Map leaving every cell in place."""
    return PermutationMap((m, n), np.arange(m * n, dtype=np.int64), tag="identity")


def _zigzag_layer_rows(layer: int, m: int, n: int) -> np.ndarray:
    """Row indices of one layer, in zigzag traversal order.

    Even layers are walked with ascending row index, odd layers descending;
    the bounds clamp the anti-diagonal to the grid for non-square shapes.
    """
    lo, hi = max(1, layer - n + 1), min(layer, m)
    rows = np.arange(lo, hi + 1)
    return rows[::-1] if layer % 2 == 1 else rows


def zigzag_permutation(m: int, n: int) -> PermutationMap:
    """Zigzag-scan the grid and refill it row by row.

    The cell visited r-th by the zigzag scan (layers in order, direction
    alternating per layer) is sent to row-major position r.
    """
    if m < 1 or n < 1:
        raise ValueError("grid dimensions must be positive")
    dest = np.empty(m * n, dtype=np.int64)
    rank = 0
    for layer in range(1, m + n):
        rows = _zigzag_layer_rows(layer, m, n)
        cols = layer - rows + 1
        dest[(rows - 1) * n + (cols - 1)] = np.arange(rank, rank + rows.size)
        rank += rows.size
    return PermutationMap((m, n), dest, tag="zigzag")


def group_scan_permutation(m: int, n: int, groups) -> PermutationMap:
    """Scan the grid group by group and refill it row by row.

    ``groups`` is an ordered partition of the cells, each group an ordered
    iterable of 1-based (i, j) pairs. The concatenated scan order assigns
    rank r to the r-th cell listed, exactly as in ``zigzag_permutation``
    (which is the special case of layer groups with alternating direction).
    """
    dest = np.full(m * n, -1, dtype=np.int64)
    rank = 0
    for group in groups:
        for (i, j) in group:
            if not (1 <= i <= m and 1 <= j <= n):
                raise ValueError(f"cell ({i}, {j}) outside {m} x {n} grid")
            f = (i - 1) * n + (j - 1)
            if dest[f] >= 0:
                raise ValueError(f"cell ({i}, {j}) listed twice")
            dest[f] = rank
            rank += 1
    if rank != m * n:
        raise ValueError(f"groups cover {rank} of {m * n} cells")
    return PermutationMap((m, n), dest, tag="group-scan")


def is_acceptable(x: Signal2D, s: int, p: PermutationMap) -> bool:
    """Does p strictly reduce the worst per-column count of x's s-term support?

    The support is computed once on the un-permuted signal and mapped through
    p, which keeps the answer deterministic under magnitude ties.
    """
    m, n = x.shape
    if not 0 < s <= m * n:
        raise ValueError(f"s must be in [1, {m * n}], got {s}")
    _, sup = best_s_term(x, s)
    before = sparsity_vector(sup).chebyshev()
    after = sparsity_vector(p.apply_support(sup)).chebyshev()
    return after < before


def is_optimal_sparsity(sv: SparsityVector) -> bool:
    """True when the per-column counts are balanced to within one."""
    return int(sv.counts.max()) - int(sv.counts.min()) <= 1


def construct_optimal_permutation(sup: SupportSet) -> PermutationMap:
    """Build a permutation that balances a given support across columns.

    Support cells (taken in row-major order) are packed into the top of the
    columns, ceil(s/N) per column for the first s mod N columns and
    floor(s/N) thereafter; the remaining cells fill the remaining positions
    in row-major order. The permuted support always attains the minimum
    possible Chebyshev norm ceil(s/N).
    """
    m, n = sup.shape
    s = len(sup)
    q, r = divmod(s, n)
    per_col = np.full(n, q, dtype=np.int64)
    per_col[:r] += 1
    # destinations: rows 1..per_col[j] of each column j, column by column
    dst = np.concatenate([j + n * np.arange(per_col[j]) for j in range(n)]) \
        if s else np.empty(0, dtype=np.int64)
    dest = np.full(m * n, -1, dtype=np.int64)
    src = (sup.cells[:, 0] - 1) * n + (sup.cells[:, 1] - 1)
    dest[src] = dst
    free_dst = np.setdiff1d(np.arange(m * n), dst, assume_unique=False)
    dest[dest < 0] = free_dst
    return PermutationMap((m, n), dest, tag="balanced")
