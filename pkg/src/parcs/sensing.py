"""Gaussian sensing matrices and column-parallel sampling.

A sensing matrix is a K x M Gaussian ensemble (i.i.d. entries of variance
1/K, so columns have near-unit Euclidean norm) that samples every column of
an M x N signal at once: Y = A X. Matrices are never serialized; they are
regenerated bit-exactly from (k, m, seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import _rng
from .core import Signal2D

__all__ = [
    "SensingMatrix",
    "MeasurementBatch",
    "gaussian_sensing",
    "sample_parallel",
    "required_k",
    "restricted_isometry_constant",
]


@dataclass(frozen=True)
class SensingMatrix:
    """K x M measurement operator applied to every signal column.

    ``seed`` records how the entries were generated (None for matrices
    injected through :meth:`from_entries`, e.g. identity matrices in tests).
    """

    k: int
    m: int
    entries: np.ndarray
    seed: int | None

    def __post_init__(self):
        arr = np.ascontiguousarray(self.entries, dtype=np.float64)
        if arr.shape != (self.k, self.m):
            raise ValueError(f"entries shape {arr.shape} != ({self.k}, {self.m})")
        if not np.isfinite(arr).all():
            raise ValueError("matrix entries must be finite")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @classmethod
    def from_entries(cls, entries: np.ndarray, seed: int | None = None) -> "SensingMatrix":
        """Wrap an explicit matrix (test hook; bypasses the Gaussian draw)."""
        entries = np.asarray(entries, dtype=np.float64)
        return cls(entries.shape[0], entries.shape[1], entries, seed)


@dataclass(frozen=True)
class MeasurementBatch:
    """Per-column measurements Y (K x N) plus provenance.

    ``perm_tag`` names the permutation that was applied to the signal before
    sampling, so reconstruction can refuse a mismatched inverse.
    """

    columns: np.ndarray
    sensing_seed: int | None
    perm_tag: str

    def __post_init__(self):
        arr = np.ascontiguousarray(self.columns, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError("measurements must be a K x N matrix")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "columns", arr)

    @property
    def k(self) -> int:
        return self.columns.shape[0]

    @property
    def n(self) -> int:
        return self.columns.shape[1]


def gaussian_sensing(k: int, m: int, seed: int) -> SensingMatrix:
    """Draw the K x M Gaussian ensemble for a seed, reproducibly.

    Entries are produced row-major from a Philox stream keyed by ``seed``
    via the inverse-CDF transform, scaled to variance 1/k.
    """
    if not 1 <= k <= m:
        raise ValueError(f"need 1 <= k <= m, got k={k}, m={m}")
    gen = _rng.generator(seed)
    entries = _rng.standard_normal(gen, (k, m)) / math.sqrt(k)
    return SensingMatrix(k, m, entries, _rng.check_seed(seed))


def sample_parallel(a: SensingMatrix, x: Signal2D, perm_tag: str = "identity") -> MeasurementBatch:
    """Measure every column of x with the shared matrix: Y = A X."""
    if a.m != x.rows:
        raise ValueError(f"matrix expects columns of length {a.m}, signal has {x.rows}")
    return MeasurementBatch(a.entries @ x.entries, a.seed, perm_tag)


def required_k(s_inf: int, m: int, c: float = 4.0) -> int:
    """Measurement count ceil(c * s * ln(m/s)) for worst column sparsity s.

    Clamped to [1, m]. The proportionality constant is configurable; the
    default 4 is calibrated empirically by the recovery tests.
    """
    if not 1 <= s_inf < m:
        raise ValueError(f"need 1 <= s_inf < m, got s_inf={s_inf}, m={m}")
    if c <= 0:
        raise ValueError("c must be positive")
    return int(min(max(math.ceil(c * s_inf * math.log(m / s_inf)), 1), m))


def restricted_isometry_constant(a: SensingMatrix, s: int) -> float:
    """Exact s-th restricted isometry constant by submatrix enumeration.

    delta_s is the smallest d with (1-d)|z|^2 <= |Az|^2 <= (1+d)|z|^2 over
    all s-sparse z; equivalently the worst eigenvalue deviation of the
    Gram matrices of all s-column submatrices. Brute force only: m <= 14
    and s <= 4.
    """
    if a.m > 14 or s > 4:
        raise ValueError("brute-force scope is m <= 14 and s <= 4")
    if not 1 <= s <= a.m:
        raise ValueError(f"need 1 <= s <= m, got s={s}")
    worst = 0.0
    for cols in combinations(range(a.m), s):
        gram = a.entries[:, cols].T @ a.entries[:, cols]
        eig = np.linalg.eigvalsh(gram)
        worst = max(worst, float(eig[-1] - 1.0), float(1.0 - eig[0]))
    return worst
