"""Layer-occupancy model and the acceptance-probability machinery.

The model assigns every anti-diagonal layer m of an M x N grid an
independent per-cell occupancy probability driven by four knobs
(r0, r1, r2, alpha):

* layers 1..r0 are empty,
* layers r0+1..r1 are fully occupied,
* layers r1+1..r2 decay exponentially with rate alpha,
* layers above r2 are empty.

Two decay conventions are in circulation for the middle band,
``exp(-alpha*(m - r0))`` ("definition", the default) and
``exp(-alpha*(m - r0 - 1))`` ("appendix"); the switch lives on the
parameter object so the sampler, the closed-form bound, and the validators
always agree with each other.

Against supports drawn from this model, the zigzag permutation strictly
reduces the worst per-column count with a probability that admits a
closed-form lower bound; this module evaluates that bound and provides the
Monte Carlo and exact-enumeration estimators used to validate it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _rng
from .core import SupportSet, layer_sizes
from .permute import zigzag_permutation

__all__ = [
    "LayerModelParams",
    "BoundAuxiliaries",
    "layer_probability",
    "layer_probabilities",
    "sample_support",
    "empirical_layer_profile",
    "bound_auxiliaries",
    "acceptance_lower_bound",
    "monte_carlo_acceptance",
    "exact_acceptance_small",
    "row_iid_statistics",
]

_CONVENTIONS = ("definition", "appendix")
_MC_CHUNK = 4096  # fixed so the consumed random stream is reproducible


@dataclass(frozen=True)
class LayerModelParams:
    """Knobs of the layer-occupancy model on an M x N grid."""

    r0: int
    r1: int
    r2: int
    alpha: float
    shape: tuple[int, int]
    convention: str = "definition"

    def __post_init__(self):
        m, n = self.shape
        if m < 1 or n < 1:
            raise ValueError("grid dimensions must be positive")
        if not 0 <= self.r0 < self.r1 < self.r2 <= min(m, n):
            raise ValueError(
                f"need 0 <= r0 < r1 < r2 <= min(M, N); got "
                f"r0={self.r0}, r1={self.r1}, r2={self.r2}, shape={self.shape}"
            )
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if self.convention not in _CONVENTIONS:
            raise ValueError(f"convention must be one of {_CONVENTIONS}")

    def satisfies_bound_hypothesis(self) -> bool:
        """Extra spacing condition required by the closed-form bound."""
        return self.r2 >= 2 * self.r1 - 3 * self.r0 - 1


def layer_probability(params: LayerModelParams, m: int) -> float:
    """Occupancy probability of a cell in layer m."""
    rows, cols = params.shape
    if not 1 <= m <= rows + cols - 1:
        raise ValueError(f"layer index must be in [1, {rows + cols - 1}]")
    if m <= params.r0 or m > params.r2:
        return 0.0
    if m <= params.r1:
        return 1.0
    shift = 1 if params.convention == "appendix" else 0
    return math.exp(-params.alpha * (m - params.r0 - shift))


def layer_probabilities(params: LayerModelParams) -> np.ndarray:
    """Occupancy probabilities for all layers 1..M+N-1."""
    rows, cols = params.shape
    return np.array([layer_probability(params, m) for m in range(1, rows + cols)])


def sample_support(params: LayerModelParams, rng_seed: int) -> SupportSet:
    """Draw one support: each cell on independently with its layer's probability."""
    rows, cols = params.shape
    probs = layer_probabilities(params)
    grid_layers = np.add.outer(np.arange(rows), np.arange(cols)) + 1
    pmat = probs[grid_layers - 1]
    u = _rng.uniform_open01(_rng.generator(rng_seed), (rows, cols))
    return SupportSet.from_mask(u < pmat)


def empirical_layer_profile(sup: SupportSet) -> np.ndarray:
    """Occupied fraction of each layer 1..M+N-1 of a support."""
    rows, cols = sup.shape
    sizes = layer_sizes(rows, cols)
    occupied = np.zeros(rows + cols - 1, dtype=np.int64)
    if len(sup):
        layers = sup.cells[:, 0] + sup.cells[:, 1] - 1
        occupied = np.bincount(layers - 1, minlength=rows + cols - 1)
    return occupied / sizes


@dataclass(frozen=True)
class BoundAuxiliaries:
    """Per-column quantities feeding the closed-form acceptance bound.

    For columns j = 1..r2 (index j-1 in the arrays):

    * ``fixed_counts[j-1]``: cells of column j inside the fully-occupied
      band, i.e. the guaranteed part of the column's count.
    * ``decay_starts[j-1]``: first layer of the decaying band that meets
      column j (max(r1+1, j)); the band runs through ``decay_last`` = r2.
    * ``permuted_col_bound``: largest per-column count any model support
      can have after the zigzag permutation.
    * ``count_cutoff``: the count threshold the bound's tail argument
      conditions on; at least both of the above under the hypothesis.
    """

    permuted_col_bound: int
    count_cutoff: int
    fixed_counts: np.ndarray
    decay_starts: np.ndarray
    decay_last: int

    def __post_init__(self):
        for name in ("fixed_counts", "decay_starts"):
            arr = np.asarray(getattr(self, name), dtype=np.int64)
            arr = arr.copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


def bound_auxiliaries(params: LayerModelParams) -> BoundAuxiliaries:
    """Evaluate the bound's per-column bookkeeping for valid parameters."""
    if not params.satisfies_bound_hypothesis():
        raise ValueError(
            f"bound requires r2 >= 2*r1 - 3*r0 - 1; got r0={params.r0}, "
            f"r1={params.r1}, r2={params.r2}"
        )
    r0, r1, r2 = params.r0, params.r1, params.r2
    n = params.shape[1]
    u = math.ceil((r0 + r2 + 1) * (r2 - r0) / (2 * n))
    l = math.ceil((r0 + r2 + 1) / 2)
    js = np.arange(1, r2 + 1)
    fixed = np.where(js <= r0, r1 - r0, np.where(js <= r1, r1 - js + 1, 0))
    starts = np.maximum(r1 + 1, js)
    if l < u or l < r1 - r0:
        raise AssertionError("cutoff ordering violated; parameters inconsistent")
    return BoundAuxiliaries(u, l, fixed, starts, r2)


def _elementary_symmetric(weights: np.ndarray, t_max: int) -> np.ndarray:
    """Elementary symmetric polynomials e_0..e_t_max of the given weights.

    One-pass recursion, exactly equal to summing the products over all
    subsets of each size without enumerating the subsets.
    """
    e = np.zeros(t_max + 1)
    e[0] = 1.0
    for w in weights:
        e[1:] += w * e[:-1]
    return e


def acceptance_lower_bound(params: LayerModelParams) -> float:
    """Closed-form lower bound on the zigzag acceptance probability.

    The probability that a model-drawn support has a strictly larger worst
    column count before the zigzag permutation than after it is at least

        1 - [prod over decaying layers m of (1-p_m)^m]
          * [prod over columns j of (1 + tail sums of subset products)]

    with the inner tail sums evaluated through elementary symmetric
    polynomials of the decay odds, truncated at the per-column cap.
    """
    aux = bound_auxiliaries(params)
    r0, r1, r2 = params.r0, params.r1, params.r2
    p = np.array([layer_probability(params, m) for m in range(r1 + 1, r2 + 1)])
    if (p >= 1.0).any():
        raise ValueError("decay so weak that a decaying layer has probability >= 1")
    weights = p / (1.0 - p)
    # log of prod_m (1-p_m)^m over the decaying band, to dodge underflow
    log_total = float(np.sum(np.arange(r1 + 1, r2 + 1) * np.log1p(-p)))
    for j in range(1, r2 + 1):
        k_j = int(aux.fixed_counts[j - 1])
        m_j = int(aux.decay_starts[j - 1])
        cap = min(aux.count_cutoff, r2 - r0, r2 - j + 1)
        t_max = cap - k_j
        w_j = weights[m_j - (r1 + 1):]
        if t_max <= 0 or w_j.size == 0:
            continue
        e = _elementary_symmetric(w_j, t_max)
        log_total += math.log1p(float(e[1:].sum()))
    return 1.0 - math.exp(log_total)


def _acceptance_geometry(params: LayerModelParams):
    """Cells that can be occupied, their probabilities, and column indices
    before/after the zigzag permutation (all 0-based)."""
    rows, cols = params.shape
    probs = layer_probabilities(params)
    zz = zigzag_permutation(rows, cols)
    cells = []
    for m in range(params.r0 + 1, params.r2 + 1):
        lo, hi = max(1, m - cols + 1), min(m, rows)
        for i in range(lo, hi + 1):
            j = m - i + 1
            cells.append((probs[m - 1], j - 1, int(zz.dest_flat[(i - 1) * cols + (j - 1)]) % cols))
    p = np.array([c[0] for c in cells])
    col_before = np.array([c[1] for c in cells], dtype=np.int64)
    col_after = np.array([c[2] for c in cells], dtype=np.int64)
    return p, col_before, col_after


def _column_counts(occupancy: np.ndarray, col_index: np.ndarray, n: int) -> np.ndarray:
    """Per-column counts for a batch of occupancy rows (exact small ints)."""
    onehot = np.zeros((col_index.size, n))
    onehot[np.arange(col_index.size), col_index] = 1.0
    return occupancy @ onehot


def monte_carlo_acceptance(params: LayerModelParams, trials: int, rng_seed: int) -> tuple[float, float]:
    """Estimate the zigzag acceptance probability by simulation.

    Returns (estimate, standard error). Deterministic for a given seed: the
    stream is consumed in fixed-size chunks regardless of ``trials``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    p, col_b, col_a = _acceptance_geometry(params)
    n = params.shape[1]
    gen = _rng.generator(rng_seed)
    hits = 0
    done = 0
    while done < trials:
        take = min(_MC_CHUNK, trials - done)
        u = _rng.uniform_open01(gen, (take, p.size))
        occ = (u < p).astype(np.float64)
        cheb_b = _column_counts(occ, col_b, n).max(axis=1)
        cheb_a = _column_counts(occ, col_a, n).max(axis=1)
        hits += int((cheb_a < cheb_b).sum())
        done += take
    est = hits / trials
    return est, math.sqrt(est * (1.0 - est) / trials)


def exact_acceptance_small(params: LayerModelParams) -> float:
    """Exact zigzag acceptance probability by weighted support enumeration.

    Only cells with probability strictly between 0 and 1 are enumerated
    (at most 20 of them); deterministic cells are folded into base counts.
    """
    p, col_b, col_a = _acceptance_geometry(params)
    n = params.shape[1]
    fixed = p == 1.0
    random = (p > 0.0) & (p < 1.0)
    t = int(random.sum())
    if t > 20:
        raise ValueError(f"{t} random cells exceed the enumeration limit of 20")
    base_b = np.bincount(col_b[fixed], minlength=n).astype(np.float64)
    base_a = np.bincount(col_a[fixed], minlength=n).astype(np.float64)
    if t == 0:
        return float(base_a.max() < base_b.max())
    pr = p[random]
    rb, ra = col_b[random], col_a[random]
    log_on, log_off = np.log(pr), np.log1p(-pr)
    total = 0.0
    chunk = 1 << 14
    for start in range(0, 1 << t, chunk):
        masks = np.arange(start, min(start + chunk, 1 << t), dtype=np.int64)
        bits = ((masks[:, None] >> np.arange(t)[None, :]) & 1).astype(np.float64)
        cheb_b = (base_b + _column_counts(bits, rb, n)).max(axis=1)
        cheb_a = (base_a + _column_counts(bits, ra, n)).max(axis=1)
        w = np.exp(bits @ log_on + (1.0 - bits) @ log_off)
        total += float(w[cheb_a < cheb_b].sum())
    return total


def row_iid_statistics(row_probs, n: int) -> tuple[float, float]:
    """Exact gap statistics for a grid with i.i.d. rows.

    Every cell of row i is occupied independently with probability
    ``row_probs[i]``. Returns the exact expectation of
    (max column count - min column count) and the exact probability that the
    gap is at most 1, by enumerating all 2**(M*N) occupancy patterns
    (deterministic rows are folded in; the grid may have at most 24 cells).
    """
    probs = np.asarray(row_probs, dtype=np.float64).reshape(-1)
    if ((probs < 0) | (probs > 1)).any():
        raise ValueError("row probabilities must lie in [0, 1]")
    if n < 1:
        raise ValueError("need at least one column")
    m = probs.size
    if m * n > 24:
        raise ValueError(f"grid has {m * n} cells; enumeration limit is 24")
    p_cell = np.repeat(probs, n)
    col = np.tile(np.arange(n, dtype=np.int64), m)
    fixed = p_cell == 1.0
    random = (p_cell > 0.0) & (p_cell < 1.0)
    base = np.bincount(col[fixed], minlength=n).astype(np.float64)
    t = int(random.sum())
    if t == 0:
        gap = float(base.max() - base.min())
        return gap, float(gap <= 1.0)
    pr, rc = p_cell[random], col[random]
    log_on, log_off = np.log(pr), np.log1p(-pr)
    e_gap = 0.0
    pr_le1 = 0.0
    chunk = 1 << 14
    for start in range(0, 1 << t, chunk):
        masks = np.arange(start, min(start + chunk, 1 << t), dtype=np.int64)
        bits = ((masks[:, None] >> np.arange(t)[None, :]) & 1).astype(np.float64)
        counts = base + _column_counts(bits, rc, n)
        gap = counts.max(axis=1) - counts.min(axis=1)
        w = np.exp(bits @ log_on + (1.0 - bits) @ log_off)
        e_gap += float(w @ gap)
        pr_le1 += float(w[gap <= 1.0].sum())
    return e_gap, pr_le1
