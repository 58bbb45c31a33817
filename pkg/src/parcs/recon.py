"""Column reconstruction: l1 minimization, greedy pursuit, and the
column-parallel orchestration above them.

The equality-constrained l1 solver is an operator-splitting (ADMM)
iteration whose hot loop lives in ``parcs._kernels`` (compiled when
available). Columns of a measurement batch are independent work units that
share the read-only sensing matrix; results are bit-identical for any
worker count because each column's computation never depends on scheduling.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from ._kernels import BACKEND, admm_bp_kernel
from .core import Signal2D
from .permute import PermutationMap
from .sensing import MeasurementBatch, SensingMatrix

__all__ = [
    "SolverOptions",
    "BasisPursuitResult",
    "OmpResult",
    "ParallelReconstruction",
    "solve_basis_pursuit",
    "solve_omp",
    "reconstruct_parallel",
    "reconstruct_2d",
    "BACKEND",
]


@dataclass(frozen=True)
class SolverOptions:
    """Stopping controls for the l1 solver.

    ``feas_tol`` is relative: a returned point x is considered feasible when
    |Ax - y|_2 <= feas_tol * (1 + |y|_2). ``polish`` re-fits the detected
    support by least squares and keeps the result only when it is feasible
    and does not increase the l1 objective.

    ``rho`` is the splitting penalty; None (the default) scales it to the
    measurement norm per column (1/|y|_2), which makes iteration counts
    invariant to signal scale, and ``adapt_rho`` lets the residual-balancing
    heuristic retune it during the run. ``iteration_budget``, if set, caps
    each column at iteration_budget/(K*M) iterations (never above
    ``max_iterations``), i.e. roughly constant compute per column however
    many measurements it has.
    """

    max_iterations: int = 20000
    abs_tol: float = 1e-9
    rel_tol: float = 1e-9
    feas_tol: float = 1e-8
    rho: float | None = None
    adapt_rho: bool = True
    polish: bool = True
    iteration_budget: int | None = None

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        for name in ("abs_tol", "rel_tol", "feas_tol"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.rho is not None and self.rho <= 0:
            raise ValueError("rho must be positive")
        if self.iteration_budget is not None and self.iteration_budget < 1:
            raise ValueError("iteration_budget must be >= 1")

    def effective_max_iterations(self, k: int, m: int) -> int:
        if self.iteration_budget is None:
            return self.max_iterations
        return max(1, min(self.max_iterations, self.iteration_budget // (k * m)))


@dataclass(frozen=True)
class BasisPursuitResult:
    """Solver outcome for one column; ``x`` is the best iterate either way.

    ``subgradient`` is the solver's optimality certificate: at convergence
    it lies in the l1 subdifferential of the solution (entries within
    [-1, 1], matching the sign of every nonzero of x) and is expressible as
    A^T nu for a dual vector nu.
    """

    x: np.ndarray
    converged: bool
    iterations: int
    primal_residual: float
    dual_residual: float
    feasibility_gap: float
    subgradient: np.ndarray


@dataclass(frozen=True)
class OmpResult:
    x: np.ndarray
    support: tuple[int, ...]
    iterations: int
    residual_norm: float
    status: str  # "ok" or "rank_deficient"


@dataclass(frozen=True)
class ParallelReconstruction:
    """A reconstructed 2D signal plus the per-column solver outcomes."""

    signal: Signal2D
    column_results: tuple[BasisPursuitResult, ...]

    @property
    def all_converged(self) -> bool:
        return all(r.converged for r in self.column_results)


def _projector(a: SensingMatrix) -> np.ndarray:
    """A^T (A A^T)^-1, the piece of the feasible-set projection worth caching."""
    gram = a.entries @ a.entries.T
    try:
        factor = cho_factor(gram)
    except np.linalg.LinAlgError as exc:
        raise ValueError("sensing matrix has linearly dependent rows") from exc
    return np.ascontiguousarray(cho_solve(factor, a.entries).T)


def _polish(a_entries: np.ndarray, y: np.ndarray, x: np.ndarray, z: np.ndarray,
            feas_tol: float) -> np.ndarray:
    """Least-squares refit on the sparse iterate's support.

    Accepted only when the refit stays feasible and does not increase the
    objective, so the returned point is never worse than the ADMM iterate.
    """
    support = np.nonzero(z)[0]
    if not 0 < support.size <= a_entries.shape[0]:
        return x
    sol, _, rank, _ = np.linalg.lstsq(a_entries[:, support], y, rcond=None)
    if rank < support.size:
        return x
    candidate = np.zeros_like(x)
    candidate[support] = sol
    y_scale = 1.0 + float(np.linalg.norm(y))
    if float(np.linalg.norm(a_entries @ candidate - y)) > feas_tol * y_scale:
        return x
    if float(np.abs(candidate).sum()) > float(np.abs(x).sum()):
        return x
    return candidate


def _solve_column(a_entries: np.ndarray, proj: np.ndarray, y: np.ndarray,
                  opts: SolverOptions) -> BasisPursuitResult:
    q = proj @ y
    if opts.rho is not None:
        rho = opts.rho
    else:
        y_norm = float(np.linalg.norm(y))
        rho = 1.0 if y_norm == 0.0 else 1.0 / y_norm
    max_iter = opts.effective_max_iterations(*a_entries.shape)
    x, z, iterations, converged, r_norm, s_norm, subgradient = admm_bp_kernel(
        a_entries, proj, q, rho, max_iter, opts.abs_tol, opts.rel_tol, opts.adapt_rho
    )
    if opts.polish and converged:
        x = _polish(a_entries, y, x, z, opts.feas_tol)
    gap = float(np.linalg.norm(a_entries @ x - y)) / (1.0 + float(np.linalg.norm(y)))
    return BasisPursuitResult(x, converged, iterations, r_norm, s_norm, gap, subgradient)


def solve_basis_pursuit(a: SensingMatrix, y: np.ndarray,
                        opts: SolverOptions | None = None) -> BasisPursuitResult:
    """Minimize |x|_1 subject to Ax = y.

    Deterministic for fixed inputs and options. Non-convergence within the
    iteration budget is reported through ``converged`` on the result, which
    still carries the best (feasible) iterate.
    """
    opts = opts or SolverOptions()
    y = np.ascontiguousarray(y, dtype=np.float64).reshape(-1)
    if y.size != a.k:
        raise ValueError(f"measurement length {y.size} != k = {a.k}")
    if not np.isfinite(y).all():
        raise ValueError("measurements must be finite")
    return _solve_column(a.entries, _projector(a), y, opts)


def solve_omp(a: SensingMatrix, y: np.ndarray, s_max: int,
              residual_tol: float = 1e-12) -> OmpResult:
    """Orthogonal matching pursuit with least-squares refits.

    Picks the column whose normalized correlation with the residual is
    largest (ties: lowest index), refits on the grown support, and stops
    after ``s_max`` picks or once the residual is negligible. The residual
    norm never increases.
    """
    if not 1 <= s_max <= a.k:
        raise ValueError(f"need 1 <= s_max <= k, got s_max={s_max}, k={a.k}")
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if y.size != a.k:
        raise ValueError(f"measurement length {y.size} != k = {a.k}")
    col_norms = np.linalg.norm(a.entries, axis=0)
    scale = np.where(col_norms > 0, col_norms, 1.0)
    y_scale = 1.0 + float(np.linalg.norm(y))
    support: list[int] = []
    sol = np.empty(0)
    residual = y.copy()
    status = "ok"
    iterations = 0
    for _ in range(s_max):
        if float(np.linalg.norm(residual)) <= residual_tol * y_scale:
            break
        corr = np.abs(a.entries.T @ residual) / scale
        pick = int(np.argmax(corr))
        if corr[pick] <= residual_tol or pick in support:
            break  # no further progress possible
        support.append(pick)
        iterations += 1
        sub = a.entries[:, support]
        sol, _, rank, _ = np.linalg.lstsq(sub, y, rcond=None)
        if rank < len(support):
            status = "rank_deficient"
            support.pop()
            sol = sol[:-1]
            break
        residual = y - sub @ sol
    x = np.zeros(a.m)
    if support:
        x[support] = sol[: len(support)]
    return OmpResult(x, tuple(support), iterations, float(np.linalg.norm(residual)), status)


def reconstruct_parallel(a: SensingMatrix, yb: MeasurementBatch,
                         opts: SolverOptions | None = None,
                         workers: int = 1) -> ParallelReconstruction:
    """Solve every measurement column independently, optionally on threads.

    The output is bit-identical for any ``workers`` >= 1; with the compiled
    kernel the solves run without the GIL, so threads give real speedup.
    """
    opts = opts or SolverOptions()
    if workers < 1:
        raise ValueError("workers must be >= 1")
    if yb.k != a.k:
        raise ValueError(f"batch has k={yb.k}, matrix has k={a.k}")
    proj = _projector(a)
    columns = [np.ascontiguousarray(yb.columns[:, j]) for j in range(yb.n)]

    def solve(j: int) -> BasisPursuitResult:
        return _solve_column(a.entries, proj, columns[j], opts)

    if workers == 1:
        results = [solve(j) for j in range(yb.n)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(solve, range(yb.n)))
    out = np.empty((a.m, yb.n))
    for j, res in enumerate(results):
        out[:, j] = res.x
    return ParallelReconstruction(Signal2D(out), tuple(results))


def reconstruct_2d(a: SensingMatrix, yb: MeasurementBatch, p: PermutationMap,
                   opts: SolverOptions | None = None,
                   workers: int = 1) -> ParallelReconstruction:
    """Column reconstruction followed by the inverse permutation."""
    if yb.perm_tag != p.tag:
        raise ValueError(f"batch was sampled under '{yb.perm_tag}', not '{p.tag}'")
    rec = reconstruct_parallel(a, yb, opts, workers)
    return ParallelReconstruction(p.inverse().apply(rec.signal), rec.column_results)
