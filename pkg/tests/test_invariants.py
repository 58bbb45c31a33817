"""Cross-module contracts: recovery guarantees, optimality certificates,
and statistical error behavior of the full sensing -> reconstruction path.
"""

import numpy as np
import pytest

from parcs.core import Signal2D
from parcs.recon import SolverOptions, reconstruct_parallel, solve_basis_pursuit
from parcs.sensing import (
    SensingMatrix,
    gaussian_sensing,
    restricted_isometry_constant,
    sample_parallel,
)

RIP_WORKING_LIMIT = 2 ** 0.5 - 1


def _certificate_holds(a, result, tol=1e-4):
    """Check the solver's optimality certificate against the solution.

    The reported subgradient must lie in the unit box, equal the solution's
    signs on its support, and be a combination of measurement rows (so it
    certifies l1 minimality over the whole feasible affine space).
    """
    g = result.subgradient
    if np.abs(g).max() > 1.0 + tol:
        return False
    support = np.abs(result.x) > 1e-6 * max(np.abs(result.x).max(), 1.0)
    if np.abs(g[support] - np.sign(result.x[support])).max() > 10 * tol:
        return False
    nu, *_ = np.linalg.lstsq(a.entries.T, g, rcond=None)
    return np.abs(a.entries.T @ nu - g).max() <= tol


class TestExactRecoveryUnderRip:
    def test_all_one_sparse_signals_recovered(self):
        # near-orthogonal 10-column operator with a verified isometry
        # constant inside the working range delta_2 < sqrt(2) - 1
        rng = np.random.default_rng(42)
        q, _ = np.linalg.qr(rng.normal(size=(10, 10)))
        a = SensingMatrix.from_entries(q + 0.03 * rng.normal(size=(10, 10)))
        delta2 = restricted_isometry_constant(a, 2)
        assert 0.0 < delta2 < RIP_WORKING_LIMIT
        for position in range(10):
            for value in (1.0, -2.5, 1e-3):
                x = np.zeros(10)
                x[position] = value
                res = solve_basis_pursuit(a, a.entries @ x)
                assert res.converged
                assert np.abs(res.x - x).max() < 1e-8

    def test_column_batch_recovered_exactly(self):
        rng = np.random.default_rng(43)
        q, _ = np.linalg.qr(rng.normal(size=(10, 10)))
        a = SensingMatrix.from_entries(q + 0.03 * rng.normal(size=(10, 10)))
        assert restricted_isometry_constant(a, 2) < RIP_WORKING_LIMIT
        x = np.zeros((10, 10))
        for j in range(10):
            x[j, j] = (-1.0) ** j * (j + 1)
        batch = sample_parallel(a, Signal2D(x))
        rec = reconstruct_parallel(a, batch, workers=2)
        assert np.abs(rec.signal.entries - x).max() < 1e-8


class TestOptimalityCertificate:
    def test_planted_instances_certified(self):
        for trial in range(20):
            a = gaussian_sensing(24, 64, seed=2000 + trial)
            rng = np.random.default_rng(trial)
            x = np.zeros(64)
            x[rng.choice(64, size=4, replace=False)] = rng.normal(size=4) * 2.0
            res = solve_basis_pursuit(a, a.entries @ x)
            assert res.converged
            assert res.feasibility_gap <= 1e-8
            assert _certificate_holds(a, res), trial

    def test_tiny_lp_instances_certified(self):
        tight = SolverOptions(max_iterations=200_000, abs_tol=1e-11, rel_tol=1e-11)
        for trial in range(20):
            a = gaussian_sensing(4, 7, seed=3000 + trial)
            rng = np.random.default_rng(trial)
            x = np.zeros(7)
            x[rng.choice(7, size=2, replace=False)] = rng.normal(size=2)
            res = solve_basis_pursuit(a, a.entries @ x, tight)
            assert res.converged
            assert _certificate_holds(a, res, tol=1e-6), trial


class TestErrorMonotonicity:
    def test_median_error_nonincreasing_in_k(self):
        medians = []
        for k in (40, 60, 80, 100):
            a = gaussian_sensing(k, 256, seed=321)
            errors = []
            for t in range(9):
                rng = np.random.default_rng(900 + t)
                x = np.zeros(256)
                x[rng.choice(256, size=8, replace=False)] = rng.normal(size=8) * 3.0
                res = solve_basis_pursuit(a, a.entries @ x)
                errors.append(float(np.linalg.norm(res.x - x)))
            medians.append(float(np.median(errors)))
        # allow machine-precision wiggle once recovery is exact
        assert all(b <= a + 1e-9 for a, b in zip(medians, medians[1:])), medians
