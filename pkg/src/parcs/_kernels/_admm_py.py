"""Pure-NumPy ADMM iteration loop for equality-constrained l1 minimization.

Reference implementation of the kernel contract; the compiled module in
``_admm_c.pyx`` runs the same recurrence. Kept dependency-free of the rest
of the package so the benchmark can import both kernels side by side.
"""

import math

import numpy as np

ADAPT_EVERY = 50    # iterations between penalty rebalance checks
ADAPT_RATIO = 10.0  # residual imbalance that triggers a rebalance
ADAPT_SCALE = 2.0   # penalty multiplier applied on rebalance


def admm_bp_kernel(a, proj, q, rho, max_iter, abs_tol, rel_tol, adapt=True):
    """Iterate min |x|_1 s.t. Ax = y given proj = A^T (A A^T)^-1, q = proj y.

    The x-step projects onto the affine feasible set, the z-step
    soft-thresholds at 1/rho, and the scaled dual u absorbs the gap. When
    ``adapt`` is set, rho is doubled or halved every ADAPT_EVERY iterations
    if the primal and dual residuals drift more than ADAPT_RATIO apart
    (rescaling u to keep the dual consistent). Returns
    (x, z, iterations, converged, primal_residual, dual_residual,
    subgradient); x is always exactly feasible, z carries the sparse
    iterate, and subgradient = rho*u converges to an l1 subdifferential
    element of the solution (the optimality certificate: entries in
    [-1, 1], equal to the sign on the support).
    """
    m = a.shape[1]
    sq = math.sqrt(m)
    x = np.zeros(m)
    z = np.zeros(m)
    u = np.zeros(m)
    r_norm = s_norm = 0.0
    iterations = 0
    converged = False
    for iterations in range(1, max_iter + 1):
        v = z - u
        x = v - proj @ (a @ v) + q
        t = x + u
        z_new = np.sign(t) * np.maximum(np.abs(t) - 1.0 / rho, 0.0)
        u = t - z_new
        r_norm = float(np.linalg.norm(x - z_new))
        s_norm = rho * float(np.linalg.norm(z_new - z))
        z = z_new
        eps_pri = sq * abs_tol + rel_tol * max(float(np.linalg.norm(x)), float(np.linalg.norm(z)))
        eps_dual = sq * abs_tol + rel_tol * rho * float(np.linalg.norm(u))
        if r_norm <= eps_pri and s_norm <= eps_dual:
            converged = True
            break
        if adapt and iterations % ADAPT_EVERY == 0:
            if r_norm > ADAPT_RATIO * s_norm:
                rho *= ADAPT_SCALE
                u /= ADAPT_SCALE
            elif s_norm > ADAPT_RATIO * r_norm:
                rho /= ADAPT_SCALE
                u *= ADAPT_SCALE
    return x, z, iterations, converged, r_norm, s_norm, rho * u
