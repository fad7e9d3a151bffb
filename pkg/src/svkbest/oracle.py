"""Independent ground-truth solvers for cross-checking.

The reference solver is projected gradient ascent with an exact projection
onto {a : y@a = 0} intersected with the box [0, C]^m; the projection's scalar
dual multiplier is located by bisection. Deliberately a different algorithm
from the production solver so bugs cannot confirm themselves.

The engine is written over a batch of index subsets (one mask row per
subset); rows evolve independently and freeze as soon as their own objective
change drops below the tolerance, so a batch of one reproduces a solo solve.
"""

from __future__ import annotations

import numpy as np

from .canonical import min_norm_optimum
from .data import Dataset, IndexSet
from .errors import OracleError
from .kernels import KernelSpec, gram
from .solver import DualSolution, SolverParams, objective, support_of

BRUTE_FORCE_MAX_N = 12
_OBJ_TOL = 1e-10
_MAX_ITERS = 200_000
_BISECT_STEPS = 64


def project_feasible(v: np.ndarray, y: np.ndarray, C: float,
                     mask: np.ndarray | None = None) -> np.ndarray:
    """Euclidean projection of each row of v onto the feasible polytope.

    mask rows pin coordinates outside an index subset to zero.
    """
    V = np.atleast_2d(np.asarray(v, dtype=np.float64))
    yf = np.asarray(y, dtype=np.float64)
    M = np.ones_like(V) if mask is None else np.asarray(mask, dtype=np.float64)
    A = _project_rows(V, yf, C, M)
    return A[0] if np.asarray(v).ndim == 1 else A


def _project_rows(V: np.ndarray, y: np.ndarray, C: float, mask: np.ndarray) -> np.ndarray:
    # alpha_j(lam) = clip(v_j - lam * y_j, 0, C) on unmasked coords;
    # h(lam) = y @ alpha(lam) is nonincreasing, root found by bisection.
    bound = np.max(np.abs(V), axis=1) + C + 1.0
    lo = -bound
    hi = bound
    for _ in range(_BISECT_STEPS):
        mid = 0.5 * (lo + hi)
        A = np.clip(V - mid[:, None] * y[None, :], 0.0, C) * mask
        h = A @ y
        gt = h > 0.0
        lo = np.where(gt, mid, lo)
        hi = np.where(gt, hi, mid)
    mid = 0.5 * (lo + hi)
    return np.clip(V - mid[:, None] * y[None, :], 0.0, C) * mask


def _objective_rows(A: np.ndarray, Qt: np.ndarray) -> np.ndarray:
    # f(a) = sum(a) - 1/2 a^T Qt a with Qt = (y y^T) * K
    return A.sum(axis=1) - 0.5 * np.einsum("ij,ij->i", A @ Qt, A)


def _pg_solve_batch(K: np.ndarray, y: np.ndarray, C: float,
                    mask: np.ndarray) -> tuple[np.ndarray, np.ndarray, int]:
    """Run every mask row to convergence; returns (alphas, objectives, iters).

    A row freezes the first time its own objective change drops below the
    tolerance, so its trajectory does not depend on its batch companions.
    """
    yf = y.astype(np.float64)
    Qt = (yf[:, None] * yf[None, :]) * K
    eigs = np.linalg.eigvalsh(Qt)
    L = float(eigs[-1]) if eigs.size else 1.0
    eta = 1.0 / L if L > 1e-12 else 1.0

    rows = mask.shape[0]
    A_out = np.zeros((rows, mask.shape[1]))
    f_out = np.zeros(rows)
    live = np.arange(rows)
    A = np.zeros_like(mask, dtype=np.float64)
    M = mask.astype(np.float64)
    f = _objective_rows(A, Qt)
    iters = 0
    while live.size:
        if iters >= _MAX_ITERS:
            raise OracleError(f"projected gradient hit the {_MAX_ITERS} iteration cap")
        G = 1.0 - A @ Qt  # gradient of f
        A = _project_rows(A + eta * G, yf, C, M)
        f_new = _objective_rows(A, Qt)
        done = np.abs(f_new - f) < _OBJ_TOL
        if done.any():
            A_out[live[done]] = A[done]
            f_out[live[done]] = f_new[done]
            keep = ~done
            live = live[keep]
            A = A[keep]
            M = M[keep]
            f = f_new[keep]
        else:
            f = f_new
        iters += 1
    return A_out, f_out, iters


def _oracle_bias(y: np.ndarray, alpha: np.ndarray, u: np.ndarray,
                 C: float, thr: float) -> float:
    if not np.any(alpha > thr):
        return 0.0
    yf = y.astype(np.float64)
    free = np.flatnonzero((alpha > thr) & (alpha < C - thr))
    if free.size:
        return float(np.mean(yf[free] - u[free]))
    pos = y > 0
    lower = np.concatenate([(1.0 - u)[pos & (alpha < C - thr)],
                            (-1.0 - u)[~pos & (alpha > thr)]])
    upper = np.concatenate([(1.0 - u)[pos & (alpha > thr)],
                            (-1.0 - u)[~pos & (alpha < C - thr)]])
    if lower.size and upper.size:
        return float((np.max(lower) + np.min(upper)) / 2.0)
    if lower.size:
        return float(np.max(lower))
    if upper.size:
        return float(np.min(upper))
    return 0.0


def qp_reference_solve(ds: Dataset, I: IndexSet, C: float, kernel: KernelSpec,
                       params: SolverParams | None = None) -> DualSolution:
    """Reference optimum of f over F(I) by projected gradient ascent."""
    params = params or SolverParams()
    if len(I) > 64:
        raise OracleError("dense reference solver is capped at |I| <= 64")
    members = list(I)
    if members and (members[0] < 1 or members[-1] > ds.n):
        raise OracleError(f"index set not within [1, {ds.n}]")

    mask_row = np.zeros(ds.n)
    for j in members:
        mask_row[j - 1] = 1.0
    rows = np.array([j - 1 for j in members], dtype=np.int64)
    y_sub = ds.y[rows] if rows.size else ds.y[:0]
    K = None
    if rows.size == 0 or np.all(y_sub > 0) or np.all(y_sub < 0):
        alpha = np.zeros(ds.n)
        iters = 0
    else:
        K = gram(kernel, ds).values
        A, _, iters = _pg_solve_batch(K, ds.y, C, mask_row[None, :])
        alpha = A[0]

    thr = params.effective_support_threshold(C)
    if np.any(alpha > thr):
        K_sub = K[np.ix_(rows, rows)]
        alpha_sub = alpha[rows]
        u_sub = K_sub @ (alpha_sub * y_sub)
        b = _oracle_bias(y_sub, alpha_sub, u_sub, C, thr)
        alpha_sub = min_norm_optimum(K_sub, y_sub, C, alpha_sub, u_sub, b)
        alpha = np.zeros(ds.n)
        alpha[rows] = alpha_sub
        u_sub = K_sub @ (alpha_sub * y_sub)
        b = _oracle_bias(y_sub, alpha_sub, u_sub, C, thr)
    else:
        b = 0.0
    obj = objective(alpha, ds, kernel)
    return DualSolution(
        alpha=alpha,
        solved_index_set=I,
        support=support_of(alpha, thr),
        objective=obj,
        bias=b,
        C=C,
        kernel=kernel,
        converged=True,
        updates=iters,
    )


def brute_force_enumerate(ds: Dataset, C: float, kernel: KernelSpec,
                          params: SolverParams | None = None
                          ) -> list[tuple[IndexSet, float]]:
    """All distinct supports over every index subset, best objective first.

    Solves the reference problem for all 2^n subsets, deduplicates by support
    keeping the largest objective, and sorts by (objective desc, support
    lexicographic asc).
    """
    params = params or SolverParams()
    n = ds.n
    if n > BRUTE_FORCE_MAX_N:
        raise OracleError(f"brute force is capped at n <= {BRUTE_FORCE_MAX_N}")
    K = gram(kernel, ds).values
    count = 1 << n
    mask = np.zeros((count, n))
    for m in range(count):
        for b in range(n):
            if m >> b & 1:
                mask[m, b] = 1.0

    A, _, _ = _pg_solve_batch(K, ds.y, C, mask)

    thr = params.effective_support_threshold(C)
    best: dict[tuple[int, ...], float] = {}
    for m in range(count):
        alpha = A[m]
        if np.any(alpha > thr):
            rows = np.flatnonzero(mask[m] > 0.0)
            K_sub = K[np.ix_(rows, rows)]
            y_sub = ds.y[rows]
            alpha_sub = alpha[rows]
            u_sub = K_sub @ (alpha_sub * y_sub)
            b = _oracle_bias(y_sub, alpha_sub, u_sub, C, thr)
            alpha_sub = min_norm_optimum(K_sub, y_sub, C, alpha_sub, u_sub, b)
            alpha = np.zeros(n)
            alpha[rows] = alpha_sub
        supp = tuple((np.flatnonzero(alpha > thr) + 1).tolist())
        obj = objective(alpha, ds, kernel)
        if supp not in best or obj > best[supp]:
            best[supp] = obj
    ordered = sorted(best.items(), key=lambda kv: (-kv[1], kv[0]))
    return [(IndexSet(supp), obj) for supp, obj in ordered]
