"""Deterministic constrained dual SVM solver.

Maximizes    f(a) = sum_j a_j - 1/2 sum_ij a_i a_j y_i y_j K(x_i, x_j)
subject to   (i) sum_j a_j y_j = 0,  (ii) 0 <= a_j <= C,
             (iii) a_j = 0 for j outside the index set I.

Condition (iii) is honored by solving the ordinary problem on the rows of I
(the objective only sees nonzero coordinates) and re-expanding, so the result
is a function of the row subset alone. The working pair is always the maximal
KKT-violating pair with ties broken by the smallest index, and the multipliers
start at zero, which makes the whole solve a pure function of (S_I, C, K).

After SMO reaches its tolerance, an active-set polish solves the
equality-constrained subproblem on the free coordinates exactly. This drives
the objective gap to machine precision; the enumeration layer relies on that
to keep its output ordering clean at 1e-9 slack. Finally, degenerate optimal
faces are resolved to their minimum-norm point (see canonical.py), so the
returned model is a function of the optimal face rather than of the search
path taken to reach it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .canonical import min_norm_optimum
from .data import Dataset, IndexSet, restrict
from .errors import DataError
from .kernels import GramMatrix, KernelSpec, gram, kernel_matrix


@dataclass(frozen=True)
class SolverParams:
    kkt_tolerance: float = 1e-6
    max_updates: int | None = None  # None: 10 * m * 1000 pair updates
    support_threshold: float | None = None  # None: 1e-8 * C

    def __post_init__(self):
        if self.kkt_tolerance <= 0:
            raise DataError("kkt_tolerance must be positive")
        if self.max_updates is not None and self.max_updates < 1:
            raise DataError("max_updates must be positive")
        if self.support_threshold is not None and self.support_threshold <= 0:
            raise DataError("support_threshold must be positive")

    def effective_support_threshold(self, C: float) -> float:
        return self.support_threshold if self.support_threshold is not None else 1e-8 * C

    def effective_max_updates(self, m: int) -> int:
        return self.max_updates if self.max_updates is not None else 10 * max(m, 1) * 1000


@dataclass(frozen=True)
class DualSolution:
    """Solved multipliers over the full dataset, with provenance."""

    alpha: np.ndarray
    solved_index_set: IndexSet
    support: IndexSet
    objective: float
    bias: float
    C: float
    kernel: KernelSpec
    converged: bool = True
    updates: int = 0

    def __post_init__(self):
        a = np.asarray(self.alpha, dtype=np.float64)
        object.__setattr__(self, "alpha", a)
        a.setflags(write=False)

    @property
    def n(self) -> int:
        return self.alpha.shape[0]

    def to_json_dict(self) -> dict:
        return {
            "I": list(self.solved_index_set),
            "support": list(self.support),
            "alpha": {str(j): float(self.alpha[j - 1]) for j in self.support},
            "objective": self.objective,
            "bias": self.bias,
        }


def objective(alpha, ds: Dataset, kernel: KernelSpec) -> float:
    """f(alpha) evaluated over the nonzero coordinates in ascending order.

    Restricting the dataset to any superset of the nonzero coordinates and
    evaluating there performs the identical arithmetic, so the two values
    agree bitwise.
    """
    alpha = np.asarray(alpha, dtype=np.float64)
    if alpha.shape != (ds.n,):
        raise DataError(f"alpha length {alpha.shape} does not match n={ds.n}")
    nz = np.flatnonzero(alpha)
    if nz.size == 0:
        return 0.0
    v = alpha[nz] * ds.y[nz]
    K = kernel_matrix(kernel, ds.X[nz], ds.X[nz])
    lin = float(np.sum(alpha[nz]))
    quad = float(v @ (K @ v))
    return lin - 0.5 * quad


def support_of(alpha, threshold: float) -> IndexSet:
    """1-based indices with alpha strictly above the threshold."""
    if threshold <= 0:
        raise DataError("support threshold must be positive")
    alpha = np.asarray(alpha, dtype=np.float64)
    return IndexSet((np.flatnonzero(alpha > threshold) + 1).tolist())


def is_feasible(alpha, ds: Dataset, C: float, I: IndexSet,
                params: SolverParams | None = None) -> bool:
    """Conditions (i) equality, (ii) box, (iii) support inside I, with slack."""
    params = params or SolverParams()
    alpha = np.asarray(alpha, dtype=np.float64)
    if alpha.shape != (ds.n,):
        raise DataError(f"alpha length {alpha.shape} does not match n={ds.n}")
    slack = 1e-9 * C
    if abs(float(alpha @ ds.y)) > slack * max(ds.n, 1):
        return False
    if np.any(alpha < -slack) or np.any(alpha > C + slack):
        return False
    thr = params.effective_support_threshold(C)
    outside = np.ones(ds.n, dtype=bool)
    outside[[j - 1 for j in I]] = False
    return not np.any(alpha[outside] > thr)


def _smo(K: np.ndarray, y: np.ndarray, C: float, tol: float, max_updates: int,
         alpha: np.ndarray, u: np.ndarray) -> tuple[bool, int]:
    """Maximal-violating-pair SMO on the restricted problem, in place.

    u tracks sum_l alpha_l y_l K(x_l, x_k). Returns (converged, updates).
    """
    yf = y.astype(np.float64)
    pos = y > 0
    updates = 0
    while updates < max_updates:
        vals = yf - u
        up = (pos & (alpha < C)) | (~pos & (alpha > 0.0))
        dn = (~pos & (alpha < C)) | (pos & (alpha > 0.0))
        if not up.any() or not dn.any():
            return True, updates
        i = int(np.argmax(np.where(up, vals, -np.inf)))
        j = int(np.argmin(np.where(dn, vals, np.inf)))
        viol = vals[i] - vals[j]
        if viol <= tol:
            return True, updates
        quad = K[i, i] + K[j, j] - 2.0 * K[i, j]
        t = viol / max(quad, 1e-12)
        hi_i = (C - alpha[i]) if pos[i] else alpha[i]
        hi_j = alpha[j] if pos[j] else (C - alpha[j])
        cap = min(hi_i, hi_j)
        if cap <= 0.0:
            return True, updates  # masks exclude this; defensive
        if t >= cap:
            t = cap
        if t >= hi_i:
            alpha[i] = C if pos[i] else 0.0
        else:
            alpha[i] += yf[i] * t
        if t >= hi_j:
            alpha[j] = 0.0 if pos[j] else C
        else:
            alpha[j] -= yf[j] * t
        u += t * (K[i] - K[j])
        updates += 1
    return False, updates


def _polish(K: np.ndarray, y: np.ndarray, C: float, alpha: np.ndarray,
            u: np.ndarray, max_rounds: int = 60) -> None:
    """Exact stationarity on the free face, in place.

    Solves the equality-constrained Newton system on the free coordinates;
    a blocked step clips the blocking coordinate exactly to its bound and
    retries on the reduced face. Objective is non-decreasing throughout.
    """
    yf = y.astype(np.float64)
    band = 1e-10 * C
    for _ in range(max_rounds):
        free = np.flatnonzero((alpha > band) & (alpha < C - band))
        k = free.size
        if k == 0:
            return
        yF = yf[free]
        gF = 1.0 - yF * u[free]
        M = np.zeros((k + 1, k + 1))
        M[:k, :k] = (yF[:, None] * yF[None, :]) * K[np.ix_(free, free)]
        M[:k, k] = yF
        M[k, :k] = yF
        rhs = np.zeros(k + 1)
        rhs[:k] = gF
        try:
            delta = np.linalg.solve(M, rhs)[:k]
        except np.linalg.LinAlgError:
            delta = np.linalg.lstsq(M, rhs, rcond=None)[0][:k]
        # keep the equality constraint exact even on singular faces
        delta = delta - (float(delta @ yF) / k) * yF
        if float(np.max(np.abs(delta))) <= 1e-14 * max(1.0, C):
            return
        step_limit = 1.0
        blocker = -1
        for t in range(k):
            dt = delta[t]
            if dt > 0.0:
                room = (C - alpha[free[t]]) / dt
            elif dt < 0.0:
                room = alpha[free[t]] / -dt
            else:
                continue
            if room < step_limit:
                step_limit = room
                blocker = t
        if step_limit > 0.0:
            moved = step_limit * delta
            alpha[free] += moved
            u += K[:, free] @ (moved * yF)
        if blocker >= 0:
            alpha[free[blocker]] = C if delta[blocker] > 0.0 else 0.0
        np.clip(alpha, 0.0, C, out=alpha)
        if blocker < 0:
            return  # full Newton step: stationary on this face


def _max_violation(y: np.ndarray, alpha: np.ndarray, u: np.ndarray, C: float) -> float:
    yf = y.astype(np.float64)
    pos = y > 0
    vals = yf - u
    up = (pos & (alpha < C)) | (~pos & (alpha > 0.0))
    dn = (~pos & (alpha < C)) | (pos & (alpha > 0.0))
    if not up.any() or not dn.any():
        return 0.0
    return float(np.max(vals[up]) - np.min(vals[dn]))


def _zero_solution(ds: Dataset, I: IndexSet, C: float,
                   kernel: KernelSpec) -> DualSolution:
    return DualSolution(
        alpha=np.zeros(ds.n),
        solved_index_set=I,
        support=IndexSet(),
        objective=0.0,
        bias=0.0,
        C=C,
        kernel=kernel,
        converged=True,
        updates=0,
    )


def solve_constrained(ds: Dataset, I: IndexSet, C: float, kernel: KernelSpec,
                      params: SolverParams | None = None,
                      gram_cache: GramMatrix | None = None) -> DualSolution:
    """Deterministic optimum of f over F(I).

    Degenerate subproblems (empty I, single index, one-class rows) return the
    zero solution. Non-convergence is reported on the ``converged`` flag with
    the best multipliers so far, never raised.
    """
    params = params or SolverParams()
    if C <= 0:
        raise DataError("C must be positive")
    members = list(I)
    if members and (members[0] < 1 or members[-1] > ds.n):
        raise DataError(f"index set not within [1, {ds.n}]")
    rows = np.array(members, dtype=np.int64) - 1
    y_sub = ds.y[rows] if rows.size else ds.y[:0]
    if rows.size == 0 or np.all(y_sub > 0) or np.all(y_sub < 0):
        return _zero_solution(ds, I, C, kernel)

    if gram_cache is not None:
        K = gram_cache.values[np.ix_(rows, rows)]
    else:
        K = gram(kernel, restrict(ds, I)).values
    m = rows.size
    tol = params.kkt_tolerance
    budget = params.effective_max_updates(m)

    alpha = np.zeros(m)
    u = np.zeros(m)
    converged = False
    used = 0
    for _ in range(5):
        ok, updates = _smo(K, y_sub, C, tol, budget - used, alpha, u)
        used += updates
        if not ok:
            break
        _polish(K, y_sub, C, alpha, u)
        u[:] = K @ (alpha * y_sub)
        if _max_violation(y_sub, alpha, u, C) <= tol:
            converged = True
            break

    # arithmetic dust only; the equality constraint moves by <= m * 1e-12 * C
    dust = 1e-12 * C
    alpha[alpha <= dust] = 0.0
    alpha[alpha >= C - dust] = C
    u = K @ (alpha * y_sub)

    # resolve degenerate optimal faces to their unique minimum-norm point;
    # objective, margins and predictions are invariant along the face
    thr0 = params.effective_support_threshold(C)
    b0 = _bias_from_state(y_sub, alpha, u, C, thr0)
    alpha = min_norm_optimum(K, y_sub, C, alpha, u, b0)
    u = K @ (alpha * y_sub)

    alpha_full = np.zeros(ds.n)
    alpha_full[rows] = alpha
    thr = params.effective_support_threshold(C)
    sub_ds = restrict(ds, I)
    obj = objective(alpha, sub_ds, kernel)
    b = _bias_from_state(y_sub, alpha, u, C, thr)
    return DualSolution(
        alpha=alpha_full,
        solved_index_set=I,
        support=support_of(alpha_full, thr),
        objective=obj,
        bias=b,
        C=C,
        kernel=kernel,
        converged=converged,
        updates=used,
    )


def _bias_from_state(y: np.ndarray, alpha: np.ndarray, u: np.ndarray,
                     C: float, thr: float) -> float:
    if not np.any(alpha > thr):
        return 0.0
    yf = y.astype(np.float64)
    free = np.flatnonzero((alpha > thr) & (alpha < C - thr))
    if free.size:
        return float(np.mean(yf[free] - u[free]))
    pos = y > 0
    lower = np.concatenate([
        (1.0 - u)[pos & (alpha < C - thr)],
        (-1.0 - u)[~pos & (alpha > thr)],
    ])
    upper = np.concatenate([
        (1.0 - u)[pos & (alpha > thr)],
        (-1.0 - u)[~pos & (alpha < C - thr)],
    ])
    if lower.size and upper.size:
        return float((np.max(lower) + np.min(upper)) / 2.0)
    if lower.size:
        return float(np.max(lower))
    if upper.size:
        return float(np.min(upper))
    return 0.0


def bias(sol: DualSolution, ds: Dataset) -> float:
    """Recompute the threshold from a solution (free-point average form)."""
    rows = np.array(list(sol.solved_index_set), dtype=np.int64) - 1
    if rows.size == 0:
        return 0.0
    alpha = sol.alpha[rows]
    y_sub = ds.y[rows]
    K = gram(sol.kernel, restrict(ds, sol.solved_index_set)).values
    u = K @ (alpha * y_sub)
    thr = 1e-8 * sol.C
    return _bias_from_state(y_sub, alpha, u, sol.C, thr)


def decision_values(sol: DualSolution, ds: Dataset, Xq: np.ndarray) -> np.ndarray:
    """Pre-sign decision values sum_j a_j y_j K(x_j, x) + b for query rows."""
    Xq = np.asarray(Xq, dtype=np.float64)
    if Xq.ndim != 2 or Xq.shape[1] != ds.d:
        raise DataError(f"query dimension {Xq.shape} does not match d={ds.d}")
    nz = np.flatnonzero(sol.alpha)
    if nz.size == 0:
        return np.full(Xq.shape[0], sol.bias)
    Kq = kernel_matrix(sol.kernel, ds.X[nz], Xq)
    return (sol.alpha[nz] * ds.y[nz]) @ Kq + sol.bias


def decision_value(sol: DualSolution, ds: Dataset, x) -> float:
    x = np.asarray(x, dtype=np.float64)
    return float(decision_values(sol, ds, x.reshape(1, -1))[0])


def predict_many(sol: DualSolution, ds: Dataset, Xq: np.ndarray) -> np.ndarray:
    """Labels with sgn(0) := +1."""
    dv = decision_values(sol, ds, Xq)
    return np.where(dv < 0.0, -1, 1).astype(np.int64)


def predict(sol: DualSolution, ds: Dataset, x) -> int:
    x = np.asarray(x, dtype=np.float64)
    return int(predict_many(sol, ds, x.reshape(1, -1))[0])


def kkt_margins(sol: DualSolution, ds: Dataset) -> list[tuple[int, float, str]]:
    """(index, y_i * decision_value(x_i), category) for every i in I.

    Categories: "zero" (alpha < thr), "box" (alpha > C - thr), "free".
    """
    thr = 1e-8 * sol.C
    out = []
    rows = np.array(list(sol.solved_index_set), dtype=np.int64) - 1
    if rows.size == 0:
        return out
    dv = decision_values(sol, ds, ds.X[rows])
    for pos_in_sub, j in enumerate(sol.solved_index_set):
        a = sol.alpha[j - 1]
        if a < thr:
            cat = "zero"
        elif a > sol.C - thr:
            cat = "box"
        else:
            cat = "free"
        out.append((j, float(ds.y[j - 1] * dv[pos_in_sub]), cat))
    return out
