"""Tie resolution on degenerate optimal faces.

The dual optimum is unique only when the quadratic form is strictly convex
on the feasible directions; with a linear kernel on d features the form has
rank at most d, so flat optimal faces are routine (every solution on the
face shares objective, margins, bias and predictions, but not multipliers or
support). Any two correct solvers will disagree on supports there.

The solved model is therefore defined as the minimum-norm point of the
optimal face. It is unique, and restriction-stable: if supp(a) of the
canonical optimum of F(I) lies inside J inside I, the optimal face of F(J)
is the subset of the F(I) face with the extra coordinates pinned to zero,
still contains that optimum, and has the same minimum-norm point. Both the
production solver and the reference solver finish with this projection, so
they target the same mathematical object.

The face is characterized (Mangasarian) by fixing the quadratic image Q a,
the multiplier sum, and feasibility; strictly complementary bound
coordinates cannot move along it, so the projection only involves the free
and weakly-active coordinates, a handful in practice.
"""

from __future__ import annotations

import numpy as np

_WEAK_TOL = 1e-7
_DYKSTRA_TOL = 1e-14
_DYKSTRA_ITERS = 20_000


def min_norm_optimum(K: np.ndarray, y: np.ndarray, C: float,
                     alpha: np.ndarray, u: np.ndarray, b: float) -> np.ndarray:
    """Minimum-norm point of the optimal face through ``alpha``.

    K, y, alpha, u live on the restricted subproblem; u = K @ (alpha * y).
    Returns alpha unchanged whenever the face is a single point.
    """
    m = alpha.shape[0]
    if m == 0 or not np.any(alpha > 0.0):
        return alpha
    yf = y.astype(np.float64)
    # psi_i = grad_i - b * y_i vanishes on free and weakly-active coordinates
    psi = (1.0 - yf * u) - b * yf
    scale = max(1.0, C)
    weak = np.abs(psi) <= _WEAK_TOL * scale
    interior = (alpha > 0.0) & (alpha < C)
    movable = np.flatnonzero(weak | interior)
    k = movable.size
    if k == 0:
        return alpha

    # face directions confined to movable coords: Q d = 0, y.d = 0, 1.d = 0
    Q = (yf[:, None] * yf[None, :]) * K
    A = np.vstack([Q[:, movable], yf[movable][None, :], np.ones((1, k))])
    U_, s, Vt = np.linalg.svd(A, full_matrices=True)
    rank = int(np.sum(s > (s[0] * 1e-10 if s.size else 0.0)))
    if rank >= k:
        return alpha  # no face direction: optimum already unique

    target = A @ alpha[movable]
    pinv = Vt[:rank].T @ ((U_[:, :rank] / s[:rank]).T)

    # Dykstra projection of the origin onto {A x = target} n [0, C]^k:
    # the limit is the minimum-norm face point over the movable coords.
    x = np.zeros(k)
    p = np.zeros(k)
    q = np.zeros(k)
    tol = _DYKSTRA_TOL * scale
    for _ in range(_DYKSTRA_ITERS):
        v = x + p
        yv = v - pinv @ (A @ v - target)
        p = v - yv
        w = yv + q
        x_new = np.clip(w, 0.0, C)
        q = w - x_new
        if np.max(np.abs(x_new - x)) < tol:
            x = x_new
            break
        x = x_new

    out = alpha.copy()
    out[movable] = np.clip(x, 0.0, C)
    dust = 1e-12 * C
    out[out <= dust] = 0.0
    out[out >= C - dust] = C
    return out
