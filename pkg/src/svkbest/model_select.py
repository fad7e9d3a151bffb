"""Regularization-parameter selection by k-fold cross validation."""

from __future__ import annotations

import numpy as np

from .data import Dataset, IndexSet, restrict
from .errors import DataError
from .kernels import KernelSpec
from .solver import SolverParams, decision_values, solve_constrained

DEFAULT_GRID = (1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3)


def cv_select_c(ds: Dataset, grid=DEFAULT_GRID, folds: int = 5, seed: int = 0,
                kernel: KernelSpec | None = None,
                params: SolverParams | None = None) -> tuple[float, dict[float, float]]:
    """Grid value minimizing mean validation hinge loss; ties pick the smaller C.

    Folds are contiguous chunks of a seeded Philox permutation, so the
    assignment is reproducible.
    """
    kernel = kernel or KernelSpec("linear")
    if folds < 2:
        raise DataError("need at least 2 folds")
    if ds.n < folds:
        raise DataError(f"need at least {folds} rows for {folds}-fold CV")
    if not grid:
        raise DataError("empty C grid")

    rng = np.random.Generator(np.random.Philox(key=int(seed)))
    perm = rng.permutation(ds.n)
    chunks = np.array_split(perm, folds)

    table: dict[float, float] = {}
    for C in grid:
        losses = []
        for f in range(folds):
            val_rows = np.sort(chunks[f])
            train_rows = np.sort(np.concatenate([chunks[g] for g in range(folds) if g != f]))
            train = restrict(ds, IndexSet(train_rows + 1))
            sol = solve_constrained(train, IndexSet.full(train.n), C, kernel, params)
            dv = decision_values(sol, train, ds.X[val_rows])
            losses.append(float(np.mean(np.maximum(0.0, 1.0 - ds.y[val_rows] * dv))))
        table[float(C)] = float(np.mean(losses))

    chosen = min(sorted(table), key=lambda c: (table[c], c))
    return chosen, table
