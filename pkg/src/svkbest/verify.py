"""Cross-checks between the enumerator and the brute-force oracle.

Objectives from the two independent solvers carry noise around 1e-9, so rank
positions are only comparable where objective gaps exceed a tie tolerance.
The oracle list is cut into tie-blocks at gaps larger than the tolerance and
each block must contain the same supports as the enumerator's, as a set;
within a block order is genuinely ambiguous and both sides break it
lexicographically on their own objective values.
"""

from __future__ import annotations

import numpy as np

from .data import Dataset, IndexSet
from .enumeration import EnumSession
from .kernels import KernelSpec
from .oracle import brute_force_enumerate
from .solver import SolverParams

DESCENDING_SLACK = 1e-9
REL_OBJECTIVE_TOL = 1e-6


def random_instance(n: int, d: int, seed: int) -> Dataset:
    """Continuous uniform features and fair-coin labels; no duplicate rows."""
    rng = np.random.Generator(np.random.Philox(key=int(seed)))
    X = rng.uniform(-1.0, 1.0, size=(n, d))
    y = np.where(rng.uniform(size=n) < 0.5, -1, 1).astype(np.int64)
    return Dataset(X, y)


def _tie_blocks(objectives: list[float], tie_tol: float) -> list[tuple[int, int]]:
    blocks = []
    start = 0
    for i in range(1, len(objectives)):
        if objectives[i - 1] - objectives[i] > tie_tol:
            blocks.append((start, i))
            start = i
    if objectives:
        blocks.append((start, len(objectives)))
    return blocks


def compare_enumerations(oracle_list: list[tuple[IndexSet, float]],
                         session_models,
                         rel_tol: float = REL_OBJECTIVE_TOL,
                         tie_tol: float | None = None) -> list[str]:
    """Differences between oracle output and emitted models; empty = match."""
    diffs: list[str] = []
    actual = [(tuple(m.solution.support), m.solution.objective) for m in session_models]
    expected = [(tuple(s), f) for s, f in oracle_list]

    if len(expected) != len(actual):
        diffs.append(f"model count: oracle {len(expected)} vs enumerator {len(actual)}")

    exp_by_supp = dict(expected)
    act_by_supp = dict(actual)
    for supp in sorted(set(exp_by_supp) - set(act_by_supp)):
        diffs.append(f"support {supp} only in oracle output")
    for supp in sorted(set(act_by_supp) - set(exp_by_supp)):
        diffs.append(f"support {supp} only in enumerator output")

    for supp in sorted(set(exp_by_supp) & set(act_by_supp)):
        fe, fa = exp_by_supp[supp], act_by_supp[supp]
        if abs(fe - fa) > rel_tol * max(1.0, abs(fe)):
            diffs.append(f"objective mismatch at {supp}: oracle {fe!r} vs {fa!r}")

    for k in range(1, len(actual)):
        if actual[k][1] > actual[k - 1][1] + DESCENDING_SLACK:
            diffs.append(
                f"enumerator order violation at rank {k + 1}: "
                f"{actual[k][1]!r} after {actual[k - 1][1]!r}")

    if not diffs:
        objs = [f for _, f in expected]
        if tie_tol is None:
            tie_tol = max(1e-9, 1e-7 * max([1.0] + [abs(o) for o in objs]))
        for start, end in _tie_blocks(objs, tie_tol):
            exp_block = {s for s, _ in expected[start:end]}
            act_block = {s for s, _ in actual[start:end]}
            if exp_block != act_block:
                diffs.append(
                    f"rank block [{start + 1}, {end}] supports differ: "
                    f"oracle {sorted(exp_block)} vs enumerator {sorted(act_block)}")
    return diffs


def verify_instance(ds: Dataset, C: float, kernel: KernelSpec,
                    params: SolverParams | None = None,
                    fault_invert_heap: bool = False) -> list[str]:
    """Exhaust a session and compare it against the brute-force oracle."""
    session = EnumSession(ds, C, kernel, params,
                          fault_invert_heap=fault_invert_heap)
    session.run_to_exhaustion()
    expected = brute_force_enumerate(ds, C, kernel, params)
    return compare_enumerations(expected, session.models)
