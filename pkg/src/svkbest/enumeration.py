"""Lazy K-best enumeration of distinct-support SVM models.

Search state is a max-heap of triples (solution, index set I, forbidden set
B). Popping the best triple emits its model unless an identical support was
already emitted; either way the search branches on every support index not
yet forbidden, removing it from I, solving the child subproblem and growing
B so later siblings cannot regenerate the same child. Each index subset
enters the heap at most once, because sibling subtrees partition the space
of remaining subsets.

Heap order is (objective descending, index set lexicographic ascending);
the lexicographic tie-break pins ranks when many models share an objective.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

from .data import Dataset, IndexSet
from .errors import HeapOverflowError, SolverConvergenceError
from .kernels import DEFAULT_GRAM_CAP, GramMatrix, KernelSpec, gram
from .solver import DualSolution, SolverParams, objective, solve_constrained

DEFAULT_MAX_HEAP = 1_000_000


@dataclass(frozen=True)
class SearchTriple:
    solution: DualSolution
    index_set: IndexSet
    forbidden: IndexSet
    parent_rank: int | None = None


@dataclass(frozen=True)
class EnumeratedModel:
    rank: int
    solution: DualSolution
    objective_ratio: float
    index_set: IndexSet
    parent_rank: int | None = None


@dataclass(frozen=True)
class Emitted:
    model: EnumeratedModel


@dataclass(frozen=True)
class Duplicate:
    support: IndexSet


@dataclass(frozen=True)
class Exhausted:
    pass


@dataclass
class PopRecord:
    support_size: int
    child_calls: int
    emitted_rank: int | None  # None when the pop was a duplicate
    objective: float = 0.0


@dataclass
class EnumStats:
    solver_calls: int = 0
    heap_pops: int = 0
    duplicates: int = 0
    insertions: int = 0
    skipped_children: list[tuple[int, ...]] = field(default_factory=list)
    pop_log: list[PopRecord] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "solver_calls": self.solver_calls,
            "heap_pops": self.heap_pops,
            "duplicates": self.duplicates,
            "insertions": self.insertions,
            "skipped_children": len(self.skipped_children),
        }


class EnumSession:
    """Single-owner lazy enumeration over one (dataset, C, kernel) config."""

    def __init__(self, ds: Dataset, C: float, kernel: KernelSpec,
                 params: SolverParams | None = None,
                 max_heap_size: int = DEFAULT_MAX_HEAP,
                 gram_cap: int = DEFAULT_GRAM_CAP,
                 debug_validate: bool = False,
                 fault_invert_heap: bool = False,
                 _defer_root: bool = False):
        if ds.n < 1:
            raise SolverConvergenceError("cannot enumerate over an empty dataset")
        self.ds = ds
        self.C = float(C)
        self.kernel = kernel
        self.params = params or SolverParams()
        self.max_heap_size = max_heap_size
        self.debug_validate = debug_validate
        self.fault_invert_heap = fault_invert_heap
        self.gram_cache: GramMatrix | None = (
            gram(kernel, ds) if ds.n <= gram_cap else None
        )
        self.heap: list[tuple[tuple, SearchTriple]] = []
        self.emitted: dict[tuple[int, ...], EnumeratedModel] = {}
        self.models: list[EnumeratedModel] = []
        self.stats = EnumStats()
        self._seen_index_sets: set[tuple[int, ...]] = set()
        if not _defer_root:
            root = self._solve(IndexSet.full(ds.n))
            if not root.converged:
                raise SolverConvergenceError(
                    "root solve did not converge", solution=root)
            self._push(SearchTriple(root, IndexSet.full(ds.n), IndexSet()))

    # -- internals ---------------------------------------------------------

    def _solve(self, I: IndexSet) -> DualSolution:
        self.stats.solver_calls += 1
        return solve_constrained(self.ds, I, self.C, self.kernel,
                                 self.params, self.gram_cache)

    def _key(self, obj: float, index_set: IndexSet) -> tuple:
        primary = obj if self.fault_invert_heap else -obj
        return (primary, tuple(index_set))

    def _push(self, triple: SearchTriple) -> None:
        if len(self.heap) >= self.max_heap_size:
            raise HeapOverflowError(
                f"heap exceeded the configured cap of {self.max_heap_size} triples")
        if self.debug_validate:
            members = tuple(triple.index_set)
            assert members not in self._seen_index_sets, \
                f"index set {members} inserted twice"
            self._seen_index_sets.add(members)
            recomputed = objective(triple.solution.alpha, self.ds, self.kernel)
            scale = max(1.0, abs(recomputed))
            assert abs(recomputed - triple.solution.objective) <= 1e-8 * scale
        heapq.heappush(self.heap, (self._key(triple.solution.objective,
                                             triple.index_set), triple))
        self.stats.insertions += 1

    # -- public state machine ----------------------------------------------

    @property
    def exhausted(self) -> bool:
        return not self.heap

    @property
    def rank1_objective(self) -> float | None:
        return self.models[0].solution.objective if self.models else None

    def step(self) -> Emitted | Duplicate | Exhausted:
        """One pop of the heap: emit or suppress, then branch its children."""
        if not self.heap:
            return Exhausted()
        _, triple = heapq.heappop(self.heap)
        self.stats.heap_pops += 1
        sol = triple.solution
        supp_key = tuple(sol.support)

        if supp_key in self.emitted:
            self.stats.duplicates += 1
            rank_here = self.emitted[supp_key].rank
            event: Emitted | Duplicate = Duplicate(sol.support)
        else:
            rank_here = len(self.models) + 1
            f1 = self.rank1_objective if self.models else sol.objective
            ratio = 1.0 if f1 == 0.0 else sol.objective / f1
            model = EnumeratedModel(
                rank=rank_here,
                solution=sol,
                objective_ratio=ratio,
                index_set=triple.index_set,
                parent_rank=triple.parent_rank,
            )
            self.emitted[supp_key] = model
            self.models.append(model)
            event = Emitted(model)

        child_calls = 0
        forbidden = set(triple.forbidden)
        for j in sol.support:
            if j in forbidden:
                continue
            child_index_set = triple.index_set.minus(j)
            child = self._solve(child_index_set)
            child_calls += 1
            if child.converged:
                self._push(SearchTriple(
                    solution=child,
                    index_set=child_index_set,
                    forbidden=IndexSet(forbidden),
                    parent_rank=rank_here,
                ))
            else:
                self.stats.skipped_children.append(tuple(child_index_set))
            forbidden.add(j)

        self.stats.pop_log.append(PopRecord(
            support_size=len(sol.support),
            child_calls=child_calls,
            emitted_rank=rank_here if isinstance(event, Emitted) else None,
            objective=sol.objective,
        ))
        return event

    def next_model(self) -> EnumeratedModel | None:
        """Advance until the next distinct model is emitted, or exhaustion."""
        while True:
            event = self.step()
            if isinstance(event, Emitted):
                return event.model
            if isinstance(event, Exhausted):
                return None

    def run_to_exhaustion(self) -> list[EnumeratedModel]:
        while self.next_model() is not None:
            pass
        return self.models

    # -- persistence ---------------------------------------------------------

    def to_snapshot(self) -> dict:
        """Config plus heap/emitted state; multipliers are re-solved on load."""
        return {
            "c": self.C,
            "kernel": self.kernel.to_json_dict(),
            "params": {
                "kkt_tolerance": self.params.kkt_tolerance,
                "max_updates": self.params.max_updates,
                "support_threshold": self.params.support_threshold,
            },
            "max_heap_size": self.max_heap_size,
            "fault_invert_heap": self.fault_invert_heap,
            "heap": [
                {
                    "I": list(t.index_set),
                    "B": list(t.forbidden),
                    "objective": t.solution.objective,
                    "parent_rank": t.parent_rank,
                }
                for _, t in self.heap
            ],
            "emitted": [
                {
                    "rank": m.rank,
                    "I": list(m.index_set),
                    "support": list(m.solution.support),
                    "objective": m.solution.objective,
                    "objective_ratio": m.objective_ratio,
                    "parent_rank": m.parent_rank,
                }
                for m in self.models
            ],
            "stats": self.stats.to_json_dict(),
        }

    @classmethod
    def from_snapshot(cls, ds: Dataset, snap: dict,
                      gram_cap: int = DEFAULT_GRAM_CAP) -> "EnumSession":
        params = SolverParams(
            kkt_tolerance=snap["params"]["kkt_tolerance"],
            max_updates=snap["params"]["max_updates"],
            support_threshold=snap["params"]["support_threshold"],
        )
        session = cls(
            ds, snap["c"], KernelSpec.from_json(snap["kernel"]),
            params=params,
            max_heap_size=snap.get("max_heap_size", DEFAULT_MAX_HEAP),
            gram_cap=gram_cap,
            fault_invert_heap=snap.get("fault_invert_heap", False),
            _defer_root=True,
        )
        for rec in snap["emitted"]:
            sol = session._solve(IndexSet(rec["I"]))
            model = EnumeratedModel(
                rank=rec["rank"],
                solution=sol,
                objective_ratio=rec["objective_ratio"],
                index_set=IndexSet(rec["I"]),
                parent_rank=rec["parent_rank"],
            )
            session.models.append(model)
            session.emitted[tuple(sol.support)] = model
        session.models.sort(key=lambda m: m.rank)
        for rec in snap["heap"]:
            sol = session._solve(IndexSet(rec["I"]))
            triple = SearchTriple(
                solution=sol,
                index_set=IndexSet(rec["I"]),
                forbidden=IndexSet(rec["B"]),
                parent_rank=rec["parent_rank"],
            )
            heapq.heappush(session.heap,
                           (session._key(sol.objective, triple.index_set), triple))
        counters = snap.get("stats", {})
        session.stats.solver_calls = counters.get("solver_calls", 0)
        session.stats.heap_pops = counters.get("heap_pops", 0)
        session.stats.duplicates = counters.get("duplicates", 0)
        session.stats.insertions = counters.get("insertions", 0)
        return session


def new_session(ds: Dataset, C: float, kernel: KernelSpec,
                params: SolverParams | None = None, **kwargs) -> EnumSession:
    """Fresh session whose heap holds exactly the ordinary-problem root."""
    return EnumSession(ds, C, kernel, params, **kwargs)


def top_k(ds: Dataset, C: float, kernel: KernelSpec,
          params: SolverParams | None = None, k: int = 1,
          **kwargs) -> list[EnumeratedModel]:
    """First min(k, total distinct) models; a prefix of any longer run."""
    if k < 1:
        raise ValueError("k must be >= 1")
    session = EnumSession(ds, C, kernel, params, **kwargs)
    out = []
    for _ in range(k):
        model = session.next_model()
        if model is None:
            break
        out.append(model)
    return out
