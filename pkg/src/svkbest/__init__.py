"""K-best enumeration of distinct-support-vector SVM models."""

from .data import (
    Dataset,
    IndexSet,
    inject_flips,
    load_csv,
    load_libsvm,
    restrict,
    sample,
    split,
)
from .enumeration import EnumeratedModel, EnumSession, new_session, top_k
from .kernels import GramMatrix, KernelSpec, gram, kernel_eval
from .metrics import ModelMetrics, demographic_parity, hinge_loss, misclassification, series
from .oracle import brute_force_enumerate, qp_reference_solve
from .solver import (
    DualSolution,
    SolverParams,
    decision_value,
    is_feasible,
    objective,
    predict,
    solve_constrained,
    support_of,
)

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "DualSolution",
    "EnumSession",
    "EnumeratedModel",
    "GramMatrix",
    "IndexSet",
    "KernelSpec",
    "ModelMetrics",
    "SolverParams",
    "brute_force_enumerate",
    "decision_value",
    "demographic_parity",
    "gram",
    "hinge_loss",
    "inject_flips",
    "is_feasible",
    "kernel_eval",
    "load_csv",
    "load_libsvm",
    "misclassification",
    "new_session",
    "objective",
    "predict",
    "qp_reference_solve",
    "restrict",
    "sample",
    "series",
    "solve_constrained",
    "split",
    "support_of",
    "top_k",
]
