"""Positive-definite kernels and Gram matrices.

Gram matrices are computed once per unordered pair: the upper triangle is
evaluated and mirrored, so symmetry holds bitwise. Restricting a dataset and
building the Gram of the restriction gives the same entries as slicing the
parent Gram, which keeps the solver deterministic with or without a cache.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .data import Dataset
from .errors import DataError

KINDS = ("linear", "rbf", "polynomial")

# Dense Gram matrices above this row count are not cached by sessions.
DEFAULT_GRAM_CAP = 4096


@dataclass(frozen=True)
class KernelSpec:
    kind: str = "linear"
    gamma: float | None = None
    degree: int | None = None
    coef0: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DataError(f"unknown kernel kind {self.kind!r}")
        if self.kind == "rbf":
            if self.gamma is None or self.gamma <= 0:
                raise DataError("rbf kernel requires gamma > 0")
            if self.degree is not None or self.coef0 is not None:
                raise DataError("rbf kernel takes only gamma")
        elif self.kind == "polynomial":
            if self.degree is None or int(self.degree) < 1:
                raise DataError("polynomial kernel requires degree >= 1")
            if self.gamma is not None:
                raise DataError("polynomial kernel takes degree and coef0")
            object.__setattr__(self, "degree", int(self.degree))
            object.__setattr__(self, "coef0", float(self.coef0 if self.coef0 is not None else 0.0))
        else:
            if self.gamma is not None or self.degree is not None or self.coef0 is not None:
                raise DataError("linear kernel takes no parameters")

    def to_json_dict(self) -> dict:
        if self.kind == "rbf":
            return {"kind": "rbf", "gamma": self.gamma}
        if self.kind == "polynomial":
            return {"kind": "polynomial", "degree": self.degree, "coef0": self.coef0}
        return {"kind": "linear"}

    @classmethod
    def from_json(cls, text_or_dict) -> "KernelSpec":
        if isinstance(text_or_dict, str):
            try:
                doc = json.loads(text_or_dict)
            except json.JSONDecodeError as exc:
                raise DataError(f"bad kernel JSON: {exc}") from exc
        else:
            doc = dict(text_or_dict)
        if not isinstance(doc, dict) or "kind" not in doc:
            raise DataError("kernel JSON must be an object with a 'kind' field")
        known = {"kind", "gamma", "degree", "coef0"}
        extra = set(doc) - known
        if extra:
            raise DataError(f"unknown kernel field {sorted(extra)[0]!r}")
        return cls(
            kind=doc["kind"],
            gamma=doc.get("gamma"),
            degree=doc.get("degree"),
            coef0=doc.get("coef0"),
        )


@dataclass(frozen=True)
class GramMatrix:
    values: np.ndarray  # n x n, bitwise symmetric

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", v)
        v.setflags(write=False)

    @property
    def n(self) -> int:
        return self.values.shape[0]


def kernel_eval(spec: KernelSpec, a, b) -> float:
    """K(a, b) for a single vector pair."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DataError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(kernel_matrix(spec, a.reshape(1, -1), b.reshape(1, -1))[0, 0])


def kernel_matrix(spec: KernelSpec, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Cross-kernel matrix K(A_i, B_j), shape |A| x |B|."""
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    if A.shape[1] != B.shape[1]:
        raise DataError(f"dimension mismatch: {A.shape[1]} vs {B.shape[1]}")
    dots = A @ B.T
    if spec.kind == "linear":
        return dots
    if spec.kind == "polynomial":
        return (dots + spec.coef0) ** spec.degree
    sq = np.sum(A * A, axis=1)[:, None] + np.sum(B * B, axis=1)[None, :] - 2.0 * dots
    np.maximum(sq, 0.0, out=sq)
    return np.exp(-spec.gamma * sq)


def gram(spec: KernelSpec, ds: Dataset) -> GramMatrix:
    """Full Gram matrix of a dataset, exactly symmetric."""
    if ds.n < 1:
        raise DataError("gram of an empty dataset")
    m = kernel_matrix(spec, ds.X, ds.X)
    if spec.kind == "rbf":
        np.fill_diagonal(m, 1.0)
    upper = np.triu(m)
    sym = upper + np.triu(m, 1).T
    return GramMatrix(sym)
