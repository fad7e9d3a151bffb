"""Dataset representation, loaders, splitting, restriction and label flipping.

Indices are 1-based and dense over [n] everywhere in the public interface;
internally rows live in numpy arrays with the usual 0-based offsets.

All randomness (splits, flip selection, fold assignment) goes through the
Philox 4x64-10 counter-based generator from numpy, keyed directly by the
caller's seed, so shuffles reproduce bit-for-bit across platforms.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DataError


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=int(seed)))


class IndexSet:
    """Immutable ascending set of 1-based row indices."""

    __slots__ = ("members",)

    def __init__(self, members: Iterable[int] = ()):
        ms = tuple(sorted({int(m) for m in members}))
        if ms and ms[0] < 1:
            raise DataError(f"indices are 1-based, got {ms[0]}")
        object.__setattr__(self, "members", ms)

    @classmethod
    def full(cls, n: int) -> "IndexSet":
        return cls(range(1, n + 1))

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, j) -> bool:
        return j in set(self.members)

    def __eq__(self, other) -> bool:
        if isinstance(other, IndexSet):
            return self.members == other.members
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.members)

    def __repr__(self) -> str:
        return f"IndexSet({list(self.members)})"

    def __setattr__(self, name, value):
        raise AttributeError("IndexSet is immutable")

    def minus(self, j: int) -> "IndexSet":
        return IndexSet(m for m in self.members if m != j)

    def union(self, other: Iterable[int]) -> "IndexSet":
        return IndexSet(list(self.members) + [int(m) for m in other])

    def issubset(self, other: "IndexSet") -> bool:
        return set(self.members) <= set(other.members)


@dataclass(frozen=True)
class Dataset:
    """Binary-labelled dataset: feature matrix X (n x d) and labels y in {-1,+1}.

    ``parent_index`` maps each row back to its 1-based index in the dataset
    this one was restricted from; identity for freshly loaded data.
    """

    X: np.ndarray
    y: np.ndarray
    feature_names: tuple[str, ...] | None = None
    parent_index: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        X = np.asarray(self.X, dtype=np.float64)
        y = np.asarray(self.y, dtype=np.int64)
        if X.ndim != 2:
            raise DataError("feature matrix must be 2-dimensional")
        if y.shape != (X.shape[0],):
            raise DataError("labels must align with rows")
        if X.shape[0] > 0 and X.shape[1] < 1:
            raise DataError("feature dimension must be >= 1")
        if not np.all(np.isin(y, (-1, 1))):
            raise DataError("labels must be -1 or +1")
        if self.feature_names is not None and len(self.feature_names) != X.shape[1]:
            raise DataError("feature_names length must equal dimension")
        pi = self.parent_index
        if pi is None:
            pi = np.arange(1, X.shape[0] + 1, dtype=np.int64)
        else:
            pi = np.asarray(pi, dtype=np.int64)
            if pi.shape != (X.shape[0],):
                raise DataError("parent_index must align with rows")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "parent_index", pi)
        X.setflags(write=False)
        y.setflags(write=False)
        pi.setflags(write=False)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]

    def column(self, name: str) -> np.ndarray:
        """Values of a named feature column."""
        if self.feature_names is None or name not in self.feature_names:
            raise DataError(f"unknown column {name!r}")
        return self.X[:, self.feature_names.index(name)]

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "feature_names": list(self.feature_names) if self.feature_names else None,
            "rows": [
                {"x": [float(v) for v in self.X[i]], "y": int(self.y[i])}
                for i in range(self.n)
            ],
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "Dataset":
        try:
            rows = doc["rows"]
            X = np.array([r["x"] for r in rows], dtype=np.float64)
            y = np.array([r["y"] for r in rows], dtype=np.int64)
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"malformed dataset JSON: {exc}") from exc
        if len(rows) == 0:
            raise DataError("empty dataset")
        names = doc.get("feature_names")
        return cls(X, y, tuple(names) if names else None)


def _map_labels(raw: Sequence[str], positive_label: str) -> np.ndarray:
    values = sorted(set(raw))
    if len(values) > 2:
        raise DataError(f"label column is not binary: values {values[:4]}...")
    if positive_label not in values:
        raise DataError(f"positive label {positive_label!r} not present in label column")
    return np.array([1 if v == positive_label else -1 for v in raw], dtype=np.int64)


def load_csv(
    path_or_text,
    label_column: str,
    feature_columns: Sequence[str] | None = None,
    positive_label: str = "1",
) -> Dataset:
    """Load an RFC-4180 CSV with a header row.

    ``feature_columns=None`` means every column other than the label column.
    The label cell equal to ``positive_label`` maps to +1, the other value
    to -1; more than two distinct label values is an error. Row order is
    preserved.
    """
    if hasattr(path_or_text, "read"):
        text = path_or_text.read()
    else:
        try:
            with open(path_or_text, "r", newline="", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise DataError(f"cannot read {path_or_text}: {exc}") from exc
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise DataError("empty CSV: header row required") from None
    header = [h.strip() for h in header]
    if label_column not in header:
        raise DataError(f"unknown column {label_column!r}")
    if feature_columns is None:
        feature_columns = [h for h in header if h != label_column]
    for c in feature_columns:
        if c not in header:
            raise DataError(f"unknown column {c!r}")
    label_pos = header.index(label_column)
    feat_pos = [header.index(c) for c in feature_columns]

    labels_raw: list[str] = []
    rows: list[list[float]] = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise DataError(f"line {lineno}: expected {len(header)} cells, got {len(row)}")
        labels_raw.append(row[label_pos].strip())
        try:
            rows.append([float(row[p]) for p in feat_pos])
        except ValueError as exc:
            raise DataError(f"line {lineno}: non-numeric feature cell ({exc})") from exc
    if not rows:
        raise DataError("empty dataset")
    y = _map_labels(labels_raw, positive_label)
    return Dataset(np.array(rows, dtype=np.float64), y, tuple(feature_columns))


def load_libsvm(path_or_text) -> Dataset:
    """Load a sparse "label idx:val ..." file; absent indices are 0.0.

    Labels must be {-1,+1}; {0,1} files are remapped so 0 becomes -1.
    """
    if hasattr(path_or_text, "read"):
        text = path_or_text.read()
    else:
        try:
            with open(path_or_text, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise DataError(f"cannot read {path_or_text}: {exc}") from exc

    labels: list[float] = []
    entries: list[list[tuple[int, float]]] = []
    max_idx = 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            labels.append(float(parts[0]))
        except ValueError:
            raise DataError(f"line {lineno}: bad label {parts[0]!r}") from None
        feats = []
        for tok in parts[1:]:
            try:
                idx_s, val_s = tok.split(":", 1)
                idx = int(idx_s)
                val = float(val_s)
            except ValueError:
                raise DataError(f"line {lineno}: bad feature token {tok!r}") from None
            if idx < 1:
                raise DataError(f"line {lineno}: feature indices are 1-based")
            feats.append((idx, val))
            max_idx = max(max_idx, idx)
        entries.append(feats)
    if not entries:
        raise DataError("empty dataset")

    distinct = sorted(set(labels))
    if distinct in ([0.0, 1.0], [0.0], [1.0]):
        y = np.array([1 if v == 1.0 else -1 for v in labels], dtype=np.int64)
    elif set(distinct) <= {-1.0, 1.0}:
        y = np.array([int(v) for v in labels], dtype=np.int64)
    else:
        raise DataError(f"labels must be binary (-1/+1 or 0/1), got {distinct[:4]}")

    X = np.zeros((len(entries), max(max_idx, 1)), dtype=np.float64)
    for i, feats in enumerate(entries):
        for idx, val in feats:
            X[i, idx - 1] = val
    return Dataset(X, y)


def split(ds: Dataset, train_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Disjoint uniform train/test partition; |train| = round(fraction * n)."""
    if ds.n < 2:
        raise DataError("need at least 2 rows to split")
    if not 0.0 < train_fraction < 1.0:
        raise DataError("train_fraction must be in (0, 1)")
    n_train = round(train_fraction * ds.n)
    if n_train == 0 or n_train == ds.n:
        raise DataError(f"fraction {train_fraction} leaves an empty side for n={ds.n}")
    perm = _rng(seed).permutation(ds.n)
    train_rows = np.sort(perm[:n_train])
    test_rows = np.sort(perm[n_train:])
    return (
        restrict(ds, IndexSet(train_rows + 1)),
        restrict(ds, IndexSet(test_rows + 1)),
    )


def sample(ds: Dataset, size: int, seed: int) -> Dataset:
    """Uniform subsample of ``size`` rows without replacement, order preserved."""
    if size < 1 or size > ds.n:
        raise DataError(f"sample size {size} out of range for n={ds.n}")
    perm = _rng(seed).permutation(ds.n)
    rows = np.sort(perm[:size])
    return restrict(ds, IndexSet(rows + 1))


def sensitive_values(ds: Dataset, column: str) -> np.ndarray:
    """Column values mapped to {-1,+1}; accepts stored {-1,+1} or {0,1}."""
    raw = ds.column(column)
    vals = set(np.unique(raw).tolist())
    if vals <= {-1.0, 1.0}:
        return raw.astype(np.int64)
    if vals <= {0.0, 1.0}:
        return np.where(raw == 1.0, 1, -1).astype(np.int64)
    raise DataError(f"column {column!r} is not mappable to -1/+1: values {sorted(vals)[:4]}")


def inject_flips(ds: Dataset, sensitive: str, flip_count: int, seed: int) -> Dataset:
    """Negate the labels of ``flip_count`` rows drawn uniformly from {y != z}.

    Features (including the sensitive column itself) are untouched.
    """
    if flip_count < 0:
        raise DataError("flip_count must be >= 0")
    z = sensitive_values(ds, sensitive)
    eligible = np.flatnonzero(ds.y != z)
    if len(eligible) < flip_count:
        raise DataError(
            f"only {len(eligible)} rows have y != z, cannot flip {flip_count}"
        )
    y = ds.y.copy()
    if flip_count > 0:
        order = _rng(seed).permutation(len(eligible))
        chosen = eligible[order[:flip_count]]
        y[chosen] = -y[chosen]
    return Dataset(ds.X, y, ds.feature_names, ds.parent_index.copy())


def restrict(ds: Dataset, I: IndexSet) -> Dataset:
    """Rows of ``ds`` at the given 1-based indices, original order preserved.

    The result's parent_index composes through ``ds`` so restrictions of
    restrictions still point at the outermost ancestor. An empty index set
    yields an empty dataset (the solver maps it to the zero solution).
    """
    members = np.array(list(I), dtype=np.int64)
    if members.size and (members[0] < 1 or members[-1] > ds.n):
        raise DataError(f"index out of range [1, {ds.n}]")
    rows = members - 1
    return Dataset(
        ds.X[rows] if rows.size else ds.X[:0],
        ds.y[rows] if rows.size else ds.y[:0],
        ds.feature_names,
        ds.parent_index[rows] if rows.size else np.zeros(0, dtype=np.int64),
    )


def drop_columns(ds: Dataset, names: Sequence[str]) -> Dataset:
    """Dataset without the named feature columns (used by --exclude-sensitive)."""
    if ds.feature_names is None:
        raise DataError("dataset has no named columns")
    missing = [c for c in names if c not in ds.feature_names]
    if missing:
        raise DataError(f"unknown column {missing[0]!r}")
    keep = [i for i, c in enumerate(ds.feature_names) if c not in set(names)]
    if not keep:
        raise DataError("cannot drop all feature columns")
    return Dataset(
        ds.X[:, keep],
        ds.y,
        tuple(ds.feature_names[i] for i in keep),
        ds.parent_index.copy(),
    )


def dump_json(ds: Dataset) -> str:
    return json.dumps(ds.to_json_dict())


def load_json(text: str) -> Dataset:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DataError(f"bad dataset JSON: {exc}") from exc
    return Dataset.from_json_dict(doc)
