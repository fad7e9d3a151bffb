"""Dataset and session registry with optional snapshot persistence.

Sessions are single-owner: every state-changing call holds the session's
lock, so concurrent /next requests on one session serialize while distinct
sessions proceed independently. Snapshots re-solve multipliers from stored
index sets on load; solver determinism makes the resumed continuation
identical to an uninterrupted run.
"""

from __future__ import annotations

import io
import json
import threading
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..data import Dataset, drop_columns, dump_json, load_csv, load_json, load_libsvm, sensitive_values
from ..enumeration import DEFAULT_MAX_HEAP, EnumSession
from ..errors import DataError, MetricError
from ..kernels import KernelSpec
from ..metrics import evaluate_one
from ..records import model_record
from ..solver import SolverParams, predict_many


class NotFoundError(KeyError):
    pass


@dataclass
class DatasetEntry:
    dataset_id: str
    name: str | None
    ds: Dataset


@dataclass
class SessionEntry:
    session_id: str
    config: dict
    session: EnumSession
    train_view: Dataset
    test_view: Dataset | None
    z_values: np.ndarray | None
    records: list[dict] = field(default_factory=list)
    selection: list[int] = field(default_factory=list)
    rank1_hinge: float | None = None
    lock: threading.Lock = field(default_factory=threading.Lock)


def load_dataset_text(fmt: str, content: str, label_column: str | None = None,
                      positive_label: str | None = None,
                      feature_columns: list[str] | None = None) -> Dataset:
    if fmt == "csv":
        if not label_column or positive_label is None:
            raise DataError("csv format requires label_column and positive_label")
        return load_csv(io.StringIO(content), label_column, feature_columns, positive_label)
    if fmt == "libsvm":
        return load_libsvm(io.StringIO(content))
    if fmt == "json":
        return load_json(content)
    raise DataError(f"unknown dataset format {fmt!r}")


class Store:
    def __init__(self, data_dir: Path | None = None):
        self.data_dir = data_dir
        self.datasets: dict[str, DatasetEntry] = {}
        self.sessions: dict[str, SessionEntry] = {}
        self._lock = threading.Lock()
        self._dataset_seq = 0
        self._session_seq = 0
        if data_dir is not None:
            data_dir.mkdir(parents=True, exist_ok=True)
            (data_dir / "datasets").mkdir(exist_ok=True)
            (data_dir / "sessions").mkdir(exist_ok=True)
            self._load_persisted()

    # -- datasets ------------------------------------------------------------

    def add_dataset(self, ds: Dataset, name: str | None = None) -> DatasetEntry:
        with self._lock:
            self._dataset_seq += 1
            entry = DatasetEntry(f"d{self._dataset_seq}", name, ds)
            self.datasets[entry.dataset_id] = entry
        self._persist_dataset(entry)
        return entry

    def get_dataset(self, dataset_id: str) -> DatasetEntry:
        try:
            return self.datasets[dataset_id]
        except KeyError:
            raise NotFoundError(f"unknown dataset {dataset_id!r}") from None

    def list_datasets(self) -> list[DatasetEntry]:
        return [self.datasets[k] for k in sorted(self.datasets, key=_seq_of)]

    # -- sessions ------------------------------------------------------------

    def create_session(self, config: dict) -> SessionEntry:
        entry = self._build_session_entry(config)
        with self._lock:
            self._session_seq += 1
            entry.session_id = f"s{self._session_seq}"
            self.sessions[entry.session_id] = entry
        self._persist_session(entry)
        return entry

    def get_session(self, session_id: str) -> SessionEntry:
        try:
            return self.sessions[session_id]
        except KeyError:
            raise NotFoundError(f"unknown session {session_id!r}") from None

    def next_record(self, session_id: str) -> dict | None:
        entry = self.get_session(session_id)
        with entry.lock:
            model = entry.session.next_model()
            if model is None:
                self._persist_session(entry)
                return None
            metrics = evaluate_one(
                entry.train_view, model.solution,
                entry.session.rank1_objective,
                entry.test_view, entry.z_values, entry.rank1_hinge,
            )
            if entry.rank1_hinge is None and metrics.test_hinge_mean is not None:
                entry.rank1_hinge = metrics.test_hinge_mean
            record = model_record(model, metrics)
            entry.records.append(record)
            self._persist_session(entry)
            return record

    def model_detail(self, session_id: str, rank: int) -> dict:
        entry = self.get_session(session_id)
        with entry.lock:
            if rank < 1 or rank > len(entry.records):
                raise NotFoundError(f"rank {rank} not emitted yet")
            record = entry.records[rank - 1]
            model = entry.session.models[rank - 1]
            sol = model.solution
            train_preds = predict_many(sol, entry.train_view, entry.train_view.X)
            test_preds = None
            if entry.test_view is not None:
                test_preds = predict_many(sol, entry.train_view, entry.test_view.X).tolist()
            return {
                "rank": rank,
                "record": record,
                "alpha": [float(v) for v in sol.alpha],
                "train_predictions": train_preds.tolist(),
                "test_predictions": test_preds,
            }

    def set_selection(self, session_id: str, ranks: list[int]) -> list[int]:
        entry = self.get_session(session_id)
        with entry.lock:
            emitted = len(entry.records)
            for r in ranks:
                if r < 1 or r > emitted:
                    raise DataError(f"rank {r} has not been emitted")
            entry.selection = sorted(set(int(r) for r in ranks))
            self._persist_session(entry)
            return entry.selection

    # -- construction helpers --------------------------------------------------

    def _build_session_entry(self, config: dict,
                             snapshot: dict | None = None) -> SessionEntry:
        train_entry = self.get_dataset(config["dataset_id"])
        test_entry = (self.get_dataset(config["test_dataset_id"])
                      if config.get("test_dataset_id") else None)
        sensitive = config.get("sensitive")
        exclude = bool(config.get("exclude_sensitive", False))

        train_view = train_entry.ds
        test_view = test_entry.ds if test_entry else None
        z_values = None
        if sensitive:
            if test_view is None:
                raise DataError("sensitive attribute requires a test dataset")
            z_values = sensitive_values(test_entry.ds, sensitive)
            if not (z_values == 1).any() or not (z_values == -1).any():
                raise MetricError(
                    f"sensitive column {sensitive!r} has an empty group on the test set")
            if exclude:
                train_view = drop_columns(train_view, [sensitive])
                test_view = drop_columns(test_view, [sensitive])
        elif exclude:
            raise DataError("exclude_sensitive requires a sensitive column")
        if test_view is not None and test_view.d != train_view.d:
            raise DataError(
                f"test dimension {test_view.d} does not match train dimension {train_view.d}")

        kernel = KernelSpec.from_json(config.get("kernel", {"kind": "linear"}))
        if snapshot is not None:
            session = EnumSession.from_snapshot(train_view, snapshot)
        else:
            params = SolverParams(kkt_tolerance=config["kkt_tolerance"]) \
                if config.get("kkt_tolerance") else None
            session = EnumSession(
                train_view, config["c"], kernel, params,
                max_heap_size=config.get("max_heap_size") or DEFAULT_MAX_HEAP,
            )
        return SessionEntry(
            session_id="",
            config=config,
            session=session,
            train_view=train_view,
            test_view=test_view,
            z_values=z_values,
        )

    # -- persistence -----------------------------------------------------------

    def _persist_dataset(self, entry: DatasetEntry) -> None:
        if self.data_dir is None:
            return
        path = self.data_dir / "datasets" / f"{entry.dataset_id}.json"
        doc = {
            "dataset_id": entry.dataset_id,
            "name": entry.name,
            "dataset": entry.ds.to_json_dict(),
        }
        _atomic_write(path, json.dumps(doc))

    def _persist_session(self, entry: SessionEntry) -> None:
        if self.data_dir is None:
            return
        path = self.data_dir / "sessions" / f"{entry.session_id}.json"
        doc = {
            "session_id": entry.session_id,
            "config": entry.config,
            "snapshot": entry.session.to_snapshot(),
            "records": entry.records,
            "selection": entry.selection,
            "rank1_hinge": entry.rank1_hinge,
        }
        _atomic_write(path, json.dumps(doc))

    def _load_persisted(self) -> None:
        for path in sorted((self.data_dir / "datasets").glob("*.json"), key=_path_seq):
            doc = json.loads(path.read_text())
            entry = DatasetEntry(
                doc["dataset_id"], doc.get("name"),
                Dataset.from_json_dict(doc["dataset"]),
            )
            self.datasets[entry.dataset_id] = entry
            self._dataset_seq = max(self._dataset_seq, _seq_of(entry.dataset_id))
        for path in sorted((self.data_dir / "sessions").glob("*.json"), key=_path_seq):
            doc = json.loads(path.read_text())
            entry = self._build_session_entry(doc["config"], snapshot=doc["snapshot"])
            entry.session_id = doc["session_id"]
            entry.records = doc.get("records", [])
            entry.selection = doc.get("selection", [])
            entry.rank1_hinge = doc.get("rank1_hinge")
            self.sessions[entry.session_id] = entry
            self._session_seq = max(self._session_seq, _seq_of(entry.session_id))


def _seq_of(identifier: str) -> int:
    digits = "".join(ch for ch in identifier if ch.isdigit())
    return int(digits) if digits else 0


def _path_seq(path: Path) -> int:
    return _seq_of(path.stem)


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_suffix(".tmp")
    tmp.write_text(text)
    tmp.replace(path)
