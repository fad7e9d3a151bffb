"""Shared JSON record builders.

The CLI's JSON-lines output and the HTTP API's model payloads go through
model_record, so their fields agree byte for byte.
"""

from __future__ import annotations

import json
from typing import Iterator

import numpy as np

from .data import Dataset
from .enumeration import EnumeratedModel, EnumSession
from .metrics import ModelMetrics, evaluate_one


def model_record(model: EnumeratedModel, metrics: ModelMetrics | None = None) -> dict:
    sol = model.solution
    return {
        "rank": model.rank,
        "objective": sol.objective,
        "objective_ratio": model.objective_ratio,
        "support": list(sol.support),
        "support_size": len(sol.support),
        "bias": sol.bias,
        "solution": sol.to_json_dict(),
        "provenance": {
            "index_set": list(model.index_set),
            "parent_rank": model.parent_rank,
        },
        "metrics": metrics.to_json_dict() if metrics is not None else None,
    }


def record_line(record: dict) -> str:
    return json.dumps(record, separators=(",", ":"), allow_nan=False)


def stream_model_records(session: EnumSession, k: int | None = None,
                         ds_test: Dataset | None = None,
                         z_values: np.ndarray | None = None) -> Iterator[dict]:
    """Lazily yield up to k model records with metrics attached.

    Loss ratios are taken against the first emitted model's test hinge, the
    same convention the session service applies per /next call.
    """
    emitted = 0
    rank1_hinge: float | None = None
    while k is None or emitted < k:
        model = session.next_model()
        if model is None:
            return
        metrics = evaluate_one(session.ds, model.solution,
                               session.rank1_objective,
                               ds_test, z_values, rank1_hinge)
        if rank1_hinge is None and metrics.test_hinge_mean is not None:
            rank1_hinge = metrics.test_hinge_mean
        emitted += 1
        yield model_record(model, metrics)
