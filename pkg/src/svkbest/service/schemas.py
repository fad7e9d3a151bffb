"""Pydantic request/response models for the session service."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field


class DatasetUpload(BaseModel):
    format: Literal["csv", "libsvm", "json"]
    content: str
    name: str | None = None
    label_column: str | None = None
    positive_label: str | None = None
    feature_columns: list[str] | None = None


class DatasetInfo(BaseModel):
    dataset_id: str
    name: str | None
    n: int
    d: int
    feature_names: list[str] | None


class DatasetList(BaseModel):
    datasets: list[DatasetInfo]


class SessionCreate(BaseModel):
    dataset_id: str
    c: float = Field(gt=0)
    kernel: dict = Field(default_factory=lambda: {"kind": "linear"})
    test_dataset_id: str | None = None
    sensitive: str | None = None
    exclude_sensitive: bool = False
    kkt_tolerance: float | None = Field(default=None, gt=0)
    max_heap_size: int | None = Field(default=None, ge=1)


class SessionCreated(BaseModel):
    session_id: str


class SessionInfo(BaseModel):
    session_id: str
    config: dict
    models_emitted: int
    exhausted: bool
    stats: dict


class SelectionBody(BaseModel):
    ranks: list[int]


class SelectionInfo(BaseModel):
    ranks: list[int]
