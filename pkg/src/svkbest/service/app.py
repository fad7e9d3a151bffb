"""HTTP session service: datasets, enumeration sessions, model streams.

Every error body has the shape {"error": {"code": ..., "message": ...}}.
The model JSON returned by /next is exactly the record the CLI writes as a
JSON line, field for field.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from ..errors import DataError, HeapOverflowError, MetricError, SolverConvergenceError, SvkbestError
from .schemas import (
    DatasetInfo,
    DatasetList,
    DatasetUpload,
    SelectionBody,
    SelectionInfo,
    SessionCreate,
    SessionCreated,
    SessionInfo,
)
from .store import NotFoundError, Store, load_dataset_text


def _error_body(code: str, message: str) -> dict:
    return {"error": {"code": code, "message": message}}


def create_app(data_dir: str | Path | None = None,
               static_dir: str | Path | None = None) -> FastAPI:
    store = Store(Path(data_dir) if data_dir else None)
    app = FastAPI(title="svkbest session service", docs_url="/api/docs",
                  openapi_url="/api/openapi.json")
    app.state.store = store

    @app.exception_handler(NotFoundError)
    async def _not_found(request: Request, exc: NotFoundError):
        return JSONResponse(status_code=404,
                            content=_error_body("not_found", str(exc.args[0])))

    @app.exception_handler(SvkbestError)
    async def _domain_error(request: Request, exc: SvkbestError):
        code = {
            DataError: "data_error",
            MetricError: "metric_error",
            SolverConvergenceError: "solver_error",
            HeapOverflowError: "heap_overflow",
        }.get(type(exc), "error")
        return JSONResponse(status_code=400, content=_error_body(code, str(exc)))

    @app.exception_handler(RequestValidationError)
    async def _validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=422,
                            content=_error_body("validation", str(exc.errors())))

    def _dataset_info(entry) -> DatasetInfo:
        return DatasetInfo(
            dataset_id=entry.dataset_id,
            name=entry.name,
            n=entry.ds.n,
            d=entry.ds.d,
            feature_names=list(entry.ds.feature_names) if entry.ds.feature_names else None,
        )

    @app.post("/api/datasets", response_model=DatasetInfo)
    def upload_dataset(body: DatasetUpload):
        ds = load_dataset_text(body.format, body.content, body.label_column,
                               body.positive_label, body.feature_columns)
        return _dataset_info(store.add_dataset(ds, body.name))

    @app.get("/api/datasets", response_model=DatasetList)
    def list_datasets():
        return DatasetList(datasets=[_dataset_info(e) for e in store.list_datasets()])

    @app.post("/api/sessions", response_model=SessionCreated)
    def create_session(body: SessionCreate):
        entry = store.create_session(body.model_dump())
        return SessionCreated(session_id=entry.session_id)

    @app.get("/api/sessions/{session_id}", response_model=SessionInfo)
    def session_info(session_id: str):
        entry = store.get_session(session_id)
        return SessionInfo(
            session_id=entry.session_id,
            config=entry.config,
            models_emitted=len(entry.records),
            exhausted=entry.session.exhausted,
            stats=entry.session.stats.to_json_dict(),
        )

    @app.get("/api/sessions/{session_id}/next")
    def next_model(session_id: str):
        record = store.next_record(session_id)
        if record is None:
            return Response(status_code=204)
        return JSONResponse(content=record)

    @app.get("/api/sessions/{session_id}/models")
    def list_models(session_id: str):
        entry = store.get_session(session_id)
        with entry.lock:
            return JSONResponse(content={"models": list(entry.records)})

    @app.get("/api/sessions/{session_id}/models/{rank}")
    def model_detail(session_id: str, rank: int):
        return JSONResponse(content=store.model_detail(session_id, rank))

    @app.post("/api/sessions/{session_id}/selection", response_model=SelectionInfo)
    def set_selection(session_id: str, body: SelectionBody):
        return SelectionInfo(ranks=store.set_selection(session_id, body.ranks))

    @app.get("/api/sessions/{session_id}/selection", response_model=SelectionInfo)
    def get_selection(session_id: str):
        entry = store.get_session(session_id)
        return SelectionInfo(ranks=list(entry.selection))

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
