"""HTTP API over a trained model and a scored roster snapshot.

Handlers read one snapshot reference at request start, so a concurrent
rescore or bundle swap never produces mixed results within a request.
Error bodies are always {"error": {"code", "message"}}.
"""

from __future__ import annotations

import logging
import os
import threading
from dataclasses import dataclass
from typing import Any

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import drivers as drivers_mod
from . import pipeline
from .errors import AttritionError, DataError, ModelError, SchemaError
from .ingest import EmployeeRecord, load_dataset, summarize
from .model_store import ModelBundle, load_bundle
from .pipeline import ScoredEmployee

log = logging.getLogger(__name__)

AUTH_TOKEN_ENV = "ATTRITION_API_TOKEN"

_RISK_CHOICES = ("all", "high")
_SORT_CHOICES = ("probability", "lead_time", "id")


@dataclass(frozen=True)
class Snapshot:
    """One immutable view: bundle, roster, and its scores."""

    bundle: ModelBundle
    records: dict[str, EmployeeRecord]
    order: tuple[str, ...]
    scored: dict[str, ScoredEmployee]
    summary: dict[str, Any]
    scored_at: str


class ServerState:
    def __init__(self) -> None:
        self.snapshot: Snapshot | None = None
        self._rescore_lock = threading.Lock()

    def build_snapshot(self, bundle: ModelBundle,
                       records: list[EmployeeRecord]) -> Snapshot:
        scored = pipeline.score_all(bundle, records)
        by_id = {r.id: r for r in records}
        scored_by_id = {s.id: s for s in scored}
        flagged = sum(1 for s in scored if s.label == "Yes")
        summary = summarize(records, bundle.schema)
        snap = Snapshot(
            bundle=bundle,
            records=by_id,
            order=tuple(r.id for r in records),
            scored=scored_by_id,
            summary={
                "headcount": summary.n_rows,
                "class_counts": dict(summary.class_counts),
                "attrition_ratio": summary.attrition_ratio,
                "mean_compensation": summary.mean_monthly_income,
                "flagged": flagged,
                "predicted_attrition_ratio":
                    flagged / summary.n_rows if summary.n_rows else 0.0,
            },
            scored_at=scored[0].scored_at if scored else "",
        )
        return snap

    def load(self, bundle: ModelBundle, records: list[EmployeeRecord]) -> None:
        self.snapshot = self.build_snapshot(bundle, records)

    def rescore(self) -> Snapshot:
        with self._rescore_lock:
            snap = self.snapshot
            if snap is None:
                raise ModelError("no model loaded")
            fresh = self.build_snapshot(
                snap.bundle, [snap.records[i] for i in snap.order])
            self.snapshot = fresh
            return fresh


class WhatifBody(BaseModel):
    id: str
    overrides: dict[str, Any] = {}


class ScreenBody(BaseModel):
    candidate: dict[str, Any]
    candidate_id: str | None = None


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status,
                        content={"error": {"code": code, "message": message}})


def _employee_summary(s: ScoredEmployee, record: EmployeeRecord,
                      bundle: ModelBundle) -> dict[str, Any]:
    row = {
        "id": s.id,
        "attrition_probability": s.attrition_probability,
        "label": s.label,
        "ttl": s.tenure.ttl,
        "lead_time": s.tenure.lead_time,
        "lead_time_raw": s.tenure.lead_time_raw,
        "overdue": s.tenure.overdue,
        "top_reason": s.drivers.top_reasons[0] if s.drivers.top_reasons else "",
    }
    # tag with the dimension of the same contribution the reason ranks first
    merged = drivers_mod.merge_onehot_siblings(s.drivers, bundle.codec)
    if merged:
        top = min(merged, key=lambda c: (-abs(c.delta), c.feature))
        row["top_dimension"] = top.dimension
    else:
        row["top_dimension"] = ""
    for col in ("JobRole", "Department", "Age"):
        if col in record.raw:
            row[col] = record.raw[col]
    return row


def create_app(bundle: ModelBundle | None = None,
               records: list[EmployeeRecord] | None = None,
               cors_origins: tuple[str, ...] = ("*",)) -> FastAPI:
    app = FastAPI(title="attrition api", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware, allow_origins=list(cors_origins),
        allow_methods=["*"], allow_headers=["*"])

    state = ServerState()
    app.state.engine = state
    if bundle is not None and records is not None:
        state.load(bundle, records)

    @app.middleware("http")
    async def check_token(request: Request, call_next):
        token = os.environ.get(AUTH_TOKEN_ENV)
        if token and request.url.path.startswith("/api") \
                and request.method != "OPTIONS":
            header = request.headers.get("authorization", "")
            if header != f"Bearer {token}":
                return _error(401, "unauthorized", "missing or bad bearer token")
        return await call_next(request)

    @app.exception_handler(RequestValidationError)
    async def on_validation(request: Request, exc: RequestValidationError):
        return _error(422, "invalid_request", str(exc.errors()[:3]))

    @app.exception_handler(AttritionError)
    async def on_domain_error(request: Request, exc: AttritionError):
        if isinstance(exc, (SchemaError, DataError)):
            return _error(422, "invalid_request", str(exc))
        return _error(500, "internal", str(exc))

    def current() -> Snapshot | None:
        return state.snapshot

    @app.get("/api/overview")
    def overview():
        snap = current()
        if snap is None:
            return _error(503, "no_model", "no model loaded")
        return dict(snap.summary, model_checksum=snap.bundle.checksum(),
                    scored_at=snap.scored_at)

    @app.get("/api/employees")
    def employees(risk: str = "all", sort: str = "probability"):
        snap = current()
        if snap is None:
            return _error(503, "no_model", "no model loaded")
        if risk not in _RISK_CHOICES:
            return _error(422, "invalid_request",
                          f"risk must be one of {_RISK_CHOICES}")
        if sort not in _SORT_CHOICES:
            return _error(422, "invalid_request",
                          f"sort must be one of {_SORT_CHOICES}")
        rows = [snap.scored[i] for i in snap.order]
        if risk == "high":
            rows = [s for s in rows if s.label == "Yes"]
        if sort == "probability":
            rows.sort(key=lambda s: (-s.attrition_probability, s.id))
        elif sort == "lead_time":
            # Most imminent departures first.
            rows.sort(key=lambda s: (s.tenure.lead_time, s.id))
        else:
            rows.sort(key=lambda s: s.id)
        return {"employees": [
            _employee_summary(s, snap.records[s.id], snap.bundle)
            for s in rows]}

    @app.get("/api/employees/{employee_id}")
    def employee_detail(employee_id: str):
        snap = current()
        if snap is None:
            return _error(503, "no_model", "no model loaded")
        scored = snap.scored.get(employee_id)
        if scored is None:
            return _error(404, "not_found", f"no employee with id {employee_id}")
        doc = scored.to_dict()
        doc["record"] = dict(snap.records[employee_id].raw)
        return doc

    @app.post("/api/whatif")
    def whatif(body: WhatifBody):
        snap = current()
        if snap is None:
            return _error(503, "no_model", "no model loaded")
        record = snap.records.get(body.id)
        if record is None:
            return _error(404, "not_found", f"no employee with id {body.id}")
        before, after, delta = pipeline.whatif(snap.bundle, record,
                                               body.overrides)
        return {"before": before.to_dict(), "after": after.to_dict(),
                "delta": delta}

    @app.post("/api/screen")
    def screen(body: ScreenBody):
        snap = current()
        if snap is None:
            return _error(503, "no_model", "no model loaded")
        result = pipeline.screen_candidate(snap.bundle, body.candidate,
                                           body.candidate_id)
        return result.to_dict()

    @app.get("/api/model")
    def model_info():
        snap = current()
        if snap is None:
            return _error(503, "no_model", "no model loaded")
        bundle = snap.bundle
        return {
            "format_version": bundle.format_version,
            "created_at": bundle.created_at,
            "checksum": bundle.checksum(),
            "seed": bundle.seed,
            "metrics": dict(bundle.metrics),
            "train_config": dict(bundle.train_config),
            "n_features": bundle.codec.n_features,
            "n_trees": len(bundle.forest.trees),
            "schema": bundle.schema.to_dict(),
        }

    @app.post("/api/rescore")
    def rescore():
        snap = current()
        if snap is None:
            return _error(503, "no_model", "no model loaded")
        fresh = state.rescore()
        return {"rescored": len(fresh.order), "scored_at": fresh.scored_at}

    return app


def app_from_paths(model_path: str, data_path: str,
                   cors_origins: tuple[str, ...] = ("*",)) -> FastAPI:
    """Build a ready-to-serve app from artifact and roster files."""
    bundle = load_bundle(model_path)
    result = load_dataset(data_path, bundle.schema)
    log.info("loaded %d roster rows from %s", len(result.records), data_path)
    return create_app(bundle, result.records, cors_origins)
