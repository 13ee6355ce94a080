"""Read-only HTTP API over the event store.

Every /v1 endpoint is a thin serialization of a metrics/network operation
for the FilterSpec parsed from the query string. The in-memory snapshot is
swapped atomically whenever the store file changes on disk (checked per
request, plus an explicit POST /v1/refresh).
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import Depends, FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import payloads
from .errors import StorageError, ValidationError
from .events import format_utc, parse_utc
from .identity import IdentityRegistry, IdentityRules, detect_bots, resolve_identities
from .metrics import CONTRIBUTION_KINDS, LENSES, FilterSpec
from .store import EventStore


@dataclass
class ApiConfig:
    store_path: str
    registry_path: str = ""
    host: str = "127.0.0.1"
    port: int = 8000
    auth_token: str = ""
    cors_origins: list = field(default_factory=list)
    static_dir: str = ""

    def __post_init__(self):
        if not 0 <= self.port <= 65535:
            raise ValueError(f"invalid port: {self.port}")
        if not self.registry_path:
            self.registry_path = str(Path(self.store_path) / "identities.json")


class HealthResponse(BaseModel):
    status: str
    events: int
    as_of: str


class ErrorResponse(BaseModel):
    code: str
    message: str


class AppState:
    """Holds the current snapshot + registry; swap is atomic under a lock."""

    def __init__(self, config: ApiConfig):
        self.config = config
        self.store = EventStore(config.store_path)
        self._lock = threading.Lock()
        self._fingerprint = None
        self._snapshot = None
        self._registry = None

    def refresh(self, force=False):
        with self._lock:
            fingerprint = self.store.fingerprint()
            if not force and fingerprint == self._fingerprint and self._snapshot is not None:
                return
            snapshot = self.store.load_snapshot()
            registry = self._load_registry(snapshot)
            self._snapshot = snapshot
            self._registry = registry
            self._fingerprint = fingerprint

    def _load_registry(self, snapshot):
        path = Path(self.config.registry_path)
        if path.exists():
            return IdentityRegistry.load(path)
        # un-enriched store: resolve with default rules so the API still answers
        return detect_bots(resolve_identities(snapshot, IdentityRules()), IdentityRules())

    def current(self):
        self.refresh()
        return self._snapshot, self._registry


def parse_filter(params) -> FilterSpec:
    """Build a FilterSpec from query params, rejecting unknown keys."""
    allowed = {"from", "to", "lens", "group", "kind", "measure"}
    unknown = set(params) - allowed
    if unknown:
        raise ValidationError(f"unknown query parameters: {sorted(unknown)}")
    start = end = None
    try:
        if params.get("from"):
            start = parse_utc(_widen(params["from"], "start"))
        if params.get("to"):
            end = parse_utc(_widen(params["to"], "end"))
    except ValueError as exc:
        raise ValidationError(f"bad date: {exc}") from exc
    lens = params.get("lens", "none")
    if lens not in LENSES:
        raise ValidationError(f"lens must be one of {LENSES}")
    try:
        return FilterSpec(start=start, end=end, lens=lens, group_filter=params.get("group"))
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc


def _widen(value: str, side: str) -> str:
    # bare dates cover the whole day
    if len(value) == 10:
        return value + ("T00:00:00Z" if side == "start" else "T23:59:59Z")
    return value


def create_app(config: ApiConfig) -> FastAPI:
    state = AppState(config)
    state.refresh(force=True)

    app = FastAPI(title="commlens", version="1")
    app.state.commlens = state

    if config.cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=config.cors_origins,
            allow_methods=["GET", "POST"],
            allow_headers=["*"],
        )

    def authorized(request: Request):
        if not config.auth_token:
            return True
        header = request.headers.get("authorization", "")
        return header == f"Bearer {config.auth_token}"

    @app.exception_handler(ValidationError)
    async def on_validation_error(request, exc):
        return JSONResponse(
            status_code=400, content={"code": "bad_request", "message": str(exc)}
        )

    @app.exception_handler(StorageError)
    async def on_storage_error(request, exc):
        return JSONResponse(
            status_code=503, content={"code": "storage_error", "message": str(exc)}
        )

    @app.middleware("http")
    async def auth_middleware(request: Request, call_next):
        if request.url.path.startswith("/v1/") and not authorized(request):
            return JSONResponse(
                status_code=401,
                content={"code": "unauthorized", "message": "missing or bad token"},
            )
        return await call_next(request)

    def metric_response(name, request: Request, **kwargs) -> Response:
        spec = parse_filter(dict(request.query_params))
        snapshot, registry = state.current()
        payload = payloads.build(name, snapshot, registry, spec, **kwargs)
        return Response(payloads.dumps(payload), media_type="application/json")

    @app.get("/v1/health", response_model=HealthResponse)
    def health():
        snapshot, _ = state.current()
        return Response(
            payloads.dumps(
                {
                    "status": "ok",
                    "events": len(snapshot),
                    "as_of": format_utc(snapshot.as_of),
                }
            ),
            media_type="application/json",
        )

    @app.post("/v1/refresh")
    def refresh():
        state.refresh(force=True)
        snapshot, _ = state.current()
        return Response(
            payloads.dumps({"status": "reloaded", "events": len(snapshot)}),
            media_type="application/json",
        )

    @app.get("/v1/metrics/turnover", responses={400: {"model": ErrorResponse}})
    def metrics_turnover(request: Request):
        return metric_response("turnover", request)

    @app.get("/v1/metrics/retention")
    def metrics_retention(request: Request):
        return metric_response("retention", request)

    @app.get("/v1/metrics/newcomers")
    def metrics_newcomers(request: Request):
        return metric_response("newcomers", request)

    @app.get("/v1/metrics/contributions")
    def metrics_contributions(request: Request):
        params = dict(request.query_params)
        kind = params.pop("kind", "pr")
        measure = params.pop("measure", "count")
        if kind not in CONTRIBUTION_KINDS:
            raise ValidationError(f"kind must be one of {sorted(CONTRIBUTION_KINDS)}")
        if measure not in ("count", "proportion"):
            raise ValidationError("measure must be count or proportion")
        spec = parse_filter(params)
        snapshot, registry = state.current()
        payload = payloads.contributions(snapshot, registry, spec, kind=kind, measure=measure)
        return Response(payloads.dumps(payload), media_type="application/json")

    @app.get("/v1/metrics/time-to-merge")
    def metrics_time_to_merge(request: Request):
        return metric_response("time-to-merge", request)

    @app.get("/v1/metrics/first-attention")
    def metrics_first_attention(request: Request):
        return metric_response("first-attention", request)

    @app.get("/v1/metrics/pr-overview")
    def metrics_pr_overview(request: Request):
        return metric_response("pr-overview", request)

    @app.get("/v1/metrics/contributors")
    def metrics_contributors(request: Request):
        return metric_response("contributors", request)

    @app.get("/v1/attention/prs")
    def attention_prs(request: Request):
        return metric_response("attention-prs", request)

    @app.get("/v1/network/pr")
    def network_pr(request: Request):
        return metric_response("network-pr", request)

    @app.get("/v1/identities/{identity_id}")
    def identity_detail(identity_id: str):
        snapshot, registry = state.current()
        payload = payloads.identity_detail(snapshot, registry, identity_id)
        if payload is None:
            return JSONResponse(
                status_code=404,
                content={"code": "not_found", "message": f"no identity {identity_id}"},
            )
        return Response(payloads.dumps(payload), media_type="application/json")

    static_dir = config.static_dir
    if static_dir and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="dashboard")

    return app


def serve(config: ApiConfig):
    """Run the API under uvicorn; blocks until shutdown."""
    import uvicorn

    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
