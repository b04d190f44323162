"""HTTP service over the pipeline and query layer.

Endpoints (all JSON): POST /v1/ingest, POST /v1/query/experts,
GET /v1/tasks/priorities, POST /v1/analytics/query,
GET /v1/graph/entities/{id}, GET /v1/graph/neighborhood/{id},
GET /v1/healthz. Errors use {code, message, stage}. A static API key
(X-API-Key) is enforced when configured. Read endpoints never mutate
the store; ingest serializes through the store's single-writer commit
path.
"""

from __future__ import annotations

from fastapi import Body, FastAPI, Query, Request
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel

from . import applications, serde
from .config import RunConfig
from .errors import (
    ActivityKGError,
    NoConceptsFound,
    TranslationError,
    UnknownEntity,
    UnsupportedQuery,
)
from .ingestion import parse_activity_stream
from .ontology import entity_id, parse_timestamp
from .pipeline import PipelineRuntime, run_records

NEIGHBORHOOD_NODE_CAP = 200

_ERROR_STATUS = {
    UnknownEntity: 404,
    NoConceptsFound: 404,
    TranslationError: 422,
    UnsupportedQuery: 422,
}


class ExpertsRequest(BaseModel):
    text: str
    top_n: int = 5
    as_of: str | None = None


class AnalyticsRequest(BaseModel):
    text: str
    as_of: str | None = None


def create_app(cfg: RunConfig, runtime: PipelineRuntime | None = None) -> FastAPI:
    runtime = runtime or PipelineRuntime(cfg)
    app = FastAPI(title="activitykg", version="0.1.0")
    app.state.runtime = runtime

    def _check_key(request: Request) -> JSONResponse | None:
        if cfg.api_key and request.headers.get("x-api-key") != cfg.api_key:
            return JSONResponse(
                status_code=401,
                content={"code": "Unauthorized", "message": "missing or wrong API key", "stage": "auth"},
            )
        return None

    @app.exception_handler(ActivityKGError)
    async def _domain_error(_request: Request, exc: ActivityKGError):
        status = _ERROR_STATUS.get(type(exc), 400)
        return JSONResponse(
            status_code=status,
            content={"code": type(exc).__name__, "message": str(exc), "stage": "query"},
        )

    @app.get("/v1/healthz")
    def healthz():
        return {
            "status": "ok",
            "entities": len(runtime.store.entities),
            "triples": len(runtime.store.triples),
        }

    @app.post("/v1/ingest")
    async def ingest(request: Request):
        denied = _check_key(request)
        if denied:
            return denied
        body = (await request.body()).decode("utf-8")
        records, dead = parse_activity_stream(body)
        report, _ = run_records(runtime, records)
        report.input_records = len(records) + len(dead)
        report.dead_letters = dead + report.dead_letters
        report.dead_lettered = len(report.dead_letters)
        return report.to_dict()

    @app.post("/v1/query/experts")
    def query_experts(request: Request, payload: ExpertsRequest = Body(...)):
        denied = _check_key(request)
        if denied:
            return denied
        as_of = parse_timestamp(payload.as_of) if payload.as_of else None
        results = applications.discover_experts(
            runtime.store,
            payload.text,
            top_n=payload.top_n,
            provider=runtime.provider,
            mode=cfg.provider.mode,
            as_of=as_of,
            weights=cfg.expertise_weights,
            half_life_days=cfg.decay_half_life_days,
        )
        return {"query": payload.text,
                "results": [serde.ranked_result_dict(r, runtime.store) for r in results]}

    @app.get("/v1/tasks/priorities")
    def task_priorities(
        request: Request,
        user: str = Query(...),
        horizon: int = Query(7, ge=1),
        as_of: str | None = Query(None),
    ):
        denied = _check_key(request)
        if denied:
            return denied
        user_id = user
        if user_id not in runtime.store.entities:
            guess = entity_id(user, "person")
            if guess in runtime.store.entities:
                user_id = guess
        results = applications.prioritize_tasks(
            runtime.store,
            user_id,
            horizon_days=horizon,
            as_of=parse_timestamp(as_of) if as_of else None,
            weights=cfg.priority_weights,
        )
        return {"user": user_id, "horizon_days": horizon,
                "results": [serde.ranked_result_dict(r, runtime.store) for r in results]}

    @app.post("/v1/analytics/query")
    def analytics_query(request: Request, payload: AnalyticsRequest = Body(...)):
        denied = _check_key(request)
        if denied:
            return denied
        as_of = parse_timestamp(payload.as_of) if payload.as_of else None
        query = applications.translate_query(payload.text, runtime.provider, now=as_of)
        return serde.analytics_dict(applications.execute_analytics(runtime.store, query))

    @app.get("/v1/graph/entities/{eid}")
    def entity_view(request: Request, eid: str):
        denied = _check_key(request)
        if denied:
            return denied
        if eid not in runtime.store.entities:
            raise UnknownEntity(eid)
        rows = runtime.store.neighbors(eid, direction="both")
        return {
            "entity": serde.entity_dict(runtime.store.entities[eid]),
            "neighbors": [
                {"neighbor": serde.entity_dict(runtime.store.entities[nid]),
                 "relation": rel,
                 "triple": serde.triple_dict(t, runtime.store)}
                for nid, rel, t in rows
            ],
        }

    @app.get("/v1/graph/neighborhood/{eid}")
    def neighborhood(request: Request, eid: str, hops: int = Query(1, ge=1, le=2)):
        denied = _check_key(request)
        if denied:
            return denied
        if eid not in runtime.store.entities:
            raise UnknownEntity(eid)
        nodes = {eid}
        frontier = {eid}
        truncated = False
        for _ in range(hops):
            nxt = set()
            for node in frontier:
                for _rel, other in runtime.store.out_adj.get(node, ()):
                    nxt.add(other)
                for _rel, other in runtime.store.in_adj.get(node, ()):
                    nxt.add(other)
            nxt -= nodes
            for other in sorted(nxt):
                if len(nodes) >= NEIGHBORHOOD_NODE_CAP:
                    truncated = True
                    break
                nodes.add(other)
            frontier = nxt & nodes
        edges = [
            serde.triple_dict(t, runtime.store)
            for key, t in sorted(runtime.store.triples.items())
            if t.head_id in nodes and t.tail_id in nodes
        ]
        return {
            "center": eid,
            "hops": hops,
            "truncated": truncated,
            "nodes": [serde.entity_dict(runtime.store.entities[n]) for n in sorted(nodes)],
            "edges": edges,
        }

    @app.get("/", response_class=PlainTextResponse)
    def root():
        return "activitykg service; see /v1/healthz"

    return app
