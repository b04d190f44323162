from __future__ import annotations

import json

import pytest
from fastapi.testclient import TestClient

from activitykg.config import RunConfig
from activitykg.corpus import generate_corpus
from activitykg.pipeline import PipelineRuntime, run_records
from activitykg.service import create_app

AS_OF = "2025-07-01T00:00:00Z"


@pytest.fixture(scope="module")
def corpus():
    return generate_corpus(seed=13, n_activities=60, noise_level=0.0)


@pytest.fixture()
def client(corpus):
    cfg = RunConfig()
    runtime = PipelineRuntime(cfg)
    run_records(runtime, corpus.activities)
    app = create_app(cfg, runtime=runtime)
    return TestClient(app), runtime


def test_healthz(client):
    http, runtime = client
    body = http.get("/v1/healthz").json()
    assert body["status"] == "ok"
    assert body["entities"] == len(runtime.store.entities)


def test_ingest_endpoint(corpus):
    cfg = RunConfig()
    runtime = PipelineRuntime(cfg)
    app = create_app(cfg, runtime=runtime)
    http = TestClient(app)
    lines = corpus.to_activity_jsonl().splitlines()[:5]
    body = "\n".join(lines) + "\nnot-json\n"
    report = http.post("/v1/ingest", content=body.encode("utf-8")).json()
    assert report["committed"] == 5
    assert report["dead_lettered"] == 1
    assert report["input_records"] == 6


def test_experts_endpoint_and_read_only(client):
    http, runtime = client
    before = runtime.store.export_graph()
    body = http.post(
        "/v1/query/experts",
        json={"text": "Who knows about influencer marketing?", "top_n": 3, "as_of": AS_OF},
    ).json()
    assert body["results"]
    top = body["results"][0]
    assert top["name"] == "Sarah Lee"
    assert top["evidence"][0]["nodes"][0]["id"] == top["item_id"]
    assert runtime.store.export_graph() == before  # reads never mutate


def test_experts_no_concepts_is_404(client):
    http, _ = client
    response = http.post("/v1/query/experts", json={"text": "submarine pottery"})
    assert response.status_code == 404
    body = response.json()
    assert body["code"] == "NoConceptsFound" and body["stage"] == "query"


def test_tasks_endpoint(client, corpus):
    http, runtime = client
    user = next(iter(corpus.task_users.values()), None)
    if user is None:
        pytest.skip("corpus grew no task users")
    body = http.get(f"/v1/tasks/priorities?user={user}&horizon=7&as_of={AS_OF}").json()
    for row in body["results"]:
        weights = {"urgency": 0.4, "importance": 0.3, "dependency": 0.3}
        recomputed = sum(weights[k] * row["components"][k] for k in weights)
        assert abs(recomputed - row["score"]) <= 1e-9


def test_tasks_unknown_user_404(client):
    http, _ = client
    response = http.get("/v1/tasks/priorities?user=nobody-here")
    assert response.status_code == 404
    assert response.json()["code"] == "UnknownEntity"


def test_analytics_endpoint(client):
    http, _ = client
    body = http.post(
        "/v1/analytics/query",
        json={"text": "What percentage of tasks were completed on time last quarter?", "as_of": AS_OF},
    ).json()
    assert body["metric"] == "ratio"
    assert "rendered" in body and isinstance(body["groups"], dict)
    unsupported = http.post("/v1/analytics/query", json={"text": "predict everything", "as_of": AS_OF})
    assert unsupported.status_code == 422
    assert unsupported.json()["code"] == "UnsupportedQuery"


def test_entity_and_neighborhood_endpoints(client):
    http, runtime = client
    before = runtime.store.export_graph()
    sarah = next(e for e in runtime.store.entities.values() if e.canonical_name == "Sarah Lee")
    entity = http.get(f"/v1/graph/entities/{sarah.id}").json()
    assert entity["entity"]["name"] == "Sarah Lee"
    assert entity["neighbors"]
    hood = http.get(f"/v1/graph/neighborhood/{sarah.id}?hops=2").json()
    node_ids = {n["id"] for n in hood["nodes"]}
    assert sarah.id in node_ids and len(node_ids) <= 200
    for edge in hood["edges"]:
        assert edge["head"] in node_ids and edge["tail"] in node_ids
    missing = http.get("/v1/graph/entities/" + "0" * 32)
    assert missing.status_code == 404
    assert runtime.store.export_graph() == before  # whole read session left the store untouched


def test_api_key_enforced(corpus):
    cfg = RunConfig(api_key="s3cr3t")
    runtime = PipelineRuntime(cfg)
    run_records(runtime, corpus.activities[:5])
    http = TestClient(create_app(cfg, runtime=runtime))
    denied = http.post("/v1/query/experts", json={"text": "anything"})
    assert denied.status_code == 401
    allowed = http.get("/v1/healthz")
    assert allowed.status_code == 200  # health stays open for probes
