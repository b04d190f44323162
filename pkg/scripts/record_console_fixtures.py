"""Record API fixtures for the console contract tests.

Builds the seed-13 corpus, serves it through the real FastAPI app, and
saves raw response bytes (exactly what the console receives over the
wire) plus the CLI output for the same expert query, so the frontend
tests can check byte-equality and ordering parity.

Run from the repo root: python3 scripts/record_console_fixtures.py
"""

from __future__ import annotations

import contextlib
import io
import json
from pathlib import Path

from fastapi.testclient import TestClient

from activitykg import cli
from activitykg.config import RunConfig
from activitykg.corpus import generate_corpus
from activitykg.pipeline import PipelineRuntime, run_records
from activitykg.service import create_app

FIXTURES = Path(__file__).resolve().parent.parent / "frontend" / "tests" / "fixtures"
SEED, N = 13, 60
AS_OF = "2025-07-01T00:00:00Z"
EXPERT_QUERY = "Who knows about influencer marketing?"


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    corpus = generate_corpus(seed=SEED, n_activities=N, noise_level=0.0)

    cfg = RunConfig()
    runtime = PipelineRuntime(cfg)
    run_records(runtime, corpus.activities)
    http = TestClient(create_app(cfg, runtime=runtime))

    def save(name: str, response) -> dict:
        (FIXTURES / name).write_bytes(response.content)
        print(f"{name}: {response.status_code} {len(response.content)}B")
        return response.json()

    experts = save(
        "experts.json",
        http.post("/v1/query/experts", json={"text": EXPERT_QUERY, "top_n": 5, "as_of": AS_OF}),
    )
    top_expert = experts["results"][0]["item_id"]

    task_user = ""
    for user_id in corpus.task_users.values():
        probe = http.get(f"/v1/tasks/priorities?user={user_id}&horizon=7&as_of={AS_OF}")
        if probe.json()["results"]:
            task_user = user_id
            save("tasks.json", probe)
            break
    assert task_user, "no task user with open tasks in the fixture corpus"

    save(
        "analytics.json",
        http.post(
            "/v1/analytics/query",
            json={"text": "What percentage of tasks were completed on time last quarter?", "as_of": AS_OF},
        ),
    )
    save("neighborhood.json", http.get(f"/v1/graph/neighborhood/{top_expert}?hops=2"))
    save("error_noconcepts.json", http.post("/v1/query/experts", json={"text": "submarine pottery"}))
    save("tasks_empty.json", http.get(
        f"/v1/tasks/priorities?user={_userless_person(runtime)}&horizon=7&as_of={AS_OF}"
    ))

    # CLI output for the same query against the same graph state.
    store_dir = FIXTURES / "_store"
    disk_cfg = RunConfig(store_dir=str(store_dir))
    disk_runtime = PipelineRuntime(disk_cfg)
    run_records(disk_runtime, corpus.activities)
    disk_runtime.store.close()
    buffer = io.StringIO()
    with contextlib.redirect_stdout(buffer):
        code = cli.main([
            "query", "experts", "--store", str(store_dir),
            "--text", EXPERT_QUERY, "--top", "5", "--as-of", AS_OF,
        ])
    assert code == 0
    (FIXTURES / "cli_experts.json").write_text(buffer.getvalue(), "utf-8")
    print("cli_experts.json:", len(buffer.getvalue()), "B")

    meta = {"seed": SEED, "n": N, "as_of": AS_OF, "expert_query": EXPERT_QUERY, "task_user": task_user}
    (FIXTURES / "meta.json").write_text(json.dumps(meta, indent=2) + "\n", "utf-8")
    for leftover in store_dir.iterdir():
        leftover.unlink()
    store_dir.rmdir()


def _userless_person(runtime: PipelineRuntime) -> str:
    """A person entity with no open task within reach (empty-state fixture)."""
    from activitykg import applications

    for eid in sorted(runtime.store.entities):
        entity = runtime.store.entities[eid]
        if entity.entity_type != "person":
            continue
        from activitykg.ontology import parse_timestamp

        results = applications.prioritize_tasks(
            runtime.store, eid, 7, as_of=parse_timestamp(AS_OF)
        )
        if not results:
            return eid
    raise AssertionError("every person has tasks; adjust fixture corpus")


if __name__ == "__main__":
    main()
