"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line (bypassing capture) so runs are auditable at a glance.

Tolerances are pinned here and nowhere else: oracle agreement 1e-9,
noise-run resolution accuracy floor 0.85, timed budgets 10s/60s.
"""

from __future__ import annotations

import functools
import math
import random
import string
import sys
import time
from datetime import datetime, timedelta, timezone

import numpy as np
import pytest

from activitykg import applications, metrics
from activitykg.config import RunConfig
from activitykg.corpus import generate_corpus
from activitykg.evaluation import run_eval
from activitykg.ontology import Triple
from activitykg.pipeline import PipelineRuntime, run_records
from activitykg.providers import DeterministicProvider
from activitykg.store import GraphStore
from activitykg.summarizer import redaction_matches
from activitykg.vectorindex import VectorIndex

import conftest
from conftest import make_entity, seeded_store


def _report(name: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    line = f"[ACCEPTANCE] {name}: {status}"
    if detail:
        line += f" ({detail})"
    conftest.ACCEPTANCE_RESULTS.append(line)
    print(line, file=sys.__stderr__, flush=True)


def check(name: str):
    """Decorator: report PASS/FAIL around the wrapped criterion."""

    def outer(fn):
        @functools.wraps(fn)
        def inner(*args, **kwargs):
            try:
                detail = fn(*args, **kwargs) or ""
            except BaseException:
                _report(name, False)
                raise
            _report(name, True, detail)

        return inner

    return outer


# --- 1. metric oracle suite ---------------------------------------------------


def _naive_ndcg(ranking, rel, k):
    dcg = 0.0
    for i, item in enumerate(ranking[:k]):
        dcg += rel.get(item, 0) / math.log2(i + 2)
    ideal = sorted(rel.values(), reverse=True)[:k]
    idcg = sum(g / math.log2(i + 2) for i, g in enumerate(ideal))
    return dcg / idcg if idcg > 0 else 0.0


def _naive_p(ranking, rel, k):
    return sum(1 for item in ranking[:k] if rel.get(item, 0) >= 1) / k


def _naive_rr(ranking, rel):
    for i, item in enumerate(ranking):
        if rel.get(item, 0) >= 1:
            return 1.0 / (i + 1)
    return 0.0


def _naive_recall(recommended, relevant):
    return len(recommended & relevant) / len(relevant)


@check("metric-oracle-suite")
def test_metric_oracle_suite():
    start = time.perf_counter()
    rng = random.Random(190841)
    for case in range(1000):
        pool = [f"i{j}" for j in range(rng.randint(1, 20))]
        rel = {i: rng.randint(0, 4) for i in rng.sample(pool, rng.randint(1, len(pool)))}
        ranking = rng.sample(pool, rng.randint(0, len(pool)))
        k = rng.randint(1, 10)
        qrels = metrics.Qrels("q", rel)
        assert abs(metrics.ndcg_at_k(ranking, qrels, k) - _naive_ndcg(ranking, rel, k)) <= 1e-9
        assert abs(metrics.precision_at_k(ranking, qrels, k) - _naive_p(ranking, rel, k)) <= 1e-9
        assert abs(metrics.reciprocal_rank(ranking, qrels) - _naive_rr(ranking, rel)) <= 1e-9
        relevant = {i for i, g in rel.items() if g >= 1}
        if relevant:
            assert abs(
                metrics.recall_metric(set(ranking), relevant) - _naive_recall(set(ranking), relevant)
            ) <= 1e-9
    # Hand-computed examples, exact.
    assert metrics.ndcg_at_k(["a", "b", "c"], metrics.Qrels("q", {"a": 3, "b": 2, "c": 0}), 3) == 1.0
    assert abs(metrics.ndcg_at_k(["x", "y"], metrics.Qrels("q", {"y": 1, "x": 0}), 2)
               - 0.6309297535714574) <= 1e-9
    got = metrics.mrr(
        {"a": ["r1"], "b": ["x", "r2"], "c": ["x", "y", "z", "r3"]},
        {"a": metrics.Qrels("a", {"r1": 1}), "b": metrics.Qrels("b", {"r2": 1}),
         "c": metrics.Qrels("c", {"r3": 1})},
    )
    assert abs(got - 0.5833333333333334) <= 1e-9
    assert metrics.precision_at_k(["a", "b"], metrics.Qrels("q", {"a": 1, "b": 1}), 5) == 0.4
    assert abs(metrics.recall_metric({"a", "b", "c", "d"}, {"a", "b", "c", "d", "e"}) - 0.8) <= 1e-9
    elapsed = time.perf_counter() - start
    assert elapsed < 10.0, f"metric oracle suite took {elapsed:.1f}s"
    return f"1000 instances, {elapsed:.2f}s"


# --- 2. end-to-end truth recovery ----------------------------------------------


@check("end-to-end-truth-recovery")
def test_truth_recovery_seed42():
    start = time.perf_counter()
    corpus = generate_corpus(seed=42, n_activities=200, noise_level=0.0)
    report = run_eval(corpus)
    assert report.extraction["f1"] == 1.0, report.extraction
    assert report.resolution["accuracy"] == 1.0, report.resolution
    assert report.triples["exact_match"] is True, report.triples
    elapsed = time.perf_counter() - start
    assert elapsed < 60.0, f"truth recovery took {elapsed:.1f}s"
    return f"F1=1.0 accuracy=1.0 triples exact, {elapsed:.1f}s"


# --- 3. noise degradation --------------------------------------------------------


@check("noise-degradation")
def test_noise_degradation_and_determinism():
    clean = run_eval(generate_corpus(seed=42, n_activities=200, noise_level=0.0))
    noisy = run_eval(generate_corpus(seed=42, n_activities=200, noise_level=0.3))
    accuracy = noisy.resolution["accuracy"]
    assert accuracy >= 0.85, f"resolution accuracy {accuracy} under noise"
    assert accuracy < clean.resolution["accuracy"]
    again = run_eval(generate_corpus(seed=42, n_activities=200, noise_level=0.3))
    assert noisy.to_json() == again.to_json(), "reports not byte-identical"
    return f"accuracy {accuracy:.4f} (clean 1.0), reports byte-identical"


# --- 4. idempotence ---------------------------------------------------------------


@check("pipeline-idempotence")
def test_pipeline_idempotent(tmp_path):
    corpus = generate_corpus(seed=42, n_activities=200, noise_level=0.0)
    cfg = RunConfig(store_dir=str(tmp_path / "store"))
    runtime = PipelineRuntime(cfg)
    first, _ = run_records(runtime, corpus.activities)
    assert first.committed == 200
    export_before = runtime.store.export_graph()
    runtime.store.close()

    runtime2 = PipelineRuntime(RunConfig(store_dir=str(tmp_path / "store")))
    second, _ = run_records(runtime2, corpus.activities)
    assert second.new_entities == 0, second.new_entities
    assert second.new_triples == 0, second.new_triples
    assert runtime2.store.export_graph() == export_before
    runtime2.store.close()
    return "rerun added 0 entities, 0 triples; export byte-identical"


# --- 5. vector-search oracle -------------------------------------------------------


@check("vector-search-oracle")
def test_vector_search_oracle():
    start = time.perf_counter()
    rng = random.Random(777)
    np_rng = np.random.default_rng(777)
    sizes = [rng.randint(1, 40) for _ in range(990)] + [1000, 2000, 3000, 4000, 5000,
                                                        6000, 7000, 8000, 9000, 10000]
    for case, size in enumerate(sizes):
        dim = rng.choice([4, 8, 16, 32])
        mat = np_rng.standard_normal((size, dim))
        mat /= np.linalg.norm(mat, axis=1, keepdims=True)
        keys = [f"k{i:05d}" for i in range(size)]
        index = VectorIndex(dim)
        for key, row in zip(keys, mat):
            index.put(key, row)
        q = np_rng.standard_normal(dim)
        q /= np.linalg.norm(q)
        k = rng.randint(1, 8)
        theta = rng.choice([-1.0, 0.0, 0.2, 0.5])
        got = index.query_similar(q, k=k, theta=theta)
        scores = mat @ q
        want = sorted(
            ((key, float(s)) for key, s in zip(keys, scores) if s >= theta),
            key=lambda row: (-row[1], row[0]),
        )[:k]
        assert [g[0] for g in got] == [w[0] for w in want], f"case {case}"
        assert all(abs(g[1] - w[1]) <= 1e-9 for g, w in zip(got, want)), f"case {case}"
    elapsed = time.perf_counter() - start
    return f"1000 random indexes, {elapsed:.1f}s"


# --- 6. traversal + expertise oracle --------------------------------------------------


def _random_typed_graph(rng: random.Random):
    n = rng.randint(5, 50)
    types = ["person", "skill", "topic", "task", "document", "meeting"]
    # Fixed-width ids keep node names from being substrings of each other,
    # which matters for the concept matcher in the expertise oracle check.
    entities = [make_entity(f"Node N{i:02d}", rng.choice(types), activity="a-0") for i in range(n)]
    relations = ["has_skill", "authored", "covers", "discussed", "attending_event", "blocks"]
    triples = {}
    for _ in range(rng.randint(n // 2, min(2 * n, 80))):
        h, t = rng.sample(range(n), 2)
        rel = rng.choice(relations)
        ts = datetime(2025, 1, 1, tzinfo=timezone.utc) + timedelta(days=rng.randint(0, 400))
        key = (entities[h].id, rel, entities[t].id)
        triples[key] = Triple(
            head_id=key[0], relation=rel, tail_id=key[2], confidence=1.0,
            observed_at=ts, provenance=["a-0"], normalized=False,
        )
    return seeded_store(entities, list(triples.values())), entities


def _oracle_paths(store: GraphStore, start: str, end_type, max_hops):
    edges = list(store.triples.keys())
    found = []

    def recurse(node, visited, acc):
        for (h, r, t) in edges:
            nxt = t if h == node else (h if t == node else None)
            if nxt is None or nxt in visited:
                continue
            path = acc + [nxt]
            if end_type is None or store.entities[nxt].entity_type == end_type:
                found.append(tuple([start] + path))
            if len(path) < max_hops:
                recurse(nxt, visited | {nxt}, path)

    recurse(start, {start}, [])
    return sorted(set(found))


def _oracle_expertise(store: GraphStore, as_of, max_hops=3):
    lam = math.log(2) / 180.0
    concept_ids = [e.id for e in store.entities.values() if e.entity_type in ("skill", "topic")]
    rows = [(t.head_id, t.relation, t.tail_id, t.observed_at) for t in store.triples.values()]
    scores: dict[str, float] = {}

    def recurse(node, visited, depth):
        for (h, r, t, ts) in rows:
            nxt = t if h == node else (h if t == node else None)
            if nxt is None or nxt in visited:
                continue
            if store.entities[nxt].entity_type == "person":
                w = applications.EXPERTISE_WEIGHTS.get(r, applications.DEFAULT_EDGE_WEIGHT)
                age = max(0.0, (as_of - ts).total_seconds() / 86400.0)
                scores[nxt] = scores.get(nxt, 0.0) + w * math.exp(-lam * age)
            if depth + 1 < max_hops:
                recurse(nxt, visited | {nxt}, depth + 1)

    for cid in concept_ids:
        recurse(cid, {cid}, 0)
    return scores


class _AllConceptsProvider(DeterministicProvider):
    """Widen concept matching so the oracle can treat every concept node
    as matched (query text carries every node name)."""


@check("traversal-and-expertise-oracle")
def test_traversal_and_expertise_oracle():
    start = time.perf_counter()
    rng = random.Random(31337)
    as_of = datetime(2026, 1, 1, tzinfo=timezone.utc)
    provider = DeterministicProvider()
    graphs = 0
    while graphs < 100:
        store, entities = _random_typed_graph(rng)
        start_node = rng.choice(entities).id
        end_type = rng.choice([None, "person", "skill"])
        hops = rng.randint(1, 3)
        paths, truncated = store.traverse_paths(start_node, end_type=end_type, max_hops=hops)
        if not truncated:
            got = sorted({tuple(p.nodes) for p in paths})
            assert got == _oracle_paths(store, start_node, end_type, hops)

        concept_names = sorted({
            e.canonical_name for e in store.entities.values() if e.entity_type in ("skill", "topic")
        })
        if concept_names:
            query = "Tell me about " + ", ".join(concept_names)
            try:
                results = applications.discover_experts(store, query, 100, provider, as_of=as_of)
            except applications.NoConceptsFound:
                results = []
            oracle = _oracle_expertise(store, as_of)
            got_scores = {r.item_id: r.score for r in results}
            assert set(got_scores) == {k for k, v in oracle.items() if v > 0}
            for key, value in got_scores.items():
                assert abs(value - oracle[key]) <= 1e-9
        graphs += 1
    elapsed = time.perf_counter() - start
    return f"100 graphs, {elapsed:.1f}s"


# --- 7. persistence ----------------------------------------------------------------


@check("persistence-roundtrip-and-wal")
def test_persistence_roundtrip_and_wal(tmp_path):
    rng = random.Random(2468)
    for case in range(100):
        store, _entities = _random_typed_graph(rng)
        text = store.export_graph()
        assert GraphStore.import_graph(text).export_graph() == text, f"case {case}"

    root = tmp_path / "walstore"
    disk = GraphStore(root, compact_every=0)
    committed = []
    for i in range(20):
        entity = make_entity(f"Wal Node {i}", "task", activity=f"act-{i}")
        triples = []
        if committed and rng.random() < 0.7:
            other = rng.choice(committed)
            triples.append(Triple(
                head_id=entity.id, relation="blocks", tail_id=other.id, confidence=1.0,
                observed_at=datetime(2025, 1, 1, tzinfo=timezone.utc) + timedelta(days=i),
                provenance=[f"act-{i}"], normalized=True,
            ))
        disk.commit(f"act-{i}", [entity], triples)
        committed.append(entity)
    disk.close()
    wal_lines = (root / "wal.log").read_text().splitlines()
    assert len(wal_lines) == 20
    for boundary in range(21):
        trimmed = tmp_path / f"wal-{boundary}"
        trimmed.mkdir()
        (trimmed / "wal.log").write_text(
            "\n".join(wal_lines[:boundary]) + ("\n" if boundary else "")
        )
        replayed = GraphStore(trimmed)
        assert replayed.integrity_violations() == [], f"boundary {boundary}"
        assert len(replayed.committed_activities) == boundary
    return "100 round-trips; 21 wal truncation points clean"


# --- 8. paper example shapes ----------------------------------------------------------


@check("paper-example-shapes")
def test_paper_example_shapes():
    provider = DeterministicProvider()
    as_of = datetime(2025, 7, 1, tzinfo=timezone.utc)
    entities = []
    for dept, on_time in (("marketing", 17), ("engineering", 13)):
        for i in range(20):
            due = datetime(2025, 5, 1, tzinfo=timezone.utc) + timedelta(days=i)
            ok = i < on_time
            entities.append(make_entity(
                f"{dept} fixture task {i}", "task",
                department=dept,
                due_date=due.strftime("%Y-%m-%d"),
                status="completed",
                completed_at=(due + timedelta(days=-1 if ok else 2)).strftime("%Y-%m-%d"),
            ))
    store = seeded_store(entities, [])
    query = applications.translate_query(
        "What percentage of tasks were completed on time last quarter?", provider, now=as_of
    )
    result = applications.execute_analytics(store, query)
    assert result.overall_support == (30, 40)
    assert abs(result.overall - 0.75) <= 1e-12
    assert abs(result.groups["marketing"] - 0.85) <= 1e-12
    assert abs(result.groups["engineering"] - 0.65) <= 1e-12
    expected = ("75% of the tasks were completed on time, with the marketing team "
                "achieving 85% and the engineering team achieving 65%")
    assert result.rendered == expected, result.rendered

    # Expertise scenario: a marketing strategist with a direct skill edge
    # and an authored campaign document outranks meeting attendees.
    from activitykg.ingestion import parse_activity_stream

    lines = [
        '{"activity_id": "fx-1", "source_type": "log", "timestamp": "2025-06-20T09:00:00Z",'
        ' "actors": [{"display_name": "Sarah Lee"}], "subject": "Skills profile update",'
        ' "body": "Sarah Lee has expertise in influencer marketing."}',
        '{"activity_id": "fx-2", "source_type": "document", "timestamp": "2025-06-21T09:00:00Z",'
        ' "actors": [{"display_name": "Sarah Lee"}], "subject": "Document: Campaign Plan",'
        ' "body": "Sarah Lee authored the document Campaign Plan.'
        ' The document covers influencer marketing."}',
        '{"activity_id": "fx-3", "source_type": "calendar", "timestamp": "2025-06-22T09:00:00Z",'
        ' "actors": [{"display_name": "Tomas Hassan"}, {"display_name": "Lucy Wei"}],'
        ' "subject": "Meeting: Q2 Campaign Review",'
        ' "body": "Tomas Hassan and Lucy Wei are attending the meeting Q2 Campaign Review.'
        ' The meeting discusses influencer marketing."}',
    ]
    records, dead = parse_activity_stream("\n".join(lines))
    assert not dead
    runtime = PipelineRuntime(RunConfig())
    run_records(runtime, records)
    ranked = applications.discover_experts(
        runtime.store, "Who is the best person to consult about influencer marketing strategies?",
        top_n=5, provider=runtime.provider, as_of=as_of,
    )
    top = runtime.store.entities[ranked[0].item_id]
    assert top.canonical_name == "Sarah Lee", top.canonical_name
    assert len(ranked) >= 3 and ranked[0].score > ranked[1].score
    assert ranked[0].evidence
    return "75/85/65 sentence exact; Sarah Lee ranked first"


# --- 9. redaction sweep -----------------------------------------------------------------


@check("redaction-sweep")
def test_redaction_sweep():
    corpus = generate_corpus(seed=42, n_activities=200, noise_level=0.0)
    rng = random.Random(4242)
    planted: list[str] = []
    targets = rng.sample(corpus.activities, 100)
    for i, record in enumerate(targets):
        kind = i % 4
        if kind == 0:
            secret = str(rng.randint(10**8, 10**10))
            record.body += f" Booking reference {secret}."
        elif kind == 1:
            secret = "4111 1111 1111 1111"
            record.body += f" Card on file {secret}."
        elif kind == 2:
            secret = "".join(rng.choices(string.ascii_lowercase + string.digits, k=24))
            while sum(c.isdigit() for c in secret) < 2 or sum(c.isalpha() for c in secret) < 2:
                secret = "".join(rng.choices(string.ascii_lowercase + string.digits, k=24))
            record.body += f" Session token {secret} issued."
        else:
            secret = f"user{rng.randint(100, 999)}@corp-example.com"
            record.body += f" Reply to {secret} please."
        planted.append(secret)

    runtime = PipelineRuntime(RunConfig())
    report, traces = run_records(runtime, corpus.activities, collect_traces=True)
    assert report.committed == 200, "planted text must not break the pipeline"
    summaries = [t.summary_text for t in traces]
    assert len(summaries) == 200
    marker_count = sum(s.count("[REDACTED:") for s in summaries)
    for secret in planted:
        assert all(secret not in s for s in summaries), f"leaked: {secret!r}"
    for s in summaries:
        assert redaction_matches(s) == [], s
    assert marker_count >= 100, marker_count
    return f"100 planted identifiers caught; {marker_count} redaction markers; zero pattern hits"


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
