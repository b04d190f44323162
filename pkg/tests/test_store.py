from __future__ import annotations

import random
from datetime import datetime, timedelta, timezone

import pytest

from activitykg.errors import IntegrityError, ParseError, UnknownEntity
from activitykg.ontology import Entity, Triple
from activitykg.store import GraphStore

from conftest import make_entity, make_triple, seeded_store


def _random_graph(rng: random.Random, n_nodes: int, n_edges: int):
    """Random entities + triples for round-trip and oracle tests."""
    types = ["person", "skill", "task", "topic", "document"]
    entities = [make_entity(f"Node {i}", rng.choice(types), activity=f"a-{i % 5}") for i in range(n_nodes)]
    triples = []
    seen = set()
    relations = ["has_skill", "authored", "discussed", "blocks", "covers"]
    for _ in range(n_edges if n_nodes >= 2 else 0):
        h, t = rng.sample(range(n_nodes), 2)
        rel = rng.choice(relations)
        key = (entities[h].id, rel, entities[t].id)
        if key in seen:
            continue
        seen.add(key)
        ts = datetime(2025, 1, 1, tzinfo=timezone.utc) + timedelta(days=rng.randint(0, 300))
        triples.append(
            Triple(head_id=entities[h].id, relation=rel, tail_id=entities[t].id,
                   confidence=round(rng.random(), 6), observed_at=ts,
                   provenance=[f"a-{rng.randint(0, 9)}"], normalized=False)
        )
    return entities, triples


def oracle_paths(store: GraphStore, start: str, end_type, whitelist, max_hops):
    """Exhaustive recursive path enumeration, independent of traverse_paths."""
    edges = []
    for (h, r, t) in store.triples:
        if whitelist is None or r in whitelist:
            edges.append((h, r, t))
    found = []

    def recurse(node, visited, acc):
        for (h, r, t) in edges:
            nxt = None
            if h == node:
                nxt = t
            elif t == node:
                nxt = h
            if nxt is None or nxt in visited:
                continue
            path = acc + [(r, nxt)]
            if end_type is None or store.entities[nxt].entity_type == end_type:
                found.append(tuple([start] + [n for _r, n in path]))
            if len(path) < max_hops:
                recurse(nxt, visited | {nxt}, path)

    recurse(start, {start}, [])
    return sorted(set(found))


def test_neighbors_empty_and_unknown():
    lonely = make_entity("Lonely", "person")
    store = seeded_store([lonely], [])
    assert store.neighbors(lonely.id) == []
    with pytest.raises(UnknownEntity):
        store.neighbors("f" * 32)


def test_neighbors_sorted_and_filtered(provider, schema):
    john = make_entity("John Smith", "person")
    flight = make_entity("AA123", "event")
    hotel = make_entity("Hilton Midtown", "location")
    t1 = make_triple(john, "traveling_on", flight)
    t2 = make_triple(john, "staying_at", hotel)
    store = seeded_store([john, flight, hotel], [t1, t2])
    rows = store.neighbors(john.id, direction="out")
    assert [r for _n, r, _t in rows] == ["staying_at", "traveling_on"]
    only = store.neighbors(john.id, relation_filter={"traveling_on"})
    assert len(only) == 1 and only[0][1] == "traveling_on"


def test_traverse_max_hops_one_equals_neighbors():
    rng = random.Random(5)
    entities, triples = _random_graph(rng, 10, 18)
    store = seeded_store(entities, triples)
    start = entities[0].id
    paths, truncated = store.traverse_paths(start, max_hops=1)
    assert not truncated
    neighbor_ids = sorted({(row[1], row[0]) for row in store.neighbors(start)})
    path_ids = sorted({(p.edges[0].relation, p.nodes[1]) for p in paths})
    assert path_ids == neighbor_ids
    assert all(len(p.nodes) == 2 for p in paths)


def test_two_hop_person_to_skill_paths():
    p = make_entity("Sarah Lee", "person")
    d1 = make_entity("Doc One", "document")
    d2 = make_entity("Doc Two", "document")
    s = make_entity("influencer marketing", "skill")
    triples = [
        make_triple(p, "authored", d1), make_triple(p, "authored", d2),
        make_triple(d1, "covers", s), make_triple(d2, "covers", s),
    ]
    store = seeded_store([p, d1, d2, s], triples)
    paths, _ = store.traverse_paths(p.id, end_type="skill", max_hops=2)
    assert len(paths) == 2
    assert {tuple(x.nodes) for x in paths} == {(p.id, d1.id, s.id), (p.id, d2.id, s.id)}


def test_cycle_never_revisits():
    a, b, c = (make_entity(n, "task") for n in ("Alpha", "Beta", "Gamma"))
    triples = [make_triple(a, "blocks", b), make_triple(b, "blocks", c), make_triple(c, "blocks", a)]
    store = seeded_store([a, b, c], triples)
    paths, _ = store.traverse_paths(a.id, max_hops=3)
    for path in paths:
        assert len(set(path.nodes)) == len(path.nodes)


def test_traverse_matches_oracle_on_random_graphs():
    rng = random.Random(99)
    for _ in range(20):
        entities, triples = _random_graph(rng, rng.randint(4, 14), rng.randint(3, 30))
        store = seeded_store(entities, triples)
        start = rng.choice(entities).id
        end_type = rng.choice([None, "person", "skill"])
        max_hops = rng.randint(1, 3)
        paths, truncated = store.traverse_paths(start, end_type=end_type, max_hops=max_hops)
        assert not truncated
        got = sorted({tuple(p.nodes) for p in paths})
        assert got == oracle_paths(store, start, end_type, None, max_hops)
        ordered = [tuple(p.nodes) for p in paths]
        assert ordered == sorted(ordered)


def test_traverse_hop_bounds():
    e = make_entity("X Y", "person")
    store = seeded_store([e], [])
    with pytest.raises(ValueError):
        store.traverse_paths(e.id, max_hops=0)
    with pytest.raises(ValueError):
        store.traverse_paths(e.id, max_hops=5)


def test_export_empty_store_is_header_only():
    store = GraphStore(root=None)
    lines = store.export_graph().strip().splitlines()
    assert len(lines) == 1 and '"kind":"header"' in lines[0]


def test_export_import_roundtrip_random_graphs():
    rng = random.Random(1234)
    for _ in range(25):
        entities, triples = _random_graph(rng, rng.randint(1, 12), rng.randint(0, 25))
        store = seeded_store(entities, triples)
        text = store.export_graph()
        again = GraphStore.import_graph(text)
        assert again.export_graph() == text
        assert again.integrity_violations() == []


def test_import_dangling_endpoint_is_integrity_error():
    e = make_entity("Solo", "person")
    store = seeded_store([e], [])
    text = store.export_graph()
    bogus = (
        '{"confidence":1.0,"head":"' + e.id + '","kind":"triple","normalized":false,'
        '"observed_at":"2025-01-01T00:00:00Z","provenance":["a-1"],'
        '"relation":"knows","tail":"' + "0" * 32 + '"}'
    )
    with pytest.raises(IntegrityError):
        GraphStore.import_graph(text + bogus + "\n")


def test_import_bad_line_is_parse_error():
    with pytest.raises(ParseError):
        GraphStore.import_graph("not json\n")


def test_wal_replay_reproduces_state(tmp_path):
    root = tmp_path / "store"
    store = GraphStore(root, compact_every=0)
    a, b = make_entity("A A", "person"), make_entity("B B", "skill")
    store.commit("act-1", [a, b], [make_triple(a, "has_skill", b, activity="act-1")])
    c = make_entity("C C", "topic")
    store.commit("act-2", [c], [make_triple(a, "discussed", c, activity="act-2")])
    export = store.export_graph()
    store.close()
    replayed = GraphStore(root)
    assert replayed.export_graph() == export
    assert replayed.commit_count == 2
    assert replayed.committed_activities == {"act-1", "act-2"}


def test_wal_truncation_at_any_commit_boundary(tmp_path):
    root = tmp_path / "store"
    store = GraphStore(root, compact_every=0)
    rng = random.Random(8)
    entities, triples = _random_graph(rng, 8, 12)
    for i, e in enumerate(entities):
        own = [t for t in triples if t.head_id == e.id and t.tail_id in {x.id for x in entities[: i + 1]}]
        store.commit(f"act-{i}", [e], own)
    store.close()
    wal_lines = (root / "wal.log").read_text().splitlines()
    for boundary in range(len(wal_lines) + 1):
        trimmed = tmp_path / f"trim-{boundary}"
        trimmed.mkdir()
        (trimmed / "wal.log").write_text("\n".join(wal_lines[:boundary]) + ("\n" if boundary else ""))
        partial = GraphStore(trimmed)
        assert partial.integrity_violations() == []
        assert len(partial.committed_activities) == boundary


def test_torn_trailing_wal_line_is_ignored(tmp_path):
    root = tmp_path / "store"
    store = GraphStore(root, compact_every=0)
    a = make_entity("A A", "person")
    store.commit("act-1", [a], [])
    store.close()
    with open(root / "wal.log", "a", encoding="utf-8") as fh:
        fh.write('{"commit_id": 2, "activity_id": "act-2", "entiti')  # crash mid-write
    recovered = GraphStore(root)
    assert recovered.committed_activities == {"act-1"}
    assert recovered.integrity_violations() == []


def test_compaction_then_reload(tmp_path):
    root = tmp_path / "store"
    store = GraphStore(root, compact_every=2)
    a, b = make_entity("A A", "person"), make_entity("B B", "skill")
    store.commit("act-1", [a, b], [make_triple(a, "has_skill", b, activity="act-1")])
    c = make_entity("C C", "topic")
    store.commit("act-2", [c], [])  # triggers compaction
    assert (root / "snapshot.graph").exists()
    assert (root / "wal.log").read_text() == ""
    d = make_entity("D D", "document")
    store.commit("act-3", [d], [])
    export = store.export_graph()
    store.close()
    reloaded = GraphStore(root)
    assert reloaded.export_graph() == export
    assert reloaded.integrity_violations() == []


def test_commit_missing_endpoint_is_integrity_error():
    store = GraphStore(root=None)
    a = make_entity("A A", "person")
    ghost = make_entity("Ghost", "skill")
    with pytest.raises(IntegrityError):
        store.commit("act-1", [a], [make_triple(a, "has_skill", ghost)])
