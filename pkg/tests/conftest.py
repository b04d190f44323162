from __future__ import annotations

from datetime import datetime, timezone

import pytest

# Populated by tests/test_acceptance.py; rendered after the run so the
# per-criterion PASS/FAIL lines survive pytest's output capture.
ACCEPTANCE_RESULTS: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_RESULTS:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in ACCEPTANCE_RESULTS:
            terminalreporter.write_line(line)

from activitykg.config import RunConfig
from activitykg.ingestion import ActivityRecord, Actor
from activitykg.ontology import Entity, Triple, entity_id
from activitykg.providers import DeterministicProvider
from activitykg.store import GraphStore
from activitykg.vectorindex import VectorIndex


@pytest.fixture
def provider():
    return DeterministicProvider()


@pytest.fixture
def schema():
    return RunConfig().load_schema()


@pytest.fixture
def travel_record():
    return ActivityRecord(
        activity_id="trip-1",
        source_type="email",
        timestamp=datetime(2025, 3, 1, 9, 0, tzinfo=timezone.utc),
        actors=[Actor("John Smith")],
        subject="Trip confirmation for John Smith",
        body=(
            "John Smith is traveling on flight AA123 scheduled for 2025-03-14. "
            "John Smith is staying at Hilton Midtown in Chicago until 2025-03-16."
        ),
    )


def make_entity(name: str, etype: str, activity: str = "a-1", **attrs) -> Entity:
    return Entity(
        id=entity_id(name, etype),
        canonical_name=name,
        entity_type=etype,
        attributes={k: str(v) for k, v in attrs.items()},
        created_from=[activity],
    )


def make_triple(head: Entity, relation: str, tail: Entity, ts: datetime | None = None,
                confidence: float = 1.0, activity: str = "a-1", normalized: bool = True) -> Triple:
    return Triple(
        head_id=head.id,
        relation=relation,
        tail_id=tail.id,
        confidence=confidence,
        observed_at=ts or datetime(2025, 6, 1, tzinfo=timezone.utc),
        provenance=[activity],
        normalized=normalized,
    )


def seeded_store(entities: list[Entity], triples: list[Triple]) -> GraphStore:
    store = GraphStore(root=None)
    store.commit("seed", entities, triples)
    return store


def seeded_index(provider: DeterministicProvider, entities: list[Entity]) -> VectorIndex:
    index = VectorIndex(provider.embedding_dim)
    for e in entities:
        vec = provider.embed(f"{e.canonical_name} | {e.entity_type}").values
        index.put(e.id, vec, payload=f"{e.canonical_name}\x1f{e.entity_type}")
    return index
