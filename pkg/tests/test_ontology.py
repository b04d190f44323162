from __future__ import annotations

from datetime import datetime, timezone

import pytest

from activitykg.config import RunConfig
from activitykg.errors import ParseError, SchemaError
from activitykg.ontology import (
    Triple,
    canonical_ontology_text,
    entity_id,
    load_ontology,
    normalize_phrase,
    parse_timestamp,
    slugify,
    validate_triple,
)

SIMPLE = """
entity person
entity skill
relation has_skill person skill
"""


def test_load_simple_schema():
    schema = load_ontology(SIMPLE)
    assert {"person", "skill", "unknown"} == set(schema.entity_types)
    assert [r.name for r in schema.relations] == ["has_skill"]


def test_undeclared_range_rejected():
    text = "entity person\nrelation works_on person projct\n"
    with pytest.raises(SchemaError):
        load_ontology(text)


def test_duplicate_entity_rejected():
    with pytest.raises(SchemaError):
        load_ontology("entity person\nentity person\n")


def test_bad_directive_is_parse_error():
    with pytest.raises(ParseError):
        load_ontology("entty person\n")


def test_alias_must_be_unambiguous():
    text = (
        "entity person\nentity skill\n"
        "relation has_skill person skill\n"
        "relation knows_about person skill\n"
        'alias "knows" has_skill\nalias "knows" knows_about\n'
    )
    with pytest.raises(SchemaError):
        load_ontology(text)


def test_default_ontology_has_paper_relations():
    schema = RunConfig().load_schema()
    names = {r.name for r in schema.relations}
    assert {"traveling_on", "staying_at", "attending_event", "participating_in"} <= names


def test_load_is_pure_and_canonical_roundtrip():
    schema = RunConfig().load_schema()
    text = canonical_ontology_text(schema)
    again = load_ontology(text)
    assert canonical_ontology_text(again) == text
    assert again.entity_types == schema.entity_types


def test_alias_map_is_a_function():
    schema = RunConfig().load_schema()
    seen: dict[str, str] = {}
    for rel in schema.relations:
        for alias in rel.aliases:
            assert seen.setdefault(alias, rel.name) == rel.name


def test_entity_id_deterministic_and_case_insensitive():
    a = entity_id("Sarah Lee", "person")
    assert a == entity_id("  sarah lee ", "person")
    assert a != entity_id("Sarah Lee", "skill")
    assert len(a) == 32 and int(a, 16) >= 0


def _triple(relation: str, normalized: bool = True) -> Triple:
    return Triple(
        head_id="h" * 32, relation=relation, tail_id="t" * 32,
        confidence=1.0, observed_at=datetime(2025, 1, 1, tzinfo=timezone.utc),
        provenance=["a-1"], normalized=normalized,
    )


def test_validate_triple_domain_range():
    schema = load_ontology(SIMPLE)
    assert validate_triple(_triple("has_skill"), schema, "person", "skill").ok
    bad = validate_triple(_triple("has_skill"), schema, "meeting", "skill")
    assert not bad.ok
    assert any("domain mismatch" in v for v in bad.violations)


def test_validate_unnormalized_bypasses_schema():
    schema = load_ontology(SIMPLE)
    result = validate_triple(_triple("chatted_about", normalized=False), schema, "person", "topic")
    assert result.ok


def test_validate_flags_bad_confidence_and_provenance():
    schema = load_ontology(SIMPLE)
    t = _triple("has_skill")
    t.confidence = 1.5
    t.provenance = []
    result = validate_triple(t, schema, "person", "skill")
    assert len(result.violations) == 2


def test_phrase_helpers():
    assert normalize_phrase("  Traveling   ON ") == "traveling on"
    assert slugify("chatted about!") == "chatted_about"
    assert slugify("--") == "related_to"


def test_timestamp_parse_formats():
    t = parse_timestamp("2025-03-14T09:30:00Z")
    assert t.tzinfo is not None
    assert parse_timestamp("2025-03-14T10:30:00+01:00") == t
    with pytest.raises(ParseError):
        parse_timestamp("not a time")
