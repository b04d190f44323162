from __future__ import annotations

import pytest

from activitykg.corpus import generate_corpus
from activitykg.ingestion import parse_activity_stream


def test_regeneration_is_byte_identical():
    a = generate_corpus(seed=42, n_activities=60, noise_level=0.0)
    b = generate_corpus(seed=42, n_activities=60, noise_level=0.0)
    assert a.manifest_json() == b.manifest_json()
    assert a.to_activity_jsonl() == b.to_activity_jsonl()


def test_different_seeds_differ():
    a = generate_corpus(seed=1, n_activities=40)
    b = generate_corpus(seed=2, n_activities=40)
    assert a.to_activity_jsonl() != b.to_activity_jsonl()


def test_truth_closure():
    corpus = generate_corpus(seed=7, n_activities=120, noise_level=0.2)
    for (h, _r, t) in corpus.truth_triples:
        assert h in corpus.truth_entities and t in corpus.truth_entities
    for mention in corpus.truth_mentions:
        assert mention.entity_id in corpus.truth_entities
    activity_ids = {a.activity_id for a in corpus.activities}
    assert {m.activity_id for m in corpus.truth_mentions} <= activity_ids


def test_single_activity_boundary():
    corpus = generate_corpus(seed=3, n_activities=1)
    assert len(corpus.activities) == 1
    assert corpus.truth_mentions and corpus.truth_triples


def test_activities_parse_cleanly():
    corpus = generate_corpus(seed=11, n_activities=80, noise_level=0.5)
    records, dead = parse_activity_stream(corpus.to_activity_jsonl())
    assert len(records) == 80 and not dead


def test_noise_zero_keeps_canonical_names():
    corpus = generate_corpus(seed=5, n_activities=50, noise_level=0.0)
    text = corpus.to_activity_jsonl()
    assert ". " not in "".join(
        m.surface[:3] for m in corpus.truth_mentions if m.mention_type == "person"
    )
    assert "is delegated to" not in text  # off-vocabulary phrasing only at noise > 0


def test_noise_introduces_variants_but_same_truth_graph():
    clean = generate_corpus(seed=42, n_activities=150, noise_level=0.0)
    noisy = generate_corpus(seed=42, n_activities=150, noise_level=0.3)
    assert clean.truth_triple_keys == noisy.truth_triple_keys
    assert {e for e in clean.truth_entities} == {e for e in noisy.truth_entities}
    clean_surfaces = {(m.activity_id, m.surface) for m in clean.truth_mentions}
    noisy_surfaces = {(m.activity_id, m.surface) for m in noisy.truth_mentions}
    assert clean_surfaces != noisy_surfaces


def test_invalid_parameters():
    with pytest.raises(ValueError):
        generate_corpus(seed=1, n_activities=0)
    with pytest.raises(ValueError):
        generate_corpus(seed=1, n_activities=10, noise_level=1.5)


def test_qrels_and_analytics_present_at_scale():
    corpus = generate_corpus(seed=42, n_activities=200)
    assert len(corpus.expertise_qrels) >= 3
    assert len(corpus.task_qrels) >= 2
    assert len(corpus.analytics_cases) == 3
    assert corpus.expertise_queries.keys() == corpus.expertise_qrels.keys()
