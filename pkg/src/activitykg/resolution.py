"""Entity resolution, relation normalization, and triple emission.

Mentions are embedded as ``surface | type`` and matched against the
vector index; candidates above the similarity threshold are adjudicated
in cosine order (rule mode: normalized-name equality; provider mode:
yes/no per candidate). Everything an activity produces is staged and
committed atomically.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime

import numpy as np

from .errors import DanglingEndpoint
from .extraction import EntityMention, RelationMention
from .ontology import (
    Entity,
    OntologySchema,
    Triple,
    entity_id,
    format_timestamp,
    normalize_phrase,
    slugify,
)
from .providers import GenerationRequest, Provider, load_template
from .store import GraphStore
from .vectorindex import VectorIndex

CANDIDATE_THETA = 0.80
CANDIDATE_K = 5
RELATION_THETA = 0.75


@dataclass
class ResolutionOutcome:
    mention: EntityMention
    decision: str  # "matched" | "created"
    entity_id: str
    candidates_considered: list[tuple[str, float]] = field(default_factory=list)
    adjudicator: str = "rule"


def _norm_name(name: str) -> str:
    return " ".join(name.casefold().split())


def mention_embed_text(mention: EntityMention) -> str:
    return f"{mention.surface_form} | {mention.mention_type}"


def entity_embed_text(name: str, entity_type: str) -> str:
    return f"{name} | {entity_type}"


class Resolver:
    """Stages one activity's resolutions before an atomic commit.

    Newly created entities are visible to later mentions of the same
    activity (and are searched alongside the shared index) but reach the
    store and index only on commit.
    """

    def __init__(
        self,
        store: GraphStore,
        index: VectorIndex,
        schema: OntologySchema,
        provider: Provider,
        adjudicator: str = "rule",
        theta_cand: float = CANDIDATE_THETA,
        k: int = CANDIDATE_K,
    ) -> None:
        self.store = store
        self.index = index
        self.schema = schema
        self.provider = provider
        self.adjudicator = adjudicator
        self.theta_cand = theta_cand
        self.k = k
        self.pending_entities: dict[str, Entity] = {}
        self.pending_vectors: dict[str, np.ndarray] = {}
        self.touched: dict[str, Entity] = {}

    # --- candidate search -------------------------------------------------

    def _candidates(self, query: np.ndarray, mention_type: str) -> list[tuple[str, float]]:
        hits = list(self.index.query_similar(query, k=self.k, theta=self.theta_cand))
        for eid, vec in self.pending_vectors.items():
            cosine = float(np.dot(vec, query))
            if cosine >= self.theta_cand:
                hits.append((eid, cosine))
        hits.sort(key=lambda row: (-row[1], row[0]))
        out = []
        for eid, cosine in hits:
            entity = self.pending_entities.get(eid) or self.store.entities.get(eid)
            if entity is None:
                continue
            if mention_type != "unknown" and entity.entity_type != mention_type:
                continue
            out.append((eid, cosine))
            if len(out) == self.k:
                break
        return out

    def _entity_for(self, eid: str) -> Entity:
        return self.pending_entities.get(eid) or self.store.entities[eid]

    def _adjudicate(self, mention: EntityMention, candidate: Entity) -> bool:
        if self.adjudicator == "rule":
            return _norm_name(candidate.canonical_name) == _norm_name(mention.surface_form)
        request = GenerationRequest(
            system_instructions=load_template("adjudicate_match"),
            user_content=(
                f"MENTION: {mention.surface_form} | {mention.mention_type}\n"
                f"CANDIDATE: {candidate.canonical_name} | {candidate.entity_type}\n"
            ),
            max_output_chars=8,
        )
        return self.provider.generate(request).strip().lower().startswith("yes")

    # --- resolution ---------------------------------------------------------

    def resolve_entity(self, mention: EntityMention) -> ResolutionOutcome:
        query = self.provider.embed(mention_embed_text(mention)).values
        candidates = self._candidates(query, mention.mention_type)
        for eid, _cosine in candidates:
            entity = self._entity_for(eid)
            if self._adjudicate(mention, entity):
                if eid in self.pending_entities:
                    entity.attributes.update(mention.attributes)
                    entity.created_from.append(mention.source_activity)
                else:
                    merged = Entity(
                        id=eid,
                        canonical_name=entity.canonical_name,
                        entity_type=entity.entity_type,
                        attributes=dict(mention.attributes),
                        created_from=[mention.source_activity],
                        embedding_key=entity.embedding_key,
                    )
                    self.touched[eid] = self._merge_touch(eid, merged)
                return ResolutionOutcome(
                    mention=mention,
                    decision="matched",
                    entity_id=eid,
                    candidates_considered=candidates,
                    adjudicator=self.adjudicator,
                )
        surface = mention.surface_form.strip()
        eid = entity_id(surface, mention.mention_type)
        if eid not in self.pending_entities:
            created = Entity(
                id=eid,
                canonical_name=surface,
                entity_type=mention.mention_type,
                attributes=dict(mention.attributes),
                created_from=[mention.source_activity],
            )
            self.pending_entities[eid] = created
            vec = self.provider.embed(entity_embed_text(surface, mention.mention_type)).values
            self.pending_vectors[eid] = vec
        else:
            self.pending_entities[eid].attributes.update(mention.attributes)
            self.pending_entities[eid].created_from.append(mention.source_activity)
        return ResolutionOutcome(
            mention=mention,
            decision="created",
            entity_id=eid,
            candidates_considered=candidates,
            adjudicator=self.adjudicator,
        )

    def _merge_touch(self, eid: str, update: Entity) -> Entity:
        base = self.touched.get(eid)
        if base is None:
            base = Entity(
                id=eid,
                canonical_name=update.canonical_name,
                entity_type=update.entity_type,
                attributes={},
                created_from=[],
                embedding_key=update.embedding_key,
            )
        base.attributes.update(update.attributes)
        base.created_from.extend(update.created_from)
        return base

    def commit(self, activity_id: str, triples: list[Triple]) -> int:
        """Apply staged entities, touched updates, and triples atomically."""
        entities = [self.pending_entities[k] for k in sorted(self.pending_entities)]
        entities += [self.touched[k] for k in sorted(self.touched) if k not in self.pending_entities]
        commit_id = self.store.commit(activity_id, entities, triples)
        for eid, entity in self.pending_entities.items():
            self.index.put(
                eid,
                self.pending_vectors[eid],
                payload=f"{entity.canonical_name}\x1f{entity.entity_type}",
            )
        self.pending_entities.clear()
        self.pending_vectors.clear()
        self.touched.clear()
        return commit_id


class RelationNormalizer:
    """Maps raw relation phrases onto the ontology.

    Exact alias match wins when domain/range is satisfied; otherwise the
    nearest relation by embedding similarity above the threshold (still
    subject to domain/range); otherwise the slugified phrase is kept with
    normalized=False.
    """

    def __init__(self, schema: OntologySchema, provider: Provider, theta_rel: float = RELATION_THETA) -> None:
        self.schema = schema
        self.provider = provider
        self.theta_rel = theta_rel
        self._alias_map = schema.alias_map
        self._phrase_vectors: list[tuple[str, np.ndarray]] = [
            (rel_name, provider.embed(phrase).values)
            for phrase, rel_name in sorted(self._alias_map.items())
        ]

    def _pair_ok(self, relation_name: str, head_type: str, tail_type: str) -> bool:
        rel = self.schema.relation(relation_name)
        if rel is None:
            return False
        if rel.domain == head_type and rel.range == tail_type:
            return True
        return rel.symmetric and rel.domain == tail_type and rel.range == head_type

    def normalize(self, phrase: str, head_type: str, tail_type: str) -> tuple[str, bool]:
        norm = normalize_phrase(phrase)
        exact = self._alias_map.get(norm)
        if exact is not None and self._pair_ok(exact, head_type, tail_type):
            return exact, True
        if norm:
            query = self.provider.embed(norm).values
            best_name, best_cos = None, -1.0
            for rel_name, vec in self._phrase_vectors:
                cosine = float(np.dot(vec, query))
                if cosine > best_cos and self._pair_ok(rel_name, head_type, tail_type):
                    best_name, best_cos = rel_name, cosine
            if best_name is not None and best_cos >= self.theta_rel:
                return best_name, True
        return slugify(phrase), False


def emit_triples(
    outcomes: list[ResolutionOutcome],
    relations: list[RelationMention],
    activity_id: str,
    observed_at: datetime,
    normalizer: RelationNormalizer,
    store_entities=None,
    pending_entities=None,
) -> list[Triple]:
    """Build idempotent triples from resolved mentions.

    Raises DanglingEndpoint when a relation names a surface without an
    outcome (a pipeline bug: the activity's commit must be aborted).
    """
    by_surface = {o.mention.surface_form: o for o in outcomes}

    def _etype(outcome: ResolutionOutcome) -> str:
        if pending_entities and outcome.entity_id in pending_entities:
            return pending_entities[outcome.entity_id].entity_type
        if store_entities and outcome.entity_id in store_entities:
            return store_entities[outcome.entity_id].entity_type
        return outcome.mention.mention_type

    merged: dict[tuple[str, str, str], Triple] = {}
    for rel in relations:
        head = by_surface.get(rel.head_surface)
        tail = by_surface.get(rel.tail_surface)
        if head is None or tail is None:
            raise DanglingEndpoint(
                f"{activity_id}: relation endpoint without outcome: "
                f"{rel.head_surface!r} -> {rel.tail_surface!r}"
            )
        relation_name, normalized = normalizer.normalize(rel.phrase, _etype(head), _etype(tail))
        key = (head.entity_id, relation_name, tail.entity_id)
        existing = merged.get(key)
        if existing is None:
            merged[key] = Triple(
                head_id=head.entity_id,
                relation=relation_name,
                tail_id=tail.entity_id,
                confidence=rel.confidence,
                observed_at=observed_at,
                provenance=[activity_id],
                normalized=normalized,
            )
        else:
            existing.confidence = max(existing.confidence, rel.confidence)
    return [merged[k] for k in sorted(merged)]
