"""Contextual retrieval plus entity/relation mention extraction.

Provider output is a strict line format (``ENTITY ...`` / ``REL ...``);
by default any malformed line fails the whole activity so hallucinated
shapes surface instead of being absorbed. A lenient mode that skips bad
lines is available behind a flag.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ExtractionFormatError
from .ontology import OntologySchema, format_timestamp
from .providers import GenerationRequest, Provider, load_template
from .store import GraphStore
from .summarizer import Summary
from .vectorindex import VectorIndex

CONTEXT_ITEMS = 8
CONTEXT_TRIPLES_PER_ITEM = 5
CONTEXT_THETA = 0.30
CONTEXT_BUDGET_CHARS = 4000


@dataclass
class ContextItem:
    entity_id: str
    canonical_name: str
    entity_type: str
    attribute_digest: str
    incident_triples: list[str]
    similarity: float


@dataclass
class ContextBundle:
    activity_id: str
    items: list[ContextItem] = field(default_factory=list)

    @property
    def total_chars(self) -> int:
        return len(render_context(self))


@dataclass
class EntityMention:
    surface_form: str
    mention_type: str
    attributes: dict[str, str] = field(default_factory=dict)
    source_activity: str = ""


@dataclass
class RelationMention:
    head_surface: str
    phrase: str
    tail_surface: str
    confidence: float
    source_activity: str = ""


def mentions_to_jsonl(mentions: list[EntityMention], relations: list[RelationMention]) -> str:
    """Line-delimited stage output for offline inspection and diffing."""
    import json

    lines = []
    for m in mentions:
        lines.append(json.dumps(
            {"kind": "entity", "surface": m.surface_form, "type": m.mention_type,
             "attributes": dict(sorted(m.attributes.items())), "activity": m.source_activity},
            sort_keys=True, separators=(",", ":"), ensure_ascii=False))
    for r in relations:
        lines.append(json.dumps(
            {"kind": "relation", "head": r.head_surface, "phrase": r.phrase,
             "tail": r.tail_surface, "confidence": r.confidence, "activity": r.source_activity},
            sort_keys=True, separators=(",", ":"), ensure_ascii=False))
    return "\n".join(lines) + ("\n" if lines else "")


def _render_item(item: ContextItem) -> str:
    lines = [f"- {item.canonical_name} [{item.entity_type}] {item.attribute_digest}".rstrip()]
    lines.extend(f"  {t}" for t in item.incident_triples)
    return "\n".join(lines)


def render_context(bundle: ContextBundle) -> str:
    if not bundle.items:
        return "none"
    return "\n".join(_render_item(item) for item in bundle.items)


def retrieve_context(
    summary: Summary,
    store: GraphStore,
    index: VectorIndex,
    provider: Provider,
    m: int = CONTEXT_ITEMS,
    r: int = CONTEXT_TRIPLES_PER_ITEM,
    theta: float = CONTEXT_THETA,
    budget: int = CONTEXT_BUDGET_CHARS,
) -> ContextBundle:
    """Graph context for one summary: up to ``m`` similar entities, each
    with up to ``r`` most recent incident triples, within ``budget`` chars."""
    bundle = ContextBundle(activity_id=summary.activity_id)
    if len(index) == 0:
        return bundle
    query = provider.embed(summary.text)
    hits = index.query_similar(query.values, k=m, theta=theta)
    used = 0
    for entity_id, cosine in hits:
        entity = store.entities.get(entity_id)
        if entity is None:
            continue
        incident = [
            t for t in store.triples.values()
            if t.head_id == entity_id or t.tail_id == entity_id
        ]
        incident.sort(key=lambda t: (t.observed_at, t.key), reverse=True)
        rendered = []
        for t in incident[:r]:
            head = store.entities[t.head_id].canonical_name
            tail = store.entities[t.tail_id].canonical_name
            rendered.append(f"{head} -{t.relation}-> {tail} @{format_timestamp(t.observed_at)}")
        digest = ";".join(f"{k}={v}" for k, v in sorted(entity.attributes.items()))
        item = ContextItem(
            entity_id=entity_id,
            canonical_name=entity.canonical_name,
            entity_type=entity.entity_type,
            attribute_digest=digest,
            incident_triples=rendered,
            similarity=cosine,
        )
        cost = len(_render_item(item)) + 1
        if used + cost > budget:
            break
        used += cost
        bundle.items.append(item)
    return bundle


def _extraction_input(summary: Summary, context: ContextBundle, mentions: list[EntityMention] | None = None) -> str:
    parts = [f"CONTEXT:\n{render_context(context)}"]
    if mentions is not None:
        listed = "\n".join(f"- {m.surface_form} | {m.mention_type}" for m in mentions)
        parts.append(f"MENTIONS:\n{listed or 'none'}")
    parts.append(f"SUMMARY:\n{summary.text}")
    return "\n\n".join(parts)


def extract_entities(
    summary: Summary,
    context: ContextBundle,
    provider: Provider,
    schema: OntologySchema,
    strict: bool = True,
) -> list[EntityMention]:
    """Parse ``ENTITY <type> | <surface> | k=v;...`` provider lines.

    Unknown types map to "unknown"; duplicate (surface, type) pairs merge
    their attributes. Raises ExtractionFormatError on a malformed line in
    strict mode.
    """
    request = GenerationRequest(
        system_instructions=load_template("extract_entities"),
        user_content=_extraction_input(summary, context),
    )
    output = provider.generate(request)
    merged: dict[tuple[str, str], EntityMention] = {}
    for raw in output.splitlines():
        line = raw.strip()
        if not line or line == "NONE":
            continue
        parts = [p.strip() for p in line.split("|")]
        head = parts[0].split(None, 1)
        if head[0] != "ENTITY" or len(head) != 2 or len(parts) not in (2, 3) or not parts[1]:
            if strict:
                raise ExtractionFormatError(f"bad entity line: {raw!r}")
            continue
        mention_type = head[1].strip()
        if mention_type not in schema.entity_types:
            mention_type = "unknown"
        surface = parts[1]
        attributes: dict[str, str] = {}
        if len(parts) == 3 and parts[2]:
            for pair in parts[2].split(";"):
                if not pair.strip():
                    continue
                if "=" not in pair:
                    if strict:
                        raise ExtractionFormatError(f"bad attribute pair {pair!r} in {raw!r}")
                    continue
                key, value = pair.split("=", 1)
                attributes[key.strip()] = value.strip()
        slot = merged.get((surface, mention_type))
        if slot is None:
            merged[(surface, mention_type)] = EntityMention(
                surface_form=surface,
                mention_type=mention_type,
                attributes=attributes,
                source_activity=summary.activity_id,
            )
        else:
            slot.attributes.update(attributes)
    return list(merged.values())


def extract_relations(
    summary: Summary,
    context: ContextBundle,
    mentions: list[EntityMention],
    provider: Provider,
    strict: bool = True,
) -> tuple[list[RelationMention], int]:
    """Parse ``REL <head> | <phrase> | <tail> | <conf>`` provider lines.

    Lines whose endpoints match no mention surface are dropped and
    counted, not errors. Returns (relations sorted by head/phrase/tail,
    dropped count).
    """
    if not mentions:
        return [], 0
    surfaces = {m.surface_form for m in mentions}
    request = GenerationRequest(
        system_instructions=load_template("extract_relations"),
        user_content=_extraction_input(summary, context, mentions),
    )
    output = provider.generate(request)
    relations: list[RelationMention] = []
    seen: set[tuple[str, str, str]] = set()
    dropped = 0
    for raw in output.splitlines():
        line = raw.strip()
        if not line or line == "NONE":
            continue
        parts = [p.strip() for p in line.split("|")]
        head = parts[0].split(None, 1)
        if head[0] != "REL" or len(head) != 2 or len(parts) != 4:
            if strict:
                raise ExtractionFormatError(f"bad relation line: {raw!r}")
            continue
        try:
            confidence = float(parts[3])
        except ValueError:
            if strict:
                raise ExtractionFormatError(f"bad confidence in: {raw!r}")
            continue
        if not 0.0 <= confidence <= 1.0:
            if strict:
                raise ExtractionFormatError(f"confidence out of range in: {raw!r}")
            continue
        head_surface, phrase, tail_surface = head[1].strip(), parts[1], parts[2]
        if not phrase or head_surface not in surfaces or tail_surface not in surfaces:
            dropped += 1
            continue
        key = (head_surface, phrase, tail_surface)
        if key in seen:
            continue
        seen.add(key)
        relations.append(
            RelationMention(
                head_surface=head_surface,
                phrase=phrase,
                tail_surface=tail_surface,
                confidence=confidence,
                source_activity=summary.activity_id,
            )
        )
    relations.sort(key=lambda r: (r.head_surface, r.phrase, r.tail_surface))
    return relations, dropped
