"""Ontology schema, core graph types, and triple validation.

The ontology is a line-oriented declarative file::

    # comment
    entity person
    relation has_skill person skill
    relation knows person person symmetric
    alias "is skilled in" has_skill

Entity type names are lowercase snake_case. Relations declare one
domain/range pair. Aliases map surface phrases to exactly one relation.
The pseudo-type ``unknown`` is always available so mentions without a
confident type guess can still become entities.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone

from .errors import ParseError, SchemaError

UNKNOWN_TYPE = "unknown"

_NAME_RE = re.compile(r"^[a-z][a-z0-9_]*$")
_ALIAS_RE = re.compile(r'^alias\s+"([^"]+)"\s+(\S+)\s*$')


@dataclass(frozen=True)
class RelationDef:
    """One relation type with its domain/range constraint."""

    name: str
    domain: str
    range: str
    aliases: tuple[str, ...] = ()
    symmetric: bool = False


@dataclass(frozen=True)
class OntologySchema:
    """Immutable, validated ontology. Safe to share across threads."""

    entity_types: frozenset[str]
    relations: tuple[RelationDef, ...]
    version: int = 1

    def relation(self, name: str) -> RelationDef | None:
        return self._by_name.get(name)

    @property
    def _by_name(self) -> dict[str, RelationDef]:
        return {r.name: r for r in self.relations}

    @property
    def alias_map(self) -> dict[str, str]:
        """Normalized alias phrase -> relation name (includes the names
        themselves, spelled with spaces)."""
        out: dict[str, str] = {}
        for rel in self.relations:
            out[rel.name.replace("_", " ")] = rel.name
            for alias in rel.aliases:
                out[normalize_phrase(alias)] = rel.name
        return out


def normalize_phrase(phrase: str) -> str:
    """Lowercase and collapse whitespace; used for alias lookup."""
    return " ".join(phrase.lower().split())


def slugify(phrase: str) -> str:
    """Turn a raw relation phrase into a snake_case identifier."""
    slug = re.sub(r"[^a-z0-9]+", "_", phrase.lower()).strip("_")
    return slug or "related_to"


def entity_id(canonical_name: str, entity_type: str) -> str:
    """Stable 32-hex identifier: 128-bit digest of name + type.

    Deterministic over the lowercase-trimmed canonical name so that
    re-ingestion assigns the same id without a central counter.
    """
    key = canonical_name.strip().lower() + "|" + entity_type
    return hashlib.blake2b(key.encode("utf-8"), digest_size=16).hexdigest()


@dataclass
class Entity:
    """Resolved canonical graph node."""

    id: str
    canonical_name: str
    entity_type: str
    attributes: dict[str, str] = field(default_factory=dict)
    created_from: list[str] = field(default_factory=list)
    embedding_key: str = ""

    def __post_init__(self) -> None:
        if not self.embedding_key:
            self.embedding_key = self.id


@dataclass
class Triple:
    """One edge with provenance and confidence.

    ``normalized=False`` keeps the raw relation phrase (slugified)
    verbatim and bypasses domain/range validation.
    """

    head_id: str
    relation: str
    tail_id: str
    confidence: float
    observed_at: datetime
    provenance: list[str] = field(default_factory=list)
    normalized: bool = True

    @property
    def key(self) -> tuple[str, str, str]:
        return (self.head_id, self.relation, self.tail_id)


@dataclass
class ValidationResult:
    ok: bool
    violations: list[str] = field(default_factory=list)


def validate_triple(
    triple: Triple,
    schema: OntologySchema,
    head_type: str,
    tail_type: str,
) -> ValidationResult:
    """Check the schema-dependent triple invariants.

    Violations are data, not errors: callers decide what to do with a
    failing triple. Unnormalized triples only get range checks on
    confidence, not domain/range.
    """
    violations: list[str] = []
    if not 0.0 <= triple.confidence <= 1.0:
        violations.append(f"confidence {triple.confidence} outside [0,1]")
    if not triple.provenance:
        violations.append("empty provenance")
    if triple.normalized:
        rel = schema.relation(triple.relation)
        if rel is None:
            violations.append(f"relation {triple.relation!r} not in schema")
        else:
            pair_ok = rel.domain == head_type and rel.range == tail_type
            if rel.symmetric:
                pair_ok = pair_ok or (rel.domain == tail_type and rel.range == head_type)
            if not pair_ok:
                if rel.domain != head_type:
                    violations.append(
                        f"domain mismatch: {triple.relation} expects {rel.domain}, got {head_type}"
                    )
                if rel.range != tail_type:
                    violations.append(
                        f"range mismatch: {triple.relation} expects {rel.range}, got {tail_type}"
                    )
    return ValidationResult(ok=not violations, violations=violations)


def load_ontology(text: str, version: int = 1) -> OntologySchema:
    """Parse an ontology file into a validated schema.

    Raises ParseError for malformed lines and SchemaError for duplicate
    names, undeclared domain/range types, or ambiguous aliases.
    """
    entity_types: list[str] = []
    relations: list[dict] = []
    aliases: list[tuple[str, str]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("entity "):
            parts = line.split()
            if len(parts) != 2:
                raise ParseError(f"line {lineno}: expected 'entity <name>'")
            entity_types.append(parts[1])
        elif line.startswith("relation "):
            parts = line.split()
            if len(parts) not in (4, 5):
                raise ParseError(
                    f"line {lineno}: expected 'relation <name> <domain> <range> [symmetric]'"
                )
            symmetric = False
            if len(parts) == 5:
                if parts[4] != "symmetric":
                    raise ParseError(f"line {lineno}: unknown flag {parts[4]!r}")
                symmetric = True
            relations.append(
                {"name": parts[1], "domain": parts[2], "range": parts[3], "symmetric": symmetric}
            )
        elif line.startswith("alias "):
            m = _ALIAS_RE.match(line)
            if not m:
                raise ParseError(f'line {lineno}: expected alias "<phrase>" <relation>')
            aliases.append((m.group(1), m.group(2)))
        else:
            raise ParseError(f"line {lineno}: unrecognized directive {line.split()[0]!r}")

    seen_types: set[str] = set()
    for name in entity_types:
        if not _NAME_RE.match(name):
            raise SchemaError(f"entity type {name!r} is not lowercase snake_case")
        if name in seen_types:
            raise SchemaError(f"duplicate entity type {name!r}")
        seen_types.add(name)
    # Catch-all type for mentions without a usable type guess.
    seen_types.add(UNKNOWN_TYPE)

    alias_targets: dict[str, str] = {}
    rel_defs: list[RelationDef] = []
    seen_rels: set[str] = set()
    for spec in relations:
        name = spec["name"]
        if not _NAME_RE.match(name):
            raise SchemaError(f"relation name {name!r} is not lowercase snake_case")
        if name in seen_rels:
            raise SchemaError(f"duplicate relation {name!r}")
        seen_rels.add(name)
        for side in ("domain", "range"):
            if spec[side] not in seen_types:
                raise SchemaError(f"relation {name!r}: undeclared {side} type {spec[side]!r}")
    for phrase, target in aliases:
        if target not in seen_rels:
            raise SchemaError(f"alias {phrase!r} targets unknown relation {target!r}")
        norm = normalize_phrase(phrase)
        if norm in alias_targets and alias_targets[norm] != target:
            raise SchemaError(f"alias {phrase!r} maps to two relations")
        alias_targets[norm] = target
    for spec in relations:
        own = tuple(
            sorted(p for p, t in ((normalize_phrase(a), b) for a, b in aliases) if t == spec["name"])
        )
        rel_defs.append(
            RelationDef(
                name=spec["name"],
                domain=spec["domain"],
                range=spec["range"],
                aliases=own,
                symmetric=spec["symmetric"],
            )
        )

    if version < 1:
        raise SchemaError("version must be >= 1")
    return OntologySchema(
        entity_types=frozenset(seen_types),
        relations=tuple(sorted(rel_defs, key=lambda r: r.name)),
        version=version,
    )


def canonical_ontology_text(schema: OntologySchema) -> str:
    """Canonical serialization: entities, then relations, then aliases,
    each block sorted lexicographically. ``unknown`` stays implicit."""
    lines: list[str] = []
    for name in sorted(schema.entity_types - {UNKNOWN_TYPE}):
        lines.append(f"entity {name}")
    for rel in sorted(schema.relations, key=lambda r: r.name):
        flag = " symmetric" if rel.symmetric else ""
        lines.append(f"relation {rel.name} {rel.domain} {rel.range}{flag}")
    alias_lines = []
    for rel in schema.relations:
        for alias in rel.aliases:
            alias_lines.append(f'alias "{alias}" {rel.name}')
    lines.extend(sorted(alias_lines))
    return "\n".join(lines) + "\n"


def parse_timestamp(value: str) -> datetime:
    """RFC 3339 timestamp to an aware UTC datetime."""
    text = value.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    try:
        dt = datetime.fromisoformat(text)
    except ValueError as exc:
        raise ParseError(f"bad timestamp {value!r}: {exc}") from None
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def format_timestamp(dt: datetime) -> str:
    """Canonical RFC 3339 rendering (UTC, second precision, Z suffix)."""
    return dt.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
