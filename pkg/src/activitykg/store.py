"""Persistent triple store with adjacency indexes and bounded traversal.

Layout of a store directory:

    wal.log         append-only commit log, one JSON record per activity
    snapshot.graph  canonical export written at compaction
    vectors.idx     embedding index (owned by VectorIndex)

Commits are atomic per activity: the WAL line is flushed before the
in-memory state changes, and replaying snapshot + WAL from disk always
reproduces the live state. A torn trailing WAL line (crash mid-write) is
ignored on load.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path

from .errors import IntegrityError, ParseError, UnknownEntity
from .ontology import Entity, OntologySchema, Triple, format_timestamp, parse_timestamp, validate_triple

MAX_HOPS = 4
PATH_CAP = 10_000
EXPORT_FORMAT = "activitykg-graph"


@dataclass
class PathEdge:
    relation: str
    observed_at: datetime
    confidence: float
    forward: bool


@dataclass
class EvidencePath:
    nodes: list[str]
    edges: list[PathEdge]

    def __post_init__(self) -> None:
        if len(self.nodes) != len(self.edges) + 1:
            raise ValueError("path shape: nodes must be edges + 1")


@dataclass
class CommitRecord:
    commit_id: int
    activity_id: str
    entities: list[Entity] = field(default_factory=list)
    triples: list[Triple] = field(default_factory=list)


def entity_to_obj(e: Entity) -> dict:
    return {
        "id": e.id,
        "name": e.canonical_name,
        "type": e.entity_type,
        "attributes": dict(sorted(e.attributes.items())),
        "created_from": sorted(set(e.created_from)),
        "embedding_key": e.embedding_key,
    }


def entity_from_obj(obj: dict) -> Entity:
    return Entity(
        id=obj["id"],
        canonical_name=obj["name"],
        entity_type=obj["type"],
        attributes=dict(obj.get("attributes", {})),
        created_from=list(obj.get("created_from", [])),
        embedding_key=obj.get("embedding_key", obj["id"]),
    )


def triple_to_obj(t: Triple) -> dict:
    return {
        "head": t.head_id,
        "relation": t.relation,
        "tail": t.tail_id,
        "confidence": t.confidence,
        "observed_at": format_timestamp(t.observed_at),
        "provenance": sorted(set(t.provenance)),
        "normalized": t.normalized,
    }


def triple_from_obj(obj: dict) -> Triple:
    return Triple(
        head_id=obj["head"],
        relation=obj["relation"],
        tail_id=obj["tail"],
        confidence=float(obj["confidence"]),
        observed_at=parse_timestamp(obj["observed_at"]),
        provenance=list(obj.get("provenance", [])),
        normalized=bool(obj.get("normalized", True)),
    )


def _dumps(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


class GraphStore:
    """Single-writer, multi-reader triple store.

    Readers and the writer share one lock; commits are short (append one
    WAL line, update dicts), so reads see either the pre- or post-commit
    state, never a partial one.
    """

    def __init__(self, root: str | Path | None = None, compact_every: int = 1000) -> None:
        self.root = Path(root) if root is not None else None
        self.compact_every = compact_every
        self.entities: dict[str, Entity] = {}
        self.triples: dict[tuple[str, str, str], Triple] = {}
        self.out_adj: dict[str, set[tuple[str, str]]] = {}
        self.in_adj: dict[str, set[tuple[str, str]]] = {}
        self.commit_count = 0
        self.committed_activities: set[str] = set()
        self._lock = threading.RLock()
        self._wal_handle = None
        if self.root is not None:
            self.root.mkdir(parents=True, exist_ok=True)
            self._load_from_disk()

    # --- loading / persistence ------------------------------------------

    @property
    def wal_path(self) -> Path:
        return self.root / "wal.log"

    @property
    def snapshot_path(self) -> Path:
        return self.root / "snapshot.graph"

    def _load_from_disk(self) -> None:
        if self.snapshot_path.exists():
            self._apply_export(self.snapshot_path.read_text("utf-8"))
        if self.wal_path.exists():
            for line in self.wal_path.read_text("utf-8").splitlines():
                line = line.strip()
                if not line:
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError:
                    break  # torn trailing write; everything before it is intact
                self._apply_commit_obj(obj)
                self.commit_count = max(self.commit_count, int(obj.get("commit_id", 0)))

    def _wal(self):
        if self._wal_handle is None:
            self._wal_handle = open(self.wal_path, "a", encoding="utf-8")
        return self._wal_handle

    def close(self) -> None:
        if self._wal_handle is not None:
            self._wal_handle.close()
            self._wal_handle = None

    # --- mutation ---------------------------------------------------------

    def _put_entity(self, entity: Entity) -> None:
        self.entities[entity.id] = entity
        self.out_adj.setdefault(entity.id, set())
        self.in_adj.setdefault(entity.id, set())

    def _put_triple(self, triple: Triple) -> None:
        for endpoint in (triple.head_id, triple.tail_id):
            if endpoint not in self.entities:
                raise IntegrityError(f"triple references missing entity {endpoint}")
        self.triples[triple.key] = triple
        self.out_adj.setdefault(triple.head_id, set()).add((triple.relation, triple.tail_id))
        self.in_adj.setdefault(triple.tail_id, set()).add((triple.relation, triple.head_id))

    def merge_triple(self, triple: Triple) -> bool:
        """Upsert one edge. Returns True when a new edge key was created.

        Existing edges merge by provenance union, max confidence, and the
        most recent observation time; the merge is order-independent, so
        re-ingestion is idempotent.
        """
        existing = self.triples.get(triple.key)
        if existing is None:
            self._put_triple(
                Triple(
                    head_id=triple.head_id,
                    relation=triple.relation,
                    tail_id=triple.tail_id,
                    confidence=triple.confidence,
                    observed_at=triple.observed_at,
                    provenance=sorted(set(triple.provenance)),
                    normalized=triple.normalized,
                )
            )
            return True
        existing.provenance = sorted(set(existing.provenance) | set(triple.provenance))
        existing.confidence = max(existing.confidence, triple.confidence)
        existing.observed_at = max(existing.observed_at, triple.observed_at)
        return False

    def merge_entity(self, entity: Entity) -> bool:
        """Upsert one node. Returns True when the id is new.

        Attribute merge keeps the earliest ``first_seen`` and lets newer
        values win otherwise; provenance is a sorted set union.
        """
        existing = self.entities.get(entity.id)
        if existing is None:
            self._put_entity(
                Entity(
                    id=entity.id,
                    canonical_name=entity.canonical_name,
                    entity_type=entity.entity_type,
                    attributes=dict(entity.attributes),
                    created_from=sorted(set(entity.created_from)),
                    embedding_key=entity.embedding_key,
                )
            )
            return True
        old_first = existing.attributes.get("first_seen")
        new_first = entity.attributes.get("first_seen")
        existing.attributes.update(entity.attributes)
        if old_first and new_first:
            existing.attributes["first_seen"] = min(old_first, new_first)
        elif old_first:
            existing.attributes["first_seen"] = old_first
        existing.created_from = sorted(set(existing.created_from) | set(entity.created_from))
        return False

    def commit(self, activity_id: str, entities: list[Entity], triples: list[Triple]) -> int:
        """Atomically apply one activity's entities and triples.

        The WAL record carries the *merged* post-state of every touched
        entity/triple, so replay is a plain put.
        """
        with self._lock:
            for entity in entities:
                self.merge_entity(entity)
            for triple in triples:
                for endpoint in (triple.head_id, triple.tail_id):
                    if endpoint not in self.entities:
                        raise IntegrityError(f"commit {activity_id}: missing endpoint {endpoint}")
                self.merge_triple(triple)
            self.commit_count += 1
            self.committed_activities.add(activity_id)
            record = {
                "commit_id": self.commit_count,
                "activity_id": activity_id,
                "entities": [entity_to_obj(self.entities[e.id]) for e in entities],
                "triples": [triple_to_obj(self.triples[t.key]) for t in triples],
            }
            if self.root is not None:
                handle = self._wal()
                handle.write(_dumps(record) + "\n")
                handle.flush()
                os.fsync(handle.fileno())
                if self.compact_every and self.commit_count % self.compact_every == 0:
                    self.compact()
            return self.commit_count

    def _apply_commit_obj(self, obj: dict) -> None:
        for eobj in obj.get("entities", []):
            self._put_entity(entity_from_obj(eobj))
        for tobj in obj.get("triples", []):
            self._put_triple(triple_from_obj(tobj))
        if obj.get("activity_id"):
            self.committed_activities.add(obj["activity_id"])

    def compact(self) -> None:
        """Write the snapshot and truncate the WAL."""
        with self._lock:
            tmp = self.snapshot_path.with_suffix(".tmp")
            tmp.write_text(self.export_graph(), "utf-8")
            tmp.replace(self.snapshot_path)
            self.close()
            self.wal_path.write_text("", "utf-8")

    # --- queries ----------------------------------------------------------

    def neighbors(
        self,
        entity_id: str,
        direction: str = "both",
        relation_filter: set[str] | None = None,
    ) -> list[tuple[str, str, Triple]]:
        """Adjacent rows, complete and duplicate-free, sorted by
        (relation, neighbor id)."""
        if entity_id not in self.entities:
            raise UnknownEntity(entity_id)
        rows: dict[tuple[str, str, str, bool], tuple[str, str, Triple]] = {}
        if direction in ("out", "both"):
            for relation, tail in self.out_adj.get(entity_id, ()):
                if relation_filter is not None and relation not in relation_filter:
                    continue
                triple = self.triples[(entity_id, relation, tail)]
                rows[(relation, tail, entity_id, True)] = (tail, relation, triple)
        if direction in ("in", "both"):
            for relation, head in self.in_adj.get(entity_id, ()):
                if relation_filter is not None and relation not in relation_filter:
                    continue
                triple = self.triples[(head, relation, entity_id)]
                rows[(relation, head, entity_id, False)] = (head, relation, triple)
        return [rows[key] for key in sorted(rows, key=lambda k: (k[0], k[1], not k[3]))]

    def traverse_paths(
        self,
        start: str,
        end_type: str | None = None,
        relation_whitelist: set[str] | None = None,
        max_hops: int = 2,
    ) -> tuple[list[EvidencePath], bool]:
        """All simple paths from ``start`` up to ``max_hops`` edges.

        Edges are walked in both directions. Paths come out sorted
        lexicographically by node-id sequence (ties between parallel
        edges break on the relation sequence); enumeration is DFS with
        sorted expansion and stops at PATH_CAP with a truncation flag.
        """
        if start not in self.entities:
            raise UnknownEntity(start)
        if not 1 <= max_hops <= MAX_HOPS:
            raise ValueError(f"max_hops must be in [1, {MAX_HOPS}]")

        paths: list[EvidencePath] = []
        truncated = False

        def expansions(node: str) -> list[tuple[str, str, bool]]:
            out: list[tuple[str, str, bool]] = []
            for relation, tail in self.out_adj.get(node, ()):
                if relation_whitelist is None or relation in relation_whitelist:
                    out.append((tail, relation, True))
            for relation, head in self.in_adj.get(node, ()):
                if relation_whitelist is None or relation in relation_whitelist:
                    out.append((head, relation, False))
            return sorted(out, key=lambda row: (row[0], row[1], not row[2]))

        def dfs(node: str, nodes: list[str], edges: list[PathEdge]) -> bool:
            nonlocal truncated
            for nxt, relation, forward in expansions(node):
                if nxt in nodes:
                    continue
                triple = self.triples[(node, relation, nxt) if forward else (nxt, relation, node)]
                edge = PathEdge(relation, triple.observed_at, triple.confidence, forward)
                new_nodes = nodes + [nxt]
                new_edges = edges + [edge]
                if end_type is None or self.entities[nxt].entity_type == end_type:
                    if len(paths) >= PATH_CAP:
                        truncated = True
                        return False
                    paths.append(EvidencePath(nodes=new_nodes, edges=new_edges))
                if len(new_edges) < max_hops:
                    if not dfs(nxt, new_nodes, new_edges):
                        return False
            return True

        dfs(start, [start], [])
        paths.sort(key=lambda p: (p.nodes, [(e.relation, not e.forward) for e in p.edges]))
        return paths, truncated

    # --- export / import ---------------------------------------------------

    def export_graph(self) -> str:
        """Canonical text export: header, entities by id, triples by key."""
        lines = [
            _dumps(
                {
                    "kind": "header",
                    "format": EXPORT_FORMAT,
                    "version": 1,
                    "entities": len(self.entities),
                    "triples": len(self.triples),
                }
            )
        ]
        for eid in sorted(self.entities):
            obj = entity_to_obj(self.entities[eid])
            obj["kind"] = "entity"
            lines.append(_dumps(obj))
        for key in sorted(self.triples):
            obj = triple_to_obj(self.triples[key])
            obj["kind"] = "triple"
            lines.append(_dumps(obj))
        return "\n".join(lines) + "\n"

    def _apply_export(self, text: str) -> None:
        pending: list[Triple] = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"line {lineno}: {exc.msg}") from None
            kind = obj.get("kind")
            if kind == "header":
                if obj.get("format") != EXPORT_FORMAT:
                    raise ParseError(f"line {lineno}: unknown format {obj.get('format')!r}")
            elif kind == "entity":
                try:
                    self._put_entity(entity_from_obj(obj))
                except KeyError as exc:
                    raise ParseError(f"line {lineno}: missing field {exc}") from None
            elif kind == "triple":
                try:
                    pending.append(triple_from_obj(obj))
                except KeyError as exc:
                    raise ParseError(f"line {lineno}: missing field {exc}") from None
            else:
                raise ParseError(f"line {lineno}: unknown kind {kind!r}")
        for triple in pending:
            self._put_triple(triple)

    @classmethod
    def import_graph(cls, text: str) -> "GraphStore":
        store = cls(root=None)
        store._apply_export(text)
        return store

    # --- integrity ----------------------------------------------------------

    def integrity_violations(self, schema: OntologySchema | None = None) -> list[str]:
        """Store-wide invariant sweep; empty list means healthy."""
        problems: list[str] = []
        for key, triple in self.triples.items():
            for endpoint in (triple.head_id, triple.tail_id):
                if endpoint not in self.entities:
                    problems.append(f"dangling endpoint {endpoint} in {key}")
            if (triple.relation, triple.tail_id) not in self.out_adj.get(triple.head_id, set()):
                problems.append(f"out-adjacency missing for {key}")
            if (triple.relation, triple.head_id) not in self.in_adj.get(triple.tail_id, set()):
                problems.append(f"in-adjacency missing for {key}")
            if schema is not None and triple.normalized:
                head = self.entities.get(triple.head_id)
                tail = self.entities.get(triple.tail_id)
                if head and tail:
                    result = validate_triple(triple, schema, head.entity_type, tail.entity_type)
                    if not result.ok:
                        problems.append(f"{key}: {'; '.join(result.violations)}")
        for eid, pairs in self.out_adj.items():
            for relation, tail in pairs:
                if (eid, relation, tail) not in self.triples:
                    problems.append(f"stale out-adjacency ({eid},{relation},{tail})")
        for eid, pairs in self.in_adj.items():
            for relation, head in pairs:
                if (head, relation, eid) not in self.triples:
                    problems.append(f"stale in-adjacency ({head},{relation},{eid})")
        return problems
