"""JSON-shape helpers shared by the CLI and the HTTP service."""

from __future__ import annotations

from .applications import AnalyticsResult, RankedResult
from .ontology import Entity, Triple, format_timestamp
from .store import EvidencePath, GraphStore


def entity_dict(entity: Entity) -> dict:
    return {
        "id": entity.id,
        "name": entity.canonical_name,
        "type": entity.entity_type,
        "attributes": dict(sorted(entity.attributes.items())),
        "created_from": sorted(set(entity.created_from)),
    }


def triple_dict(triple: Triple, store: GraphStore | None = None) -> dict:
    obj = {
        "head": triple.head_id,
        "relation": triple.relation,
        "tail": triple.tail_id,
        "confidence": triple.confidence,
        "observed_at": format_timestamp(triple.observed_at),
        "normalized": triple.normalized,
        "provenance": sorted(set(triple.provenance)),
    }
    if store is not None:
        obj["head_name"] = store.entities[triple.head_id].canonical_name
        obj["tail_name"] = store.entities[triple.tail_id].canonical_name
    return obj


def path_dict(path: EvidencePath, store: GraphStore) -> dict:
    return {
        "nodes": [
            {"id": nid, "name": store.entities[nid].canonical_name,
             "type": store.entities[nid].entity_type}
            for nid in path.nodes
        ],
        "edges": [
            {
                "relation": e.relation,
                "observed_at": format_timestamp(e.observed_at),
                "confidence": e.confidence,
                "forward": e.forward,
            }
            for e in path.edges
        ],
    }


def ranked_result_dict(result: RankedResult, store: GraphStore) -> dict:
    entity = store.entities.get(result.item_id)
    obj = {
        "item_id": result.item_id,
        "name": entity.canonical_name if entity else result.item_id,
        "score": result.score,
        "explanation": result.explanation,
        "evidence": [path_dict(p, store) for p in result.evidence],
    }
    if result.components:
        obj["components"] = dict(sorted(result.components.items()))
    return obj


def analytics_dict(result: AnalyticsResult) -> dict:
    return {
        "metric": result.metric,
        "target": result.target,
        "overall": result.overall,
        "overall_support": list(result.overall_support),
        "groups": dict(sorted(result.groups.items())),
        "support": {k: list(v) for k, v in sorted(result.support.items())},
        "rendered": result.rendered,
    }
