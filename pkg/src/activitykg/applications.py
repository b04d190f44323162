"""Expertise discovery, task prioritization, and analytics queries.

All three operations are read-only over a store snapshot. Scoring
weights and the recency decay are configuration, echoed in evaluation
reports so runs are comparable.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from .errors import NoConceptsFound, TranslationError, UnknownEntity, UnsupportedQuery
from .ontology import parse_timestamp
from .providers import GenerationRequest, Provider, load_template
from .store import EvidencePath, GraphStore

EXPERTISE_WEIGHTS = {
    "has_skill": 1.0,
    "completed_task_on": 0.8,
    "authored": 0.6,
    "attending_event": 0.3,
    "attended": 0.3,
}
DEFAULT_EDGE_WEIGHT = 0.2
DECAY_HALF_LIFE_DAYS = 180.0
EXPERTISE_MAX_HOPS = 3
CONCEPT_TYPES = ("skill", "topic")
CONCEPT_MATCH_FLOOR = 0.35

PRIORITY_WEIGHTS = {"urgency": 0.4, "importance": 0.3, "dependency": 0.3}
IMPORTANCE_BY_PRIORITY = {"high": 1.0, "medium": 0.6, "low": 0.3}
IMPORTANCE_DEFAULT = 0.5
LEADERSHIP_BOOST = 0.2
LEADERSHIP_WINDOW_DAYS = 14
TASK_LINK_RELATIONS = {"assigned_to", "participating_in", "participates_in", "mentioned_in", "part_of"}
OPEN_TASK_EXCLUDED_STATUS = {"completed", "done", "cancelled", "closed"}

SEGMENTABLE_ATTRIBUTES = {"department", "project", "status", "priority"}


@dataclass
class RankedResult:
    item_id: str
    score: float
    evidence: list[EvidencePath] = field(default_factory=list)
    explanation: str = ""
    components: dict[str, float] = field(default_factory=dict)


@dataclass
class Predicate:
    attr: str
    op: str  # "=", "<=", ">=", "<", ">"
    value: str
    value_is_attr: bool = False


@dataclass
class AnalyticQuery:
    metric: str  # count | ratio | mean
    target: str
    predicates: list[Predicate] = field(default_factory=list)
    window: tuple[datetime, datetime] | None = None
    group_by: str | None = None
    value_attribute: str | None = None


@dataclass
class AnalyticsResult:
    metric: str
    target: str
    overall: float | None
    groups: dict[str, float | None]
    support: dict[str, tuple[int, int]]
    overall_support: tuple[int, int]
    rendered: str


def graph_reference_time(store: GraphStore) -> datetime:
    """Default clock: the most recent observation in the graph."""
    if store.triples:
        return max(t.observed_at for t in store.triples.values())
    return datetime.now(timezone.utc)


def decay_rate(half_life_days: float = DECAY_HALF_LIFE_DAYS) -> float:
    return math.log(2.0) / half_life_days


# --- expertise discovery ---------------------------------------------------


def _concept_nodes(store: GraphStore) -> dict[str, list[str]]:
    """Concept node name -> entity ids (a skill and a topic may share one
    name; both nodes count as the concept)."""
    out: dict[str, list[str]] = {}
    for eid in sorted(store.entities):
        entity = store.entities[eid]
        if entity.entity_type in CONCEPT_TYPES:
            out.setdefault(entity.canonical_name, []).append(eid)
    return out


def _match_concepts_deterministic(query_text: str, names: list[str]) -> list[str]:
    folded = query_text.casefold()
    hits = [n for n in names if n.casefold() in folded]
    return [h for h in hits if not any(h != o and h.casefold() in o.casefold() for o in hits)]


def _match_concepts_provider(query_text: str, names: list[str], provider: Provider) -> list[tuple[str, float]]:
    request = GenerationRequest(
        system_instructions=load_template("extract_concepts"),
        user_content=f"QUERY: {query_text}\nKNOWN:\n" + "\n".join(names),
    )
    output = provider.generate(request)
    concepts = [ln[8:].strip() for ln in output.splitlines() if ln.startswith("CONCEPT ")]
    matched: list[tuple[str, float]] = []
    by_fold = {n.casefold(): n for n in names}
    for concept in concepts:
        exact = by_fold.get(concept.casefold())
        if exact is not None:
            matched.append((exact, 1.0))
            continue
        cvec = provider.embed(concept).values
        best, best_cos = None, -1.0
        for name in names:
            cosine = float(np.dot(provider.embed(name).values, cvec))
            if cosine > best_cos:
                best, best_cos = name, cosine
        if best is not None and best_cos >= CONCEPT_MATCH_FLOOR:
            matched.append((best, best_cos))
    return matched


def discover_experts(
    store: GraphStore,
    query_text: str,
    top_n: int,
    provider: Provider,
    mode: str = "deterministic",
    as_of: datetime | None = None,
    weights: dict[str, float] | None = None,
    half_life_days: float = DECAY_HALF_LIFE_DAYS,
    max_hops: int = EXPERTISE_MAX_HOPS,
    rerank: bool = False,
) -> list[RankedResult]:
    """Rank people by evidence paths connecting them to query concepts.

    Each simple path from a person to a matched concept contributes
    weight(person-adjacent edge) * exp(-lambda * age_days) * sim(concept).
    Raises NoConceptsFound when the query matches no concept node.
    """
    weights = weights if weights is not None else EXPERTISE_WEIGHTS
    as_of = as_of or graph_reference_time(store)
    lam = decay_rate(half_life_days)

    concept_ids = _concept_nodes(store)
    names = sorted(concept_ids)
    if mode == "http":
        matched = _match_concepts_provider(query_text, names, provider)
    else:
        matched = [(n, 1.0) for n in _match_concepts_deterministic(query_text, names)]
    if not matched:
        raise NoConceptsFound(f"no graph concept matches {query_text!r}")

    scores: dict[str, float] = {}
    evidence: dict[str, list[EvidencePath]] = {}
    strongest: dict[str, str] = {}
    concept_paths = []
    for name, sim in sorted(matched):
        for concept_id in concept_ids[name]:
            paths, _ = store.traverse_paths(concept_id, end_type="person", max_hops=max_hops)
            concept_paths.append((sim, paths))
    for sim, paths in concept_paths:
        for path in paths:
            person = path.nodes[-1]
            person_edge = path.edges[-1]
            weight = weights.get(person_edge.relation, DEFAULT_EDGE_WEIGHT)
            age_days = max(0.0, (as_of - person_edge.observed_at).total_seconds() / 86400.0)
            contribution = weight * math.exp(-lam * age_days) * sim
            scores[person] = scores.get(person, 0.0) + contribution
            oriented = EvidencePath(
                nodes=list(reversed(path.nodes)),
                edges=[
                    type(e)(e.relation, e.observed_at, e.confidence, not e.forward)
                    for e in reversed(path.edges)
                ],
            )
            evidence.setdefault(person, []).append(oriented)
            if person not in strongest or weights.get(person_edge.relation, DEFAULT_EDGE_WEIGHT) > weights.get(
                strongest[person], DEFAULT_EDGE_WEIGHT
            ):
                strongest[person] = person_edge.relation

    ranked = [
        RankedResult(
            item_id=person,
            score=scores[person],
            evidence=evidence[person],
            explanation=f"{len(evidence[person])} evidence path(s); strongest via {strongest[person]}",
        )
        for person in scores
    ]
    ranked.sort(key=lambda r: (-r.score, r.item_id))
    if rerank and mode == "http":
        ranked = _provider_rerank(query_text, ranked, provider)
    return ranked[:top_n]


def _provider_rerank(query_text: str, ranked: list[RankedResult], provider: Provider) -> list[RankedResult]:
    head = ranked[:10]
    listing = "\n".join(f"ITEM {r.item_id} score={r.score:.6f} {r.explanation}" for r in head)
    request = GenerationRequest(
        system_instructions=load_template("rerank_experts"),
        user_content=f"QUERY: {query_text}\n{listing}",
    )
    output = provider.generate(request)
    order = [ln.split()[1] for ln in output.splitlines() if ln.startswith("ITEM ")]
    by_id = {r.item_id: r for r in head}
    reordered = [by_id[i] for i in order if i in by_id]
    reordered += [r for r in head if r.item_id not in set(order)]
    return reordered + ranked[10:]


# --- task prioritization -----------------------------------------------------


def _parse_date_attr(value: str | None) -> datetime | None:
    if not value:
        return None
    try:
        return parse_timestamp(value if "T" in value else value + "T00:00:00Z")
    except Exception:
        return None


def _leadership_anchor_ids(store: GraphStore, as_of: datetime) -> set[str]:
    """Entities with a recent authored edge from an executive actor."""
    anchors: set[str] = set()
    cutoff_days = LEADERSHIP_WINDOW_DAYS
    for triple in store.triples.values():
        if triple.relation != "authored":
            continue
        author = store.entities.get(triple.head_id)
        if author is None or author.attributes.get("role") != "executive":
            continue
        age = (as_of - triple.observed_at).total_seconds() / 86400.0
        if 0.0 <= age <= cutoff_days:
            anchors.add(triple.tail_id)
    return anchors


def _within_hops(store: GraphStore, start: str, targets: set[str], hops: int) -> bool:
    if not targets:
        return False
    frontier = {start}
    seen = {start}
    for _ in range(hops):
        nxt: set[str] = set()
        for node in frontier:
            for _rel, other in store.out_adj.get(node, ()):
                if other not in seen:
                    nxt.add(other)
            for _rel, other in store.in_adj.get(node, ()):
                if other not in seen:
                    nxt.add(other)
        if nxt & targets:
            return True
        seen |= nxt
        frontier = nxt
    return bool(frontier & targets)


def prioritize_tasks(
    store: GraphStore,
    user_id: str,
    horizon_days: int,
    as_of: datetime | None = None,
    weights: dict[str, float] | None = None,
) -> list[RankedResult]:
    """Score the user's open tasks by urgency, importance, and dependency.

    Candidates are open tasks within two hops of the user through task
    link relations. Component scores land in ``components`` so callers
    can show the breakdown.
    """
    if user_id not in store.entities:
        raise UnknownEntity(user_id)
    weights = weights if weights is not None else PRIORITY_WEIGHTS
    as_of = as_of or graph_reference_time(store)

    paths, _ = store.traverse_paths(
        user_id, end_type="task", relation_whitelist=TASK_LINK_RELATIONS, max_hops=2
    )
    candidates: dict[str, EvidencePath] = {}
    for path in paths:
        task_id = path.nodes[-1]
        task = store.entities[task_id]
        status = task.attributes.get("status", "").lower()
        if status in OPEN_TASK_EXCLUDED_STATUS:
            continue
        if task_id not in candidates:
            candidates[task_id] = path
    if not candidates:
        return []

    anchors = _leadership_anchor_ids(store, as_of)
    blocked_counts = {
        task_id: sum(1 for rel, _t in store.out_adj.get(task_id, ()) if rel == "blocks")
        for task_id in candidates
    }
    max_blocked = max(blocked_counts.values(), default=0)

    results: list[RankedResult] = []
    for task_id, path in candidates.items():
        task = store.entities[task_id]
        due = _parse_date_attr(task.attributes.get("due_date"))
        if due is None:
            urgency = 0.0
        elif due < as_of:
            urgency = 1.0
        else:
            days_until = (due - as_of).total_seconds() / 86400.0
            urgency = min(1.0, max(0.0, 1.0 - days_until / horizon_days))
        importance = IMPORTANCE_BY_PRIORITY.get(
            task.attributes.get("priority", "").lower(), IMPORTANCE_DEFAULT
        )
        if anchors and _within_hops(store, task_id, anchors, 2):
            importance = min(1.0, importance + LEADERSHIP_BOOST)
        dependency = blocked_counts[task_id] / max_blocked if max_blocked else 0.0
        score = (
            weights["urgency"] * urgency
            + weights["importance"] * importance
            + weights["dependency"] * dependency
        )
        results.append(
            RankedResult(
                item_id=task_id,
                score=score,
                evidence=[path],
                explanation=task.canonical_name,
                components={
                    "urgency": urgency,
                    "importance": importance,
                    "dependency": dependency,
                },
            )
        )
    results.sort(key=lambda r: (-r.score, r.item_id))
    return results


# --- analytics ----------------------------------------------------------------

_PREDICATE_RE = re.compile(r"^([a-z_]+)(<=|>=|=|<|>)(@?)(.+)$")


def parse_fielded_query(output: str) -> AnalyticQuery:
    """Parse the provider's fielded analytics lines into an AnalyticQuery."""
    if output.startswith("UNSUPPORTED"):
        raise UnsupportedQuery(output[len("UNSUPPORTED"):].strip() or "unsupported query")
    if output.startswith("UNTRANSLATABLE"):
        raise TranslationError(output[len("UNTRANSLATABLE"):].strip() or "untranslatable query")
    metric = target = group_by = value_attribute = None
    window = None
    predicates: list[Predicate] = []
    for raw in output.splitlines():
        line = raw.strip()
        if not line:
            continue
        try:
            field_name, rest = line.split(" ", 1)
        except ValueError:
            raise TranslationError(f"bad line {raw!r}") from None
        if field_name == "METRIC":
            metric = rest.strip()
        elif field_name == "TARGET":
            target = rest.strip()
        elif field_name == "PREDICATE":
            m = _PREDICATE_RE.match(rest.strip())
            if not m:
                raise TranslationError(f"bad predicate {rest!r}")
            predicates.append(
                Predicate(attr=m.group(1), op=m.group(2), value=m.group(4), value_is_attr=bool(m.group(3)))
            )
        elif field_name == "WINDOW":
            parts = rest.split()
            if len(parts) != 2:
                raise TranslationError(f"bad window {rest!r}")
            window = (parse_timestamp(parts[0]), parse_timestamp(parts[1]))
        elif field_name == "GROUP_BY":
            group_by = rest.strip()
        elif field_name == "VALUE":
            value_attribute = rest.strip()
        else:
            raise TranslationError(f"unknown field {field_name!r}")
    if metric is None or target is None:
        raise TranslationError("missing METRIC or TARGET")
    if metric not in ("count", "ratio", "mean"):
        raise UnsupportedQuery(f"metric {metric!r} outside count/ratio/mean")
    if window is not None and window[0] > window[1]:
        raise TranslationError("window start after end")
    if group_by is not None and group_by not in SEGMENTABLE_ATTRIBUTES:
        raise TranslationError(f"group_by {group_by!r} not segmentable")
    if metric == "mean" and not value_attribute:
        raise TranslationError("mean metric requires VALUE attribute")
    return AnalyticQuery(
        metric=metric,
        target=target,
        predicates=predicates,
        window=window,
        group_by=group_by,
        value_attribute=value_attribute,
    )


def translate_query(nl: str, provider: Provider, now: datetime | None = None) -> AnalyticQuery:
    """Natural-language analytics question -> validated AnalyticQuery."""
    now = now or datetime.now(timezone.utc)
    request = GenerationRequest(
        system_instructions=load_template("translate_analytics"),
        user_content=f"NOW: {now.strftime('%Y-%m-%dT%H:%M:%SZ')}\nQUERY: {nl}",
    )
    return parse_fielded_query(provider.generate(request))


def _anchor_time(entity) -> datetime | None:
    for attr in ("due_date", "date", "completed_at", "first_seen"):
        parsed = _parse_date_attr(entity.attributes.get(attr))
        if parsed is not None:
            return parsed
    return None


def _predicate_holds(entity, pred: Predicate) -> bool:
    left = entity.attributes.get(pred.attr)
    if left is None:
        return False
    right = entity.attributes.get(pred.value) if pred.value_is_attr else pred.value
    if right is None:
        return False
    if pred.op == "=":
        return left == right
    ld, rd = _parse_date_attr(left), _parse_date_attr(right)
    if ld is not None and rd is not None:
        lv, rv = ld, rd
    else:
        try:
            lv, rv = float(left), float(right)
        except ValueError:
            lv, rv = left, right
    return {"<=": lv <= rv, ">=": lv >= rv, "<": lv < rv, ">": lv > rv}[pred.op]


def _fmt_percent(value: float) -> str:
    pct = round(value * 100, 1)
    return str(int(pct)) if pct == int(pct) else str(pct)


def _fmt_number(value: float) -> str:
    rounded = round(value, 2)
    return str(int(rounded)) if rounded == int(rounded) else str(rounded)


def _render(q: AnalyticQuery, overall: float | None, groups: dict[str, float | None]) -> str:
    plural = q.target + "s"
    if overall is None:
        return f"No matching {plural} in the window."
    on_time = any(p.attr == "completed_at" and p.value_is_attr for p in q.predicates)
    if q.metric == "ratio":
        head = (
            f"{_fmt_percent(overall)}% of the {plural} were completed on time"
            if on_time
            else f"{_fmt_percent(overall)}% of the {plural} matched"
        )
        present = [(g, v) for g, v in groups.items() if v is not None]
        if present:
            present.sort(key=lambda kv: (-kv[1], kv[0]))
            clauses = [f"the {g} team achieving {_fmt_percent(v)}%" for g, v in present]
            if len(clauses) == 1:
                tail = clauses[0]
            else:
                tail = ", ".join(clauses[:-1]) + f" and {clauses[-1]}"
            return f"{head}, with {tail}"
        return head
    if q.metric == "count":
        n = int(overall)
        noun = q.target if n == 1 else plural
        return f"There {'was' if n == 1 else 'were'} {n} {noun} in the window."
    return f"The mean {q.value_attribute} of the {plural} was {_fmt_number(overall)}."


def execute_analytics(store: GraphStore, q: AnalyticQuery) -> AnalyticsResult:
    """Scan target entities, apply window and predicates, compute the metric.

    An empty denominator reports the value as undefined with support
    (0, 0) rather than dividing by zero.
    """
    in_window = []
    for entity in store.entities.values():
        if entity.entity_type != q.target:
            continue
        if q.window is not None:
            anchor = _anchor_time(entity)
            if anchor is None or not (q.window[0] <= anchor < q.window[1]):
                continue
        in_window.append(entity)

    def group_of(entity) -> str:
        if q.group_by is None:
            return "all"
        return entity.attributes.get(q.group_by, "unknown")

    numerators: dict[str, float] = {}
    denominators: dict[str, int] = {}
    for entity in in_window:
        group = group_of(entity)
        satisfied = all(_predicate_holds(entity, p) for p in q.predicates)
        if q.metric in ("count", "ratio"):
            denominators[group] = denominators.get(group, 0) + 1
            if satisfied:
                numerators[group] = numerators.get(group, 0) + 1
        else:  # mean
            if not satisfied:
                continue
            raw = entity.attributes.get(q.value_attribute or "")
            try:
                value = float(raw) if raw is not None else None
            except ValueError:
                value = None
            if value is None:
                continue
            numerators[group] = numerators.get(group, 0.0) + value
            denominators[group] = denominators.get(group, 0) + 1

    groups: dict[str, float | None] = {}
    support: dict[str, tuple[int, int]] = {}
    for group in sorted(set(numerators) | set(denominators)):
        num = numerators.get(group, 0.0)
        den = denominators.get(group, 0)
        support[group] = (int(num) if q.metric != "mean" else round(num, 6), den)
        if q.metric == "count":
            groups[group] = float(num)
        else:
            groups[group] = (num / den) if den else None

    total_num = sum(numerators.values())
    total_den = sum(denominators.values())
    if q.metric == "count":
        overall: float | None = float(total_num)
        overall_support = (int(total_num), total_den)
    elif total_den:
        overall = total_num / total_den
        overall_support = (int(total_num) if q.metric != "mean" else round(total_num, 6), total_den)
    else:
        overall = None
        overall_support = (0, 0)

    if q.group_by is None:
        groups = {}
        support = {}
    return AnalyticsResult(
        metric=q.metric,
        target=q.target,
        overall=overall,
        groups=groups,
        support=support,
        overall_support=overall_support,
        rendered=_render(q, overall, groups),
    )
