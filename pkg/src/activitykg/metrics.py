"""Ranking and set metrics: NDCG@k, P@k, MRR, recall.

Conventions (stated here because variants exist): NDCG uses linear gain
with a log2(i+1) discount and returns 0.0 when every grade is zero;
P@k keeps the fixed denominator k even for rankings shorter than k;
grades >= 1 count as relevant.
"""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

from .errors import ActivityKGError


class EmptyRelevantSet(ActivityKGError):
    """Recall is undefined without relevant items."""


@dataclass
class Qrels:
    """Graded relevance judgments for one query."""

    query_id: str
    relevance: dict[str, int]

    def __post_init__(self) -> None:
        if not self.relevance:
            raise ValueError(f"qrels {self.query_id}: at least one item required")
        for item, grade in self.relevance.items():
            if grade < 0:
                raise ValueError(f"qrels {self.query_id}: negative grade for {item}")

    def grade(self, item_id: str) -> int:
        return self.relevance.get(item_id, 0)


def dcg(grades: Sequence[int], k: int) -> float:
    return sum(g / math.log2(i + 2) for i, g in enumerate(grades[:k]))


def ndcg_at_k(ranking: Sequence[str], qrels: Qrels, k: int) -> float:
    if k < 1:
        raise ValueError("k must be >= 1")
    ranked_grades = [qrels.grade(item) for item in ranking]
    ideal = sorted(qrels.relevance.values(), reverse=True)
    idcg = dcg(ideal, k)
    if idcg == 0.0:
        return 0.0
    return dcg(ranked_grades, k) / idcg


def precision_at_k(ranking: Sequence[str], qrels: Qrels, k: int) -> float:
    if k < 1:
        raise ValueError("k must be >= 1")
    hits = sum(1 for item in ranking[:k] if qrels.grade(item) >= 1)
    return hits / k


def reciprocal_rank(ranking: Sequence[str], qrels: Qrels) -> float:
    for i, item in enumerate(ranking, start=1):
        if qrels.grade(item) >= 1:
            return 1.0 / i
    return 0.0


def mrr(rankings: Mapping[str, Sequence[str]], qrels_by_query: Mapping[str, Qrels]) -> float:
    if not rankings:
        raise ValueError("mrr needs at least one query")
    total = 0.0
    for query_id, ranking in rankings.items():
        total += reciprocal_rank(ranking, qrels_by_query[query_id])
    return total / len(rankings)


def recall_metric(recommended: set[str], relevant: set[str]) -> float:
    if not relevant:
        raise EmptyRelevantSet("relevant set must be nonempty")
    return len(recommended & relevant) / len(relevant)


def load_qrels(text: str) -> dict[str, Qrels]:
    """Parse ``query_id item_id grade`` lines into Qrels per query."""
    grades: dict[str, dict[str, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"qrels line {lineno}: expected 'query item grade'")
        grades.setdefault(parts[0], {})[parts[1]] = int(parts[2])
    return {qid: Qrels(qid, rel) for qid, rel in grades.items()}


def dump_qrels(qrels_by_query: Mapping[str, Qrels]) -> str:
    lines = []
    for qid in sorted(qrels_by_query):
        for item, grade in sorted(qrels_by_query[qid].relevance.items()):
            lines.append(f"{qid} {item} {grade}")
    return "\n".join(lines) + "\n"
