"""Pipeline orchestration: ingest -> summarize -> retrieve-context ->
extract -> resolve -> emit, in deterministic batch order.

Per-activity failures become dead letters (or deferrals on provider
timeouts); a batch's context bundles reflect the graph state before the
batch started, while resolution within a batch is live.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .config import RunConfig
from .errors import (
    DanglingEndpoint,
    EmptyContent,
    ExtractionFormatError,
    ProviderTimeout,
)
from .extraction import ContextBundle, extract_entities, extract_relations, retrieve_context
from .ingestion import ActivityRecord, DeadLetter, extract_content, parse_activity_stream
from .ontology import OntologySchema, format_timestamp
from .providers import Provider, build_provider
from .resolution import RelationNormalizer, Resolver, emit_triples
from .store import GraphStore
from .summarizer import summarize
from .vectorindex import VectorIndex


@dataclass
class ActivityTrace:
    """Per-activity artifacts collected for evaluation."""

    activity_id: str
    mentions: list = field(default_factory=list)
    outcomes: list = field(default_factory=list)
    triples: list = field(default_factory=list)
    summary_text: str = ""
    dropped_relations: int = 0


@dataclass
class RunReport:
    input_records: int = 0
    committed: int = 0
    dead_lettered: int = 0
    deferred: int = 0
    skipped_sources: int = 0
    new_entities: int = 0
    new_triples: int = 0
    dead_letters: list[DeadLetter] = field(default_factory=list)
    commit_ids: list[int] = field(default_factory=list)
    stage_counts: dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "input_records": self.input_records,
            "committed": self.committed,
            "dead_lettered": self.dead_lettered,
            "deferred": self.deferred,
            "skipped_sources": self.skipped_sources,
            "new_entities": self.new_entities,
            "new_triples": self.new_triples,
            "commit_ids": self.commit_ids,
            "stage_counts": dict(sorted(self.stage_counts.items())),
            "dead_letters": [
                {"reason": d.reason, "stage": d.stage, "raw": d.raw_line[:200]}
                for d in self.dead_letters
            ],
        }


class PipelineRuntime:
    """Shared long-lived pieces: store, index, schema, provider."""

    def __init__(self, cfg: RunConfig, store: GraphStore | None = None, index: VectorIndex | None = None,
                 provider: Provider | None = None, schema: OntologySchema | None = None) -> None:
        self.cfg = cfg
        self.schema = schema or cfg.load_schema()
        self.provider = provider or build_provider(cfg.provider)
        root = Path(cfg.store_dir) if cfg.store_dir else None
        self.store = store or GraphStore(root, compact_every=cfg.compact_every)
        if index is not None:
            self.index = index
        else:
            idx_path = root / "vectors.idx" if root else None
            if idx_path and idx_path.exists():
                self.index = VectorIndex.load(idx_path)
            else:
                self.index = VectorIndex(cfg.provider.embedding_dim)
        self.normalizer = RelationNormalizer(
            self.schema, self.provider, theta_rel=cfg.thresholds["relation"]
        )

    def save_index(self) -> None:
        if self.cfg.store_dir:
            self.index.save(Path(self.cfg.store_dir) / "vectors.idx")


def _snapshot_context(runtime: PipelineRuntime, summaries: list) -> dict[str, ContextBundle]:
    cfg = runtime.cfg
    bundles = {}
    if not cfg.context_enabled:
        return {s.activity_id: ContextBundle(activity_id=s.activity_id) for s in summaries}
    for summary in summaries:
        bundles[summary.activity_id] = retrieve_context(
            summary,
            runtime.store,
            runtime.index,
            runtime.provider,
            m=cfg.context["m"],
            r=cfg.context["r"],
            theta=cfg.thresholds["context"],
            budget=cfg.context["budget"],
        )
    return bundles


def run_records(
    runtime: PipelineRuntime,
    records: list[ActivityRecord],
    collect_traces: bool = False,
) -> tuple[RunReport, list[ActivityTrace]]:
    """Run parsed records through the full pipeline in batches."""
    cfg = runtime.cfg
    report = RunReport(input_records=len(records))
    traces: list[ActivityTrace] = []
    now = datetime.now(timezone.utc)

    enabled = [r for r in records if cfg.sources.get(r.source_type, True)]
    report.skipped_sources = len(records) - len(enabled)
    ordered = sorted(enabled, key=lambda r: (r.timestamp, r.activity_id))

    entities_before = len(runtime.store.entities)
    triples_before = len(runtime.store.triples)

    for start in range(0, len(ordered), cfg.batch_size):
        batch = ordered[start:start + cfg.batch_size]
        summaries = []
        for record in batch:
            try:
                bundle = extract_content(record)
                summary = summarize(bundle, runtime.provider, cap=cfg.summary_cap)
            except EmptyContent as exc:
                report.dead_letters.append(
                    DeadLetter(record.activity_id, str(exc), "summarize", now)
                )
                continue
            except ProviderTimeout as exc:
                report.deferred += 1
                report.stage_counts["deferred_summarize"] = report.stage_counts.get("deferred_summarize", 0) + 1
                continue
            summaries.append((record, summary))
        report.stage_counts["summarized"] = report.stage_counts.get("summarized", 0) + len(summaries)

        contexts = _snapshot_context(runtime, [s for _r, s in summaries])

        for record, summary in summaries:
            context = contexts[summary.activity_id]
            resolver = Resolver(
                runtime.store,
                runtime.index,
                runtime.schema,
                runtime.provider,
                adjudicator=cfg.adjudicator,
                theta_cand=cfg.thresholds["candidate"],
            )
            try:
                mentions = extract_entities(
                    summary, context, runtime.provider, runtime.schema, strict=not cfg.lenient_parse
                )
                relations, dropped = extract_relations(
                    summary, context, mentions, runtime.provider, strict=not cfg.lenient_parse
                )
                first_seen = format_timestamp(record.timestamp)
                outcomes = []
                for mention in sorted(mentions, key=lambda m: (m.surface_form, m.mention_type)):
                    mention.attributes.setdefault("first_seen", first_seen)
                    outcomes.append(resolver.resolve_entity(mention))
                triples = emit_triples(
                    outcomes,
                    relations,
                    record.activity_id,
                    record.timestamp,
                    runtime.normalizer,
                    store_entities=runtime.store.entities,
                    pending_entities=resolver.pending_entities,
                )
                commit_id = resolver.commit(record.activity_id, triples)
            except ExtractionFormatError as exc:
                report.dead_letters.append(DeadLetter(record.activity_id, str(exc), "extract", now))
                continue
            except DanglingEndpoint as exc:
                report.dead_letters.append(DeadLetter(record.activity_id, str(exc), "emit", now))
                continue
            except ProviderTimeout:
                report.deferred += 1
                report.stage_counts["deferred_resolve"] = report.stage_counts.get("deferred_resolve", 0) + 1
                continue
            report.committed += 1
            report.commit_ids.append(commit_id)
            if collect_traces:
                traces.append(
                    ActivityTrace(
                        activity_id=record.activity_id,
                        mentions=mentions,
                        outcomes=outcomes,
                        triples=triples,
                        summary_text=summary.text,
                        dropped_relations=dropped,
                    )
                )

    report.dead_lettered = len(report.dead_letters)
    report.new_entities = len(runtime.store.entities) - entities_before
    report.new_triples = len(runtime.store.triples) - triples_before
    runtime.save_index()
    return report, traces


def run_pipeline(cfg: RunConfig, activity_file: str | Path) -> RunReport:
    """File-level entry point: parse, quarantine, run, write dead letters."""
    path = Path(activity_file)
    stream = path.read_text("utf-8")
    records, parse_dead = parse_activity_stream(stream)
    runtime = PipelineRuntime(cfg)
    report, _ = run_records(runtime, records)
    report.input_records = len(records) + len(parse_dead)
    report.dead_letters = parse_dead + report.dead_letters
    report.dead_lettered = len(report.dead_letters)
    if report.dead_letters:
        dead_path = path.with_suffix(path.suffix + ".deadletter")
        lines = [f"{d.stage}\t{d.reason}\t{d.raw_line}" for d in report.dead_letters]
        dead_path.write_text("\n".join(lines) + "\n", "utf-8")
    runtime.store.close()
    return report
