"""Activity stream parsing and content consolidation.

Input is one JSON object per line. Required keys: ``activity_id``,
``source_type``, ``timestamp``. Malformed lines are quarantined as dead
letters rather than aborting the stream.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone

from .errors import EmptyContent, ParseError
from .ontology import parse_timestamp

SOURCE_TYPES = ("email", "calendar", "chat", "document", "log")


@dataclass
class Actor:
    display_name: str
    role: str | None = None


@dataclass
class Attachment:
    name: str
    text: str


@dataclass
class ActivityRecord:
    """One raw unit from a source system."""

    activity_id: str
    source_type: str
    timestamp: datetime
    actors: list[Actor] = field(default_factory=list)
    subject: str = ""
    body: str = ""
    attachments: list[Attachment] = field(default_factory=list)
    metadata: dict[str, str] = field(default_factory=dict)


@dataclass
class ContentBundle:
    """Consolidated text for one activity, ready for summarization."""

    activity_id: str
    consolidated_text: str
    source_type: str
    timestamp: datetime
    actors: list[Actor] = field(default_factory=list)


@dataclass
class DeadLetter:
    raw_line: str
    reason: str
    stage: str
    received_at: datetime


def _parse_record(obj: dict) -> ActivityRecord:
    activity_id = obj.get("activity_id")
    if not isinstance(activity_id, str) or not activity_id.strip():
        raise ParseError("missing activity_id")
    source_type = obj.get("source_type")
    if source_type not in SOURCE_TYPES:
        raise ParseError(f"bad source_type {source_type!r}")
    ts_raw = obj.get("timestamp")
    if not isinstance(ts_raw, str):
        raise ParseError("missing timestamp")
    timestamp = parse_timestamp(ts_raw)

    actors = []
    for item in obj.get("actors", []) or []:
        if isinstance(item, str):
            actors.append(Actor(display_name=item))
        elif isinstance(item, dict) and isinstance(item.get("display_name"), str):
            actors.append(Actor(display_name=item["display_name"], role=item.get("role")))
        else:
            raise ParseError("bad actor entry")
    attachments = []
    for item in obj.get("attachments", []) or []:
        if not isinstance(item, dict) or "text" not in item:
            raise ParseError("bad attachment entry")
        attachments.append(Attachment(name=str(item.get("name", "")), text=str(item["text"])))
    metadata = obj.get("metadata", {}) or {}
    if not isinstance(metadata, dict):
        raise ParseError("metadata must be an object")

    return ActivityRecord(
        activity_id=activity_id,
        source_type=source_type,
        timestamp=timestamp,
        actors=actors,
        subject=str(obj.get("subject", "") or ""),
        body=str(obj.get("body", "") or ""),
        attachments=attachments,
        metadata={str(k): str(v) for k, v in metadata.items()},
    )


def parse_activity_stream(stream: str) -> tuple[list[ActivityRecord], list[DeadLetter]]:
    """Split a line-delimited stream into records and dead letters.

    Every input line lands in exactly one output list; input order is
    preserved. Duplicate activity ids keep the first occurrence.
    """
    records: list[ActivityRecord] = []
    dead: list[DeadLetter] = []
    seen_ids: set[str] = set()
    now = datetime.now(timezone.utc)

    for line in stream.splitlines():
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            if not isinstance(obj, dict):
                raise ParseError("record is not an object")
            record = _parse_record(obj)
            if record.activity_id in seen_ids:
                raise ParseError("duplicate activity_id")
        except (json.JSONDecodeError, ParseError) as exc:
            reason = str(exc)
            if isinstance(exc, json.JSONDecodeError):
                reason = f"invalid JSON: {exc.msg}"
            dead.append(DeadLetter(raw_line=line, reason=reason, stage="ingest", received_at=now))
            continue
        seen_ids.add(record.activity_id)
        records.append(record)
    return records, dead


def extract_content(record: ActivityRecord) -> ContentBundle:
    """Consolidate subject, body, attachments, and metadata into one text.

    Sections are separated by blank lines in a fixed order; byte-identical
    duplicate attachments collapse to one; empty sections are omitted.
    Raises EmptyContent when there is nothing to carry forward.
    """
    sections: list[str] = []
    if record.subject.strip():
        sections.append(f"Subject: {record.subject.strip()}")
    if record.body.strip():
        sections.append(record.body.strip())
    seen_texts: set[str] = set()
    for att in record.attachments:
        if not att.text.strip() or att.text in seen_texts:
            continue
        seen_texts.add(att.text)
        name = att.name.strip() or "attachment"
        sections.append(f"Attachment {name}:\n{att.text.strip()}")
    if record.metadata:
        digest_lines = [f"{key}: {record.metadata[key]}" for key in sorted(record.metadata)]
        sections.append("Metadata:\n" + "\n".join(digest_lines))
    if not sections:
        raise EmptyContent(f"activity {record.activity_id} has no content")
    return ContentBundle(
        activity_id=record.activity_id,
        consolidated_text="\n\n".join(sections),
        source_type=record.source_type,
        timestamp=record.timestamp,
        actors=list(record.actors),
    )
