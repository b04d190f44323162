"""Deterministic rule engine backing the offline provider.

Every model touchpoint (summarize, entity/relation extraction, match
adjudication, analytics translation, concept extraction, re-ranking)
dispatches here on the task tag carried in the request's system
instructions. Rules are pure functions of the request text, so offline
runs are exactly reproducible.

Extraction rules parse the sentence shapes produced by enterprise
activity text: travel confirmations, skill registry notes, meeting
invitations, task logs, documents, chats, and directory entries.
"""

from __future__ import annotations

import re
from datetime import datetime, timedelta, timezone

from .ontology import format_timestamp, parse_timestamp

# Multiword capitalized name ("Sarah Lee", "J. Smith", "Hilton Midtown").
# A period is only allowed on single-letter initials so names never swallow
# a sentence boundary.
NAME = r"(?:[A-Z]\.|[A-Z][A-Za-z0-9]*)(?:\s+(?:[A-Z]\.|[A-Z][A-Za-z0-9]*))+"
# Title starting with a capital, may continue lowercase ("Migrate billing API").
TITLE = r"[A-Z][A-Za-z0-9]*(?:[ '][A-Za-z0-9&-]+)*"
PHRASE = r"[a-z][a-z ]*?"
DATE = r"\d{4}-\d{2}-\d{2}"

_SENTENCE_SPLIT = re.compile(r"(?<=[.!?])\s+")


def truncate_sentences(text: str, cap: int) -> str:
    """Trim to at most ``cap`` chars, dropping whole trailing sentences.

    Falls back to a hard cut when even the first sentence is too long.
    """
    text = text.strip()
    if len(text) <= cap:
        return text
    parts = _SENTENCE_SPLIT.split(text)
    out: list[str] = []
    total = 0
    for part in parts:
        extra = len(part) + (1 if out else 0)
        if total + extra > cap:
            break
        out.append(part)
        total += extra
    if not out:
        return text[:cap]
    return " ".join(out)


def task_tag(system_instructions: str) -> str:
    first = system_instructions.strip().splitlines()[0].strip() if system_instructions.strip() else ""
    if first.startswith("task:"):
        return first.split(":", 1)[1].strip()
    return ""


def run(task: str, user_content: str) -> str:
    if task == "summarize":
        return _summarize(user_content)
    if task == "extract_entities":
        return _extract_entities(user_content)
    if task == "extract_relations":
        return _extract_relations(user_content)
    if task == "adjudicate_match":
        return _adjudicate(user_content)
    if task == "translate_analytics":
        return _translate_analytics(user_content)
    if task == "extract_concepts":
        return _extract_concepts(user_content)
    if task == "rerank_experts":
        return _rerank(user_content)
    raise ValueError(f"deterministic provider has no rule for task {task!r}")


# --- summarize ---------------------------------------------------------


def _summarize(user_content: str) -> str:
    marker = "CONTENT:\n"
    pos = user_content.find(marker)
    content = user_content[pos + len(marker):] if pos >= 0 else user_content
    pieces: list[str] = []
    for section in content.split("\n\n"):
        section = section.strip()
        if not section:
            continue
        flat = " ".join(section.split())
        if section.startswith("Metadata:"):
            lines = [ln.strip() for ln in section.splitlines()[1:] if ln.strip()]
            flat = "Metadata: " + "; ".join(lines) + "."
        elif not flat.endswith((".", "!", "?")):
            flat += "."
        pieces.append(flat)
    return " ".join(pieces) if pieces else "(empty activity)."


# --- entity / relation extraction --------------------------------------

_SUMMARY_BLOCK = re.compile(r"SUMMARY:\n(.*)\Z", re.DOTALL)

_TRAVEL_FLIGHT = re.compile(
    rf"({NAME}) is ({PHRASE}) flight ([A-Z]{{2}}\d{{2,4}}) scheduled for ({DATE})\."
)
_TRAVEL_HOTEL = re.compile(rf"({NAME}) is ({PHRASE}) ({NAME}) in ([A-Z][A-Za-z]+) until ({DATE})\.")
_SKILL = re.compile(
    rf"({NAME}) (has expertise in|is skilled in|is an expert in|knows|is highly versed in)"
    rf" ([a-z][a-z -]+?)\."
)
_ATTEND = re.compile(
    rf"((?:{NAME})(?:(?:, | and |, and ){NAME})*) (?:are|is) ((?:attending|joining) the meeting) ({TITLE})\."
)
_PARTICIPATE = re.compile(rf"({NAME}) is (participating in|contributing to) project ({TITLE})\.")
_MEETING_TOPIC = re.compile(r"The meeting (discusses|is about|touches on) ([a-z][a-z -]+?)\.")
_TASK_ASSIGN = re.compile(rf"Task ({TITLE}) (is assigned to|is delegated to) ({NAME}) in project ({TITLE})\.")
_TASK_DONE = re.compile(rf"({NAME}) (completed|finished|wrapped up) the task ({TITLE})\.")
_TASK_BLOCKS = re.compile(rf"Task ({TITLE}) (blocks|is blocking|holds up) task ({TITLE})\.")
_DOC = re.compile(rf"({NAME}) (authored|drafted|penned) the document ({TITLE})\.")
_DOC_TOPIC = re.compile(r"The document (covers|describes|surveys) ([a-z][a-z -]+?)\.")
_CHAT = re.compile(rf"({NAME}) (discussed|talked about|chatted about|riffed on) ([a-z][a-z -]+?) with ({NAME})\.")
_DIRECTORY = re.compile(rf"({NAME}) works in the ([a-z]+) department\.")
_METADATA = re.compile(r"Metadata: (.+?)\.(?:\s|$)")
_AND_SPLIT = re.compile(r", and | and |, ")


class _Sink:
    """Accumulates mention and relation lines with de-duplication."""

    def __init__(self) -> None:
        self.entities: dict[tuple[str, str], dict[str, str]] = {}
        self.relations: list[tuple[str, str, str]] = []

    def entity(self, etype: str, surface: str, attrs: dict[str, str] | None = None) -> None:
        key = (surface, etype)
        slot = self.entities.setdefault(key, {})
        if attrs:
            slot.update(attrs)

    def relation(self, head: str, phrase: str, tail: str) -> None:
        row = (head, phrase, tail)
        if row not in self.relations:
            self.relations.append(row)


def _scan(text: str) -> _Sink:
    sink = _Sink()
    meeting_title: str | None = None
    doc_title: str | None = None
    task_title: str | None = None

    for m in _TRAVEL_FLIGHT.finditer(text):
        person, phrase, flight, date = m.groups()
        sink.entity("person", person)
        sink.entity("event", flight)
        sink.entity("date", date)
        sink.relation(person, phrase, flight)
        sink.relation(flight, "scheduled for", date)
    for m in _TRAVEL_HOTEL.finditer(text):
        person, phrase, hotel, city, date = m.groups()
        sink.entity("person", person)
        sink.entity("location", hotel)
        sink.entity("location", city)
        sink.entity("date", date)
        sink.relation(person, phrase, hotel)
    for m in _SKILL.finditer(text):
        person, phrase, skill = m.groups()
        sink.entity("person", person)
        sink.entity("skill", skill)
        sink.relation(person, phrase, skill)
    for m in _ATTEND.finditer(text):
        people, phrase, title = m.groups()
        meeting_title = title
        sink.entity("meeting", title)
        for person in _AND_SPLIT.split(people):
            sink.entity("person", person)
            sink.relation(person, phrase, title)
    for m in _MEETING_TOPIC.finditer(text):
        phrase, topic = m.groups()
        sink.entity("topic", topic)
        if meeting_title:
            sink.relation(meeting_title, phrase, topic)
    for m in _PARTICIPATE.finditer(text):
        person, phrase, project = m.groups()
        sink.entity("person", person)
        sink.entity("project", project)
        sink.relation(person, phrase, project)
    for m in _TASK_ASSIGN.finditer(text):
        title, phrase, person, project = m.groups()
        task_title = title
        sink.entity("task", title)
        sink.entity("person", person)
        sink.entity("project", project)
        sink.relation(title, phrase, person)
        sink.relation(title, "in project", project)
    for m in _TASK_DONE.finditer(text):
        person, phrase, title = m.groups()
        sink.entity("person", person)
        sink.entity("task", title)
        sink.relation(person, phrase, title)
    for m in _TASK_BLOCKS.finditer(text):
        title, phrase, other = m.groups()
        sink.entity("task", title)
        sink.entity("task", other)
        sink.relation(title, phrase, other)
    for m in _DOC.finditer(text):
        person, phrase, title = m.groups()
        doc_title = title
        sink.entity("person", person)
        sink.entity("document", title)
        sink.relation(person, phrase, title)
    for m in _DOC_TOPIC.finditer(text):
        phrase, topic = m.groups()
        sink.entity("topic", topic)
        if doc_title:
            sink.relation(doc_title, phrase, topic)
    for m in _CHAT.finditer(text):
        p1, phrase, topic, p2 = m.groups()
        sink.entity("person", p1)
        sink.entity("person", p2)
        sink.entity("topic", topic)
        sink.relation(p1, phrase, topic)
        sink.relation(p2, phrase, topic)
    for m in _DIRECTORY.finditer(text):
        person, dept = m.groups()
        sink.entity("person", person)
        sink.entity("department", dept)
        sink.relation(person, "works in", dept)

    meta = _METADATA.search(text)
    if meta:
        attrs: dict[str, str] = {}
        for pair in meta.group(1).split("; "):
            if ": " in pair:
                key, value = pair.split(": ", 1)
                attrs[key.strip()] = value.strip()
        anchor = task_title or meeting_title
        anchor_type = "task" if task_title else "meeting"
        if anchor and attrs:
            sink.entity(anchor_type, anchor, attrs)
            location = attrs.get("location")
            if anchor_type == "meeting" and location:
                sink.entity("location", location)
                sink.relation(anchor, "held at", location)
    return sink


def _summary_text(user_content: str) -> str:
    m = _SUMMARY_BLOCK.search(user_content)
    return m.group(1).strip() if m else user_content.strip()


def _extract_entities(user_content: str) -> str:
    sink = _scan(_summary_text(user_content))
    lines = []
    for (surface, etype), attrs in sink.entities.items():
        rendered = ";".join(f"{k}={v}" for k, v in sorted(attrs.items()))
        lines.append(f"ENTITY {etype} | {surface} | {rendered}")
    return "\n".join(lines) if lines else "NONE"


def _extract_relations(user_content: str) -> str:
    sink = _scan(_summary_text(user_content))
    lines = [f"REL {h} | {p} | {t} | 1.0" for (h, p, t) in sink.relations]
    return "\n".join(lines) if lines else "NONE"


# --- entity match adjudication ------------------------------------------

_MENTION_LINE = re.compile(r"MENTION: (.+?) \| (\S+)\s*$", re.MULTILINE)
_CANDIDATE_LINE = re.compile(r"CANDIDATE: (.+?) \| (\S+)\s*$", re.MULTILINE)


def _norm_name(name: str) -> str:
    return " ".join(name.casefold().split())


def _adjudicate(user_content: str) -> str:
    mention = _MENTION_LINE.search(user_content)
    candidate = _CANDIDATE_LINE.search(user_content)
    if not mention or not candidate:
        return "no"
    same = _norm_name(mention.group(1)) == _norm_name(candidate.group(1))
    return "yes" if same else "no"


# --- analytics translation ----------------------------------------------

_TARGETS = {
    "task": "task", "tasks": "task",
    "meeting": "meeting", "meetings": "meeting",
    "document": "document", "documents": "document",
    "person": "person", "people": "person",
    "project": "project", "projects": "project",
}

_ON_TIME = re.compile(
    r"what (?:percentage|percent|share) of (\w+) were completed on time(?: (.+?))?\??$",
    re.IGNORECASE,
)
_COUNT = re.compile(r"how many (\w+)(?: were there)?(?: (.+?))?\??$", re.IGNORECASE)
_MEAN = re.compile(r"what (?:is|was) the (?:average|mean) (\w+) of (\w+)(?: (.+?))?\??$", re.IGNORECASE)
_PREDICTIVE = re.compile(r"\b(predict|forecast|projection|will)\b", re.IGNORECASE)


def _quarter_window(now: datetime, back: int) -> tuple[datetime, datetime]:
    q = (now.month - 1) // 3 - back
    year = now.year
    while q < 0:
        q += 4
        year -= 1
    start = datetime(year, q * 3 + 1, 1, tzinfo=timezone.utc)
    if q == 3:
        end = datetime(year + 1, 1, 1, tzinfo=timezone.utc)
    else:
        end = datetime(year, q * 3 + 4, 1, tzinfo=timezone.utc)
    return start, end


def _month_window(now: datetime, back: int) -> tuple[datetime, datetime]:
    year, month = now.year, now.month - back
    while month < 1:
        month += 12
        year -= 1
    start = datetime(year, month, 1, tzinfo=timezone.utc)
    if month == 12:
        end = datetime(year + 1, 1, 1, tzinfo=timezone.utc)
    else:
        end = datetime(year, month + 1, 1, tzinfo=timezone.utc)
    return start, end


def _window_for(phrase: str | None, now: datetime) -> tuple[datetime, datetime]:
    text = (phrase or "").strip().lower()
    if text in ("last quarter",):
        return _quarter_window(now, 1)
    if text in ("this quarter",):
        return _quarter_window(now, 0)
    if text in ("last month",):
        return _month_window(now, 1)
    if text in ("this month",):
        return _month_window(now, 0)
    if text in ("last week", "this week"):
        monday = (now - timedelta(days=now.weekday())).replace(
            hour=0, minute=0, second=0, microsecond=0
        )
        if text == "last week":
            return monday - timedelta(days=7), monday
        return monday, monday + timedelta(days=7)
    if text in ("this year",):
        return datetime(now.year, 1, 1, tzinfo=timezone.utc), datetime(now.year + 1, 1, 1, tzinfo=timezone.utc)
    if text in ("last year",):
        return datetime(now.year - 1, 1, 1, tzinfo=timezone.utc), datetime(now.year, 1, 1, tzinfo=timezone.utc)
    if not text:
        return datetime(1970, 1, 1, tzinfo=timezone.utc), now
    raise _NoWindow(text)


class _NoWindow(Exception):
    pass


def _translate_analytics(user_content: str) -> str:
    now = datetime.now(timezone.utc)
    query = ""
    for line in user_content.splitlines():
        if line.startswith("NOW: "):
            now = parse_timestamp(line[5:])
        elif line.startswith("QUERY: "):
            query = line[7:].strip()
    if _PREDICTIVE.search(query):
        return "UNSUPPORTED predictive analytics is out of scope"

    m = _ON_TIME.match(query)
    if m:
        target = _TARGETS.get(m.group(1).lower())
        if target:
            try:
                start, end = _window_for(m.group(2), now)
            except _NoWindow:
                return "UNTRANSLATABLE unknown time window"
            return "\n".join(
                [
                    "METRIC ratio",
                    f"TARGET {target}",
                    "PREDICATE status=completed",
                    "PREDICATE completed_at<=@due_date",
                    f"WINDOW {format_timestamp(start)} {format_timestamp(end)}",
                    "GROUP_BY department",
                ]
            )
    m = _MEAN.match(query)
    if m:
        attr, raw_target = m.group(1).lower(), m.group(2).lower()
        target = _TARGETS.get(raw_target)
        if target:
            if attr == "duration":
                attr = "duration_minutes"
            try:
                start, end = _window_for(m.group(3), now)
            except _NoWindow:
                return "UNTRANSLATABLE unknown time window"
            return "\n".join(
                ["METRIC mean", f"TARGET {target}", f"VALUE {attr}",
                 f"WINDOW {format_timestamp(start)} {format_timestamp(end)}"]
            )
    m = _COUNT.match(query)
    if m:
        target = _TARGETS.get(m.group(1).lower())
        if target:
            try:
                start, end = _window_for(m.group(2), now)
            except _NoWindow:
                return "UNTRANSLATABLE unknown time window"
            return "\n".join(
                ["METRIC count", f"TARGET {target}",
                 f"WINDOW {format_timestamp(start)} {format_timestamp(end)}"]
            )
    return "UNTRANSLATABLE no grammar rule matched"


# --- expertise helpers ----------------------------------------------------


def _extract_concepts(user_content: str) -> str:
    """Longest-substring match of known concept names against the query."""
    query = ""
    known: list[str] = []
    in_known = False
    for line in user_content.splitlines():
        if line.startswith("QUERY: "):
            query = line[7:].strip()
        elif line.startswith("KNOWN:"):
            in_known = True
        elif in_known and line.strip():
            known.append(line.strip())
    folded = query.casefold()
    hits = [name for name in known if name.casefold() in folded]
    hits = [h for h in hits if not any(h != other and h.casefold() in other.casefold() for other in hits)]
    if not hits:
        return "NONE"
    return "\n".join(f"CONCEPT {h}" for h in sorted(hits))


def _rerank(user_content: str) -> str:
    """Identity re-rank: echo the candidate ids in the given order."""
    ids = [line.split()[1] for line in user_content.splitlines() if line.startswith("ITEM ")]
    return "\n".join(f"ITEM {i}" for i in ids) if ids else "NONE"
