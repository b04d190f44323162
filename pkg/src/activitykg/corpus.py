"""Seeded synthetic activity corpus with exact ground truth.

Activities are rendered from a closed sentence grammar over a generated
cast (people, skills, topics, projects, departments, travel details), so
the generator can record the exact mentions, canonical entities, and
triples a perfect pipeline should recover. ``noise_level`` substitutes
name variants and off-vocabulary relation phrasings, degrading
resolution and normalization in a controlled way without changing the
underlying truth graph.

Regeneration with the same (seed, n_activities, noise_level) is
byte-identical; the structure rng is independent of the noise rng, so
the truth graph is comparable across noise levels at a fixed seed.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone

from .applications import (
    DEFAULT_EDGE_WEIGHT,
    EXPERTISE_WEIGHTS,
    IMPORTANCE_BY_PRIORITY,
    IMPORTANCE_DEFAULT,
    LEADERSHIP_BOOST,
    LEADERSHIP_WINDOW_DAYS,
    PRIORITY_WEIGHTS,
    TASK_LINK_RELATIONS,
    decay_rate,
)
from .ingestion import ActivityRecord, Actor
from .metrics import Qrels
from .ontology import entity_id, format_timestamp

AS_OF = datetime(2025, 7, 1, tzinfo=timezone.utc)
WINDOW_START = datetime(2025, 1, 6, tzinfo=timezone.utc)
WINDOW_END = datetime(2025, 6, 27, tzinfo=timezone.utc)

FIRST_NAMES = [
    "Sarah", "John", "Maria", "Priya", "Luis", "Anna", "Chen", "Fatima", "David",
    "Elena", "Noah", "Aisha", "Tomas", "Grace", "Ivan", "Mei", "Omar", "Lucy",
]
LAST_NAMES = [
    "Lee", "Smith", "Garcia", "Patel", "Ortega", "Kim", "Wei", "Hassan", "Cohen",
    "Petrova", "Brown", "Khan", "Novak", "Liu", "Park", "Diaz", "Moreau", "Singh",
]
DEPARTMENTS = ["marketing", "engineering", "finance", "operations", "design"]
CONCEPTS = [
    "influencer marketing", "data engineering", "cloud migration", "brand strategy",
    "user research", "supply analytics", "content planning", "api design",
    "budget forecasting", "customer onboarding",
]
EXTRA_TOPICS = ["campaign performance", "quarterly roadmap", "vendor selection", "customer churn"]
PROJECTS = ["Project Aurora", "Project Basalt", "Project Cedar", "Project Delta", "Project Ember"]
HOTELS = ["Hilton Midtown", "Grand Hyatt", "Seaside Inn", "Union Lodge"]
CITIES = ["Chicago", "Austin", "Berlin", "Lisbon", "Toronto"]
AIRLINES = ["AA", "UA", "LH", "BA", "DL"]
TASK_VERBS = ["Migrate", "Draft", "Review", "Update", "Audit", "Prepare", "Refactor", "Plan"]
TASK_OBJECTS = [
    "billing API", "launch brief", "vendor contract", "onboarding flow",
    "data pipeline", "budget sheet", "landing page", "churn report",
]
DOC_ADJ = ["Campaign", "Migration", "Research", "Strategy", "Onboarding", "Forecast", "Churn", "Roadmap"]
DOC_NOUN = ["Plan", "Notes", "Digest", "Memo", "Guide", "Sheet", "Analysis", "Brief"]
MEETING_PRE = ["Q1", "Q2", "Weekly", "Monthly", "Sprint"]
MEETING_MID = ["Campaign", "Platform", "Budget", "Roadmap", "Churn"]
MEETING_SUF = ["Review", "Sync", "Planning", "Retro"]
ROOMS = ["Room 4", "Room 7", "Boardroom", "Studio B"]

# Phrase pools: (phrase, is_canonical). Non-canonical phrases are either
# ontology aliases (still normalize) or off-vocabulary (degrade).
TRAVEL_PHRASES = ["traveling on", "flying on", "journeying on"]
STAY_PHRASES = ["staying at", "lodging at", "bunking at"]
SKILL_PHRASES = ["has expertise in", "is skilled in", "is an expert in", "is highly versed in"]
ATTEND_PHRASES = ["attending the meeting", "joining the meeting"]
MEETING_TOPIC_PHRASES = ["discusses", "is about", "touches on"]
ASSIGN_PHRASES = ["is assigned to", "is delegated to"]
DONE_PHRASES = ["completed", "finished", "wrapped up"]
BLOCK_PHRASES = ["blocks", "is blocking", "holds up"]
DOC_PHRASES = ["authored", "drafted", "penned"]
DOC_TOPIC_PHRASES = ["covers", "describes", "surveys"]
CHAT_PHRASES = ["discussed", "talked about", "chatted about", "riffed on"]
PARTICIPATE_PHRASES = ["participating in", "contributing to"]

NAME_VARIANT_RATE = 0.35
PHRASE_VARIANT_RATE = 0.5


@dataclass
class TruthEntity:
    id: str
    name: str
    entity_type: str


@dataclass
class TruthMention:
    activity_id: str
    surface: str
    mention_type: str
    entity_id: str


@dataclass
class AnalyticsCase:
    query: str
    expected: float | None


@dataclass
class Person:
    name: str
    department: str
    role: str | None = None

    @property
    def id(self) -> str:
        return entity_id(self.name, "person")


@dataclass
class TaskSpec:
    title: str
    assignee: Person
    project: str
    department: str
    priority: str | None
    status: str
    due_date: str
    completed_at: str | None
    blocks: str | None
    participate: bool
    timestamp: datetime

    @property
    def id(self) -> str:
        return entity_id(self.title, "task")


@dataclass
class SyntheticCorpus:
    seed: int
    n_activities: int
    noise_level: float
    as_of: datetime
    activities: list[ActivityRecord] = field(default_factory=list)
    truth_entities: dict[str, TruthEntity] = field(default_factory=dict)
    truth_triples: dict[tuple[str, str, str], datetime] = field(default_factory=dict)
    truth_mentions: list[TruthMention] = field(default_factory=list)
    expertise_queries: dict[str, str] = field(default_factory=dict)
    expertise_qrels: dict[str, Qrels] = field(default_factory=dict)
    task_users: dict[str, str] = field(default_factory=dict)
    task_qrels: dict[str, Qrels] = field(default_factory=dict)
    analytics_cases: list[AnalyticsCase] = field(default_factory=list)

    def to_activity_jsonl(self) -> str:
        lines = []
        for record in self.activities:
            obj = {
                "activity_id": record.activity_id,
                "source_type": record.source_type,
                "timestamp": format_timestamp(record.timestamp),
                "actors": [
                    {"display_name": a.display_name, **({"role": a.role} if a.role else {})}
                    for a in record.actors
                ],
                "subject": record.subject,
                "body": record.body,
                "attachments": [{"name": a.name, "text": a.text} for a in record.attachments],
                "metadata": dict(sorted(record.metadata.items())),
            }
            lines.append(json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False))
        return "\n".join(lines) + "\n"

    def manifest_json(self) -> str:
        """Canonical dump of everything, for byte-identity checks."""
        obj = {
            "seed": self.seed,
            "n_activities": self.n_activities,
            "noise_level": self.noise_level,
            "as_of": format_timestamp(self.as_of),
            "activities": self.to_activity_jsonl().splitlines(),
            "truth_entities": {
                eid: [te.name, te.entity_type] for eid, te in sorted(self.truth_entities.items())
            },
            "truth_triples": [
                [h, r, t, format_timestamp(ts)]
                for (h, r, t), ts in sorted(self.truth_triples.items())
            ],
            "truth_mentions": [
                [m.activity_id, m.surface, m.mention_type, m.entity_id] for m in self.truth_mentions
            ],
            "expertise_queries": self.expertise_queries,
            "expertise_qrels": {q: dict(sorted(v.relevance.items())) for q, v in sorted(self.expertise_qrels.items())},
            "task_users": dict(sorted(self.task_users.items())),
            "task_qrels": {q: dict(sorted(v.relevance.items())) for q, v in sorted(self.task_qrels.items())},
            "analytics_cases": [[c.query, c.expected] for c in self.analytics_cases],
        }
        return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)

    @property
    def truth_triple_keys(self) -> set[tuple[str, str, str]]:
        return set(self.truth_triples)


class _Builder:
    def __init__(self, seed: int, n_activities: int, noise_level: float) -> None:
        if n_activities < 1:
            raise ValueError("n_activities must be >= 1")
        if not 0.0 <= noise_level <= 1.0:
            raise ValueError("noise_level must be in [0, 1]")
        self.corpus = SyntheticCorpus(seed=seed, n_activities=n_activities, noise_level=noise_level, as_of=AS_OF)
        self.rng = random.Random(f"structure-{seed}")
        self.noise_rng = random.Random(f"noise-{seed}-{noise_level:.6f}")
        self.noise = noise_level
        self.serial = 0
        self.people: list[Person] = []
        self.tasks: list[TaskSpec] = []
        self.rendered_tasks: list[TaskSpec] = []
        self.meetings: list[dict] = []
        self._mention_slots: dict[str, dict[tuple[str, str], str]] = {}
        self._meeting_titles = [
            f"{a} {b} {c}" for a in MEETING_PRE for b in MEETING_MID for c in MEETING_SUF
        ]
        self.rng.shuffle(self._meeting_titles)
        self._doc_titles = [f"{a} {b}" for a in DOC_ADJ for b in DOC_NOUN]
        self.rng.shuffle(self._doc_titles)
        self._meeting_serial = 0
        self._doc_serial = 0

    def next_meeting_title(self) -> str:
        i = self._meeting_serial
        self._meeting_serial += 1
        base = self._meeting_titles[i % len(self._meeting_titles)]
        return base if i < len(self._meeting_titles) else f"{base} {i // len(self._meeting_titles) + 1}"

    def next_doc_title(self) -> str:
        i = self._doc_serial
        self._doc_serial += 1
        base = self._doc_titles[i % len(self._doc_titles)]
        return base if i < len(self._doc_titles) else f"{base} {i // len(self._doc_titles) + 1}"

    # --- noise helpers ---------------------------------------------------

    def person_surface(self, person: Person) -> str:
        if self.noise > 0 and self.noise_rng.random() < NAME_VARIANT_RATE * self.noise:
            first, rest = person.name.split(" ", 1)
            return f"{first[0]}. {rest}"
        return person.name

    def pick_phrase(self, pool: list[str]) -> str:
        if self.noise > 0 and self.noise_rng.random() < PHRASE_VARIANT_RATE * self.noise:
            return self.noise_rng.choice(pool[1:])
        return pool[0]

    # --- truth bookkeeping -------------------------------------------------

    def truth_entity(self, name: str, etype: str) -> str:
        eid = entity_id(name, etype)
        self.corpus.truth_entities.setdefault(eid, TruthEntity(eid, name, etype))
        return eid

    def mention(self, activity_id: str, surface: str, etype: str, truth_name: str) -> None:
        slots = self._mention_slots.setdefault(activity_id, {})
        slots[(surface, etype)] = self.truth_entity(truth_name, etype)

    def triple(self, head: str, head_type: str, relation: str, tail: str, tail_type: str, ts: datetime) -> None:
        key = (self.truth_entity(head, head_type), relation, self.truth_entity(tail, tail_type))
        existing = self.corpus.truth_triples.get(key)
        if existing is None or ts > existing:
            self.corpus.truth_triples[key] = ts

    def next_id(self) -> str:
        self.serial += 1
        return f"act-{self.serial:05d}"

    def ts_for(self, index: int, total: int) -> datetime:
        span = (WINDOW_END - WINDOW_START).total_seconds()
        base = WINDOW_START + timedelta(seconds=span * index / max(total, 1))
        return (base + timedelta(seconds=self.rng.randint(0, 28800))).replace(microsecond=0)

    def add_activity(self, record: ActivityRecord) -> None:
        self.corpus.activities.append(record)

    # --- activity builders ----------------------------------------------

    def build_travel(self, ts: datetime) -> ActivityRecord:
        aid = self.next_id()
        person = self.rng.choice(self.people)
        flight = f"{self.rng.choice(AIRLINES)}{self.rng.randint(100, 999)}"
        hotel = self.rng.choice(HOTELS)
        city = self.rng.choice(CITIES)
        d1 = (ts + timedelta(days=self.rng.randint(3, 21))).strftime("%Y-%m-%d")
        d2 = (ts + timedelta(days=self.rng.randint(22, 30))).strftime("%Y-%m-%d")
        surface = self.person_surface(person)
        p1 = self.pick_phrase(TRAVEL_PHRASES)
        p2 = self.pick_phrase(STAY_PHRASES)
        body = (
            f"{surface} is {p1} flight {flight} scheduled for {d1}. "
            f"{surface} is {p2} {hotel} in {city} until {d2}."
        )
        self.mention(aid, surface, "person", person.name)
        self.mention(aid, flight, "event", flight)
        self.mention(aid, d1, "date", d1)
        self.mention(aid, hotel, "location", hotel)
        self.mention(aid, city, "location", city)
        self.mention(aid, d2, "date", d2)
        self.triple(person.name, "person", "traveling_on", flight, "event", ts)
        self.triple(flight, "event", "scheduled_for", d1, "date", ts)
        self.triple(person.name, "person", "staying_at", hotel, "location", ts)
        return ActivityRecord(
            activity_id=aid, source_type="email", timestamp=ts,
            actors=[Actor(person.name, person.role)],
            subject=f"Trip confirmation for {person.name}", body=body,
        )

    def build_skill(self, ts: datetime, person: Person | None = None, skill: str | None = None) -> ActivityRecord:
        aid = self.next_id()
        person = person or self.rng.choice(self.people)
        skill = skill or self.rng.choice(CONCEPTS)
        surface = self.person_surface(person)
        phrase = self.pick_phrase(SKILL_PHRASES)
        body = f"{surface} {phrase} {skill}."
        self.mention(aid, surface, "person", person.name)
        self.mention(aid, skill, "skill", skill)
        self.triple(person.name, "person", "has_skill", skill, "skill", ts)
        return ActivityRecord(
            activity_id=aid, source_type="log", timestamp=ts,
            actors=[Actor(person.name, person.role)],
            subject="Skills profile update", body=body,
        )

    def build_meeting(self, ts: datetime, attendees: list[Person] | None = None, topic: str | None = None) -> ActivityRecord:
        aid = self.next_id()
        if attendees is None:
            attendees = self.rng.sample(self.people, self.rng.randint(2, 3))
        topic = topic or self.rng.choice(CONCEPTS + EXTRA_TOPICS)
        title = self.next_meeting_title()
        room = self.rng.choice(ROOMS)
        duration = self.rng.choice([30, 45, 60, 90])
        surfaces = [self.person_surface(p) for p in attendees]
        if len(surfaces) == 2:
            listing = f"{surfaces[0]} and {surfaces[1]}"
        else:
            listing = ", ".join(surfaces[:-1]) + f" and {surfaces[-1]}"
        aphr = self.pick_phrase(ATTEND_PHRASES)
        tphr = self.pick_phrase(MEETING_TOPIC_PHRASES)
        body = f"{listing} are {aphr} {title}. The meeting {tphr} {topic}."
        metadata = {"location": room, "duration_minutes": str(duration), "date": ts.strftime("%Y-%m-%d")}
        for person, surface in zip(attendees, surfaces):
            self.mention(aid, surface, "person", person.name)
            self.triple(person.name, "person", "attending_event", title, "meeting", ts)
        self.mention(aid, title, "meeting", title)
        self.mention(aid, topic, "topic", topic)
        self.mention(aid, room, "location", room)
        self.triple(title, "meeting", "discusses", topic, "topic", ts)
        self.triple(title, "meeting", "held_at", room, "location", ts)
        self.meetings.append({"title": title, "date": ts.strftime("%Y-%m-%d"), "duration": duration})
        return ActivityRecord(
            activity_id=aid, source_type="calendar", timestamp=ts,
            actors=[Actor(p.name, p.role) for p in attendees],
            subject=f"Meeting: {title}", body=body, metadata=metadata,
        )

    def build_task(self, ts: datetime, spec: TaskSpec) -> ActivityRecord:
        aid = self.next_id()
        self.rendered_tasks.append(spec)
        surface_person = self.person_surface(spec.assignee)
        aphr = self.pick_phrase(ASSIGN_PHRASES)
        sentences = [f"Task {spec.title} {aphr} {surface_person} in project {spec.project}."]
        if spec.participate:
            pphr = self.pick_phrase(PARTICIPATE_PHRASES)
            sentences.append(f"{surface_person} is {pphr} project {spec.project}.")
            self.triple(spec.assignee.name, "person", "participating_in", spec.project, "project", ts)
        if spec.status == "completed":
            dphr = self.pick_phrase(DONE_PHRASES)
            sentences.append(f"{surface_person} {dphr} the task {spec.title}.")
            self.triple(spec.assignee.name, "person", "completed_task_on", spec.title, "task", ts)
        if spec.blocks:
            bphr = self.pick_phrase(BLOCK_PHRASES)
            sentences.append(f"Task {spec.title} {bphr} task {spec.blocks}.")
            self.mention(aid, spec.blocks, "task", spec.blocks)
            self.triple(spec.title, "task", "blocks", spec.blocks, "task", ts)
        metadata = {
            "department": spec.department,
            "due_date": spec.due_date,
            "status": spec.status,
            "project": spec.project,
        }
        if spec.priority:
            metadata["priority"] = spec.priority
        if spec.completed_at:
            metadata["completed_at"] = spec.completed_at
        self.mention(aid, spec.title, "task", spec.title)
        self.mention(aid, surface_person, "person", spec.assignee.name)
        self.mention(aid, spec.project, "project", spec.project)
        self.triple(spec.title, "task", "assigned_to", spec.assignee.name, "person", ts)
        self.triple(spec.title, "task", "part_of", spec.project, "project", ts)
        return ActivityRecord(
            activity_id=aid, source_type="log", timestamp=ts,
            actors=[Actor(spec.assignee.name, spec.assignee.role)],
            subject=f"Task: {spec.title}", body=" ".join(sentences), metadata=metadata,
        )

    def build_document(self, ts: datetime, author: Person | None = None, topic: str | None = None, title: str | None = None) -> ActivityRecord:
        aid = self.next_id()
        author = author or self.rng.choice(self.people)
        topic = topic or self.rng.choice(CONCEPTS + EXTRA_TOPICS)
        title = title or self.next_doc_title()
        surface = self.person_surface(author)
        aphr = self.pick_phrase(DOC_PHRASES)
        tphr = self.pick_phrase(DOC_TOPIC_PHRASES)
        body = f"{surface} {aphr} the document {title}. The document {tphr} {topic}."
        self.mention(aid, surface, "person", author.name)
        self.mention(aid, title, "document", title)
        self.mention(aid, topic, "topic", topic)
        self.triple(author.name, "person", "authored", title, "document", ts)
        self.triple(title, "document", "covers", topic, "topic", ts)
        return ActivityRecord(
            activity_id=aid, source_type="document", timestamp=ts,
            actors=[Actor(author.name, author.role)],
            subject=f"Document: {title}", body=body,
        )

    def build_chat(self, ts: datetime) -> ActivityRecord:
        aid = self.next_id()
        p1, p2 = self.rng.sample(self.people, 2)
        topic = self.rng.choice(CONCEPTS + EXTRA_TOPICS)
        s1, s2 = self.person_surface(p1), self.person_surface(p2)
        phrase = self.pick_phrase(CHAT_PHRASES)
        body = f"{s1} {phrase} {topic} with {s2}."
        self.mention(aid, s1, "person", p1.name)
        self.mention(aid, s2, "person", p2.name)
        self.mention(aid, topic, "topic", topic)
        self.triple(p1.name, "person", "discussed", topic, "topic", ts)
        self.triple(p2.name, "person", "discussed", topic, "topic", ts)
        return ActivityRecord(
            activity_id=aid, source_type="chat", timestamp=ts,
            actors=[Actor(p1.name, p1.role), Actor(p2.name, p2.role)], body=body,
        )

    def build_directory(self, ts: datetime, person: Person | None = None) -> ActivityRecord:
        aid = self.next_id()
        person = person or self.rng.choice(self.people)
        surface = self.person_surface(person)
        body = f"{surface} works in the {person.department} department."
        self.mention(aid, surface, "person", person.name)
        self.mention(aid, person.department, "department", person.department)
        self.triple(person.name, "person", "works_in", person.department, "department", ts)
        return ActivityRecord(
            activity_id=aid, source_type="log", timestamp=ts,
            actors=[Actor(person.name, person.role)],
            subject="Staff directory entry", body=body,
        )


def _make_people(rng: random.Random) -> list[Person]:
    pairs = [(f, l) for f, l in zip(FIRST_NAMES, rng.sample(LAST_NAMES, len(LAST_NAMES)))]
    people = []
    for i, (first, last) in enumerate(pairs):
        dept = DEPARTMENTS[i % len(DEPARTMENTS)]
        people.append(Person(name=f"{first} {last}", department=dept))
    # Pin the paper scenario: a marketing strategist named Sarah Lee.
    people[0] = Person(name="Sarah Lee", department="marketing")
    people[1].role = "executive"
    people[2].role = "executive"
    return people


def _make_task_specs(builder: _Builder, count: int) -> list[TaskSpec]:
    rng = builder.rng
    combos = [(v, o) for v in TASK_VERBS for o in TASK_OBJECTS]
    rng.shuffle(combos)
    focus_users = builder.people[3:7]
    specs: list[TaskSpec] = []
    for i in range(count):
        verb, obj = combos[i % len(combos)]
        title = f"{verb} {obj}" if i < len(combos) else f"{verb} {obj} phase {i // len(combos) + 1}"
        assignee = focus_users[i % len(focus_users)] if i % 2 == 0 else rng.choice(builder.people)
        project = rng.choice(PROJECTS)
        due = AS_OF + timedelta(days=rng.randint(-65, 18))
        status = rng.choice(["completed", "completed", "completed", "open", "open"])
        completed_at = None
        if status == "completed":
            late = rng.random() < 0.25
            delta = rng.randint(1, 6)
            completed_at = (due + timedelta(days=delta if late else -delta)).strftime("%Y-%m-%d")
        specs.append(
            TaskSpec(
                title=title,
                assignee=assignee,
                project=project,
                department=assignee.department,
                priority=rng.choice(["high", "medium", "low", None]),
                status=status,
                due_date=due.strftime("%Y-%m-%d"),
                completed_at=completed_at,
                blocks=None,
                participate=rng.random() < 0.4,
                timestamp=AS_OF,
            )
        )
    for i, spec in enumerate(specs):
        if rng.random() < 0.3 and len(specs) > 1:
            other = specs[rng.randrange(len(specs))]
            if other.title != spec.title:
                spec.blocks = other.title
    return specs


def generate_corpus(seed: int, n_activities: int, noise_level: float = 0.0) -> SyntheticCorpus:
    """Build a corpus of ``n_activities`` with full ground truth."""
    builder = _Builder(seed, n_activities, noise_level)
    rng = builder.rng
    builder.people = _make_people(rng)

    kinds: list[str] = ["seed_skill", "seed_doc", "seed_meeting"][:n_activities]
    remaining = n_activities - len(kinds)
    pool = ["travel"] * 12 + ["skill"] * 17 + ["meeting"] * 19 + ["task"] * 25 + ["document"] * 14 + ["chat"] * 8 + ["directory"] * 5
    kinds.extend(rng.choices(pool, k=remaining))
    task_count = sum(1 for k in kinds if k == "task")
    builder.tasks = _make_task_specs(builder, max(task_count, 1))

    sarah = builder.people[0]
    rival = builder.people[5]
    task_iter = iter(builder.tasks)
    for index, kind in enumerate(kinds):
        ts = builder.ts_for(index, n_activities)
        if kind == "seed_skill":
            record = builder.build_skill(ts, person=sarah, skill="influencer marketing")
        elif kind == "seed_doc":
            record = builder.build_document(ts, author=sarah, topic="influencer marketing", title="Campaign Plan")
        elif kind == "seed_meeting":
            record = builder.build_meeting(ts, attendees=[rival, builder.people[6]], topic="influencer marketing")
        elif kind == "travel":
            record = builder.build_travel(ts)
        elif kind == "skill":
            record = builder.build_skill(ts)
        elif kind == "meeting":
            record = builder.build_meeting(ts)
        elif kind == "task":
            spec = next(task_iter)
            spec.timestamp = ts
            record = builder.build_task(ts, spec)
        elif kind == "document":
            record = builder.build_document(ts)
        elif kind == "chat":
            record = builder.build_chat(ts)
        else:
            record = builder.build_directory(ts)
        builder.add_activity(record)

    corpus = builder.corpus
    for aid in sorted(builder._mention_slots):
        for (surface, etype), truth_id in builder._mention_slots[aid].items():
            corpus.truth_mentions.append(TruthMention(aid, surface, etype, truth_id))

    _build_expertise_qrels(builder)
    _build_task_qrels(builder)
    _build_analytics_cases(builder)
    return corpus


# --- ground-truth scoring (independent of the runtime graph store) -----------


def _truth_adjacency(corpus: SyntheticCorpus):
    out_adj: dict[str, list[tuple[str, str, datetime, bool]]] = {}
    for (h, r, t), ts in corpus.truth_triples.items():
        out_adj.setdefault(h, []).append((t, r, ts, True))
        out_adj.setdefault(t, []).append((h, r, ts, False))
    for rows in out_adj.values():
        rows.sort(key=lambda row: (row[0], row[1], not row[3]))
    return out_adj


def _truth_simple_paths(adj, start: str, max_hops: int):
    """Yield (nodes, edges) for every simple path up to max_hops."""
    paths = []

    def dfs(node, nodes, edges):
        for nxt, rel, ts, forward in adj.get(node, ()):
            if nxt in nodes:
                continue
            new_nodes = nodes + [nxt]
            new_edges = edges + [(rel, ts, forward)]
            paths.append((new_nodes, new_edges))
            if len(new_edges) < max_hops:
                dfs(nxt, new_nodes, new_edges)

    dfs(start, [start], [])
    return paths


def _grade_by_band(scores: dict[str, float]) -> dict[str, int]:
    bands = sorted({round(s, 12) for s in scores.values() if s > 0}, reverse=True)
    grades = {}
    for item, score in scores.items():
        if score <= 0:
            continue
        band = bands.index(round(score, 12))
        grades[item] = [3, 2, 1][min(band, 2)]
    return grades


def _build_expertise_qrels(builder: _Builder) -> None:
    corpus = builder.corpus
    adj = _truth_adjacency(corpus)
    lam = decay_rate()
    person_ids = {p.id for p in builder.people}
    concept_entities = {
        eid: te for eid, te in corpus.truth_entities.items() if te.entity_type in ("skill", "topic")
    }
    query_concepts = ["influencer marketing", "data engineering", "cloud migration", "brand strategy", "user research"]
    for qnum, concept in enumerate(query_concepts, start=1):
        node_ids = [eid for eid, te in sorted(concept_entities.items()) if te.name == concept]
        if not node_ids:
            continue
        scores: dict[str, float] = {}
        for node_id in node_ids:
            for nodes, edges in _truth_simple_paths(adj, node_id, max_hops=3):
                if nodes[-1] not in person_ids:
                    continue
                rel, ts, _fwd = edges[-1]
                weight = EXPERTISE_WEIGHTS.get(rel, DEFAULT_EDGE_WEIGHT)
                age = max(0.0, (AS_OF - ts).total_seconds() / 86400.0)
                scores[nodes[-1]] = scores.get(nodes[-1], 0.0) + weight * math.exp(-lam * age)
        grades = _grade_by_band(scores)
        if not grades:
            continue
        qid = f"expertise-{qnum}"
        corpus.expertise_queries[qid] = f"Who is the best person to consult about {concept}?"
        corpus.expertise_qrels[qid] = Qrels(qid, grades)


def _build_task_qrels(builder: _Builder) -> None:
    corpus = builder.corpus
    adj = _truth_adjacency(corpus)
    horizon_days = 7

    exec_anchor_ids: set[str] = set()
    for (h, r, t), ts in corpus.truth_triples.items():
        if r != "authored":
            continue
        author = corpus.truth_entities.get(h)
        person = next((p for p in builder.people if p.id == h), None)
        if author and person and person.role == "executive":
            if 0.0 <= (AS_OF - ts).total_seconds() / 86400.0 <= LEADERSHIP_WINDOW_DAYS:
                exec_anchor_ids.add(t)

    def within_two_hops(start: str, targets: set[str]) -> bool:
        if not targets:
            return False
        frontier, seen = {start}, {start}
        for _ in range(2):
            nxt = set()
            for node in frontier:
                for other, _r, _ts, _f in adj.get(node, ()):
                    if other not in seen:
                        nxt.add(other)
            if nxt & targets:
                return True
            seen |= nxt
            frontier = nxt
        return False

    specs_by_id = {spec.id: spec for spec in builder.rendered_tasks}
    users = builder.people[3:7]
    for qnum, user in enumerate(users, start=1):
        candidates: set[str] = set()
        for nodes, edges in _truth_simple_paths(adj, user.id, max_hops=2):
            if all(rel in TASK_LINK_RELATIONS for rel, _ts, _f in edges):
                spec = specs_by_id.get(nodes[-1])
                if spec is not None and spec.status not in ("completed", "done", "cancelled", "closed"):
                    candidates.add(nodes[-1])
        if not candidates:
            continue
        blocked = {
            tid: sum(1 for (h, r, _t) in corpus.truth_triples if h == tid and r == "blocks")
            for tid in candidates
        }
        max_blocked = max(blocked.values(), default=0)
        scores: dict[str, float] = {}
        for tid in candidates:
            spec = specs_by_id[tid]
            due = datetime.fromisoformat(spec.due_date).replace(tzinfo=timezone.utc)
            if due < AS_OF:
                urgency = 1.0
            else:
                urgency = min(1.0, max(0.0, 1.0 - (due - AS_OF).total_seconds() / 86400.0 / horizon_days))
            importance = IMPORTANCE_BY_PRIORITY.get(spec.priority or "", IMPORTANCE_DEFAULT)
            if exec_anchor_ids and within_two_hops(tid, exec_anchor_ids):
                importance = min(1.0, importance + LEADERSHIP_BOOST)
            dependency = blocked[tid] / max_blocked if max_blocked else 0.0
            scores[tid] = (
                PRIORITY_WEIGHTS["urgency"] * urgency
                + PRIORITY_WEIGHTS["importance"] * importance
                + PRIORITY_WEIGHTS["dependency"] * dependency
            )
        grades = _grade_by_band(scores)
        if not grades:
            continue
        qid = f"tasks-{qnum}"
        corpus.task_users[qid] = user.id
        corpus.task_qrels[qid] = Qrels(qid, grades)


def _build_analytics_cases(builder: _Builder) -> None:
    corpus = builder.corpus
    q2_start, q2_end = datetime(2025, 4, 1, tzinfo=timezone.utc), datetime(2025, 7, 1, tzinfo=timezone.utc)
    in_window = [
        s for s in builder.rendered_tasks
        if q2_start <= datetime.fromisoformat(s.due_date).replace(tzinfo=timezone.utc) < q2_end
    ]
    on_time = [
        s for s in in_window
        if s.status == "completed" and s.completed_at is not None and s.completed_at <= s.due_date
    ]
    ratio = len(on_time) / len(in_window) if in_window else None
    corpus.analytics_cases.append(
        AnalyticsCase("What percentage of tasks were completed on time last quarter?", ratio)
    )
    june = [m for m in builder.meetings if m["date"].startswith("2025-06")]
    corpus.analytics_cases.append(AnalyticsCase("How many meetings last month?", float(len(june))))
    mean_duration = sum(m["duration"] for m in june) / len(june) if june else None
    corpus.analytics_cases.append(
        AnalyticsCase("What was the average duration of meetings last month?", mean_duration)
    )
