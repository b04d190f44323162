"""Activity summarization with sensitive-data redaction.

The redaction pattern set covers long numeric identifiers, Luhn-valid
card numbers, high-entropy token shapes, and raw email addresses. Every
persisted summary must be free of these patterns; the pipeline sweeps
for them after the fact as a safety net.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import datetime

from . import detrules
from .ingestion import ContentBundle
from .providers import GenerationRequest, Provider, load_template

SUMMARY_CAP = 1200

REDACTION_CATEGORIES = ("card_number", "token_secret", "email_address", "numeric_id")

_CARD_RE = re.compile(r"\b(?:\d[ -]?){12,18}\d\b")
_TOKEN_RE = re.compile(r"\b[A-Za-z0-9]{20,}\b")
_EMAIL_RE = re.compile(r"\b[A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,}\b")
_NUMERIC_RE = re.compile(r"\d{7,}")


@dataclass
class RedactionReport:
    category: str
    count: int


@dataclass
class Summary:
    activity_id: str
    text: str
    redactions: list[RedactionReport]
    source_type: str
    timestamp: datetime
    actors: list[str] = field(default_factory=list)


def _luhn_ok(digits: str) -> bool:
    total = 0
    for i, ch in enumerate(reversed(digits)):
        d = int(ch)
        if i % 2 == 1:
            d *= 2
            if d > 9:
                d -= 9
        total += d
    return total % 10 == 0


def _is_token_shaped(text: str) -> bool:
    letters = sum(ch.isalpha() for ch in text)
    digits = sum(ch.isdigit() for ch in text)
    return letters >= 2 and digits >= 2


def redact(text: str) -> tuple[str, list[RedactionReport]]:
    """Replace sensitive patterns with ``[REDACTED:<category>]`` markers.

    Idempotent: markers never re-match any pattern. Returns the clean
    text plus one report per category that fired.
    """
    counts: dict[str, int] = {}

    def _sub(pattern: re.Pattern, category: str, test, value: str) -> str:
        def repl(m: re.Match) -> str:
            if test is not None and not test(m.group(0)):
                return m.group(0)
            counts[category] = counts.get(category, 0) + 1
            return f"[REDACTED:{category}]"

        return pattern.sub(repl, value)

    out = _sub(_CARD_RE, "card_number", lambda s: _luhn_ok(re.sub(r"\D", "", s)) and 13 <= len(re.sub(r"\D", "", s)) <= 19, text)
    out = _sub(_TOKEN_RE, "token_secret", _is_token_shaped, out)
    out = _sub(_EMAIL_RE, "email_address", None, out)
    out = _sub(_NUMERIC_RE, "numeric_id", None, out)
    reports = [RedactionReport(cat, counts[cat]) for cat in REDACTION_CATEGORIES if cat in counts]
    return out, reports


def redaction_matches(text: str) -> list[str]:
    """Categories whose raw pattern still matches ``text`` (sweep helper)."""
    hits = []
    for m in _CARD_RE.finditer(text):
        digits = re.sub(r"\D", "", m.group(0))
        if _luhn_ok(digits) and 13 <= len(digits) <= 19:
            hits.append("card_number")
            break
    if any(_is_token_shaped(m.group(0)) for m in _TOKEN_RE.finditer(text)):
        hits.append("token_secret")
    if _EMAIL_RE.search(text):
        hits.append("email_address")
    if _NUMERIC_RE.search(text):
        hits.append("numeric_id")
    return hits


def summary_to_json_line(summary: Summary) -> str:
    """One-summary JSON line for stage-by-stage pipeline files."""
    import json

    from .ontology import format_timestamp

    return json.dumps(
        {
            "activity_id": summary.activity_id,
            "text": summary.text,
            "redactions": [{"category": r.category, "count": r.count} for r in summary.redactions],
            "source_type": summary.source_type,
            "timestamp": format_timestamp(summary.timestamp),
            "actors": summary.actors,
        },
        sort_keys=True,
        separators=(",", ":"),
        ensure_ascii=False,
    )


def summary_from_json_line(line: str) -> Summary:
    import json

    from .ontology import parse_timestamp

    obj = json.loads(line)
    return Summary(
        activity_id=obj["activity_id"],
        text=obj["text"],
        redactions=[RedactionReport(r["category"], r["count"]) for r in obj.get("redactions", [])],
        source_type=obj["source_type"],
        timestamp=parse_timestamp(obj["timestamp"]),
        actors=list(obj.get("actors", [])),
    )


def render_summarize_input(bundle: ContentBundle) -> str:
    actors = "; ".join(
        a.display_name + (f" ({a.role})" if a.role else "") for a in bundle.actors
    )
    return (
        f"SOURCE: {bundle.source_type}\n"
        f"ACTORS: {actors or 'unknown'}\n"
        f"CONTENT:\n{bundle.consolidated_text}"
    )


def summarize(bundle: ContentBundle, provider: Provider, cap: int = SUMMARY_CAP) -> Summary:
    """Summarize one activity and strip sensitive identifiers.

    In http mode the bundle is redacted before it leaves the process; the
    generated text goes through redaction again regardless of mode.
    """
    user = render_summarize_input(bundle)
    if provider.mode == "http":
        user, _ = redact(user)
    request = GenerationRequest(
        system_instructions=load_template("summarize"),
        user_content=user,
        max_output_chars=max(cap, 1),
        temperature=0.0,
    )
    raw = provider.generate(request)
    clean, reports = redact(raw)
    text = detrules.truncate_sentences(clean, cap)
    if not text:
        text = clean[:cap]
    return Summary(
        activity_id=bundle.activity_id,
        text=text,
        redactions=reports,
        source_type=bundle.source_type,
        timestamp=bundle.timestamp,
        actors=[a.display_name for a in bundle.actors],
    )
