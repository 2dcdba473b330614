"""Corpus, query, judgment, and engagement-log records plus JSONL serialization.

Every on-disk format is line-delimited JSON, one record per line, UTF-8,
with field names matching the dataclass fields. Records are immutable
after construction and safe to share across threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable

from .errors import DuplicateId, MalformedRecord
from .integrity import IntegrityLabel, LabelReason, Severity


class SourceType(str, Enum):
    """Document source: connected navigation (CN) or unconnected navigation (UN)."""

    CN = "CN"
    UN = "UN"


class Intent(str, Enum):
    """Closed query-intent taxonomy; unknown intents map to OTHER."""

    PERSON_NAME = "PersonName"
    GROUP_TOPIC = "GroupTopic"
    CELEBRITY_CONNECTED = "CelebrityConnected"
    FRIEND_PHOTO = "FriendPhoto"
    OTHER = "Other"

    @classmethod
    def parse(cls, value: str) -> "Intent":
        try:
            return cls(value)
        except ValueError:
            return cls.OTHER


class EngagementAction(str, Enum):
    CLICK = "Click"
    JOIN = "Join"
    NONE = "None"


class FailureCategory(str, Enum):
    """Why a judged result was rated a failure (grade 0)."""

    FUZZY_TEXT_MATCH = "FuzzyTextMatch"
    LOCATION_MISMATCH = "LocationMismatch"
    LANGUAGE_MISMATCH = "LanguageMismatch"
    MISINFORMATION = "Misinformation"
    UNTRUSTWORTHY = "Untrustworthy"
    OFFENSIVE = "Offensive"


JUNKINESS_CATEGORIES = frozenset(
    {
        FailureCategory.FUZZY_TEXT_MATCH,
        FailureCategory.LOCATION_MISMATCH,
        FailureCategory.LANGUAGE_MISMATCH,
    }
)

INTEGRITY_CATEGORIES = frozenset(
    {
        FailureCategory.MISINFORMATION,
        FailureCategory.UNTRUSTWORTHY,
        FailureCategory.OFFENSIVE,
    }
)


@dataclass(frozen=True, slots=True)
class SegmentKey:
    """One customization bucket: user country, language, query intent, doc source."""

    user_country: str
    language: str
    query_intent: Intent
    doc_source_type: SourceType

    def to_dict(self) -> dict:
        return {
            "user_country": self.user_country,
            "language": self.language,
            "query_intent": self.query_intent.value,
            "doc_source_type": self.doc_source_type.value,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SegmentKey":
        return cls(
            user_country=d["user_country"],
            language=d["language"],
            query_intent=Intent.parse(d["query_intent"]),
            doc_source_type=SourceType(d["doc_source_type"]),
        )

    def sort_key(self) -> tuple:
        return (
            self.user_country,
            self.language,
            self.query_intent.value,
            self.doc_source_type.value,
        )


@dataclass(frozen=True, slots=True)
class Document:
    doc_id: str
    title: str
    description: str
    language: str
    country: str
    region: str
    topic: str
    source_type: SourceType
    integrity_label: IntegrityLabel | None = None

    def __post_init__(self) -> None:
        if not self.doc_id:
            raise ValueError("doc_id must be nonempty")

    def to_dict(self) -> dict:
        d = {
            "doc_id": self.doc_id,
            "title": self.title,
            "description": self.description,
            "language": self.language,
            "country": self.country,
            "region": self.region,
            "topic": self.topic,
            "source_type": self.source_type.value,
        }
        if self.integrity_label is not None:
            d["integrity_label"] = {
                "doc_id": self.integrity_label.doc_id,
                "severity": self.integrity_label.severity.value,
                "reason": self.integrity_label.reason.value,
            }
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Document":
        label = None
        if d.get("integrity_label") is not None:
            raw = d["integrity_label"]
            label = IntegrityLabel(
                doc_id=raw.get("doc_id", d["doc_id"]),
                severity=Severity(raw["severity"]),
                reason=LabelReason(raw["reason"]),
            )
        return cls(
            doc_id=d["doc_id"],
            title=d["title"],
            description=d["description"],
            language=d["language"],
            country=d["country"],
            region=d["region"],
            topic=d["topic"],
            source_type=SourceType(d["source_type"]),
            integrity_label=label,
        )


@dataclass(frozen=True, slots=True)
class Query:
    query_id: str
    text: str
    language: str
    country: str
    region: str
    intent: Intent

    def __post_init__(self) -> None:
        if not self.query_id:
            raise ValueError("query_id must be nonempty")

    def to_dict(self) -> dict:
        return {
            "query_id": self.query_id,
            "text": self.text,
            "language": self.language,
            "country": self.country,
            "region": self.region,
            "intent": self.intent.value,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Query":
        return cls(
            query_id=d["query_id"],
            text=d["text"],
            language=d["language"],
            country=d["country"],
            region=d["region"],
            intent=Intent.parse(d["intent"]),
        )


@dataclass(frozen=True, slots=True)
class EngagementRecord:
    """One logged impression: the raw similarity score and whether it converted."""

    query_id: str
    doc_id: str
    raw_score: float
    engaged: bool
    action: EngagementAction
    segment: SegmentKey

    def __post_init__(self) -> None:
        if not -1.0 <= self.raw_score <= 1.0:
            raise ValueError(f"raw_score {self.raw_score} outside [-1, 1]")
        if self.engaged != (self.action != EngagementAction.NONE):
            raise ValueError("engaged must be true exactly when action is not None")

    def to_dict(self) -> dict:
        return {
            "query_id": self.query_id,
            "doc_id": self.doc_id,
            "raw_score": self.raw_score,
            "engaged": self.engaged,
            "action": self.action.value,
            "segment": self.segment.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EngagementRecord":
        return cls(
            query_id=d["query_id"],
            doc_id=d["doc_id"],
            raw_score=float(d["raw_score"]),
            engaged=bool(d["engaged"]),
            action=EngagementAction(d["action"]),
            segment=SegmentKey.from_dict(d["segment"]),
        )


@dataclass(frozen=True, slots=True)
class RelevanceJudgment:
    """Rater grade on a 0..3 scale; grade 0 may carry a failure category."""

    query_id: str
    doc_id: str
    grade: int
    failure_category: FailureCategory | None = None

    def __post_init__(self) -> None:
        if self.grade not in (0, 1, 2, 3):
            raise ValueError(f"grade {self.grade} outside 0..3")
        if self.grade > 0 and self.failure_category is not None:
            raise ValueError("failure_category only allowed on grade-0 judgments")

    def to_dict(self) -> dict:
        d = {"query_id": self.query_id, "doc_id": self.doc_id, "grade": self.grade}
        if self.failure_category is not None:
            d["failure_category"] = self.failure_category.value
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RelevanceJudgment":
        cat = d.get("failure_category")
        return cls(
            query_id=d["query_id"],
            doc_id=d["doc_id"],
            grade=int(d["grade"]),
            failure_category=FailureCategory(cat) if cat is not None else None,
        )


# ---------------------------------------------------------------------------
# JSONL I/O


def _iter_jsonl(path: str | Path):
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                yield line_no, json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedRecord(str(path), line_no, f"invalid JSON: {exc.msg}") from exc


def _write_jsonl(path: str | Path, records: Iterable[dict]) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, ensure_ascii=False))
            fh.write("\n")


def load_corpus(path: str | Path) -> list[Document]:
    """Read corpus.jsonl in file order; duplicate doc_id is an error."""
    docs: list[Document] = []
    seen: set[str] = set()
    for line_no, raw in _iter_jsonl(path):
        try:
            doc = Document.from_dict(raw)
        except (KeyError, ValueError, TypeError) as exc:
            raise MalformedRecord(str(path), line_no, str(exc)) from exc
        if doc.doc_id in seen:
            raise DuplicateId(doc.doc_id)
        seen.add(doc.doc_id)
        docs.append(doc)
    return docs


def save_corpus(docs: Iterable[Document], path: str | Path) -> None:
    _write_jsonl(path, (d.to_dict() for d in docs))


def load_queries(path: str | Path) -> list[Query]:
    queries: list[Query] = []
    seen: set[str] = set()
    for line_no, raw in _iter_jsonl(path):
        try:
            q = Query.from_dict(raw)
        except (KeyError, ValueError, TypeError) as exc:
            raise MalformedRecord(str(path), line_no, str(exc)) from exc
        if q.query_id in seen:
            raise DuplicateId(q.query_id)
        seen.add(q.query_id)
        queries.append(q)
    return queries


def save_queries(queries: Iterable[Query], path: str | Path) -> None:
    _write_jsonl(path, (q.to_dict() for q in queries))


def load_judgments(path: str | Path) -> list[RelevanceJudgment]:
    out = []
    for line_no, raw in _iter_jsonl(path):
        try:
            out.append(RelevanceJudgment.from_dict(raw))
        except (KeyError, ValueError, TypeError) as exc:
            raise MalformedRecord(str(path), line_no, str(exc)) from exc
    return out


def save_judgments(judgments: Iterable[RelevanceJudgment], path: str | Path) -> None:
    _write_jsonl(path, (j.to_dict() for j in judgments))


def load_engagement_log(path: str | Path) -> list[EngagementRecord]:
    out = []
    for line_no, raw in _iter_jsonl(path):
        try:
            out.append(EngagementRecord.from_dict(raw))
        except (KeyError, ValueError, TypeError) as exc:
            raise MalformedRecord(str(path), line_no, str(exc)) from exc
    return out


def save_engagement_log(records: Iterable[EngagementRecord], path: str | Path) -> None:
    _write_jsonl(path, (r.to_dict() for r in records))
