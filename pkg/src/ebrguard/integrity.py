"""Ground-truth integrity labels, index removal, and rule-based rank demotion.

Labels are the enforcement signal: Removable documents are deleted from the
vector index (and dropped outright if one slips into a ranked list through
another source), Demotable documents keep their entry but sink below every
clean result. The store keeps an append-only audit trail; the latest write
for a doc_id wins.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import TYPE_CHECKING, Iterable, Sequence, TypeVar

from .errors import MalformedRecord

if TYPE_CHECKING:
    from .vector_index import Index


class Severity(str, Enum):
    REMOVABLE = "Removable"
    DEMOTABLE = "Demotable"


class LabelReason(str, Enum):
    MISINFORMATION = "Misinformation"
    UNTRUSTWORTHY = "Untrustworthy"
    OFFENSIVE = "Offensive"
    OTHER = "Other"


# Default severity per failure/label reason. Misinformation and offensive
# content are never shown; untrustworthy results are demoted, not hidden.
DEFAULT_SEVERITY_FOR_REASON = {
    LabelReason.MISINFORMATION: Severity.REMOVABLE,
    LabelReason.OFFENSIVE: Severity.REMOVABLE,
    LabelReason.UNTRUSTWORTHY: Severity.DEMOTABLE,
    LabelReason.OTHER: Severity.DEMOTABLE,
}


@dataclass(frozen=True, slots=True)
class IntegrityLabel:
    doc_id: str
    severity: Severity
    reason: LabelReason
    ts: str | None = None

    def to_dict(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "severity": self.severity.value,
            "reason": self.reason.value,
            "ts": self.ts,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "IntegrityLabel":
        return cls(
            doc_id=d["doc_id"],
            severity=Severity(d["severity"]),
            reason=LabelReason(d["reason"]),
            ts=d.get("ts"),
        )


class LabelStore:
    """Single-writer label map with an append-only audit list."""

    def __init__(self, labels: Iterable[IntegrityLabel] = ()) -> None:
        self._current: dict[str, IntegrityLabel] = {}
        self.audit: list[IntegrityLabel] = []
        for lab in labels:
            self.add(lab)

    def add(self, lab: IntegrityLabel) -> IntegrityLabel:
        self.audit.append(lab)
        self._current[lab.doc_id] = lab
        return lab

    def lookup(self, doc_id: str) -> IntegrityLabel | None:
        return self._current.get(doc_id)

    def removable_ids(self) -> frozenset[str]:
        return frozenset(
            doc_id
            for doc_id, lab in self._current.items()
            if lab.severity is Severity.REMOVABLE
        )

    def demotable_ids(self) -> frozenset[str]:
        return frozenset(
            doc_id
            for doc_id, lab in self._current.items()
            if lab.severity is Severity.DEMOTABLE
        )

    def __len__(self) -> int:
        return len(self._current)

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self._current


def label(
    store: LabelStore,
    doc_id: str,
    severity: Severity,
    reason: LabelReason,
    ts: str | None = None,
) -> LabelStore:
    """Record a label in the store (latest write wins) and return the store."""
    store.add(IntegrityLabel(doc_id=doc_id, severity=severity, reason=reason, ts=ts))
    return store


def apply_index_removal(index: "Index", store: LabelStore) -> tuple["Index", int]:
    """Delete every Removable-labeled entry from the index.

    Returns the new index and the count of entries newly removed, so a
    second application reports 0. Idempotent.
    """
    present = [doc_id for doc_id in store.removable_ids() if doc_id in index]
    return index.remove_many(sorted(present)), len(present)


_R = TypeVar("_R")


def apply_demotion(results: Sequence[_R], store: LabelStore) -> list[_R]:
    """Stable-partition ranked results: Demotable sink to the bottom, Removable vanish.

    Items must be dataclasses with doc_id and demoted fields (search results).
    Relative order inside the kept block and inside the demoted block is
    preserved. Removable entries are deleted outright as defense in depth for
    results that arrived through a path that bypassed index removal.
    """
    kept: list[_R] = []
    demoted: list[_R] = []
    for item in results:
        lab = store.lookup(item.doc_id)  # type: ignore[attr-defined]
        if lab is None:
            kept.append(item)
        elif lab.severity is Severity.REMOVABLE:
            continue
        else:
            demoted.append(dataclasses.replace(item, demoted=True))  # type: ignore[type-var]
    return kept + demoted


def labels_from_judgments(judgments, severity_for_reason=None) -> LabelStore:
    """Build a store from judged integrity failures (keyed on category names)."""
    mapping = severity_for_reason or DEFAULT_SEVERITY_FOR_REASON
    store = LabelStore()
    valid = {r.value for r in LabelReason}
    for j in judgments:
        cat = getattr(j, "failure_category", None)
        if cat is None:
            continue
        name = getattr(cat, "value", cat)
        if name not in valid:
            continue
        reason = LabelReason(name)
        store.add(
            IntegrityLabel(doc_id=j.doc_id, severity=mapping[reason], reason=reason)
        )
    return store


def load_labels(path: str | Path) -> LabelStore:
    store = LabelStore()
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                store.add(IntegrityLabel.from_dict(json.loads(line)))
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                raise MalformedRecord(str(path), line_no, str(exc)) from exc
    return store


def save_labels(store: LabelStore, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for lab in store.audit:
            fh.write(json.dumps(lab.to_dict(), ensure_ascii=False))
            fh.write("\n")


def append_label(path: str | Path, lab: IntegrityLabel) -> None:
    with Path(path).open("a", encoding="utf-8") as fh:
        fh.write(json.dumps(lab.to_dict(), ensure_ascii=False))
        fh.write("\n")
