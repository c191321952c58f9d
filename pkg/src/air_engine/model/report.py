"""Incident report container and mutation operations.

Reports are immutable snapshots: every mutation returns a new snapshot plus
the revision that produced it, so callers can persist the revision and share
snapshots freely across threads. Element slots are always present for all
25 canonical keys; an element is either Unknown or Populated, and Unknown is
an explicit state distinct from an empty value.
"""

from __future__ import annotations

import uuid
from dataclasses import dataclass, replace
from datetime import datetime
from typing import Any, Iterable

from ..digest import digest_obj
from ..errors import (
    AlreadyUnknown,
    EmptyDetectionSource,
    EmptyValue,
    FutureTimestamp,
    InvalidValue,
    KindMismatch,
)
from ..lifecycle import Phase
from .registry import ALL_KEYS, ElementKey, coerce_key, kind_of, registry_index
from .values import (
    ElementValue,
    EventList,
    NotificationLedger,
    NotificationStatus,
    PriorityBand,
    PriorityRating,
    Text,
    Timestamp,
    format_utc,
    parse_utc,
    utc_now,
    value_from_json,
    value_to_json,
)

# Record keys for non-element log records; the "@" prefix keeps them outside
# the canonical key namespace.
PHASE_MARKER = "@phase"
DEADLINE_MARKER = "@deadline"
EVIDENCE_MARKER = "@evidence"

DEFAULT_CLOCK_SKEW_SECONDS = 300


@dataclass(frozen=True)
class ElementState:
    """Unknown, or Populated with a value and its provenance."""

    value: ElementValue | None = None
    set_by: str | None = None
    set_at: datetime | None = None

    @property
    def populated(self) -> bool:
        return self.value is not None


UNKNOWN = ElementState()


def state_to_json(state: ElementState) -> dict[str, Any]:
    if not state.populated:
        return {"state": "unknown"}
    return {
        "state": "populated",
        "value": value_to_json(state.value),
        "set_by": state.set_by,
        "set_at": format_utc(state.set_at) if state.set_at else None,
    }


def state_from_json(payload: Any) -> ElementState:
    if not isinstance(payload, dict) or "state" not in payload:
        raise InvalidValue("element state must be an object with a 'state' tag")
    if payload["state"] == "unknown":
        return UNKNOWN
    if payload["state"] == "populated":
        return ElementState(
            value=value_from_json(payload["value"]),
            set_by=payload.get("set_by"),
            set_at=parse_utc(payload["set_at"]) if payload.get("set_at") else None,
        )
    raise InvalidValue(f"unknown element state tag: {payload['state']!r}")


def state_digest(state: ElementState) -> str:
    return digest_obj(state_to_json(state))


@dataclass(frozen=True)
class Revision:
    """One append-only change record: who set which slot to what, when.

    ``key`` is a canonical element key for element changes, or an ``@``
    marker for phase, deadline and evidence records sharing the same
    per-incident sequence. ``seq`` is assigned when the revision enters the
    store.
    """

    key: str
    actor: str
    at: datetime
    before: str
    after: str
    payload: dict[str, Any]
    seq: int | None = None

    @property
    def is_element(self) -> bool:
        return not self.key.startswith("@")

    def to_json(self) -> dict[str, Any]:
        return {
            "seq": self.seq,
            "key": self.key,
            "actor": self.actor,
            "at": format_utc(self.at),
            "before": self.before,
            "after": self.after,
            "payload": self.payload,
        }

    @staticmethod
    def from_json(obj: dict[str, Any]) -> "Revision":
        return Revision(
            key=obj["key"],
            actor=obj["actor"],
            at=parse_utc(obj["at"]),
            before=obj["before"],
            after=obj["after"],
            payload=obj["payload"],
            seq=obj.get("seq"),
        )


@dataclass(frozen=True)
class IncidentReport:
    """Current state of one incident: 25 element slots plus lifecycle phase."""

    incident_ref: str
    elements: dict[ElementKey, ElementState]
    phase: Phase
    created_at: datetime
    created_by: str
    revision_count: int = 0

    def element(self, key: str | ElementKey) -> ElementState:
        return self.elements[coerce_key(key)]

    def populated_keys(self) -> list[ElementKey]:
        return [k for k in ALL_KEYS if self.elements[k].populated]

    def unknown_keys(self) -> list[ElementKey]:
        return [k for k in ALL_KEYS if not self.elements[k].populated]


def empty_report(incident_ref: str, created_at: datetime, created_by: str) -> IncidentReport:
    """All-Unknown pre-activation shell; the replay base."""
    return IncidentReport(
        incident_ref=incident_ref,
        elements={k: UNKNOWN for k in ALL_KEYS},
        phase=Phase.DRAFT,
        created_at=created_at,
        created_by=created_by,
        revision_count=0,
    )


def create_report(
    detection_timestamp: datetime,
    detection_source: str,
    created_by: str,
    incident_ref: str | None = None,
    now: datetime | None = None,
    clock_skew_seconds: int = DEFAULT_CLOCK_SKEW_SECONDS,
) -> IncidentReport:
    """Open a new report with the two chronology anchors populated.

    The detection timestamp may not sit further in the future than the
    configured clock skew; OT clocks drift, anything beyond that is a bad
    record.
    """
    if not detection_source or not detection_source.strip():
        raise EmptyDetectionSource("detection_source must be non-empty")
    now = parse_utc(now) if now is not None else utc_now()
    detection_timestamp = parse_utc(detection_timestamp)
    if detection_timestamp.timestamp() > now.timestamp() + clock_skew_seconds:
        raise FutureTimestamp(
            f"detection_timestamp {format_utc(detection_timestamp)} is beyond "
            f"the {clock_skew_seconds}s clock-skew horizon"
        )
    ref = incident_ref or f"inc-{uuid.uuid4().hex[:12]}"
    report = empty_report(ref, now, created_by)
    elements = dict(report.elements)
    anchor = ElementState(value=Timestamp(at=detection_timestamp), set_by=created_by, set_at=report.created_at)
    source = ElementState(value=Text(text=detection_source), set_by=created_by, set_at=report.created_at)
    elements[ElementKey.DETECTION_TIMESTAMP] = anchor
    elements[ElementKey.DETECTION_SOURCE] = source
    return replace(report, elements=elements)


def set_element(
    report: IncidentReport,
    key: str | ElementKey,
    value: ElementValue,
    actor: str,
    at: datetime,
) -> tuple[IncidentReport, Revision]:
    """Populate one slot; emits the revision carrying prior and new state digests."""
    key = coerce_key(key)
    expected = kind_of(key)
    if getattr(value, "kind", None) is not expected:
        actual = getattr(getattr(value, "kind", None), "value", type(value).__name__)
        raise KindMismatch(f"{key.value} takes {expected.value}, got {actual}")
    if value.is_empty():
        raise EmptyValue(f"{key.value} cannot be populated with an empty value")
    at = parse_utc(at)
    prior = report.elements[key]
    new_state = ElementState(value=value, set_by=actor, set_at=at)
    revision = Revision(
        key=key.value,
        actor=actor,
        at=at,
        before=state_digest(prior),
        after=state_digest(new_state),
        payload=state_to_json(new_state),
    )
    elements = dict(report.elements)
    elements[key] = new_state
    return replace(report, elements=elements, revision_count=report.revision_count + 1), revision


def clear_element(
    report: IncidentReport,
    key: str | ElementKey,
    actor: str,
    at: datetime,
) -> tuple[IncidentReport, Revision]:
    """Return a slot to Unknown; clears are never silent."""
    key = coerce_key(key)
    prior = report.elements[key]
    if not prior.populated:
        raise AlreadyUnknown(f"{key.value} is already unknown")
    at = parse_utc(at)
    revision = Revision(
        key=key.value,
        actor=actor,
        at=at,
        before=state_digest(prior),
        after=state_digest(UNKNOWN),
        payload=state_to_json(UNKNOWN),
    )
    elements = dict(report.elements)
    elements[key] = UNKNOWN
    return replace(report, elements=elements, revision_count=report.revision_count + 1), revision


@dataclass(frozen=True)
class Completeness:
    fraction: float
    populated_count: int
    unknown_keys: list[ElementKey]


def completeness(report: IncidentReport) -> Completeness:
    """Populated count over 25, plus the Unknown keys in canonical order."""
    unknown = report.unknown_keys()
    populated = len(ALL_KEYS) - len(unknown)
    return Completeness(fraction=populated / len(ALL_KEYS), populated_count=populated, unknown_keys=unknown)


# -- validation ---------------------------------------------------------------

@dataclass(frozen=True)
class PriorityScale:
    """Site risk-matrix bounds; risk matrices are site-specific by design."""

    bands: frozenset[PriorityBand] = frozenset(PriorityBand)
    score_min: int = 1
    score_max: int = 25


DEFAULT_PRIORITY_SCALE = PriorityScale()


@dataclass(frozen=True)
class Violation:
    code: str
    key: ElementKey | None
    message: str
    informational: bool = False

    def to_json(self) -> dict[str, Any]:
        return {
            "code": self.code,
            "key": self.key.value if self.key else None,
            "message": self.message,
            "informational": self.informational,
        }


def validate(report: IncidentReport, scale: PriorityScale = DEFAULT_PRIORITY_SCALE) -> list[Violation]:
    """Scan a report for record-level rule breaches.

    Violations are data, not failures: a report with violations still
    exists, it is just not clean. Informational notes (timeline events that
    predate detection, which legitimately happens for attacks with a
    preparation phase) are flagged but do not count as violations.
    """
    issues: list[Violation] = []

    for key in ALL_KEYS:
        state = report.elements.get(key)
        if state is None:
            issues.append(Violation("missing_element_slot", key, f"{key.value} slot absent from element map"))
            continue
        if not state.populated:
            continue

        if state.value.kind is not kind_of(key):
            issues.append(Violation(
                "kind_violation", key,
                f"{key.value} holds {state.value.kind.value}, registry requires {kind_of(key).value}"))
        if state.value.is_empty():
            issues.append(Violation("empty_populated_value", key, f"{key.value} is populated but empty"))
        if state.set_at is None or state.set_at.tzinfo is None:
            issues.append(Violation("non_utc_timestamp", key, f"{key.value} provenance timestamp is not UTC"))
        elif state.set_at.utcoffset().total_seconds() != 0 or state.set_at.microsecond != 0:
            issues.append(Violation("non_utc_timestamp", key,
                                    f"{key.value} provenance timestamp is not UTC second precision"))

        value = state.value
        if isinstance(value, Timestamp):
            if value.at.tzinfo is None or value.at.utcoffset().total_seconds() != 0 or value.at.microsecond != 0:
                issues.append(Violation("non_utc_timestamp", key,
                                        f"{key.value} is not stored as a UTC instant at second precision"))
        elif isinstance(value, PriorityRating):
            if value.band not in scale.bands:
                issues.append(Violation("priority_scale_violation", key,
                                        f"band {value.band.value!r} is outside the configured scale"))
            if not (scale.score_min <= value.score <= scale.score_max):
                issues.append(Violation(
                    "priority_scale_violation", key,
                    f"score {value.score} outside [{scale.score_min}, {scale.score_max}]"))
        elif isinstance(value, EventList):
            issues.extend(_check_timeline(key, value, report))
        elif isinstance(value, NotificationLedger):
            for entry in value.entries:
                if entry.status in (NotificationStatus.NOTIFIED, NotificationStatus.ACKNOWLEDGED) and entry.at is None:
                    issues.append(Violation(
                        "missing_notification_time", key,
                        f"entry for {entry.party!r} is {entry.status.value} without a timestamp"))

    return issues


def _check_timeline(key: ElementKey, value: EventList, report: IncidentReport) -> list[Violation]:
    issues: list[Violation] = []
    ordinals = [e.ordinal for e in value.events]
    if any(b <= a for a, b in zip(ordinals, ordinals[1:])):
        issues.append(Violation("ordinal_order_violation", key,
                                f"ordinals must be strictly increasing, got {ordinals}"))
    timed = [e for e in value.events if e.at is not None]
    if any(b.at < a.at for a, b in zip(timed, timed[1:])):
        issues.append(Violation("timeline_order_violation", key,
                                "timestamps must be non-decreasing in ordinal order"))

    detection = report.elements.get(ElementKey.DETECTION_TIMESTAMP)
    if detection is not None and detection.populated and isinstance(detection.value, Timestamp):
        early = [e.ordinal for e in timed if e.at < detection.value.at]
        if early:
            issues.append(Violation(
                "events_predate_detection", key,
                f"events {early} predate the detection timestamp (expected for attacks with preparation phases)",
                informational=True))
    return issues


def hard_violations(issues: Iterable[Violation]) -> list[Violation]:
    return [v for v in issues if not v.informational]


# -- replay -------------------------------------------------------------------

def apply_revision(report: IncidentReport, revision: Revision) -> IncidentReport:
    """Fold one revision into a snapshot (element payloads and phase markers)."""
    if revision.is_element:
        key = coerce_key(revision.key)
        elements = dict(report.elements)
        elements[key] = state_from_json(revision.payload)
        return replace(report, elements=elements, revision_count=report.revision_count + 1)
    if revision.key == PHASE_MARKER:
        return replace(report, phase=Phase(revision.payload["phase"]))
    # Deadline and evidence records carry no report-state change.
    return report


def fold_revisions(base: IncidentReport, revisions: Iterable[Revision]) -> IncidentReport:
    """Replay a revision sequence; deterministic for any fixed base and sequence."""
    report = base
    for revision in revisions:
        report = apply_revision(report, revision)
    return report


def report_state_json(report: IncidentReport) -> dict[str, Any]:
    """Element map in canonical key order (stable for export and digests)."""
    return {k.value: state_to_json(report.elements[k]) for k in ALL_KEYS}


def states_equal(a: IncidentReport, b: IncidentReport) -> bool:
    """Field-by-field equality over all 25 elements plus phase and counters."""
    return (
        a.incident_ref == b.incident_ref
        and a.phase == b.phase
        and a.created_at == b.created_at
        and a.revision_count == b.revision_count
        and report_state_json(a) == report_state_json(b)
    )


def sort_keys_canonically(keys: Iterable[ElementKey]) -> list[ElementKey]:
    return sorted(keys, key=registry_index)
