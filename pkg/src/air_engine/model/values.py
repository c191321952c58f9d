"""Element value types.

Each report element holds exactly one kind of value. The ten kinds form a
tagged union; every kind serializes to a ``{"kind": ..., ...}`` JSON object
and parses back losslessly. All timestamps are UTC at second precision and
serialize as RFC 3339 with a ``Z`` suffix.

Shape rules (field types, enum membership, non-negative counters) are
enforced at construction; cross-field record rules (ordinal order, notified
entries carrying a time) are checked by ``report.validate`` so that broken
records can still be represented and reported on.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Any, ClassVar, Union

from ..errors import InvalidValue

UTC_FORMAT = "%Y-%m-%dT%H:%M:%SZ"


def parse_utc(value: Union[str, datetime]) -> datetime:
    """Parse an RFC 3339 string or datetime into a UTC instant at second precision."""
    if isinstance(value, datetime):
        dt = value
    elif isinstance(value, str):
        text = value.strip()
        if text.endswith(("Z", "z")):
            text = text[:-1] + "+00:00"
        try:
            dt = datetime.fromisoformat(text)
        except ValueError as exc:
            raise InvalidValue(f"not a valid timestamp: {value!r}") from exc
    else:
        raise InvalidValue(f"not a valid timestamp: {value!r}")
    if dt.tzinfo is None:
        raise InvalidValue(f"timestamp must carry a timezone: {value!r}")
    return dt.astimezone(timezone.utc).replace(microsecond=0)


def format_utc(dt: datetime) -> str:
    """Render a UTC instant as RFC 3339 with Z suffix."""
    return dt.astimezone(timezone.utc).strftime(UTC_FORMAT)


def utc_now() -> datetime:
    return datetime.now(timezone.utc).replace(microsecond=0)


class ValueKind(str, Enum):
    """Tag identifying which value type an element accepts."""

    TEXT = "text"
    PRIORITY_RATING = "priority_rating"
    CONTACT = "contact"
    TIMESTAMP = "timestamp"
    EVENT_LIST = "event_list"
    ITEM_LIST = "item_list"
    EVIDENCE_LIST = "evidence_list"
    DURATION = "duration"
    RTO_PROGRESS = "rto_progress"
    NOTIFICATION_LEDGER = "notification_ledger"


class PriorityBand(str, Enum):
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"
    CRITICAL = "critical"


class Direction(str, Enum):
    INTERNAL = "internal"
    EXTERNAL = "external"


class NotificationStatus(str, Enum):
    PENDING = "pending"
    NOTIFIED = "notified"
    ACKNOWLEDGED = "acknowledged"


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise InvalidValue(message)


@dataclass(frozen=True)
class Text:
    kind: ClassVar[ValueKind] = ValueKind.TEXT
    text: str

    def __post_init__(self):
        _require(isinstance(self.text, str), "text must be a string")

    def is_empty(self) -> bool:
        return not self.text.strip()


@dataclass(frozen=True)
class PriorityRating:
    """Plant risk-matrix result: site label plus band and numeric score."""

    kind: ClassVar[ValueKind] = ValueKind.PRIORITY_RATING
    label: str
    band: PriorityBand
    score: int

    def __post_init__(self):
        _require(isinstance(self.label, str) and bool(self.label.strip()), "priority label must be non-empty")
        _require(isinstance(self.band, PriorityBand), "band must be a PriorityBand")
        _require(isinstance(self.score, int) and not isinstance(self.score, bool), "score must be an integer")

    def is_empty(self) -> bool:
        return False


@dataclass(frozen=True)
class Contact:
    kind: ClassVar[ValueKind] = ValueKind.CONTACT
    name: str
    role: str
    channel: str

    def __post_init__(self):
        for f in (self.name, self.role, self.channel):
            _require(isinstance(f, str), "contact fields must be strings")

    def is_empty(self) -> bool:
        return not self.name.strip()


@dataclass(frozen=True)
class Timestamp:
    kind: ClassVar[ValueKind] = ValueKind.TIMESTAMP
    at: datetime

    def __post_init__(self):
        _require(isinstance(self.at, datetime) and self.at.tzinfo is not None, "timestamp must be timezone-aware")
        object.__setattr__(self, "at", self.at.astimezone(timezone.utc).replace(microsecond=0))

    def is_empty(self) -> bool:
        return False


@dataclass(frozen=True)
class TimelineEvent:
    """One ordered observation or action; the instant is optional when only order is known."""

    ordinal: int
    description: str
    at: datetime | None = None

    def __post_init__(self):
        _require(isinstance(self.ordinal, int) and not isinstance(self.ordinal, bool) and self.ordinal > 0,
                 "ordinal must be a positive integer")
        _require(isinstance(self.description, str) and bool(self.description.strip()),
                 "event description must be non-empty")
        if self.at is not None:
            _require(isinstance(self.at, datetime) and self.at.tzinfo is not None,
                     "event timestamp must be timezone-aware")
            object.__setattr__(self, "at", self.at.astimezone(timezone.utc).replace(microsecond=0))


@dataclass(frozen=True)
class EventList:
    kind: ClassVar[ValueKind] = ValueKind.EVENT_LIST
    events: tuple[TimelineEvent, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        _require(all(isinstance(e, TimelineEvent) for e in self.events), "events must be TimelineEvent values")

    def is_empty(self) -> bool:
        return not self.events


@dataclass(frozen=True)
class ItemList:
    kind: ClassVar[ValueKind] = ValueKind.ITEM_LIST
    items: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        _require(all(isinstance(i, str) and i.strip() for i in self.items), "items must be non-empty strings")

    def is_empty(self) -> bool:
        return not self.items


@dataclass(frozen=True)
class EvidenceList:
    kind: ClassVar[ValueKind] = ValueKind.EVIDENCE_LIST
    evidence_ids: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "evidence_ids", tuple(self.evidence_ids))
        _require(all(isinstance(i, str) and i.strip() for i in self.evidence_ids),
                 "evidence ids must be non-empty strings")

    def is_empty(self) -> bool:
        return not self.evidence_ids


@dataclass(frozen=True)
class Duration:
    kind: ClassVar[ValueKind] = ValueKind.DURATION
    seconds: int

    def __post_init__(self):
        _require(isinstance(self.seconds, int) and not isinstance(self.seconds, bool) and self.seconds >= 0,
                 "duration seconds must be a non-negative integer")

    def is_empty(self) -> bool:
        return False


@dataclass(frozen=True)
class RtoProgress:
    """Progress against a predefined recovery time objective."""

    kind: ClassVar[ValueKind] = ValueKind.RTO_PROGRESS
    target_seconds: int
    elapsed_seconds: int
    on_track: bool

    def __post_init__(self):
        for name, v in (("target_seconds", self.target_seconds), ("elapsed_seconds", self.elapsed_seconds)):
            _require(isinstance(v, int) and not isinstance(v, bool) and v >= 0,
                     f"{name} must be a non-negative integer")
        _require(isinstance(self.on_track, bool), "on_track must be a boolean")

    def is_empty(self) -> bool:
        return False


@dataclass(frozen=True)
class NotificationEntry:
    """Reporting status for one stakeholder; the instant stays null while pending."""

    party: str
    direction: Direction
    status: NotificationStatus
    at: datetime | None = None

    def __post_init__(self):
        _require(isinstance(self.party, str) and bool(self.party.strip()), "party must be non-empty")
        _require(isinstance(self.direction, Direction), "direction must be a Direction")
        _require(isinstance(self.status, NotificationStatus), "status must be a NotificationStatus")
        if self.at is not None:
            _require(isinstance(self.at, datetime) and self.at.tzinfo is not None,
                     "notification timestamp must be timezone-aware")
            object.__setattr__(self, "at", self.at.astimezone(timezone.utc).replace(microsecond=0))


@dataclass(frozen=True)
class NotificationLedger:
    kind: ClassVar[ValueKind] = ValueKind.NOTIFICATION_LEDGER
    entries: tuple[NotificationEntry, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        _require(all(isinstance(e, NotificationEntry) for e in self.entries),
                 "entries must be NotificationEntry values")

    def is_empty(self) -> bool:
        return not self.entries


ElementValue = Union[
    Text, PriorityRating, Contact, Timestamp, EventList,
    ItemList, EvidenceList, Duration, RtoProgress, NotificationLedger,
]

_VALUE_CLASSES: dict[ValueKind, type] = {
    ValueKind.TEXT: Text,
    ValueKind.PRIORITY_RATING: PriorityRating,
    ValueKind.CONTACT: Contact,
    ValueKind.TIMESTAMP: Timestamp,
    ValueKind.EVENT_LIST: EventList,
    ValueKind.ITEM_LIST: ItemList,
    ValueKind.EVIDENCE_LIST: EvidenceList,
    ValueKind.DURATION: Duration,
    ValueKind.RTO_PROGRESS: RtoProgress,
    ValueKind.NOTIFICATION_LEDGER: NotificationLedger,
}


def value_to_json(value: ElementValue) -> dict[str, Any]:
    """Serialize a value to its wire object."""
    kind = value.kind
    if isinstance(value, Text):
        return {"kind": kind.value, "text": value.text}
    if isinstance(value, PriorityRating):
        return {"kind": kind.value, "label": value.label, "band": value.band.value, "score": value.score}
    if isinstance(value, Contact):
        return {"kind": kind.value, "name": value.name, "role": value.role, "channel": value.channel}
    if isinstance(value, Timestamp):
        return {"kind": kind.value, "at": format_utc(value.at)}
    if isinstance(value, EventList):
        return {"kind": kind.value, "events": [
            {"ordinal": e.ordinal, "at": format_utc(e.at) if e.at else None, "description": e.description}
            for e in value.events
        ]}
    if isinstance(value, ItemList):
        return {"kind": kind.value, "items": list(value.items)}
    if isinstance(value, EvidenceList):
        return {"kind": kind.value, "evidence_ids": list(value.evidence_ids)}
    if isinstance(value, Duration):
        return {"kind": kind.value, "seconds": value.seconds}
    if isinstance(value, RtoProgress):
        return {"kind": kind.value, "target_seconds": value.target_seconds,
                "elapsed_seconds": value.elapsed_seconds, "on_track": value.on_track}
    if isinstance(value, NotificationLedger):
        return {"kind": kind.value, "entries": [
            {"party": e.party, "direction": e.direction.value, "status": e.status.value,
             "at": format_utc(e.at) if e.at else None}
            for e in value.entries
        ]}
    raise InvalidValue(f"unknown value type: {type(value).__name__}")


def _enum_member(enum_cls, raw, what: str):
    try:
        return enum_cls(raw)
    except ValueError as exc:
        raise InvalidValue(f"{what} must be one of {[m.value for m in enum_cls]}, got {raw!r}") from exc


def value_from_json(payload: Any) -> ElementValue:
    """Parse a wire object back into a value; raises InvalidValue on bad shape."""
    if not isinstance(payload, dict) or "kind" not in payload:
        raise InvalidValue("value payload must be an object with a 'kind' tag")
    kind = _enum_member(ValueKind, payload["kind"], "kind")
    try:
        if kind is ValueKind.TEXT:
            return Text(text=payload["text"])
        if kind is ValueKind.PRIORITY_RATING:
            return PriorityRating(label=payload["label"],
                                  band=_enum_member(PriorityBand, payload["band"], "band"),
                                  score=payload["score"])
        if kind is ValueKind.CONTACT:
            return Contact(name=payload["name"], role=payload.get("role", ""),
                           channel=payload.get("channel", ""))
        if kind is ValueKind.TIMESTAMP:
            return Timestamp(at=parse_utc(payload["at"]))
        if kind is ValueKind.EVENT_LIST:
            return EventList(events=tuple(
                TimelineEvent(ordinal=e["ordinal"],
                              description=e["description"],
                              at=parse_utc(e["at"]) if e.get("at") else None)
                for e in payload["events"]
            ))
        if kind is ValueKind.ITEM_LIST:
            return ItemList(items=tuple(payload["items"]))
        if kind is ValueKind.EVIDENCE_LIST:
            return EvidenceList(evidence_ids=tuple(payload["evidence_ids"]))
        if kind is ValueKind.DURATION:
            return Duration(seconds=payload["seconds"])
        if kind is ValueKind.RTO_PROGRESS:
            return RtoProgress(target_seconds=payload["target_seconds"],
                               elapsed_seconds=payload["elapsed_seconds"],
                               on_track=payload["on_track"])
        if kind is ValueKind.NOTIFICATION_LEDGER:
            return NotificationLedger(entries=tuple(
                NotificationEntry(party=e["party"],
                                  direction=_enum_member(Direction, e["direction"], "direction"),
                                  status=_enum_member(NotificationStatus, e["status"], "status"),
                                  at=parse_utc(e["at"]) if e.get("at") else None)
                for e in payload["entries"]
            ))
    except KeyError as exc:
        raise InvalidValue(f"value payload for kind {kind.value!r} misses field {exc.args[0]!r}") from exc
    except TypeError as exc:
        raise InvalidValue(f"malformed value payload for kind {kind.value!r}: {exc}") from exc
    raise InvalidValue(f"unhandled kind: {kind}")
