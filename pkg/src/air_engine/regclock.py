"""Regulatory notification clocks.

A trigger rule (e.g. the one-hour rule for reportable incidents, clocked
from the determination) arms a deadline; the deadline's status is computed
on read from the notification record and the current instant, so no
background ticker is needed. Arithmetic is exact integer seconds:
``due_at = start_at + window_seconds``, and a notification landing exactly
on the due instant counts as met ("within one hour" includes the boundary).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from datetime import datetime, timedelta
from enum import Enum
from typing import Any

from .errors import AlreadyRecorded, InvalidValue
from .model.values import format_utc, parse_utc


class ClockBasis(str, Enum):
    DETERMINATION = "determination"
    DETECTION = "detection"


class DeadlineStatus(str, Enum):
    PENDING = "pending"
    MET = "met"
    LATE = "late"
    OVERDUE = "overdue"


@dataclass(frozen=True)
class RegTriggerRule:
    """One notification obligation: window length and which event starts it."""

    rule_id: str
    authority: str
    window_seconds: int
    basis: ClockBasis = ClockBasis.DETERMINATION

    def __post_init__(self):
        if not isinstance(self.window_seconds, int) or self.window_seconds <= 0:
            raise InvalidValue(f"window_seconds must be a positive integer, got {self.window_seconds!r}")

    def to_json(self) -> dict[str, Any]:
        return {
            "rule_id": self.rule_id,
            "authority": self.authority,
            "window_seconds": self.window_seconds,
            "basis": self.basis.value,
        }

    @staticmethod
    def from_json(obj: dict[str, Any]) -> "RegTriggerRule":
        return RegTriggerRule(
            rule_id=obj["rule_id"],
            authority=obj["authority"],
            window_seconds=obj["window_seconds"],
            basis=ClockBasis(obj.get("basis", "determination")),
        )


# The one rule with a regulator-fixed window that ships by default; further
# rules are deployment configuration.
NERC_ONE_HOUR = RegTriggerRule(
    rule_id="nerc-1h",
    authority="E-ISAC/NCCIC",
    window_seconds=3600,
    basis=ClockBasis.DETERMINATION,
)


@dataclass(frozen=True)
class Deadline:
    """An armed clock; immutable, notification recorded by replacement."""

    rule_id: str
    authority: str
    window_seconds: int
    basis: ClockBasis
    start_at: datetime
    due_at: datetime
    notified_at: datetime | None = None

    def to_json(self) -> dict[str, Any]:
        return {
            "rule_id": self.rule_id,
            "authority": self.authority,
            "window_seconds": self.window_seconds,
            "basis": self.basis.value,
            "start_at": format_utc(self.start_at),
            "due_at": format_utc(self.due_at),
            "notified_at": format_utc(self.notified_at) if self.notified_at else None,
        }

    @staticmethod
    def from_json(obj: dict[str, Any]) -> "Deadline":
        return Deadline(
            rule_id=obj["rule_id"],
            authority=obj["authority"],
            window_seconds=obj["window_seconds"],
            basis=ClockBasis(obj.get("basis", "determination")),
            start_at=parse_utc(obj["start_at"]),
            due_at=parse_utc(obj["due_at"]),
            notified_at=parse_utc(obj["notified_at"]) if obj.get("notified_at") else None,
        )


def arm(rule: RegTriggerRule, start_at: datetime) -> Deadline:
    """Start a rule's clock; due instant is exactly start plus window."""
    start_at = parse_utc(start_at)
    return Deadline(
        rule_id=rule.rule_id,
        authority=rule.authority,
        window_seconds=rule.window_seconds,
        basis=rule.basis,
        start_at=start_at,
        due_at=start_at + timedelta(seconds=rule.window_seconds),
    )


def status(deadline: Deadline, now: datetime) -> DeadlineStatus:
    """Pure status evaluation; Pending holds up to and including the due instant."""
    if deadline.notified_at is not None:
        return DeadlineStatus.MET if deadline.notified_at <= deadline.due_at else DeadlineStatus.LATE
    return DeadlineStatus.PENDING if parse_utc(now) <= deadline.due_at else DeadlineStatus.OVERDUE


def record_notification(deadline: Deadline, at: datetime) -> Deadline:
    """Fix the notification instant; refuses to overwrite an existing record.

    The matching reporting-ledger entry is the caller's to update — the
    clock never edits report elements behind the coordinator's back.
    """
    if deadline.notified_at is not None:
        raise AlreadyRecorded(
            f"rule {deadline.rule_id!r} already has a notification at "
            f"{format_utc(deadline.notified_at)}")
    return replace(deadline, notified_at=parse_utc(at))


def remaining_seconds(deadline: Deadline, now: datetime) -> int:
    """Signed seconds until due (negative once past); display helper."""
    return int((deadline.due_at - parse_utc(now)).total_seconds())
