"""Activation trigger and incident phase machine.

The engine never computes severity itself; a host framework (or a human)
escalates an event with a severity figure, and activation fires when that
figure meets the configured threshold (inclusive, so there is no dead band
at the boundary). Phases follow the five-phase incident-management loop;
the reporting layer stays active through detection, assessment and
response, and a closed incident is terminal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime
from enum import Enum
from typing import TYPE_CHECKING, Iterable

from .errors import InvalidTransition, NegativeSeverity

if TYPE_CHECKING:
    from .model.registry import ElementKey
    from .model.report import IncidentReport


class Phase(str, Enum):
    DRAFT = "draft"
    DETECTION_REPORTING = "detection_reporting"
    ASSESSMENT_DECISION = "assessment_decision"
    RESPONSE = "response"
    CLOSED = "closed"


class Trigger(str, Enum):
    ACTIVATED = "activated"
    ASSESSMENT_STARTED = "assessment_started"
    RESPONSE_STARTED = "response_started"
    RE_TRIAGE = "re_triage"
    SAFE_STATE_REACHED = "safe_state_reached"


# (phase, trigger) -> next phase; anything absent is invalid. Identity is
# never silently returned.
TRANSITIONS: dict[tuple[Phase, Trigger], Phase] = {
    (Phase.DRAFT, Trigger.ACTIVATED): Phase.DETECTION_REPORTING,
    (Phase.DETECTION_REPORTING, Trigger.ASSESSMENT_STARTED): Phase.ASSESSMENT_DECISION,
    (Phase.ASSESSMENT_DECISION, Trigger.RESPONSE_STARTED): Phase.RESPONSE,
    (Phase.ASSESSMENT_DECISION, Trigger.RE_TRIAGE): Phase.DETECTION_REPORTING,
    (Phase.RESPONSE, Trigger.SAFE_STATE_REACHED): Phase.CLOSED,
}


def transition(phase: Phase, trigger: Trigger | str) -> Phase:
    """Next phase for a trigger, or InvalidTransition for any undefined pair."""
    try:
        trigger = Trigger(trigger)
    except ValueError:
        raise InvalidTransition(f"unknown lifecycle trigger: {trigger!r}") from None
    nxt = TRANSITIONS.get((phase, trigger))
    if nxt is None:
        raise InvalidTransition(f"no transition for trigger {trigger.value!r} in phase {phase.value!r}")
    return nxt


@dataclass(frozen=True)
class ActivationEvent:
    """Escalation signal from a host framework."""

    severity: float
    threshold: float
    source_framework: str
    emitted_at: datetime


@dataclass(frozen=True)
class ActivationDecision:
    """Outcome with the inputs recorded verbatim for audit."""

    activate: bool
    severity: float
    threshold: float
    source_framework: str
    emitted_at: datetime

    def to_json(self) -> dict:
        from .model.values import format_utc

        return {
            "decision": "activate" if self.activate else "no_action",
            "severity": self.severity,
            "threshold": self.threshold,
            "source_framework": self.source_framework,
            "emitted_at": format_utc(self.emitted_at),
        }


def evaluate_activation(event: ActivationEvent) -> ActivationDecision:
    """Activate iff severity meets the threshold (inclusive boundary)."""
    for name, v in (("severity", event.severity), ("threshold", event.threshold)):
        if not math.isfinite(v) or v < 0:
            raise NegativeSeverity(f"{name} must be finite and non-negative, got {v!r}")
    return ActivationDecision(
        activate=event.severity >= event.threshold,
        severity=event.severity,
        threshold=event.threshold,
        source_framework=event.source_framework,
        emitted_at=event.emitted_at,
    )


@dataclass(frozen=True)
class ReadinessResult:
    """Whether the report is complete enough to hand over."""

    shareable: bool
    missing_mandatory: list["ElementKey"]


# Keys a report must carry before it counts as shareable; covers the
# regulator-enumerated minimum attributes plus the chronology anchors.
# Deployments override this in the engine configuration.
def default_mandatory_set() -> set["ElementKey"]:
    from .model.registry import ElementKey as K

    return {
        K.DETECTION_TIMESTAMP,
        K.DETECTION_SOURCE,
        K.INCIDENT_TYPE,
        K.ATTACK_VECTOR,
        K.INCIDENT_DESCRIPTION,
        K.AFFECTED_ASSETS_SYSTEMS,
        K.OPERATIONAL_IMPACT,
        K.INTERNAL_EXTERNAL_REPORTING,
    }


def readiness(report: "IncidentReport", mandatory_set: Iterable["ElementKey"]) -> ReadinessResult:
    """Mandatory keys still Unknown, in canonical order; shareable iff none."""
    from .model.registry import coerce_key
    from .model.report import sort_keys_canonically

    mandatory = {coerce_key(k) for k in mandatory_set}
    missing = sort_keys_canonically(k for k in mandatory if not report.elements[k].populated)
    return ReadinessResult(shareable=not missing, missing_mandatory=missing)
