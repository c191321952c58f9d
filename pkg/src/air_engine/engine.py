"""Service layer tying the report model, lifecycle, views, crosswalk,
clocks and store together behind one object.

Both the HTTP API and the CLI drive this class, so their effects are
identical: the same revision chains result from either surface. All writes
funnel through the store's per-incident lock; reads never write.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime
from importlib import resources
from typing import Any

from . import crosswalk, lifecycle, regclock, views
from .config import EngineConfig
from .errors import EmptyDetectionSource, InvalidValue, StaleWrite, UnknownIncident, UnknownRule
from .model.registry import (
    ALL_KEYS,
    GROUP_LABELS,
    ElementKey,
    coerce_key,
    registry,
)
from .model.report import (
    Completeness,
    IncidentReport,
    Revision,
    Violation,
    clear_element,
    completeness,
    create_report,
    set_element,
    validate,
)
from .model.values import (
    ElementValue,
    EventList,
    TimelineEvent,
    parse_utc,
    utc_now,
    value_from_json,
)
from .store import EvidenceStore, IncidentState
from .views import RedactedView


@dataclass(frozen=True)
class WriteResult:
    seq: int
    revision_count: int


@dataclass(frozen=True)
class DeadlineView:
    deadline: regclock.Deadline
    status: regclock.DeadlineStatus
    remaining_seconds: int

    def to_json(self) -> dict[str, Any]:
        payload = self.deadline.to_json()
        payload["status"] = self.status.value
        payload["remaining_seconds"] = self.remaining_seconds
        return payload


class Engine:
    def __init__(self, config: EngineConfig):
        self.config = config
        self.store = EvidenceStore(config.data_dir)

    # -- reads ----------------------------------------------------------------

    def state(self, incident_ref: str) -> IncidentState:
        return self.store.load(incident_ref)

    def report(self, incident_ref: str) -> IncidentReport:
        return self.store.load(incident_ref).report

    def list_incidents(self) -> list[str]:
        return self.store.list_incidents()

    def completeness(self, incident_ref: str) -> Completeness:
        return completeness(self.report(incident_ref))

    def validate(self, incident_ref: str) -> list[Violation]:
        return validate(self.report(incident_ref), scale=self.config.priority_scale)

    def readiness(self, incident_ref: str) -> lifecycle.ReadinessResult:
        return lifecycle.readiness(self.report(incident_ref), self.config.mandatory_set)

    def render_view(self, incident_ref: str, audience: str) -> RedactedView:
        return views.render_view(self.report(incident_ref), audience, self.config.audience_matrix)

    def audiences(self) -> list[str]:
        return self.config.audience_matrix.audiences()

    def coverage(self, incident_ref: str, standard: str,
                 now: datetime | None = None) -> crosswalk.CoverageReport:
        state = self.store.load(incident_ref)
        now = now or utc_now()
        met = {rule_id for rule_id, d in state.deadlines.items()
               if regclock.status(d, now) is regclock.DeadlineStatus.MET}
        return crosswalk.coverage_report(state.report, standard, met_timing_rules=met)

    def deadlines(self, incident_ref: str, now: datetime | None = None) -> list[DeadlineView]:
        state = self.store.load(incident_ref)
        now = now or utc_now()
        return [
            DeadlineView(deadline=d, status=regclock.status(d, now),
                         remaining_seconds=regclock.remaining_seconds(d, now))
            for _, d in sorted(state.deadlines.items())
        ]

    def export_document(self, incident_ref: str) -> dict[str, Any]:
        return self.store.export_document(incident_ref)

    def export_text(self, incident_ref: str) -> str:
        return self.store.export_text(incident_ref)

    @staticmethod
    def registry_json() -> list[dict[str, Any]]:
        return [
            {
                "key": d.key.value,
                "group": d.group.value,
                "group_label": GROUP_LABELS[d.group],
                "kind": d.kind.value,
                "question_tags": sorted(t.value for t in d.question_tags),
                "label": d.label,
                "aliases": list(d.aliases),
            }
            for d in registry()
        ]

    # -- writes ---------------------------------------------------------------

    def create_incident(
        self,
        detection_timestamp: datetime | str,
        detection_source: str,
        actor: str,
        incident_ref: str | None = None,
        now: datetime | None = None,
        activate: bool = False,
    ) -> IncidentReport:
        report = create_report(
            parse_utc(detection_timestamp),
            detection_source,
            actor,
            incident_ref=incident_ref,
            now=now,
            clock_skew_seconds=self.config.clock_skew_seconds,
        )
        stored = self.store.create_incident(report)
        if activate:
            stored = self.transition(stored.incident_ref, lifecycle.Trigger.ACTIVATED, actor,
                                     at=now)
        return stored

    def activate(
        self,
        event: lifecycle.ActivationEvent,
        detection_timestamp: datetime | str | None = None,
        detection_source: str | None = None,
        actor: str = "host-framework",
        seed_elements: dict[str, Any] | None = None,
        incident_ref: str | None = None,
        now: datetime | None = None,
    ) -> tuple[lifecycle.ActivationDecision, IncidentReport | None]:
        """Host-framework escalation: create and activate a report when the
        severity meets the configured threshold, otherwise record nothing."""
        decision = lifecycle.evaluate_activation(event)
        if not decision.activate:
            return decision, None
        if detection_source is None:
            raise EmptyDetectionSource("activation requires a detection_source")
        if detection_timestamp is None:
            raise InvalidValue("activation requires a detection_timestamp")
        report = self.create_incident(detection_timestamp, detection_source, actor,
                                      incident_ref=incident_ref, now=now, activate=True)
        if seed_elements:
            for key, payload in seed_elements.items():
                self.set_element(report.incident_ref, key, payload, actor,
                                 at=now or utc_now())
            report = self.report(report.incident_ref)
        return decision, report

    def set_element(
        self,
        incident_ref: str,
        key: str | ElementKey,
        value: Any,
        actor: str,
        at: datetime | str | None = None,
        expected_revision_count: int | None = None,
    ) -> WriteResult:
        """Populate one element; value may be a typed value or its wire object."""
        parsed: ElementValue = value if hasattr(value, "kind") else value_from_json(value)
        at = parse_utc(at) if at is not None else utc_now()
        with self.store.lock(incident_ref):
            report = self.report(incident_ref)
            self._check_not_stale(report, expected_revision_count)
            new_report, revision = set_element(report, key, parsed, actor, at)
            seq = self.store.append(incident_ref, revision)
        return WriteResult(seq=seq, revision_count=new_report.revision_count)

    def clear_element(
        self,
        incident_ref: str,
        key: str | ElementKey,
        actor: str,
        at: datetime | str | None = None,
        expected_revision_count: int | None = None,
    ) -> WriteResult:
        at = parse_utc(at) if at is not None else utc_now()
        with self.store.lock(incident_ref):
            report = self.report(incident_ref)
            self._check_not_stale(report, expected_revision_count)
            new_report, revision = clear_element(report, key, actor, at)
            seq = self.store.append(incident_ref, revision)
        return WriteResult(seq=seq, revision_count=new_report.revision_count)

    def add_timeline_event(
        self,
        incident_ref: str,
        description: str,
        event_at: datetime | str | None = None,
        actor: str = "coordinator",
        at: datetime | str | None = None,
    ) -> WriteResult:
        """Insert an event into the running timeline.

        Events keep timestamp order where timestamps exist; untimed events
        and ties stay in insertion order. Ordinals are renumbered so the
        list invariant holds by construction.
        """
        event_time = parse_utc(event_at) if event_at is not None else None
        with self.store.lock(incident_ref):
            report = self.report(incident_ref)
            current = report.elements[ElementKey.TIMELINE_OF_EVENTS]
            events = list(current.value.events) if current.populated else []
            index = len(events)
            if event_time is not None:
                for i, existing in enumerate(events):
                    if existing.at is not None and existing.at > event_time:
                        index = i
                        break
            events.insert(index, TimelineEvent(ordinal=1, description=description, at=event_time))
            renumbered = tuple(
                TimelineEvent(ordinal=i + 1, description=e.description, at=e.at)
                for i, e in enumerate(events)
            )
            return self.set_element(incident_ref, ElementKey.TIMELINE_OF_EVENTS,
                                    EventList(events=renumbered), actor, at=at)

    def add_evidence(
        self,
        incident_ref: str,
        description: str,
        artefact: bytes,
        custodian: str,
        at: datetime | str | None = None,
    ):
        at = parse_utc(at) if at is not None else utc_now()
        record, _ = self.store.add_evidence(incident_ref, description, artefact, custodian, at)
        return record

    def transition(
        self,
        incident_ref: str,
        trigger: lifecycle.Trigger | str,
        actor: str,
        at: datetime | str | None = None,
    ) -> IncidentReport:
        at = parse_utc(at) if at is not None else utc_now()
        with self.store.lock(incident_ref):
            report = self.report(incident_ref)
            new_phase = lifecycle.transition(report.phase, trigger)
            self.store.record_phase(incident_ref, report.phase, new_phase,
                                    lifecycle.Trigger(trigger).value, actor, at)
        return self.report(incident_ref)

    def arm_deadline(
        self,
        incident_ref: str,
        rule_id: str,
        start_at: datetime | str,
        actor: str,
    ) -> regclock.Deadline:
        rule = self.config.trigger_rules.get(rule_id)
        if rule is None:
            raise UnknownRule(f"no configured trigger rule {rule_id!r} "
                              f"(configured: {sorted(self.config.trigger_rules)})")
        return self.store.arm_deadline(incident_ref, rule, parse_utc(start_at), actor)

    def record_notification(
        self,
        incident_ref: str,
        rule_id: str,
        at: datetime | str,
        actor: str,
    ) -> regclock.Deadline:
        return self.store.record_notification(incident_ref, rule_id, parse_utc(at), actor)

    def import_document(self, doc: dict[str, Any]) -> IncidentReport:
        return self.store.import_document(doc)

    # -- fixtures ---------------------------------------------------------------

    def load_fixture(self, name: str) -> IncidentReport:
        """Seed the canonical demonstration incident from its data file."""
        if name != "ukraine2015":
            raise UnknownIncident(f"no fixture named {name!r} (available: ukraine2015)")
        data = json.loads(
            resources.files("air_engine.data").joinpath("ukraine2015.json").read_text("utf-8"))
        actor = data["compiled_by"]
        compiled_at = parse_utc(data["compiled_at"])
        report = self.create_incident(
            data["detection"]["timestamp"],
            data["detection"]["source"],
            actor,
            incident_ref=data["incident_ref"],
            now=compiled_at,
            activate=True,
        )
        ref = report.incident_ref
        ordered = sorted(data["elements"], key=lambda k: ALL_KEYS.index(coerce_key(k)))
        for key in ordered:
            self.set_element(ref, key, data["elements"][key], actor, at=compiled_at)
        for description in data["evidence"]:
            # Retrospective record: no artefact bytes survive in the public
            # sources, so each entry carries a content-addressed placeholder.
            self.add_evidence(ref, description, description.encode("utf-8"), actor,
                              at=compiled_at)
        return self.report(ref)

    # -- helpers ----------------------------------------------------------------

    @staticmethod
    def _check_not_stale(report: IncidentReport, expected: int | None) -> None:
        if expected is not None and expected != report.revision_count:
            raise StaleWrite(
                f"write based on revision_count {expected}, "
                f"store is at {report.revision_count}; re-fetch and retry")
