"""Canonical element registry.

Twenty-five reporting elements partitioned into seven groups. The set is
closed: keys, groups, value kinds and question tags are fixed at import
time and never extended at runtime. Deployment-specific extensions ride in
the export document's annotations side-channel, never in the element map.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from ..errors import UnknownKey
from .values import ValueKind


class ElementKey(str, Enum):
    INCIDENT_ID = "incident_id"
    INCIDENT_PRIORITY = "incident_priority"
    INCIDENT_REPORTER = "incident_reporter"
    INCIDENT_COORDINATOR = "incident_coordinator"
    DETECTION_TIMESTAMP = "detection_timestamp"
    DETECTION_SOURCE = "detection_source"
    TIMELINE_OF_EVENTS = "timeline_of_events"
    AFFECTED_ASSETS_SYSTEMS = "affected_assets_systems"
    AFFECTED_DEPENDENCIES = "affected_dependencies"
    INCIDENT_TYPE = "incident_type"
    ATTACK_VECTOR = "attack_vector"
    INCIDENT_DESCRIPTION = "incident_description"
    COLLECTED_EVIDENCE = "collected_evidence"
    SAFETY_IMPACT = "safety_impact"
    OPERATIONAL_IMPACT = "operational_impact"
    ENVIRONMENTAL_IMPACT = "environmental_impact"
    FINANCIAL_IMPACT = "financial_impact"
    ESTIMATED_TIME_TO_SAFE_RECOVERY = "estimated_time_to_safe_recovery"
    RTO_STATUS = "rto_status"
    PROCESS_RESPONSE_ACTIONS = "process_response_actions"
    OT_IT_NETWORK_RESPONSE_ACTIONS = "ot_it_network_response_actions"
    HSE_RESPONSE_ACTIONS = "hse_response_actions"
    REGULATORY_TRIGGER = "regulatory_trigger"
    REPORTING_CHANNELS_USED = "reporting_channels_used"
    INTERNAL_EXTERNAL_REPORTING = "internal_external_reporting"


class ElementGroup(str, Enum):
    IDENTIFICATION_TRIAGE = "identification_triage"
    CHRONOLOGY = "chronology"
    SCOPE = "scope"
    TECHNICAL_CHARACTERISTICS = "technical_characteristics"
    ESTIMATED_IMPACT = "estimated_impact"
    RESPONSES = "responses"
    COMMUNICATION_COMPLIANCE = "communication_compliance"


GROUP_LABELS: dict[ElementGroup, str] = {
    ElementGroup.IDENTIFICATION_TRIAGE: "Identification & Triage",
    ElementGroup.CHRONOLOGY: "Chronology",
    ElementGroup.SCOPE: "Scope",
    ElementGroup.TECHNICAL_CHARACTERISTICS: "Technical Characteristics",
    ElementGroup.ESTIMATED_IMPACT: "Estimated Impact",
    ElementGroup.RESPONSES: "Responses",
    ElementGroup.COMMUNICATION_COMPLIANCE: "Communication and Compliance",
}


class QuestionTag(str, Enum):
    WHO_INVOLVED = "who_involved"
    WHEN_OCCURRED = "when_occurred"
    WHERE_COMPROMISED = "where_compromised"
    HOW_UNFOLDED = "how_unfolded"
    WHAT_HAPPENED = "what_happened"
    ESTIMATED_IMPACTS = "estimated_impacts"
    NOTIFICATION = "notification"


@dataclass(frozen=True)
class ElementDescriptor:
    """Static registry row for one element."""

    key: ElementKey
    group: ElementGroup
    kind: ValueKind
    question_tags: frozenset[QuestionTag]
    label: str
    aliases: tuple[str, ...] = ()


def _d(key: ElementKey, group: ElementGroup, kind: ValueKind, tags: set[QuestionTag],
       label: str, aliases: tuple[str, ...] = ()) -> ElementDescriptor:
    return ElementDescriptor(key=key, group=group, kind=kind,
                             question_tags=frozenset(tags), label=label, aliases=aliases)


K, G, V, Q = ElementKey, ElementGroup, ValueKind, QuestionTag

# Order is canonical and fixed: groups in reporting-walk order, elements in
# authoring order within each group. Collected Evidence is the single
# element answering two questions.
_REGISTRY: tuple[ElementDescriptor, ...] = (
    _d(K.INCIDENT_ID, G.IDENTIFICATION_TRIAGE, V.TEXT, {Q.WHO_INVOLVED}, "Incident ID"),
    _d(K.INCIDENT_PRIORITY, G.IDENTIFICATION_TRIAGE, V.PRIORITY_RATING, {Q.WHO_INVOLVED}, "Incident Priority"),
    _d(K.INCIDENT_REPORTER, G.IDENTIFICATION_TRIAGE, V.CONTACT, {Q.WHO_INVOLVED}, "Incident Reporter"),
    _d(K.INCIDENT_COORDINATOR, G.IDENTIFICATION_TRIAGE, V.CONTACT, {Q.WHO_INVOLVED}, "Incident Coordinator"),
    _d(K.DETECTION_TIMESTAMP, G.CHRONOLOGY, V.TIMESTAMP, {Q.WHEN_OCCURRED}, "Detection Timestamp"),
    _d(K.DETECTION_SOURCE, G.CHRONOLOGY, V.TEXT, {Q.WHEN_OCCURRED}, "Detection Source"),
    _d(K.TIMELINE_OF_EVENTS, G.CHRONOLOGY, V.EVENT_LIST, {Q.WHEN_OCCURRED}, "Timeline of Events"),
    _d(K.AFFECTED_ASSETS_SYSTEMS, G.SCOPE, V.ITEM_LIST, {Q.WHERE_COMPROMISED}, "Affected Assets/Systems"),
    _d(K.AFFECTED_DEPENDENCIES, G.SCOPE, V.ITEM_LIST, {Q.WHERE_COMPROMISED}, "Affected Dependencies"),
    _d(K.INCIDENT_TYPE, G.TECHNICAL_CHARACTERISTICS, V.TEXT, {Q.HOW_UNFOLDED}, "Incident Type"),
    _d(K.ATTACK_VECTOR, G.TECHNICAL_CHARACTERISTICS, V.TEXT, {Q.HOW_UNFOLDED}, "Attack Vector"),
    _d(K.INCIDENT_DESCRIPTION, G.TECHNICAL_CHARACTERISTICS, V.TEXT, {Q.HOW_UNFOLDED}, "Incident Description"),
    _d(K.COLLECTED_EVIDENCE, G.TECHNICAL_CHARACTERISTICS, V.EVIDENCE_LIST,
       {Q.WHAT_HAPPENED, Q.HOW_UNFOLDED}, "Collected Evidence"),
    _d(K.SAFETY_IMPACT, G.ESTIMATED_IMPACT, V.TEXT, {Q.ESTIMATED_IMPACTS}, "Safety Impact"),
    _d(K.OPERATIONAL_IMPACT, G.ESTIMATED_IMPACT, V.TEXT, {Q.ESTIMATED_IMPACTS}, "Operational Impact"),
    _d(K.ENVIRONMENTAL_IMPACT, G.ESTIMATED_IMPACT, V.TEXT, {Q.ESTIMATED_IMPACTS}, "Environmental Impact"),
    _d(K.FINANCIAL_IMPACT, G.ESTIMATED_IMPACT, V.TEXT, {Q.ESTIMATED_IMPACTS}, "Financial Impact",
       aliases=("Financial Loss",)),
    _d(K.ESTIMATED_TIME_TO_SAFE_RECOVERY, G.ESTIMATED_IMPACT, V.DURATION, {Q.ESTIMATED_IMPACTS},
       "Estimated Time to Safe Recovery"),
    _d(K.RTO_STATUS, G.ESTIMATED_IMPACT, V.RTO_PROGRESS, {Q.ESTIMATED_IMPACTS}, "RTO Status"),
    _d(K.PROCESS_RESPONSE_ACTIONS, G.RESPONSES, V.TEXT, {Q.WHAT_HAPPENED}, "Process Response Actions"),
    _d(K.OT_IT_NETWORK_RESPONSE_ACTIONS, G.RESPONSES, V.TEXT, {Q.WHAT_HAPPENED},
       "OT/IT Network Response Actions"),
    _d(K.HSE_RESPONSE_ACTIONS, G.RESPONSES, V.TEXT, {Q.WHAT_HAPPENED}, "HSE Response Actions"),
    _d(K.REGULATORY_TRIGGER, G.COMMUNICATION_COMPLIANCE, V.TEXT, {Q.NOTIFICATION}, "Regulatory Trigger"),
    _d(K.REPORTING_CHANNELS_USED, G.COMMUNICATION_COMPLIANCE, V.ITEM_LIST, {Q.NOTIFICATION},
       "Reporting Channels Used"),
    _d(K.INTERNAL_EXTERNAL_REPORTING, G.COMMUNICATION_COMPLIANCE, V.NOTIFICATION_LEDGER, {Q.NOTIFICATION},
       "Internal and External Reporting"),
)

_BY_KEY: dict[ElementKey, ElementDescriptor] = {d.key: d for d in _REGISTRY}

GROUP_ORDER: tuple[ElementGroup, ...] = (
    ElementGroup.IDENTIFICATION_TRIAGE,
    ElementGroup.CHRONOLOGY,
    ElementGroup.SCOPE,
    ElementGroup.TECHNICAL_CHARACTERISTICS,
    ElementGroup.ESTIMATED_IMPACT,
    ElementGroup.RESPONSES,
    ElementGroup.COMMUNICATION_COMPLIANCE,
)

ALL_KEYS: tuple[ElementKey, ...] = tuple(d.key for d in _REGISTRY)


def registry() -> list[ElementDescriptor]:
    """All 25 descriptors in canonical order."""
    return list(_REGISTRY)


def coerce_key(key: str | ElementKey) -> ElementKey:
    """Resolve a wire identifier to a canonical key; UnknownKey for anything else."""
    if isinstance(key, ElementKey):
        return key
    try:
        return ElementKey(key)
    except ValueError:
        raise UnknownKey(f"not a canonical element key: {key!r}") from None


def descriptor(key: str | ElementKey) -> ElementDescriptor:
    return _BY_KEY[coerce_key(key)]


def kind_of(key: str | ElementKey) -> ValueKind:
    return _BY_KEY[coerce_key(key)].kind


def group_members(group: ElementGroup) -> tuple[ElementKey, ...]:
    return tuple(d.key for d in _REGISTRY if d.group is group)


def question_tags(key: str | ElementKey) -> frozenset[QuestionTag]:
    """Question tags for one element; total over the canonical 25."""
    return _BY_KEY[coerce_key(key)].question_tags


def registry_index(key: str | ElementKey) -> int:
    """Position of a key in canonical order (for stable sorting)."""
    return ALL_KEYS.index(coerce_key(key))
