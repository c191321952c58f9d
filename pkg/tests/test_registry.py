"""Registry integrity: the 25-element set, the 7-group partition, value
kinds and question tags."""

from __future__ import annotations

from collections import Counter

from air_engine.model.registry import (
    ALL_KEYS,
    GROUP_ORDER,
    ElementGroup,
    ElementKey,
    QuestionTag,
    descriptor,
    group_members,
    kind_of,
    question_tags,
    registry,
)
from air_engine.model.values import ValueKind

import pytest

from air_engine.errors import UnknownKey

EXPECTED_GROUP_SIZES = {
    ElementGroup.IDENTIFICATION_TRIAGE: 4,
    ElementGroup.CHRONOLOGY: 3,
    ElementGroup.SCOPE: 2,
    ElementGroup.TECHNICAL_CHARACTERISTICS: 4,
    ElementGroup.ESTIMATED_IMPACT: 6,
    ElementGroup.RESPONSES: 3,
    ElementGroup.COMMUNICATION_COMPLIANCE: 3,
}

EXPECTED_MEMBERSHIP = {
    ElementGroup.IDENTIFICATION_TRIAGE: {
        "incident_id", "incident_priority", "incident_reporter", "incident_coordinator"},
    ElementGroup.CHRONOLOGY: {"detection_timestamp", "detection_source", "timeline_of_events"},
    ElementGroup.SCOPE: {"affected_assets_systems", "affected_dependencies"},
    ElementGroup.TECHNICAL_CHARACTERISTICS: {
        "incident_type", "attack_vector", "incident_description", "collected_evidence"},
    ElementGroup.ESTIMATED_IMPACT: {
        "safety_impact", "operational_impact", "environmental_impact", "financial_impact",
        "estimated_time_to_safe_recovery", "rto_status"},
    ElementGroup.RESPONSES: {
        "process_response_actions", "ot_it_network_response_actions", "hse_response_actions"},
    ElementGroup.COMMUNICATION_COMPLIANCE: {
        "regulatory_trigger", "reporting_channels_used", "internal_external_reporting"},
}


def test_exactly_25_descriptors():
    assert len(registry()) == 25
    assert len(ALL_KEYS) == 25
    assert len(set(ALL_KEYS)) == 25


def test_group_partition():
    sizes = Counter(d.group for d in registry())
    assert sizes == Counter(EXPECTED_GROUP_SIZES)
    # partition: every key in exactly one group, union is the full set
    seen = set()
    for group in GROUP_ORDER:
        members = set(group_members(group))
        assert members == {ElementKey(k) for k in EXPECTED_MEMBERSHIP[group]}
        assert not (members & seen)
        seen |= members
    assert seen == set(ALL_KEYS)


def test_registry_order_is_group_then_narrative():
    groups_in_order = [d.group for d in registry()]
    # groups appear as contiguous runs in the declared group order
    runs = [groups_in_order[0]]
    for g in groups_in_order[1:]:
        if g is not runs[-1]:
            runs.append(g)
    assert tuple(runs) == GROUP_ORDER
    impact = [d.key.value for d in registry() if d.group is ElementGroup.ESTIMATED_IMPACT]
    assert len(impact) == 6
    assert impact[-1] == "rto_status"


def test_value_kinds():
    expected = {
        "incident_priority": ValueKind.PRIORITY_RATING,
        "incident_reporter": ValueKind.CONTACT,
        "incident_coordinator": ValueKind.CONTACT,
        "detection_timestamp": ValueKind.TIMESTAMP,
        "timeline_of_events": ValueKind.EVENT_LIST,
        "affected_assets_systems": ValueKind.ITEM_LIST,
        "affected_dependencies": ValueKind.ITEM_LIST,
        "reporting_channels_used": ValueKind.ITEM_LIST,
        "collected_evidence": ValueKind.EVIDENCE_LIST,
        "estimated_time_to_safe_recovery": ValueKind.DURATION,
        "rto_status": ValueKind.RTO_PROGRESS,
        "internal_external_reporting": ValueKind.NOTIFICATION_LEDGER,
    }
    for key in ALL_KEYS:
        assert kind_of(key) is expected.get(key.value, ValueKind.TEXT)


def test_question_tags_totals():
    # oracle: 24 single-tag keys plus one double-tag key
    assert sum(len(question_tags(k)) for k in ALL_KEYS) == 26
    doubles = [k for k in ALL_KEYS if len(question_tags(k)) == 2]
    assert doubles == [ElementKey.COLLECTED_EVIDENCE]
    assert question_tags(ElementKey.COLLECTED_EVIDENCE) == {
        QuestionTag.WHAT_HAPPENED, QuestionTag.HOW_UNFOLDED}
    assert question_tags(ElementKey.DETECTION_TIMESTAMP) == {QuestionTag.WHEN_OCCURRED}
    assert all(question_tags(k) for k in ALL_KEYS)
    assert max(len(question_tags(k)) for k in ALL_KEYS) == 2


def test_financial_impact_alias():
    d = descriptor("financial_impact")
    assert d.label == "Financial Impact"
    assert "Financial Loss" in d.aliases


def test_unknown_key_rejected():
    with pytest.raises(UnknownKey):
        descriptor("blast_radius")
    with pytest.raises(UnknownKey):
        question_tags("incident-id")
