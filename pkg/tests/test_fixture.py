"""Golden fixture: the 2015 Ukrainian oblenergos record, value for value."""

from __future__ import annotations

import pytest

from air_engine.lifecycle import Phase
from air_engine.model.registry import ElementKey as K
from air_engine.model.report import hard_violations
from air_engine.model.values import (
    Direction,
    NotificationStatus,
    PriorityBand,
    parse_utc,
)

EXPECTED_UNKNOWN = [
    "incident_id", "incident_reporter", "incident_coordinator", "safety_impact",
    "environmental_impact", "financial_impact", "estimated_time_to_safe_recovery",
    "rto_status", "ot_it_network_response_actions", "hse_response_actions",
    "regulatory_trigger",
]

EXPECTED_TIMELINE = [
    "Breakers opened via SCADA HMI (~30)",
    "Firmware pushed to serial-to-Ethernet converters, blocking remote re-closure",
    "TDoS floods utility call centres",
    "UPS shutdowns issued via remote management interfaces",
    "KillDisk activates after reboot (at least one system)",
    "Manual restoration by field crews; service restored within up to six hours",
]

EXPECTED_EVIDENCE_DESCRIPTIONS = [
    "HMI and remote-access logs",
    "evidence of malicious firmware on serial-to-Ethernet converters",
    "UPS management logs showing shutdowns",
    "forensic images indicating KillDisk on operator workstations/SCADA servers",
    "malware artefacts (BlackEnergy3, KillDisk)",
]


@pytest.fixture
def report(engine, ukraine):
    return engine.report(ukraine)


def test_completeness_is_14_of_25(engine, ukraine):
    c = engine.completeness(ukraine)
    assert c.populated_count == 14
    assert c.fraction == pytest.approx(14 / 25)
    assert [k.value for k in c.unknown_keys] == EXPECTED_UNKNOWN


def test_validates_clean(engine, ukraine):
    assert hard_violations(engine.validate(ukraine)) == []


def test_phase_active(report):
    assert report.phase is Phase.DETECTION_REPORTING


def test_priority_orange_high_10(report):
    value = report.elements[K.INCIDENT_PRIORITY].value
    assert (value.label, value.band, value.score) == ("Orange", PriorityBand.HIGH, 10)


def test_detection_row(report):
    assert report.elements[K.DETECTION_TIMESTAMP].value.at == parse_utc("2015-12-23T13:30:00Z")
    assert report.elements[K.DETECTION_SOURCE].value.text == (
        "Utility operator observations of unauthorised HMI actions")


def test_timeline_six_events_in_stated_order(report):
    events = report.elements[K.TIMELINE_OF_EVENTS].value.events
    assert [e.description for e in events] == EXPECTED_TIMELINE
    assert [e.ordinal for e in events] == [1, 2, 3, 4, 5, 6]
    assert events[0].at == parse_utc("2015-12-23T13:30:00Z")
    assert all(e.at is None for e in events[1:])


def test_scope_rows(report):
    assert report.elements[K.AFFECTED_ASSETS_SYSTEMS].value.items == (
        "SCADA HMIs", "circuit breakers", "serial-to-Ethernet converters",
        "UPS units", "operator workstations")
    assert report.elements[K.AFFECTED_DEPENDENCIES].value.items == (
        "Call-centre phone lines", "communications hardware supporting control systems",
        "internal monitoring platforms")


def test_attack_vector_mentions_spear_phishing_and_blackenergy3(report):
    text = report.elements[K.ATTACK_VECTOR].value.text
    assert text == ("Spear phishing (to deploy BlackEnergy3) leading to credential theft "
                    "and SCADA network access")
    assert "spear phishing" in text.lower()
    assert "BlackEnergy3" in text


def test_incident_description_row(report):
    assert report.elements[K.INCIDENT_DESCRIPTION].value.text == (
        "Attackers operated SCADA HMIs to open ~30 breakers; malicious firmware on "
        "serial-to-Ethernet converters blocked remote re-closure; TDoS and UPS shutdowns "
        "impeded coordination; manual restoration required.")


def test_operational_impact_mentions_225000_customers(report):
    text = report.elements[K.OPERATIONAL_IMPACT].value.text
    assert text == "Power outage for ~225,000 customers; SCADA and substations offline"
    assert "~225,000 customers" in text


def test_process_response_actions(report):
    assert report.elements[K.PROCESS_RESPONSE_ACTIONS].value.text == (
        "Manual breaker closures performed by field crews")


def test_reporting_channels(report):
    assert report.elements[K.REPORTING_CHANNELS_USED].value.items == (
        "Internal plant reporting", "escalation to Ukrainian CERT")


def test_notification_ledger_tracks_ukrainian_cert(report):
    entries = report.elements[K.INTERNAL_EXTERNAL_REPORTING].value.entries
    assert len(entries) == 1
    entry = entries[0]
    assert entry.party == "Ukrainian CERT"
    assert entry.direction is Direction.EXTERNAL
    # the public record carries no notification instant, so the entry stays
    # pending rather than inventing a timestamp
    assert entry.status is NotificationStatus.PENDING
    assert entry.at is None


def test_five_evidence_records_with_custody(engine, ukraine):
    state = engine.state(ukraine)
    assert len(state.evidence) == 5
    descriptions = sorted(r.description for r in state.evidence.values())
    assert descriptions == sorted(EXPECTED_EVIDENCE_DESCRIPTIONS)
    for record in state.evidence.values():
        assert record.custody[0].action.value == "collected"
        assert engine.store.verify_custody(ukraine, record.evidence_id)
    linked = engine.report(ukraine).elements[K.COLLECTED_EVIDENCE].value.evidence_ids
    assert set(linked) == set(state.evidence)
    assert len(linked) == 5


def test_incident_type_row(report):
    text = report.elements[K.INCIDENT_TYPE].value.text
    assert "manipulation of control" in text
    assert "malicious and direct" in text


def test_fixture_is_deterministic(engine, ukraine, tmp_path):
    from air_engine.config import default_config
    from air_engine.engine import Engine

    other = Engine(default_config(tmp_path / "second"))
    other.load_fixture("ukraine2015")
    assert other.export_text("ukraine2015") == engine.export_text("ukraine2015")


def test_unknown_fixture_name(engine):
    from air_engine.errors import UnknownIncident

    with pytest.raises(UnknownIncident):
        engine.load_fixture("stuxnet2010")
