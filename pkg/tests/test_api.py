"""HTTP surface: auth, endpoint contracts, stable error codes, API/CLI parity."""

from __future__ import annotations

import base64

import pytest
from fastapi.testclient import TestClient

from air_engine.api import create_app
from air_engine.config import EngineConfig
from air_engine.engine import Engine

TOKEN = "host-token-1"
CONSOLE_TOKEN = "console-token-2"


@pytest.fixture
def service(tmp_path):
    config = EngineConfig(
        data_dir=tmp_path / "data",
        tokens={TOKEN: "scada-host", CONSOLE_TOKEN: "coordinator-console"},
    )
    engine = Engine(config)
    client = TestClient(create_app(engine), raise_server_exceptions=False)
    client.headers["Authorization"] = f"Bearer {TOKEN}"
    return client, engine


ACTIVATION = {
    "severity": 0.9,
    "source_framework": "dsacr",
    "emitted_at": "2015-12-23T13:31:00Z",
    "detection_timestamp": "2015-12-23T13:30:00Z",
    "detection_source": "operator call",
}


def test_every_error_code_has_a_status_mapping():
    """The stable code set is closed: every domain error maps to one status."""
    import air_engine.errors as err
    from air_engine.api import STATUS_BY_CODE

    subclasses = [cls for cls in vars(err).values()
                  if isinstance(cls, type) and issubclass(cls, err.AirError)
                  and cls is not err.AirError]
    codes = {cls.code for cls in subclasses}
    assert len(codes) == len(subclasses), "duplicate error codes"
    unmapped = codes - set(STATUS_BY_CODE)
    assert not unmapped, f"codes without an HTTP status: {unmapped}"


class TestAuth:
    def test_missing_token_is_401(self, service):
        client, _ = service
        response = client.get("/v1/incidents", headers={"Authorization": ""})
        assert response.status_code == 401
        assert response.json()["code"] == "unauthorized"

    def test_wrong_token_is_401(self, service):
        client, _ = service
        response = client.get("/v1/incidents", headers={"Authorization": "Bearer nope"})
        assert response.status_code == 401

    def test_health_is_open(self, service):
        client, _ = service
        assert client.get("/v1/health", headers={"Authorization": ""}).status_code == 200


class TestActivate:
    def test_above_threshold_creates_incident(self, service):
        client, engine = service
        response = client.post("/v1/activate", json=ACTIVATION)
        assert response.status_code == 201
        body = response.json()
        assert body["decision"] == "activate"
        assert body["threshold"] == engine.config.activation_threshold
        ref = body["incident_ref"]
        assert body["phase"] == "detection_reporting"
        report = engine.report(ref)
        assert report.created_by == "scada-host"  # token identity is the actor
        assert report.revision_count == 2

    def test_below_threshold_records_nothing(self, service):
        client, engine = service
        response = client.post("/v1/activate", json={**ACTIVATION, "severity": 0.1})
        assert response.status_code == 200
        assert response.json()["decision"] == "no_action"
        assert engine.list_incidents() == []

    def test_missing_detection_source_is_400(self, service):
        client, _ = service
        body = {k: v for k, v in ACTIVATION.items() if k != "severity"}
        response = client.post("/v1/activate", json=body)
        assert response.status_code == 400
        assert response.json()["code"] == "schema_error"

    def test_activation_without_detection_fields_is_422(self, service):
        client, _ = service
        body = {k: v for k, v in ACTIVATION.items() if k != "detection_source"}
        response = client.post("/v1/activate", json=body)
        assert response.status_code == 422

    def test_negative_severity_is_422(self, service):
        client, _ = service
        response = client.post("/v1/activate", json={**ACTIVATION, "severity": -1})
        assert response.status_code == 422
        assert response.json()["code"] == "negative_severity"

    def test_seed_elements_applied(self, service):
        client, engine = service
        body = {**ACTIVATION,
                "elements": {"attack_vector": {"kind": "text", "text": "spear phishing"}}}
        ref = client.post("/v1/activate", json=body).json()["incident_ref"]
        report = engine.report(ref)
        assert report.elements["attack_vector"].value.text == "spear phishing"


class TestElements:
    def _ref(self, client):
        return client.post("/v1/activate", json=ACTIVATION).json()["incident_ref"]

    def test_put_and_get_element(self, service):
        client, _ = service
        ref = self._ref(client)
        response = client.put(
            f"/v1/incidents/{ref}/elements/operational_impact",
            json={"value": {"kind": "text", "text": "30 substations dark"}})
        assert response.status_code == 200
        assert response.json()["revision_count"] == 3
        report = client.get(f"/v1/incidents/{ref}").json()
        assert report["elements"]["operational_impact"]["value"]["text"] == "30 substations dark"

    def test_kind_mismatch_code(self, service):
        client, _ = service
        ref = self._ref(client)
        response = client.put(
            f"/v1/incidents/{ref}/elements/detection_timestamp",
            json={"value": {"kind": "item_list", "items": ["x"]}})
        assert response.status_code == 422
        assert response.json()["code"] == "kind_mismatch"

    def test_unknown_key_code(self, service):
        client, _ = service
        ref = self._ref(client)
        response = client.put(
            f"/v1/incidents/{ref}/elements/blast_radius",
            json={"value": {"kind": "text", "text": "x"}})
        assert response.status_code == 422
        assert response.json()["code"] == "unknown_key"

    def test_unknown_incident_is_404(self, service):
        client, _ = service
        response = client.get("/v1/incidents/ghost")
        assert response.status_code == 404
        assert response.json()["code"] == "unknown_incident"

    def test_stale_write_is_409(self, service):
        client, _ = service
        ref = self._ref(client)
        ok = client.put(
            f"/v1/incidents/{ref}/elements/operational_impact",
            json={"value": {"kind": "text", "text": "first"}, "expected_revision_count": 2})
        assert ok.status_code == 200
        stale = client.put(
            f"/v1/incidents/{ref}/elements/operational_impact",
            json={"value": {"kind": "text", "text": "second"}, "expected_revision_count": 2})
        assert stale.status_code == 409
        assert stale.json()["code"] == "stale_write"

    def test_delete_clears_element(self, service):
        client, _ = service
        ref = self._ref(client)
        client.put(f"/v1/incidents/{ref}/elements/operational_impact",
                   json={"value": {"kind": "text", "text": "x"}})
        assert client.delete(f"/v1/incidents/{ref}/elements/operational_impact").status_code == 200
        report = client.get(f"/v1/incidents/{ref}").json()
        assert report["elements"]["operational_impact"] == {"state": "unknown"}

    def test_clear_unknown_is_422(self, service):
        client, _ = service
        ref = self._ref(client)
        response = client.delete(f"/v1/incidents/{ref}/elements/operational_impact")
        assert response.status_code == 422
        assert response.json()["code"] == "already_unknown"


class TestReadsAndClocks:
    def test_fixture_view_coverage_deadlines(self, service):
        client, engine = service
        engine.load_fixture("ukraine2015")

        view = client.get("/v1/incidents/ukraine2015/view",
                          params={"audience": "regulator"}).json()
        assert view["elements"]["operational_impact"]["value"]["text"] == (
            "Power outage for ~225,000 customers; SCADA and substations offline")
        assert "collected_evidence" not in view["elements"]

        coverage = client.get("/v1/incidents/ukraine2015/coverage",
                              params={"standard": "nerc-cip"}).json()
        by_excerpt = {row["excerpt"]: row["status"] for row in coverage["rows"]}
        assert by_excerpt["attack vector used"] == "satisfied"

        empty = client.get("/v1/incidents/ukraine2015/deadlines").json()
        assert empty["deadlines"] == []

        armed = client.post("/v1/incidents/ukraine2015/deadlines",
                            json={"rule_id": "nerc-1h", "start_at": "2015-12-23T14:00:00Z"})
        assert armed.status_code == 201
        assert armed.json()["due_at"] == "2015-12-23T15:00:00Z"

        listed = client.get("/v1/incidents/ukraine2015/deadlines",
                            params={"now": "2015-12-23T14:10:00Z"}).json()["deadlines"]
        assert listed[0]["status"] == "pending"
        assert listed[0]["remaining_seconds"] == 3000

        notified = client.post("/v1/incidents/ukraine2015/deadlines/nerc-1h/notify",
                               json={"at": "2015-12-23T14:59:00Z"})
        assert notified.status_code == 200
        listed = client.get("/v1/incidents/ukraine2015/deadlines",
                            params={"now": "2015-12-23T16:00:00Z"}).json()["deadlines"]
        assert listed[0]["status"] == "met"

    def test_undeclared_audience_code(self, service):
        client, engine = service
        engine.load_fixture("ukraine2015")
        response = client.get("/v1/incidents/ukraine2015/view", params={"audience": "press"})
        assert response.status_code == 422
        assert response.json()["code"] == "undeclared_audience"

    def test_unknown_standard_code(self, service):
        client, engine = service
        engine.load_fixture("ukraine2015")
        response = client.get("/v1/incidents/ukraine2015/coverage",
                              params={"standard": "iso-27001"})
        assert response.status_code == 422
        assert response.json()["code"] == "unknown_standard"

    def test_duplicate_arm_is_409(self, service):
        client, engine = service
        engine.load_fixture("ukraine2015")
        body = {"rule_id": "nerc-1h", "start_at": "2015-12-23T14:00:00Z"}
        assert client.post("/v1/incidents/ukraine2015/deadlines", json=body).status_code == 201
        dup = client.post("/v1/incidents/ukraine2015/deadlines", json=body)
        assert dup.status_code == 409
        assert dup.json()["code"] == "duplicate_rule"

    def test_registry_and_audiences(self, service):
        client, _ = service
        elements = client.get("/v1/registry").json()["elements"]
        assert len(elements) == 25
        audiences = client.get("/v1/audiences").json()["audiences"]
        assert set(audiences) == {"technical_team", "management", "regulator"}

    def test_completeness_validation_readiness(self, service):
        client, engine = service
        engine.load_fixture("ukraine2015")
        c = client.get("/v1/incidents/ukraine2015/completeness").json()
        assert c["populated_count"] == 14
        v = client.get("/v1/incidents/ukraine2015/validation").json()
        assert v["violations"] == []
        r = client.get("/v1/incidents/ukraine2015/readiness").json()
        assert r["shareable"] is True


class TestTimelineEvidencePhase:
    def test_timeline_and_evidence_and_phase(self, service):
        client, engine = service
        ref = client.post("/v1/activate", json=ACTIVATION).json()["incident_ref"]

        added = client.post(f"/v1/incidents/{ref}/timeline",
                            json={"description": "segmented OT network",
                                  "at": "2015-12-23T14:05:00Z"})
        assert added.status_code == 200

        evidence = client.post(
            f"/v1/incidents/{ref}/evidence",
            json={"description": "HMI session log",
                  "artefact_base64": base64.b64encode(b"raw log").decode()})
        assert evidence.status_code == 201
        assert evidence.json()["custody"][0]["action"] == "collected"

        bad = client.post(f"/v1/incidents/{ref}/evidence",
                          json={"description": "x", "artefact_base64": "%%%"})
        assert bad.status_code == 422

        phase = client.post(f"/v1/incidents/{ref}/phase", json={"trigger": "assessment_started"})
        assert phase.json()["phase"] == "assessment_decision"

        invalid = client.post(f"/v1/incidents/{ref}/phase", json={"trigger": "activated"})
        assert invalid.status_code == 422
        assert invalid.json()["code"] == "invalid_transition"


class TestExportImport:
    def test_export_then_import_under_new_ref(self, service, tmp_path):
        client, engine = service
        engine.load_fixture("ukraine2015")
        doc = client.get("/v1/incidents/ukraine2015/export").json()
        assert doc["format_version"] == "air/1"

        from air_engine.config import EngineConfig as Cfg

        other = Engine(Cfg(data_dir=tmp_path / "other", tokens={TOKEN: "scada-host"}))
        other_client = TestClient(create_app(other), raise_server_exceptions=False)
        other_client.headers["Authorization"] = f"Bearer {TOKEN}"
        response = other_client.post("/v1/import", json=doc)
        assert response.status_code == 201
        assert response.json()["incident_ref"] == "ukraine2015"
        assert other_client.get("/v1/incidents/ukraine2015/completeness").json()["populated_count"] == 14

    def test_import_tampered_document_is_422(self, service):
        client, engine = service
        engine.load_fixture("ukraine2015")
        doc = client.get("/v1/incidents/ukraine2015/export").json()
        doc["incident_ref"] = "ukraine2015-copy"
        doc["elements"]["attack_vector"]["value"]["text"] = "USB stick"
        response = client.post("/v1/import", json=doc)
        assert response.status_code == 422
        assert response.json()["code"] == "integrity_violation"


class TestParity:
    def test_cli_and_http_produce_identical_revision_logs(self, service, tmp_path):
        """The same authoring steps through HTTP and through the engine
        (the CLI's backend) yield revision-for-revision identical chains."""
        client, engine = service

        client.post("/v1/activate", json={**ACTIVATION, "incident_ref": "via-http"})
        client.put("/v1/incidents/via-http/elements/operational_impact",
                   json={"value": {"kind": "text", "text": "outage"},
                         "at": "2015-12-23T14:10:00Z"})

        from air_engine.lifecycle import ActivationEvent
        from air_engine.model.values import parse_utc

        other = Engine(EngineConfig(data_dir=tmp_path / "cli-data"))
        event = ActivationEvent(severity=0.9, threshold=other.config.activation_threshold,
                                source_framework="dsacr",
                                emitted_at=parse_utc("2015-12-23T13:31:00Z"))
        other.activate(event, detection_timestamp="2015-12-23T13:30:00Z",
                       detection_source="operator call", actor="scada-host",
                       incident_ref="via-http")
        other.set_element("via-http", "operational_impact",
                          {"kind": "text", "text": "outage"}, "scada-host",
                          at="2015-12-23T14:10:00Z")

        http_doc = engine.export_document("via-http")
        cli_doc = other.export_document("via-http")
        http_revs = [{k: r[k] for k in ("seq", "key", "actor", "payload")}
                     for r in http_doc["revisions"]]
        cli_revs = [{k: r[k] for k in ("seq", "key", "actor", "payload")}
                    for r in cli_doc["revisions"]]
        assert http_revs == cli_revs
        assert http_doc["elements"] == cli_doc["elements"]

    def test_get_endpoints_never_write(self, service):
        client, engine = service
        engine.load_fixture("ukraine2015")
        before = engine.export_text("ukraine2015")
        for path, params in [
            ("/v1/incidents/ukraine2015", None),
            ("/v1/incidents/ukraine2015/completeness", None),
            ("/v1/incidents/ukraine2015/validation", None),
            ("/v1/incidents/ukraine2015/readiness", None),
            ("/v1/incidents/ukraine2015/view", {"audience": "regulator"}),
            ("/v1/incidents/ukraine2015/coverage", {"standard": "nerc-cip"}),
            ("/v1/incidents/ukraine2015/deadlines", None),
            ("/v1/incidents/ukraine2015/export", None),
            ("/v1/registry", None),
            ("/v1/audiences", None),
            ("/v1/incidents", None),
        ]:
            assert client.get(path, params=params).status_code == 200
        assert engine.export_text("ukraine2015") == before
