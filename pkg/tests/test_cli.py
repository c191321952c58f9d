"""CLI surface: subcommands, exit codes, JSON output mode."""

from __future__ import annotations

import json

import pytest
from click.testing import CliRunner

from air_engine.cli import main


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "engine.json"
    path.write_text(json.dumps({"data_dir": str(tmp_path / "data")}))
    return str(path)


def run(runner, config_file, *args, expect=0):
    result = runner.invoke(main, ["--config", config_file, "--actor", "op-1", *args])
    assert result.exit_code == expect, result.output
    return result


class TestFixtureFlow:
    def test_fixture_load_then_validate(self, runner, config_file):
        result = run(runner, config_file, "fixture", "load", "ukraine2015")
        assert "14/25" in result.output
        result = run(runner, config_file, "validate", "ukraine2015")
        assert "0 violations" in result.output
        assert "14/25" in result.output

    def test_coverage_on_empty_report(self, runner, config_file):
        run(runner, config_file, "create", "--detected-at", "2015-12-23T13:30:00Z",
            "--source", "operator call", "--ref", "inc-a")
        result = run(runner, config_file, "coverage", "inc-a", "--standard", "nerc-cip")
        assert result.output.count("[missing") == 7

    def test_deadline_arm_prints_due(self, runner, config_file):
        run(runner, config_file, "fixture", "load", "ukraine2015")
        result = run(runner, config_file, "deadline", "arm", "ukraine2015", "nerc-1h",
                     "--at", "2015-12-23T14:00:00Z")
        assert "2015-12-23T15:00:00Z" in result.output
        result = run(runner, config_file, "deadline", "status", "ukraine2015",
                     "--now", "2015-12-23T15:00:00Z")
        assert "pending" in result.output
        result = run(runner, config_file, "deadline", "notify", "ukraine2015", "nerc-1h",
                     "--at", "2015-12-23T14:59:59Z")
        assert "met" in result.output


class TestAuthoring:
    def test_create_set_view(self, runner, config_file):
        run(runner, config_file, "create", "--detected-at", "2015-12-23T13:30:00Z",
            "--source", "SOC console", "--ref", "inc-b", "--activate")
        run(runner, config_file, "set", "inc-b", "attack_vector", "spear phishing")
        run(runner, config_file, "set", "inc-b", "incident_priority",
            "--json", '{"label": "Orange", "band": "high", "score": 10}')
        run(runner, config_file, "set", "inc-b", "affected_assets_systems",
            "--json", '["HMI-1", "RTU-4"]')
        result = run(runner, config_file, "view", "inc-b", "--audience", "technical_team")
        assert "spear phishing" in result.output
        assert "pending" in result.output  # unknown slots stay visible

    def test_timeline_and_evidence(self, runner, config_file, tmp_path):
        run(runner, config_file, "create", "--detected-at", "2015-12-23T13:30:00Z",
            "--source", "SOC console", "--ref", "inc-c")
        run(runner, config_file, "timeline", "add", "inc-c", "breakers opened",
            "--at", "2015-12-23T13:30:00Z")
        run(runner, config_file, "timeline", "add", "inc-c", "TDoS wave begins",
            "--at", "2015-12-23T13:45:00Z")
        artefact = tmp_path / "hmi.log"
        artefact.write_bytes(b"raw hmi log")
        result = run(runner, config_file, "evidence", "add", "inc-c",
                     "--description", "HMI log", "--file", str(artefact))
        assert "collected" in result.output
        result = run(runner, config_file, "--format", "json", "validate", "inc-c")
        payload = json.loads(result.output)
        assert payload["violations"] == []

    def test_phase_and_readiness(self, runner, config_file):
        run(runner, config_file, "create", "--detected-at", "2015-12-23T13:30:00Z",
            "--source", "SOC console", "--ref", "inc-d", "--activate")
        result = run(runner, config_file, "phase", "inc-d", "assessment_started")
        assert "assessment_decision" in result.output
        result = run(runner, config_file, "readiness", "inc-d")
        assert "not shareable" in result.output

    def test_clear_roundtrip(self, runner, config_file):
        run(runner, config_file, "create", "--detected-at", "2015-12-23T13:30:00Z",
            "--source", "SOC console", "--ref", "inc-e")
        run(runner, config_file, "set", "inc-e", "safety_impact", "none known")
        run(runner, config_file, "clear", "inc-e", "safety_impact")
        result = run(runner, config_file, "--format", "json", "validate", "inc-e")
        payload = json.loads(result.output)
        assert "safety_impact" in payload["completeness"]["unknown_keys"]


class TestExportImport:
    def test_export_import_cycle(self, runner, config_file, tmp_path):
        run(runner, config_file, "fixture", "load", "ukraine2015")
        out = tmp_path / "ukraine"
        result = run(runner, config_file, "export", "ukraine2015", "-o", str(out))
        exported = tmp_path / "ukraine.air.json"
        assert exported.is_file()

        other_config = tmp_path / "other.json"
        other_config.write_text(json.dumps({"data_dir": str(tmp_path / "other-data")}))
        result = run(runner, str(other_config), "import", str(exported))
        assert "ukraine2015" in result.output
        result = run(runner, str(other_config), "validate", "ukraine2015")
        assert "14/25" in result.output

    def test_export_stdout_is_json(self, runner, config_file):
        run(runner, config_file, "fixture", "load", "ukraine2015")
        result = run(runner, config_file, "export", "ukraine2015")
        doc = json.loads(result.output)
        assert doc["format_version"] == "air/1"


class TestErrors:
    def test_domain_error_exits_1_with_code(self, runner, config_file):
        result = run(runner, config_file, "validate", "ghost", expect=1)
        assert "unknown_incident" in result.output

    def test_usage_error_exits_2(self, runner, config_file):
        result = runner.invoke(main, ["--config", config_file, "coverage"])
        assert result.exit_code == 2

    def test_kind_error_needs_json(self, runner, config_file):
        run(runner, config_file, "create", "--detected-at", "2015-12-23T13:30:00Z",
            "--source", "SOC console", "--ref", "inc-f")
        result = runner.invoke(main, ["--config", config_file, "set", "inc-f",
                                      "incident_priority", "Orange"])
        assert result.exit_code == 2

    def test_json_error_rendering(self, runner, config_file):
        result = runner.invoke(main, ["--config", config_file, "--format", "json",
                                      "validate", "ghost"])
        assert result.exit_code == 1
        payload = json.loads(result.output)
        assert payload["code"] == "unknown_incident"

    def test_duplicate_fixture_load_fails_cleanly(self, runner, config_file):
        run(runner, config_file, "fixture", "load", "ukraine2015")
        result = run(runner, config_file, "fixture", "load", "ukraine2015", expect=1)
        assert "duplicate_incident" in result.output


class TestReadOnly:
    def test_registry_and_audiences_and_incidents(self, runner, config_file):
        result = run(runner, config_file, "registry")
        assert "Identification & Triage" in result.output
        assert result.output.count("(text)") == 13
        result = run(runner, config_file, "audiences")
        assert "technical_team: *" in result.output
        run(runner, config_file, "fixture", "load", "ukraine2015")
        result = run(runner, config_file, "incidents")
        assert "ukraine2015" in result.output

    def test_config_file_errors_fail_fast(self, runner, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"data_dir": "./x", "audience_matrix_path": "missing.matrix"}')
        result = runner.invoke(main, ["--config", str(bad), "incidents"])
        assert result.exit_code == 1
        assert "config_error" in result.output
