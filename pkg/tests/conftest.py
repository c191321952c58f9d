from __future__ import annotations

import pytest

from air_engine.config import default_config
from air_engine.engine import Engine
from air_engine.model.values import parse_utc

# Fixed instants so every expected value in the suite is frozen.
DETECTION_TS = parse_utc("2015-12-23T13:30:00Z")
COMPILED_TS = parse_utc("2015-12-23T19:30:00Z")
NOW = parse_utc("2015-12-23T20:00:00Z")


@pytest.fixture
def engine(tmp_path) -> Engine:
    return Engine(default_config(tmp_path / "data"))


@pytest.fixture
def ukraine(engine) -> str:
    """The golden fixture, loaded fresh per test; returns its incident ref."""
    report = engine.load_fixture("ukraine2015")
    return report.incident_ref


@pytest.fixture
def fresh(engine) -> str:
    """A just-created incident (two chronology anchors populated)."""
    report = engine.create_incident(DETECTION_TS, "SOC console alert", "op-1", now=COMPILED_TS)
    return report.incident_ref
