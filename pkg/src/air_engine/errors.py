"""Engine error hierarchy.

Every domain error carries a stable machine code so the HTTP API and the
CLI can render it identically. Codes never change across versions; new
errors get new codes.
"""

from __future__ import annotations

from typing import Any


class AirError(Exception):
    """Base class for all domain errors."""

    code = "error"

    def __init__(self, message: str, detail: Any = None):
        super().__init__(message)
        self.message = message
        self.detail = detail

    def as_dict(self) -> dict[str, Any]:
        payload: dict[str, Any] = {"code": self.code, "message": self.message}
        if self.detail is not None:
            payload["detail"] = self.detail
        return payload


# -- report model ------------------------------------------------------------

class EmptyDetectionSource(AirError):
    code = "empty_detection_source"


class FutureTimestamp(AirError):
    code = "future_timestamp"


class KindMismatch(AirError):
    code = "kind_mismatch"


class EmptyValue(AirError):
    code = "empty_value"


class UnknownKey(AirError):
    code = "unknown_key"


class AlreadyUnknown(AirError):
    code = "already_unknown"


class InvalidValue(AirError):
    """Structured value payload fails its own shape rules (bad band, negative duration...)."""

    code = "invalid_value"


# -- lifecycle ---------------------------------------------------------------

class NegativeSeverity(AirError):
    code = "negative_severity"


class InvalidTransition(AirError):
    code = "invalid_transition"


# -- views -------------------------------------------------------------------

class UndeclaredAudience(AirError):
    code = "undeclared_audience"


class MixedSourceViews(AirError):
    code = "mixed_source_views"


class MatrixFileError(AirError):
    """Audience matrix file failed to parse; message carries the line number."""

    code = "matrix_file_error"


# -- crosswalk ---------------------------------------------------------------

class UnknownClause(AirError):
    code = "unknown_clause"


class UnknownStandard(AirError):
    code = "unknown_standard"


class CrosswalkIntegrityError(AirError):
    """Shipped crosswalk dataset does not match its recorded checksum."""

    code = "crosswalk_integrity"


# -- regclock ----------------------------------------------------------------

class DuplicateRule(AirError):
    code = "duplicate_rule"


class AlreadyRecorded(AirError):
    code = "already_recorded"


class UnknownRule(AirError):
    code = "unknown_rule"


# -- evidence store ----------------------------------------------------------

class SequenceGap(AirError):
    code = "sequence_gap"


class StorageFailure(AirError):
    code = "storage_failure"


class EmptyArtefact(AirError):
    code = "empty_artefact"


class UnknownIncident(AirError):
    code = "unknown_incident"


class DuplicateIncident(AirError):
    code = "duplicate_incident"


class VersionUnsupported(AirError):
    code = "version_unsupported"


class IntegrityViolation(AirError):
    code = "integrity_violation"


# -- gateway -----------------------------------------------------------------

class StaleWrite(AirError):
    code = "stale_write"


class ConfigError(AirError):
    code = "config_error"


class AuthError(AirError):
    code = "unauthorized"
