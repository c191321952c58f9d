"""HTTP service: the integration surface for host frameworks and the console.

Versioned under ``/v1/``. Callers authenticate with static bearer tokens
from the engine configuration; the token's identity is recorded as the
actor on every write. Endpoint semantics are exactly the owning modules'
contracts; error codes are stable and enumerated in the README.

Payloads use the same canonical JSON conventions as export documents
(RFC 3339 UTC timestamps with Z suffix), so there is no second
serialization to keep in sync.
"""

from __future__ import annotations

import base64
import binascii
from typing import Any

from fastapi import Depends, FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.security import HTTPAuthorizationCredentials, HTTPBearer
from pydantic import BaseModel, Field

from . import errors as err
from .engine import Engine
from .lifecycle import ActivationEvent
from .model.report import IncidentReport, hard_violations, report_state_json
from .model.values import format_utc, parse_utc

# Domain error -> HTTP status. Anything unlisted is a server fault (500).
STATUS_BY_CODE: dict[str, int] = {
    err.UnknownIncident.code: 404,
    err.UnknownRule.code: 404,
    err.DuplicateIncident.code: 409,
    err.DuplicateRule.code: 409,
    err.AlreadyRecorded.code: 409,
    err.StaleWrite.code: 409,
    err.SequenceGap.code: 409,
    err.AuthError.code: 401,
    err.EmptyDetectionSource.code: 422,
    err.FutureTimestamp.code: 422,
    err.KindMismatch.code: 422,
    err.EmptyValue.code: 422,
    err.UnknownKey.code: 422,
    err.AlreadyUnknown.code: 422,
    err.InvalidValue.code: 422,
    err.NegativeSeverity.code: 422,
    err.InvalidTransition.code: 422,
    err.UndeclaredAudience.code: 422,
    err.MixedSourceViews.code: 422,
    err.UnknownClause.code: 422,
    err.UnknownStandard.code: 422,
    err.EmptyArtefact.code: 422,
    err.VersionUnsupported.code: 422,
    err.IntegrityViolation.code: 422,
    err.StorageFailure.code: 500,
    err.ConfigError.code: 500,
    err.CrosswalkIntegrityError.code: 500,
    err.MatrixFileError.code: 500,
}


class ActivateBody(BaseModel):
    severity: float
    source_framework: str
    emitted_at: str
    detection_timestamp: str | None = None
    detection_source: str | None = None
    incident_ref: str | None = None
    elements: dict[str, Any] = Field(default_factory=dict)


class SetElementBody(BaseModel):
    value: dict[str, Any]
    at: str | None = None
    expected_revision_count: int | None = None


class TimelineBody(BaseModel):
    description: str
    at: str | None = None


class EvidenceBody(BaseModel):
    description: str
    artefact_base64: str


class PhaseBody(BaseModel):
    trigger: str


class ArmBody(BaseModel):
    rule_id: str
    start_at: str


class NotifyBody(BaseModel):
    at: str


def report_json(report: IncidentReport) -> dict[str, Any]:
    return {
        "incident_ref": report.incident_ref,
        "phase": report.phase.value,
        "created_at": format_utc(report.created_at),
        "created_by": report.created_by,
        "revision_count": report.revision_count,
        "elements": report_state_json(report),
    }


def create_app(engine: Engine) -> FastAPI:
    app = FastAPI(title="air-engine", version="0.1.0", docs_url=None, redoc_url=None)
    bearer = HTTPBearer(auto_error=False)

    def actor_for(credentials: HTTPAuthorizationCredentials | None = Depends(bearer)) -> str:
        if credentials is None:
            raise err.AuthError("missing bearer token")
        identity = engine.config.tokens.get(credentials.credentials)
        if identity is None:
            raise err.AuthError("unrecognized bearer token")
        return identity

    @app.exception_handler(err.AirError)
    async def air_error_handler(_: Request, exc: err.AirError):
        return JSONResponse(status_code=STATUS_BY_CODE.get(exc.code, 500), content=exc.as_dict())

    @app.exception_handler(RequestValidationError)
    async def schema_error_handler(_: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"code": "schema_error", "message": "request body does not match the schema",
                     "detail": exc.errors()},
        )

    @app.get("/v1/health")
    def health():
        return {"status": "ok", "incidents": len(engine.list_incidents())}

    @app.get("/v1/registry")
    def get_registry(actor: str = Depends(actor_for)):
        return {"elements": engine.registry_json()}

    @app.get("/v1/audiences")
    def get_audiences(actor: str = Depends(actor_for)):
        return {"audiences": engine.audiences()}

    @app.post("/v1/activate")
    def activate(body: ActivateBody, actor: str = Depends(actor_for)):
        event = ActivationEvent(
            severity=body.severity,
            threshold=engine.config.activation_threshold,
            source_framework=body.source_framework,
            emitted_at=parse_utc(body.emitted_at),
        )
        decision, report = engine.activate(
            event,
            detection_timestamp=body.detection_timestamp,
            detection_source=body.detection_source,
            actor=actor,
            seed_elements=body.elements or None,
            incident_ref=body.incident_ref,
        )
        if report is None:
            return JSONResponse(status_code=200, content=decision.to_json())
        payload = decision.to_json()
        payload["incident_ref"] = report.incident_ref
        payload["phase"] = report.phase.value
        return JSONResponse(status_code=201, content=payload)

    @app.get("/v1/incidents")
    def list_incidents(actor: str = Depends(actor_for)):
        return {"incidents": engine.list_incidents()}

    @app.get("/v1/incidents/{ref}")
    def get_report(ref: str, actor: str = Depends(actor_for)):
        return report_json(engine.report(ref))

    @app.get("/v1/incidents/{ref}/completeness")
    def get_completeness(ref: str, actor: str = Depends(actor_for)):
        c = engine.completeness(ref)
        return {
            "fraction": c.fraction,
            "populated_count": c.populated_count,
            "unknown_keys": [k.value for k in c.unknown_keys],
        }

    @app.get("/v1/incidents/{ref}/validation")
    def get_validation(ref: str, actor: str = Depends(actor_for)):
        issues = engine.validate(ref)
        return {
            "violations": [v.to_json() for v in hard_violations(issues)],
            "notes": [v.to_json() for v in issues if v.informational],
        }

    @app.get("/v1/incidents/{ref}/readiness")
    def get_readiness(ref: str, actor: str = Depends(actor_for)):
        r = engine.readiness(ref)
        return {"shareable": r.shareable,
                "missing_mandatory": [k.value for k in r.missing_mandatory]}

    @app.put("/v1/incidents/{ref}/elements/{key}")
    def put_element(ref: str, key: str, body: SetElementBody, actor: str = Depends(actor_for)):
        result = engine.set_element(ref, key, body.value, actor, at=body.at,
                                    expected_revision_count=body.expected_revision_count)
        return {"seq": result.seq, "revision_count": result.revision_count}

    @app.delete("/v1/incidents/{ref}/elements/{key}")
    def delete_element(ref: str, key: str, expected_revision_count: int | None = None,
                       actor: str = Depends(actor_for)):
        result = engine.clear_element(ref, key, actor,
                                      expected_revision_count=expected_revision_count)
        return {"seq": result.seq, "revision_count": result.revision_count}

    @app.post("/v1/incidents/{ref}/timeline")
    def post_timeline(ref: str, body: TimelineBody, actor: str = Depends(actor_for)):
        result = engine.add_timeline_event(ref, body.description, event_at=body.at, actor=actor)
        return {"seq": result.seq, "revision_count": result.revision_count}

    @app.post("/v1/incidents/{ref}/evidence", status_code=201)
    def post_evidence(ref: str, body: EvidenceBody, actor: str = Depends(actor_for)):
        try:
            artefact = base64.b64decode(body.artefact_base64, validate=True)
        except (binascii.Error, ValueError):
            raise err.InvalidValue("artefact_base64 is not valid base64") from None
        record = engine.add_evidence(ref, body.description, artefact, actor)
        return record.to_json()

    @app.post("/v1/incidents/{ref}/phase")
    def post_phase(ref: str, body: PhaseBody, actor: str = Depends(actor_for)):
        report = engine.transition(ref, body.trigger, actor)
        return {"incident_ref": ref, "phase": report.phase.value}

    @app.get("/v1/incidents/{ref}/view")
    def get_view(ref: str, audience: str, actor: str = Depends(actor_for)):
        return engine.render_view(ref, audience).to_json()

    @app.get("/v1/incidents/{ref}/coverage")
    def get_coverage(ref: str, standard: str, now: str | None = None,
                     actor: str = Depends(actor_for)):
        return engine.coverage(ref, standard, now=parse_utc(now) if now else None).to_json()

    @app.get("/v1/incidents/{ref}/deadlines")
    def get_deadlines(ref: str, now: str | None = None, actor: str = Depends(actor_for)):
        views = engine.deadlines(ref, now=parse_utc(now) if now else None)
        return {"deadlines": [v.to_json() for v in views]}

    @app.post("/v1/incidents/{ref}/deadlines", status_code=201)
    def post_deadline(ref: str, body: ArmBody, actor: str = Depends(actor_for)):
        deadline = engine.arm_deadline(ref, body.rule_id, body.start_at, actor)
        return deadline.to_json()

    @app.post("/v1/incidents/{ref}/deadlines/{rule_id}/notify")
    def post_notify(ref: str, rule_id: str, body: NotifyBody, actor: str = Depends(actor_for)):
        deadline = engine.record_notification(ref, rule_id, body.at, actor)
        return deadline.to_json()

    @app.get("/v1/incidents/{ref}/export")
    def get_export(ref: str, actor: str = Depends(actor_for)):
        return engine.export_document(ref)

    @app.post("/v1/import", status_code=201)
    def post_import(doc: dict, actor: str = Depends(actor_for)):
        report = engine.import_document(doc)
        return {"incident_ref": report.incident_ref,
                "revision_count": report.revision_count}

    @app.post("/v1/fixtures/{name}", status_code=201)
    def post_fixture(name: str, actor: str = Depends(actor_for)):
        report = engine.load_fixture(name)
        return report_json(report)

    return app


def serve(engine: Engine) -> None:
    """Run the HTTP service on the configured listen address."""
    import uvicorn

    host, _, port = engine.config.listen_address.rpartition(":")
    uvicorn.run(create_app(engine), host=host or "127.0.0.1", port=int(port))
