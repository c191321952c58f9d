"""Append-only persistence and canonical export/import.

Layout per incident under the data directory:

    <data_dir>/<incident_ref>/log             append-only JSONL record chain
    <data_dir>/<incident_ref>/blobs/<digest>  content-addressed artefact bytes
    <data_dir>/incidents.idx                  append-only incident index

The log opens with a header record; every following record carries a
gapless per-incident sequence number, the digest of its predecessor and its
own digest, so the chain re-verifies on every open. Records are never
updated or deleted; the current snapshot is always the fold of the chain.
Appends are fsynced before they are acknowledged.

Writes are serialized per incident through a file lock (shared with any
other process on the same store); readers fold a consistent snapshot at a
record boundary.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, replace
from datetime import datetime
from enum import Enum
from pathlib import Path
from typing import Any, Iterable

from filelock import FileLock

from . import EXPORT_FORMAT_VERSION
from .digest import DIGEST_ALGORITHM, canonical_json, digest_obj, sha256_hex
from .errors import (
    AlreadyRecorded,
    DuplicateIncident,
    DuplicateRule,
    EmptyArtefact,
    IntegrityViolation,
    InvalidValue,
    SequenceGap,
    StorageFailure,
    UnknownIncident,
    UnknownRule,
    VersionUnsupported,
)
from .lifecycle import Phase
from .model.registry import ALL_KEYS, ElementKey
from .model.report import (
    DEADLINE_MARKER,
    EVIDENCE_MARKER,
    PHASE_MARKER,
    IncidentReport,
    Revision,
    empty_report,
    fold_revisions,
    hard_violations,
    report_state_json,
    set_element,
    state_from_json,
    state_to_json,
    validate,
)
from .model.values import EvidenceList, format_utc, parse_utc
from .regclock import Deadline, RegTriggerRule
from .regclock import arm as arm_rule
from .regclock import record_notification as clock_record_notification


class CustodyAction(str, Enum):
    COLLECTED = "collected"
    TRANSFERRED = "transferred"
    VERIFIED = "verified"


@dataclass(frozen=True)
class CustodyEvent:
    custodian: str
    action: CustodyAction
    at: datetime

    def to_json(self) -> dict[str, Any]:
        return {"custodian": self.custodian, "action": self.action.value, "at": format_utc(self.at)}

    @staticmethod
    def from_json(obj: dict[str, Any]) -> "CustodyEvent":
        return CustodyEvent(custodian=obj["custodian"], action=CustodyAction(obj["action"]),
                            at=parse_utc(obj["at"]))


@dataclass(frozen=True)
class EvidenceRecord:
    """Preserved artefact: digest of the bytes plus the custody trail."""

    evidence_id: str
    description: str
    artefact_digest: str
    custody: tuple[CustodyEvent, ...]

    def __post_init__(self):
        if not self.custody:
            raise InvalidValue("custody trail must be non-empty")
        if self.custody[0].action is not CustodyAction.COLLECTED:
            raise InvalidValue("custody trail must begin with a collected event")
        times = [e.at for e in self.custody]
        if any(b < a for a, b in zip(times, times[1:])):
            raise InvalidValue("custody timestamps must be non-decreasing")

    def to_json(self) -> dict[str, Any]:
        return {
            "evidence_id": self.evidence_id,
            "description": self.description,
            "artefact_digest": self.artefact_digest,
            "custody": [e.to_json() for e in self.custody],
        }

    @staticmethod
    def from_json(obj: dict[str, Any]) -> "EvidenceRecord":
        return EvidenceRecord(
            evidence_id=obj["evidence_id"],
            description=obj["description"],
            artefact_digest=obj["artefact_digest"],
            custody=tuple(CustodyEvent.from_json(e) for e in obj["custody"]),
        )


@dataclass(frozen=True)
class IncidentState:
    """Snapshot folded from one incident's chain."""

    report: IncidentReport
    deadlines: dict[str, Deadline]
    evidence: dict[str, EvidenceRecord]
    revisions: list[Revision]
    last_seq: int
    head_digest: str


def _record_digest(record: dict[str, Any]) -> str:
    body = {k: v for k, v in record.items() if k != "digest"}
    return digest_obj(body)


def build_export_document(
    report: IncidentReport,
    revisions: list[Revision],
    evidence: Iterable["EvidenceRecord"] = (),
    deadlines: Iterable[Deadline] = (),
) -> dict[str, Any]:
    """Canonical export document for a snapshot plus its revision chain."""
    return {
        "format_version": EXPORT_FORMAT_VERSION,
        "digest_algorithm": DIGEST_ALGORITHM,
        "incident_ref": report.incident_ref,
        "created_at": format_utc(report.created_at),
        "created_by": report.created_by,
        "phase": report.phase.value,
        "revision_count": report.revision_count,
        "elements": report_state_json(report),
        "revisions": [r.to_json() for r in revisions],
        "evidence": sorted((e.to_json() for e in evidence), key=lambda e: e["evidence_id"]),
        "deadlines": sorted((d.to_json() for d in deadlines), key=lambda d: d["rule_id"]),
        "annotations": {},
    }


class EvidenceStore:
    """File-backed store; one instance may serve many incidents."""

    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, FileLock] = {}

    # -- paths ----------------------------------------------------------------

    def _incident_dir(self, incident_ref: str) -> Path:
        if not incident_ref or "/" in incident_ref or incident_ref.startswith("."):
            raise StorageFailure(f"unusable incident_ref: {incident_ref!r}")
        return self.data_dir / incident_ref

    def _log_path(self, incident_ref: str) -> Path:
        return self._incident_dir(incident_ref) / "log"

    def lock(self, incident_ref: str) -> FileLock:
        """Per-incident writer lock (re-entrant within this store instance)."""
        if incident_ref not in self._locks:
            lock_path = self._incident_dir(incident_ref) / ".lock"
            lock_path.parent.mkdir(parents=True, exist_ok=True)
            self._locks[incident_ref] = FileLock(str(lock_path))
        return self._locks[incident_ref]

    def exists(self, incident_ref: str) -> bool:
        return self._log_path(incident_ref).is_file()

    def list_incidents(self) -> list[str]:
        refs = set()
        idx = self.data_dir / "incidents.idx"
        if idx.is_file():
            refs.update(line.strip() for line in idx.read_text(encoding="utf-8").splitlines() if line.strip())
        for child in self.data_dir.iterdir():
            if child.is_dir() and (child / "log").is_file():
                refs.add(child.name)
        return sorted(r for r in refs if self.exists(r))

    # -- low-level chain ------------------------------------------------------

    def _append_line(self, incident_ref: str, record: dict[str, Any]) -> None:
        path = self._log_path(incident_ref)
        try:
            with open(path, "a", encoding="utf-8") as f:
                f.write(canonical_json(record) + "\n")
                f.flush()
                os.fsync(f.fileno())
        except OSError as exc:
            raise StorageFailure(f"cannot append to {path}: {exc}") from exc

    def _read_records(self, incident_ref: str) -> list[dict[str, Any]]:
        path = self._log_path(incident_ref)
        if not path.is_file():
            raise UnknownIncident(f"no incident {incident_ref!r} in this store")
        records = []
        try:
            with open(path, encoding="utf-8") as f:
                for lineno, line in enumerate(f, start=1):
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        records.append(json.loads(line))
                    except json.JSONDecodeError as exc:
                        raise IntegrityViolation(f"{path}:{lineno}: unparseable record") from exc
        except OSError as exc:
            raise StorageFailure(f"cannot read {path}: {exc}") from exc
        return records

    def _tail(self, incident_ref: str) -> dict[str, Any]:
        records = self._read_records(incident_ref)
        if not records:
            raise IntegrityViolation(f"incident {incident_ref!r} has an empty log")
        return records[-1]

    def _verify_chain(self, incident_ref: str, records: list[dict[str, Any]]) -> None:
        if not records:
            raise IntegrityViolation(f"incident {incident_ref!r} has an empty log")
        header = records[0]
        if header.get("record") != "header":
            raise IntegrityViolation(f"incident {incident_ref!r}: log does not start with a header")
        if header.get("format_version") != EXPORT_FORMAT_VERSION:
            raise VersionUnsupported(
                f"log format {header.get('format_version')!r} unsupported "
                f"(engine speaks {EXPORT_FORMAT_VERSION!r})")
        prev_digest = None
        expected_seq = 1
        for i, record in enumerate(records):
            if _record_digest(record) != record.get("digest"):
                raise IntegrityViolation(f"incident {incident_ref!r}: record {i} digest mismatch")
            if i == 0:
                prev_digest = record["digest"]
                continue
            if record.get("prev") != prev_digest:
                raise IntegrityViolation(f"incident {incident_ref!r}: record {i} breaks the chain")
            if record.get("seq") != expected_seq:
                raise IntegrityViolation(
                    f"incident {incident_ref!r}: record {i} has seq {record.get('seq')}, "
                    f"expected {expected_seq}")
            prev_digest = record["digest"]
            expected_seq += 1

    # -- create / append ------------------------------------------------------

    def create_incident(self, report: IncidentReport) -> IncidentReport:
        """Persist a freshly created report.

        Writes the header, then one set-revision per already-populated
        element (creation parameters), so the chain alone reproduces the
        snapshot.
        """
        ref = report.incident_ref
        incident_dir = self._incident_dir(ref)
        with self.lock(ref):
            if self.exists(ref):
                raise DuplicateIncident(f"incident {ref!r} already exists")
            incident_dir.mkdir(parents=True, exist_ok=True)
            (incident_dir / "blobs").mkdir(exist_ok=True)
            header = {
                "record": "header",
                "format_version": EXPORT_FORMAT_VERSION,
                "digest_algorithm": DIGEST_ALGORITHM,
                "incident_ref": ref,
                "created_at": format_utc(report.created_at),
                "created_by": report.created_by,
            }
            header["digest"] = _record_digest(header)
            self._append_line(ref, header)

            stored = empty_report(ref, report.created_at, report.created_by)
            for key in ALL_KEYS:
                state = report.elements[key]
                if state.populated:
                    stored, revision = set_element(stored, key, state.value,
                                                   state.set_by or report.created_by,
                                                   state.set_at or report.created_at)
                    self.append(ref, revision)
            with open(self.data_dir / "incidents.idx", "a", encoding="utf-8") as f:
                f.write(ref + "\n")
                f.flush()
                os.fsync(f.fileno())
        return self.load(ref).report

    def append(self, incident_ref: str, revision: Revision) -> int:
        """Append one revision; enforces the gapless sequence and returns the seq.

        A revision arriving without a seq gets the next one; a revision
        carrying a seq is checked against the chain, not trusted.
        """
        with self.lock(incident_ref):
            tail = self._tail(incident_ref)
            expected = 1 if tail.get("record") == "header" else tail["seq"] + 1
            if revision.seq is None:
                revision = replace(revision, seq=expected)
            elif revision.seq != expected:
                raise SequenceGap(
                    f"incident {incident_ref!r}: expected seq {expected}, got {revision.seq}")
            record = {"record": "revision", **revision.to_json(), "prev": tail["digest"]}
            record["digest"] = _record_digest(record)
            self._append_line(incident_ref, record)
            return revision.seq

    # -- snapshot -------------------------------------------------------------

    def load(self, incident_ref: str) -> IncidentState:
        """Verify the chain and fold the snapshot (every read re-verifies)."""
        records = self._read_records(incident_ref)
        self._verify_chain(incident_ref, records)
        header = records[0]
        report = empty_report(incident_ref, parse_utc(header["created_at"]), header["created_by"])
        deadlines: dict[str, Deadline] = {}
        evidence: dict[str, EvidenceRecord] = {}
        revisions: list[Revision] = []
        for record in records[1:]:
            revision = Revision.from_json(record)
            revisions.append(revision)
            if revision.key == DEADLINE_MARKER:
                deadline = Deadline.from_json(revision.payload["deadline"])
                deadlines[deadline.rule_id] = deadline
            elif revision.key == EVIDENCE_MARKER:
                rec = EvidenceRecord.from_json(revision.payload["evidence"])
                evidence[rec.evidence_id] = rec
        report = fold_revisions(report, revisions)
        return IncidentState(
            report=report,
            deadlines=deadlines,
            evidence=evidence,
            revisions=revisions,
            last_seq=revisions[-1].seq if revisions else 0,
            head_digest=records[-1]["digest"],
        )

    def verify(self, incident_ref: str) -> bool:
        """Re-verify the whole chain; raises IntegrityViolation on a break."""
        self._verify_chain(incident_ref, self._read_records(incident_ref))
        return True

    # -- evidence -------------------------------------------------------------

    def _blob_path(self, incident_ref: str, digest: str) -> Path:
        return self._incident_dir(incident_ref) / "blobs" / digest

    def add_evidence(
        self,
        incident_ref: str,
        description: str,
        artefact: bytes,
        custodian: str,
        at: datetime,
    ) -> tuple[EvidenceRecord, IncidentReport]:
        """Store the artefact bytes, log the custody record, and link the
        evidence id into the collected-evidence element through a normal
        revision."""
        if not artefact:
            raise EmptyArtefact("artefact bytes must be non-empty")
        if not description or not description.strip():
            raise InvalidValue("evidence description must be non-empty")
        at = parse_utc(at)
        artefact_digest = sha256_hex(artefact)
        with self.lock(incident_ref):
            state = self.load(incident_ref)
            evidence_id = "ev-" + sha256_hex(f"{artefact_digest}|{description}|{format_utc(at)}")[:12]
            if evidence_id in state.evidence:
                raise AlreadyRecorded(
                    f"evidence {evidence_id!r} already recorded for {incident_ref!r}")
            blob = self._blob_path(incident_ref, artefact_digest)
            blob.parent.mkdir(parents=True, exist_ok=True)
            if not blob.exists():
                tmp = blob.with_suffix(".tmp")
                tmp.write_bytes(artefact)
                os.replace(tmp, blob)
            record = EvidenceRecord(
                evidence_id=evidence_id,
                description=description,
                artefact_digest=artefact_digest,
                custody=(CustodyEvent(custodian=custodian, action=CustodyAction.COLLECTED, at=at),),
            )
            marker = Revision(
                key=EVIDENCE_MARKER,
                actor=custodian,
                at=at,
                before=digest_obj(None),
                after=digest_obj(record.to_json()),
                payload={"action": "added", "evidence": record.to_json()},
            )
            self.append(incident_ref, marker)

            current = state.report.elements[ElementKey.COLLECTED_EVIDENCE]
            ids = tuple(current.value.evidence_ids) if current.populated else ()
            _, revision = set_element(
                state.report, ElementKey.COLLECTED_EVIDENCE,
                EvidenceList(evidence_ids=ids + (evidence_id,)), custodian, at)
            self.append(incident_ref, revision)
        return record, self.load(incident_ref).report

    def record_custody_event(
        self,
        incident_ref: str,
        evidence_id: str,
        custodian: str,
        action: CustodyAction,
        at: datetime,
    ) -> EvidenceRecord:
        """Extend an artefact's custody trail (transfer or verification)."""
        at = parse_utc(at)
        with self.lock(incident_ref):
            state = self.load(incident_ref)
            if evidence_id not in state.evidence:
                raise UnknownIncident(f"no evidence {evidence_id!r} for {incident_ref!r}")
            old = state.evidence[evidence_id]
            updated = EvidenceRecord(
                evidence_id=old.evidence_id,
                description=old.description,
                artefact_digest=old.artefact_digest,
                custody=old.custody + (CustodyEvent(custodian=custodian, action=action, at=at),),
            )
            marker = Revision(
                key=EVIDENCE_MARKER,
                actor=custodian,
                at=at,
                before=digest_obj(old.to_json()),
                after=digest_obj(updated.to_json()),
                payload={"action": "custody", "evidence": updated.to_json()},
            )
            self.append(incident_ref, marker)
        return updated

    def get_artefact(self, incident_ref: str, artefact_digest: str) -> bytes:
        blob = self._blob_path(incident_ref, artefact_digest)
        if not blob.is_file():
            raise UnknownIncident(f"no artefact {artefact_digest!r} for {incident_ref!r}")
        return blob.read_bytes()

    def verify_custody(self, incident_ref: str, evidence_id: str) -> bool:
        """Recompute the artefact digest and compare with the custody record."""
        state = self.load(incident_ref)
        if evidence_id not in state.evidence:
            raise UnknownIncident(f"no evidence {evidence_id!r} for {incident_ref!r}")
        record = state.evidence[evidence_id]
        try:
            artefact = self.get_artefact(incident_ref, record.artefact_digest)
        except UnknownIncident:
            return False
        return sha256_hex(artefact) == record.artefact_digest

    # -- phase / deadlines ----------------------------------------------------

    def record_phase(self, incident_ref: str, old: Phase, new: Phase, trigger: str,
                     actor: str, at: datetime) -> int:
        revision = Revision(
            key=PHASE_MARKER,
            actor=actor,
            at=parse_utc(at),
            before=digest_obj(old.value),
            after=digest_obj(new.value),
            payload={"phase": new.value, "trigger": trigger},
        )
        return self.append(incident_ref, revision)

    def arm_deadline(self, incident_ref: str, rule: RegTriggerRule, start_at: datetime,
                     actor: str) -> Deadline:
        with self.lock(incident_ref):
            state = self.load(incident_ref)
            if rule.rule_id in state.deadlines:
                raise DuplicateRule(
                    f"rule {rule.rule_id!r} is already armed for {incident_ref!r}")
            deadline = arm_rule(rule, start_at)
            revision = Revision(
                key=DEADLINE_MARKER,
                actor=actor,
                at=parse_utc(start_at),
                before=digest_obj(None),
                after=digest_obj(deadline.to_json()),
                payload={"action": "armed", "deadline": deadline.to_json()},
            )
            self.append(incident_ref, revision)
        return deadline

    def record_notification(self, incident_ref: str, rule_id: str, at: datetime,
                            actor: str) -> Deadline:
        with self.lock(incident_ref):
            state = self.load(incident_ref)
            if rule_id not in state.deadlines:
                raise UnknownRule(f"rule {rule_id!r} is not armed for {incident_ref!r}")
            updated = clock_record_notification(state.deadlines[rule_id], at)
            revision = Revision(
                key=DEADLINE_MARKER,
                actor=actor,
                at=parse_utc(at),
                before=digest_obj(state.deadlines[rule_id].to_json()),
                after=digest_obj(updated.to_json()),
                payload={"action": "notified", "deadline": updated.to_json()},
            )
            self.append(incident_ref, revision)
        return updated

    # -- export / import ------------------------------------------------------

    def export_document(self, incident_ref: str) -> dict[str, Any]:
        """Self-describing export: snapshot plus the full chain, canonical order."""
        state = self.load(incident_ref)
        return build_export_document(state.report, state.revisions,
                                     evidence=state.evidence.values(),
                                     deadlines=state.deadlines.values())

    def export_text(self, incident_ref: str) -> str:
        return json.dumps(self.export_document(incident_ref), indent=2, ensure_ascii=False) + "\n"

    @staticmethod
    def check_document(doc: dict[str, Any]) -> IncidentReport:
        """Validate an export document without writing anything.

        Replays the embedded revision log and requires the result to match
        the claimed snapshot; then runs the full report validation.
        """
        if not isinstance(doc, dict):
            raise IntegrityViolation("export document must be a JSON object")
        if doc.get("format_version") != EXPORT_FORMAT_VERSION:
            raise VersionUnsupported(
                f"document format {doc.get('format_version')!r} unsupported "
                f"(engine speaks {EXPORT_FORMAT_VERSION!r})")
        try:
            ref = doc["incident_ref"]
            base = empty_report(ref, parse_utc(doc["created_at"]), doc["created_by"])
            revisions = [Revision.from_json(r) for r in doc["revisions"]]
            claimed = {k: state_from_json(doc["elements"][k.value]) for k in ALL_KEYS}
            claimed_phase = Phase(doc["phase"])
            claimed_count = doc["revision_count"]
        except (KeyError, TypeError, ValueError, InvalidValue) as exc:
            raise IntegrityViolation(f"malformed export document: {exc}") from exc

        folded = fold_revisions(base, revisions)
        claimed_norm = {k.value: state_to_json(claimed[k]) for k in ALL_KEYS}
        if report_state_json(folded) != claimed_norm:
            raise IntegrityViolation("revision log does not replay to the claimed element states")
        if folded.phase is not claimed_phase:
            raise IntegrityViolation(
                f"revision log replays to phase {folded.phase.value!r}, "
                f"document claims {claimed_phase.value!r}")
        if folded.revision_count != claimed_count:
            raise IntegrityViolation(
                f"revision log holds {folded.revision_count} element revisions, "
                f"document claims {claimed_count}")
        violations = hard_violations(validate(folded))
        if violations:
            raise IntegrityViolation(
                "document violates report invariants",
                detail=[v.to_json() for v in violations])
        return folded

    def import_document(self, doc: dict[str, Any]) -> IncidentReport:
        """Accept an export document as a new incident in this store."""
        folded = self.check_document(doc)
        ref = doc["incident_ref"]
        with self.lock(ref):
            if self.exists(ref):
                raise DuplicateIncident(f"incident {ref!r} already exists in this store")
            incident_dir = self._incident_dir(ref)
            incident_dir.mkdir(parents=True, exist_ok=True)
            (incident_dir / "blobs").mkdir(exist_ok=True)
            header = {
                "record": "header",
                "format_version": EXPORT_FORMAT_VERSION,
                "digest_algorithm": DIGEST_ALGORITHM,
                "incident_ref": ref,
                "created_at": doc["created_at"],
                "created_by": doc["created_by"],
            }
            header["digest"] = _record_digest(header)
            self._append_line(ref, header)
            for revision in (Revision.from_json(r) for r in doc["revisions"]):
                self.append(ref, revision)
            with open(self.data_dir / "incidents.idx", "a", encoding="utf-8") as f:
                f.write(ref + "\n")
                f.flush()
                os.fsync(f.fileno())
        return self.load(ref).report
