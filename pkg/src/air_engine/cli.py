"""Command-line interface.

Operates directly on the same store as the HTTP service (the per-incident
file lock excludes concurrent writers), so a coordinator can drive an
incident from a terminal while host frameworks talk to the API.

Exit codes: 0 success, 1 domain error (rendered with its stable code),
2 usage error.
"""

from __future__ import annotations

import getpass
import json
import sys
from pathlib import Path

import click

from .config import resolve_config
from .crosswalk import Standard
from .engine import Engine
from .errors import AirError
from .model.registry import kind_of
from .model.report import hard_violations
from .model.values import ValueKind, format_utc
from .views import render_matrix


def _default_actor() -> str:
    try:
        return getpass.getuser()
    except Exception:
        return "operator"


class CliContext:
    def __init__(self, config_path: str | None, output_format: str, actor: str):
        self.config_path = config_path
        self.output_format = output_format
        self.actor = actor
        self._engine: Engine | None = None

    @property
    def engine(self) -> Engine:
        if self._engine is None:
            self._engine = Engine(resolve_config(self.config_path))
        return self._engine

    def emit(self, payload: dict, text: str) -> None:
        if self.output_format == "json":
            click.echo(json.dumps(payload, indent=2, ensure_ascii=False))
        else:
            click.echo(text)


pass_ctx = click.make_pass_decorator(CliContext)


def _run(ctx: CliContext, fn):
    try:
        return fn()
    except AirError as exc:
        if ctx.output_format == "json":
            click.echo(json.dumps(exc.as_dict(), indent=2, ensure_ascii=False), err=True)
        else:
            click.echo(f"error [{exc.code}]: {exc.message}", err=True)
        sys.exit(1)


@click.group()
@click.option("--config", "config_path", envvar="AIR_CONFIG", default=None,
              help="Engine configuration file (or AIR_CONFIG).")
@click.option("--format", "output_format", type=click.Choice(["text", "json"]), default="text",
              help="Output format.")
@click.option("--actor", default=_default_actor, help="Actor recorded on revisions.")
@click.pass_context
def main(ctx, config_path, output_format, actor):
    """Live OT incident reporting: author, validate, redact, track and export."""
    ctx.obj = CliContext(config_path, output_format, actor)


@main.command()
@click.option("--detected-at", required=True, help="Detection timestamp (RFC 3339 UTC).")
@click.option("--source", required=True, help="Detection source.")
@click.option("--ref", default=None, help="Incident reference (generated if omitted).")
@click.option("--activate", is_flag=True, help="Activate immediately (Draft -> Detection & Reporting).")
@pass_ctx
def create(ctx, detected_at, source, ref, activate):
    """Open a new incident report."""
    def go():
        report = ctx.engine.create_incident(detected_at, source, ctx.actor,
                                            incident_ref=ref, activate=activate)
        ctx.emit({"incident_ref": report.incident_ref, "phase": report.phase.value,
                  "revision_count": report.revision_count},
                 f"created {report.incident_ref} (phase {report.phase.value})")
    _run(ctx, go)


def _build_value(key: str, value_arg: str | None, json_arg: str | None) -> dict:
    kind = kind_of(key)
    if json_arg is not None:
        payload = json.loads(json_arg)
        if isinstance(payload, list):
            if kind is ValueKind.ITEM_LIST:
                payload = {"items": payload}
            elif kind is ValueKind.EVIDENCE_LIST:
                payload = {"evidence_ids": payload}
            elif kind is ValueKind.EVENT_LIST:
                payload = {"events": payload}
            elif kind is ValueKind.NOTIFICATION_LEDGER:
                payload = {"entries": payload}
        if isinstance(payload, dict):
            payload.setdefault("kind", kind.value)
        return payload
    if value_arg is None:
        raise click.UsageError("provide a VALUE for text-like elements or --json for structured ones")
    if kind is ValueKind.TEXT:
        return {"kind": kind.value, "text": value_arg}
    if kind is ValueKind.TIMESTAMP:
        return {"kind": kind.value, "at": value_arg}
    if kind is ValueKind.DURATION:
        return {"kind": kind.value, "seconds": int(value_arg)}
    raise click.UsageError(f"{key} takes {kind.value}; pass the payload with --json")


@main.command("set")
@click.argument("ref")
@click.argument("key")
@click.argument("value", required=False)
@click.option("--json", "json_arg", default=None, help="Structured value payload (JSON).")
@click.option("--at", default=None, help="Change timestamp (defaults to now).")
@click.option("--expect", "expected", type=int, default=None,
              help="Reject if the report moved past this revision count.")
@pass_ctx
def set_cmd(ctx, ref, key, value, json_arg, at, expected):
    """Populate one element."""
    def go():
        payload = _build_value(key, value, json_arg)
        result = ctx.engine.set_element(ref, key, payload, ctx.actor, at=at,
                                        expected_revision_count=expected)
        ctx.emit({"seq": result.seq, "revision_count": result.revision_count},
                 f"{ref}: {key} set (seq {result.seq}, revision {result.revision_count})")
    _run(ctx, go)


@main.command()
@click.argument("ref")
@click.argument("key")
@click.option("--expect", "expected", type=int, default=None)
@pass_ctx
def clear(ctx, ref, key, expected):
    """Return one element to unknown (recorded, never silent)."""
    def go():
        result = ctx.engine.clear_element(ref, key, ctx.actor, expected_revision_count=expected)
        ctx.emit({"seq": result.seq, "revision_count": result.revision_count},
                 f"{ref}: {key} cleared (seq {result.seq}, revision {result.revision_count})")
    _run(ctx, go)


@main.group()
def timeline():
    """Running timeline of observations and actions."""


@timeline.command("add")
@click.argument("ref")
@click.argument("description")
@click.option("--at", default=None, help="Event instant (RFC 3339 UTC); omit if only order is known.")
@pass_ctx
def timeline_add(ctx, ref, description, at):
    """Insert a timeline event (kept in timestamp order, ties by insertion)."""
    def go():
        result = ctx.engine.add_timeline_event(ref, description, event_at=at, actor=ctx.actor)
        ctx.emit({"seq": result.seq, "revision_count": result.revision_count},
                 f"{ref}: timeline event added (revision {result.revision_count})")
    _run(ctx, go)


@main.group()
def evidence():
    """Preserved artefacts with chain-of-custody records."""


@evidence.command("add")
@click.argument("ref")
@click.option("--description", required=True)
@click.option("--file", "file_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Artefact file to preserve.")
@click.option("--text", "text_artefact", default=None, help="Inline artefact content.")
@pass_ctx
def evidence_add(ctx, ref, description, file_path, text_artefact):
    """Preserve an artefact: hash it, store the bytes, link the evidence id."""
    if (file_path is None) == (text_artefact is None):
        raise click.UsageError("provide exactly one of --file or --text")
    def go():
        artefact = Path(file_path).read_bytes() if file_path else text_artefact.encode("utf-8")
        record = ctx.engine.add_evidence(ref, description, artefact, ctx.actor)
        ctx.emit(record.to_json(),
                 f"{ref}: evidence {record.evidence_id} collected "
                 f"(sha256 {record.artefact_digest[:12]}...)")
    _run(ctx, go)


@evidence.command("verify")
@click.argument("ref")
@click.argument("evidence_id")
@pass_ctx
def evidence_verify(ctx, ref, evidence_id):
    """Recompute an artefact digest against its custody record."""
    def go():
        ok = ctx.engine.store.verify_custody(ref, evidence_id)
        ctx.emit({"evidence_id": evidence_id, "intact": ok},
                 f"{evidence_id}: {'intact' if ok else 'TAMPERED OR MISSING'}")
        if not ok:
            sys.exit(1)
    _run(ctx, go)


@main.command()
@click.argument("ref")
@click.option("--audience", required=True)
@pass_ctx
def view(ctx, ref, audience):
    """Render the need-to-know view for one audience."""
    def go():
        v = ctx.engine.render_view(ref, audience)
        lines = [f"view for {v.audience} on {ref} "
                 f"(revision {v.source_revision_count}, withheld {v.withheld_count()}):"]
        for key, state in v.elements.items():
            mark = "pending" if not state.populated else _short_value(state)
            lines.append(f"  {key.value}: {mark}")
        ctx.emit(v.to_json(), "\n".join(lines))
    _run(ctx, go)


def _short_value(state) -> str:
    from .model.report import state_to_json

    rendered = json.dumps(state_to_json(state)["value"], ensure_ascii=False)
    return rendered if len(rendered) <= 100 else rendered[:97] + "..."


@main.command()
@click.argument("ref")
@click.option("--standard", required=True,
              type=click.Choice([s.value for s in Standard], case_sensitive=False))
@click.option("--now", default=None, help="Evaluation instant for timing clauses.")
@pass_ctx
def coverage(ctx, ref, standard, now):
    """Score a standard's clause excerpts against the report."""
    def go():
        from .model.values import parse_utc
        report = ctx.engine.coverage(ref, standard, now=parse_utc(now) if now else None)
        lines = [f"{report.standard.value} coverage of {ref}: "
                 f"{report.summary:.0%} of {len(report.rows)} clauses satisfied"]
        for row in report.rows:
            lines.append(f"  [{row.status.value:9}] \"{row.excerpt}\" "
                         f"({len(row.populated)}/{len(row.required)} elements)")
        ctx.emit(report.to_json(), "\n".join(lines))
    _run(ctx, go)


@main.group()
def deadline():
    """Regulatory notification clocks."""


@deadline.command("arm")
@click.argument("ref")
@click.argument("rule_id")
@click.option("--at", "start_at", required=True, help="Clock start (determination/detection instant).")
@pass_ctx
def deadline_arm(ctx, ref, rule_id, start_at):
    """Arm a configured rule's clock for this incident."""
    def go():
        d = ctx.engine.arm_deadline(ref, rule_id, start_at, ctx.actor)
        ctx.emit(d.to_json(),
                 f"{ref}: rule {rule_id} armed, due {format_utc(d.due_at)}")
    _run(ctx, go)


@deadline.command("notify")
@click.argument("ref")
@click.argument("rule_id")
@click.option("--at", required=True, help="Notification instant.")
@pass_ctx
def deadline_notify(ctx, ref, rule_id, at):
    """Record that the regulator was notified."""
    def go():
        d = ctx.engine.record_notification(ref, rule_id, at, ctx.actor)
        from .regclock import status as clock_status
        from .model.values import parse_utc
        s = clock_status(d, parse_utc(at))
        ctx.emit({**d.to_json(), "status": s.value},
                 f"{ref}: rule {rule_id} notification recorded at {at} ({s.value})\n"
                 f"  reminder: update internal_external_reporting for {d.authority} "
                 f"(the clock never edits the ledger itself)")
    _run(ctx, go)


@deadline.command("status")
@click.argument("ref")
@click.option("--now", default=None, help="Evaluation instant (defaults to the current time).")
@pass_ctx
def deadline_status(ctx, ref, now):
    """Show every armed clock with its computed status."""
    def go():
        from .model.values import parse_utc
        views = ctx.engine.deadlines(ref, now=parse_utc(now) if now else None)
        if not views:
            ctx.emit({"deadlines": []}, f"{ref}: no armed deadlines")
            return
        lines = [f"{ref}: {len(views)} armed deadline(s)"]
        for v in views:
            remaining = v.remaining_seconds
            extra = (f"{remaining}s remaining" if v.status.value == "pending"
                     else f"{-remaining}s past due" if v.status.value == "overdue" else "")
            lines.append(f"  {v.deadline.rule_id}: {v.status.value} "
                         f"(due {format_utc(v.deadline.due_at)}) {extra}".rstrip())
        ctx.emit({"deadlines": [v.to_json() for v in views]}, "\n".join(lines))
    _run(ctx, go)


@main.command()
@click.argument("ref")
@click.argument("trigger")
@pass_ctx
def phase(ctx, ref, trigger):
    """Advance the lifecycle (activated, assessment_started, response_started,
    re_triage, safe_state_reached)."""
    def go():
        report = ctx.engine.transition(ref, trigger, ctx.actor)
        ctx.emit({"incident_ref": ref, "phase": report.phase.value},
                 f"{ref}: phase -> {report.phase.value}")
    _run(ctx, go)


@main.command()
@click.argument("ref")
@pass_ctx
def validate(ctx, ref, ):
    """Check record-level rules and report completeness."""
    def go():
        issues = ctx.engine.validate(ref)
        violations = hard_violations(issues)
        notes = [v for v in issues if v.informational]
        c = ctx.engine.completeness(ref)
        payload = {
            "violations": [v.to_json() for v in violations],
            "notes": [v.to_json() for v in notes],
            "completeness": {"fraction": c.fraction, "populated_count": c.populated_count,
                             "unknown_keys": [k.value for k in c.unknown_keys]},
        }
        lines = [f"{ref}: {len(violations)} violations, "
                 f"completeness {c.populated_count}/25 ({c.fraction:.2f})"]
        for v in violations:
            lines.append(f"  violation [{v.code}] {v.key.value if v.key else '-'}: {v.message}")
        for v in notes:
            lines.append(f"  note [{v.code}] {v.key.value if v.key else '-'}: {v.message}")
        ctx.emit(payload, "\n".join(lines))
    _run(ctx, go)


@main.command()
@click.argument("ref")
@pass_ctx
def readiness(ctx, ref):
    """Is the report shareable (mandatory set populated)?"""
    def go():
        r = ctx.engine.readiness(ref)
        missing = [k.value for k in r.missing_mandatory]
        ctx.emit({"shareable": r.shareable, "missing_mandatory": missing},
                 f"{ref}: {'shareable' if r.shareable else 'not shareable'}"
                 + (f", missing: {', '.join(missing)}" if missing else ""))
    _run(ctx, go)


@main.command()
@click.argument("ref")
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None,
              help="Write to a file (suffix .air.json) instead of stdout.")
@pass_ctx
def export(ctx, ref, output):
    """Write the canonical export document."""
    def go():
        text = ctx.engine.export_text(ref)
        if output:
            path = Path(output)
            if not path.name.endswith(".air.json"):
                path = path.with_name(path.name + ".air.json")
            path.write_text(text, encoding="utf-8")
            ctx.emit({"written": str(path)}, f"exported {ref} -> {path}")
        else:
            click.echo(text, nl=False)
    _run(ctx, go)


@main.command("import")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@pass_ctx
def import_cmd(ctx, file):
    """Accept an export document as a new incident (replay-verified)."""
    def go():
        doc = json.loads(Path(file).read_text(encoding="utf-8"))
        report = ctx.engine.import_document(doc)
        ctx.emit({"incident_ref": report.incident_ref, "revision_count": report.revision_count},
                 f"imported {report.incident_ref} ({report.revision_count} revisions)")
    _run(ctx, go)


@main.group()
def fixture():
    """Canonical demonstration data."""


@fixture.command("load")
@click.argument("name")
@pass_ctx
def fixture_load(ctx, name):
    """Load a named fixture (available: ukraine2015)."""
    def go():
        report = ctx.engine.load_fixture(name)
        c = ctx.engine.completeness(report.incident_ref)
        ctx.emit({"incident_ref": report.incident_ref, "phase": report.phase.value,
                  "populated_count": c.populated_count},
                 f"loaded {report.incident_ref}: {c.populated_count}/25 elements populated, "
                 f"phase {report.phase.value}")
    _run(ctx, go)


@main.command()
@pass_ctx
def incidents(ctx):
    """List incidents in the store."""
    def go():
        refs = ctx.engine.list_incidents()
        ctx.emit({"incidents": refs}, "\n".join(refs) if refs else "(no incidents)")
    _run(ctx, go)


@main.command()
@pass_ctx
def registry(ctx):
    """Show the canonical element registry."""
    def go():
        rows = ctx.engine.registry_json()
        lines = []
        current_group = None
        for row in rows:
            if row["group"] != current_group:
                current_group = row["group"]
                lines.append(f"{row['group_label']}:")
            tags = ",".join(row["question_tags"])
            lines.append(f"  {row['key']} ({row['kind']}) [{tags}]")
        ctx.emit({"elements": rows}, "\n".join(lines))
    _run(ctx, go)


@main.command()
@pass_ctx
def audiences(ctx):
    """Show the audience matrix in its file format."""
    def go():
        ctx.emit({"audiences": ctx.engine.audiences(),
                  "matrix": render_matrix(ctx.engine.config.audience_matrix)},
                 render_matrix(ctx.engine.config.audience_matrix).rstrip())
    _run(ctx, go)


@main.command()
@pass_ctx
def serve(ctx):
    """Run the HTTP service on the configured listen address."""
    def go():
        from .api import serve as run_service
        run_service(ctx.engine)
    _run(ctx, go)


if __name__ == "__main__":
    main()
