"""Audience-scoped report views.

Need-to-know projection: each audience sees exactly the elements its
matrix grant lists, values copied verbatim, never transformed or
summarized. Unknown slots stay visible in a view (as pending), because
knowing what is missing is what drives coordination during a live
incident.

The audience matrix is deployment configuration, loaded from a flat text
file: one ``audience: key, key, ...`` line per audience, ``*`` for a full
grant, ``#`` comments. The built-in default matrix is a documented,
non-normative starting point.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime
from typing import Any, Iterable

from .errors import MatrixFileError, MixedSourceViews, UndeclaredAudience, UnknownKey
from .model.registry import ALL_KEYS, ElementKey, coerce_key, question_tags as _registry_tags, QuestionTag
from .model.report import ElementState, IncidentReport, sort_keys_canonically, state_to_json
from .model.values import format_utc, utc_now


def question_tags(key: str | ElementKey) -> frozenset[QuestionTag]:
    """Which of the seven questions an element answers; total over the 25 keys."""
    return _registry_tags(key)


@dataclass(frozen=True)
class AudienceMatrix:
    """Per-audience element grants. Audience names are unique case-insensitively."""

    grants: dict[str, frozenset[ElementKey]]

    def __post_init__(self):
        lowered = [name.lower() for name in self.grants]
        if len(set(lowered)) != len(lowered):
            raise MatrixFileError("audience names must be unique (case-insensitive)")

    def audiences(self) -> list[str]:
        return list(self.grants)

    def resolve(self, audience: str) -> str:
        """Declared name for a case-insensitive lookup; UndeclaredAudience otherwise."""
        wanted = audience.lower()
        for name in self.grants:
            if name.lower() == wanted:
                return name
        raise UndeclaredAudience(f"audience {audience!r} is not declared in the matrix")

    def grant(self, audience: str) -> frozenset[ElementKey]:
        return self.grants[self.resolve(audience)]

    def covering(self) -> bool:
        """True when the union of all grants spans the full element set."""
        union: set[ElementKey] = set()
        for keys in self.grants.values():
            union |= keys
        return union == set(ALL_KEYS)


def default_matrix() -> AudienceMatrix:
    """Shipped default: technical teams see everything, management everything
    but raw evidence, regulators the compliance-relevant core."""
    k = ElementKey
    regulator = frozenset({
        k.INCIDENT_PRIORITY,
        k.DETECTION_TIMESTAMP,
        k.TIMELINE_OF_EVENTS,
        k.AFFECTED_ASSETS_SYSTEMS,
        k.INCIDENT_TYPE,
        k.ATTACK_VECTOR,
        k.INCIDENT_DESCRIPTION,
        k.SAFETY_IMPACT,
        k.OPERATIONAL_IMPACT,
        k.ENVIRONMENTAL_IMPACT,
        k.FINANCIAL_IMPACT,
        k.ESTIMATED_TIME_TO_SAFE_RECOVERY,
        k.REGULATORY_TRIGGER,
        k.INTERNAL_EXTERNAL_REPORTING,
    })
    return AudienceMatrix(grants={
        "technical_team": frozenset(ALL_KEYS),
        "management": frozenset(set(ALL_KEYS) - {k.COLLECTED_EVIDENCE}),
        "regulator": regulator,
    })


def parse_matrix(text: str, source: str = "<matrix>") -> AudienceMatrix:
    """Parse the flat matrix format with line-precise errors."""
    grants: dict[str, frozenset[ElementKey]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if ":" not in line:
            raise MatrixFileError(f"{source}:{lineno}: expected 'audience: key, key, ...'")
        name, _, rest = line.partition(":")
        name = name.strip()
        if not name:
            raise MatrixFileError(f"{source}:{lineno}: empty audience name")
        if name.lower() in (existing.lower() for existing in grants):
            raise MatrixFileError(f"{source}:{lineno}: duplicate audience {name!r}")
        rest = rest.strip()
        if rest == "*":
            grants[name] = frozenset(ALL_KEYS)
            continue
        keys: set[ElementKey] = set()
        if rest:
            for token in rest.split(","):
                token = token.strip()
                if not token:
                    continue
                try:
                    keys.add(coerce_key(token))
                except UnknownKey:
                    raise MatrixFileError(f"{source}:{lineno}: unknown element key {token!r}") from None
        grants[name] = frozenset(keys)
    if not grants:
        raise MatrixFileError(f"{source}: matrix declares no audiences")
    return AudienceMatrix(grants=grants)


def load_matrix(path) -> AudienceMatrix:
    from pathlib import Path

    p = Path(path)
    return parse_matrix(p.read_text(encoding="utf-8"), source=str(p))


def render_matrix(matrix: AudienceMatrix) -> str:
    lines = ["# audience matrix: one 'audience: key, key, ...' line each; '*' grants all 25"]
    for name, keys in matrix.grants.items():
        if keys == frozenset(ALL_KEYS):
            lines.append(f"{name}: *")
        else:
            lines.append(f"{name}: " + ", ".join(k.value for k in sort_keys_canonically(keys)))
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class RedactedView:
    """Projection of a report for one audience; values are verbatim copies."""

    audience: str
    incident_ref: str
    elements: dict[ElementKey, ElementState]
    generated_at: datetime
    source_revision_count: int

    def withheld_count(self) -> int:
        return len(ALL_KEYS) - len(self.elements)

    def to_json(self) -> dict[str, Any]:
        return {
            "audience": self.audience,
            "incident_ref": self.incident_ref,
            "generated_at": format_utc(self.generated_at),
            "source_revision_count": self.source_revision_count,
            "withheld_count": self.withheld_count(),
            "elements": {k.value: state_to_json(self.elements[k])
                         for k in sort_keys_canonically(self.elements)},
        }


def render_view(
    report: IncidentReport,
    audience: str,
    matrix: AudienceMatrix,
    now: datetime | None = None,
) -> RedactedView:
    """Project the report onto one audience's grant (Unknown slots included)."""
    granted = matrix.grant(audience)
    elements = {k: report.elements[k] for k in sort_keys_canonically(granted)}
    return RedactedView(
        audience=matrix.resolve(audience),
        incident_ref=report.incident_ref,
        elements=elements,
        generated_at=now or utc_now(),
        source_revision_count=report.revision_count,
    )


def merge_views(views: Iterable[RedactedView]) -> dict[ElementKey, ElementState]:
    """Union of views taken from the same report at the same revision."""
    views = list(views)
    if not views:
        return {}
    first = views[0]
    merged: dict[ElementKey, ElementState] = {}
    for view in views:
        if view.incident_ref != first.incident_ref or view.source_revision_count != first.source_revision_count:
            raise MixedSourceViews(
                "views must derive from the same report at the same revision count")
        merged.update(view.elements)
    return {k: merged[k] for k in sort_keys_canonically(merged)}
