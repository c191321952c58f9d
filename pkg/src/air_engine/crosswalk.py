"""Standards crosswalk and coverage scoring.

The crosswalk is data, not code: the IT-standards table (one row per
element) and the OT clause table (one row per quoted clause excerpt) ship
as versioned TSV files with recorded checksums, so a standards revision is
a data change. Only the encoded clause excerpts are machine-readable; this
is not a general compliance engine for the full standards.

Coverage scoring is presence-based — a clause is satisfied when every
element it requires is populated — with one exception: clauses that carry a
timing rule (the one-hour notification clause) additionally require the
matching deadline to have been met.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from importlib import resources
from typing import Any, FrozenSet, Iterable

from .digest import sha256_hex
from .errors import CrosswalkIntegrityError, UnknownClause, UnknownStandard
from .model.registry import ALL_KEYS, ElementKey, coerce_key
from .model.report import IncidentReport, sort_keys_canonically

CROSSWALK_VERSION = "1"


class Standard(str, Enum):
    IEC62443 = "iec-62443"
    NIST80082 = "nist-sp-800-82"
    NERCCIP = "nerc-cip"


STANDARD_LABELS = {
    Standard.IEC62443: "ISA/IEC 62443 series",
    Standard.NIST80082: "NIST SP 800-82 (rev. 3)",
    Standard.NERCCIP: "NERC CIP series",
}


def coerce_standard(value: str | Standard) -> Standard:
    if isinstance(value, Standard):
        return value
    try:
        return Standard(value.lower())
    except ValueError:
        raise UnknownStandard(f"unknown standard: {value!r} "
                              f"(expected one of {[s.value for s in Standard]})") from None


@dataclass(frozen=True)
class IsoItem:
    """ISO/IEC 27035 cell: a recorded item, no link, or an adapted mapping."""

    state: str  # "linked" | "none" | "adapted"
    text: str | None = None

    @property
    def linked(self) -> bool:
        return self.state == "linked"

    @property
    def adapted(self) -> bool:
        return self.state == "adapted"


@dataclass(frozen=True)
class NistRef:
    csf_id: str
    adapted: bool = False


@dataclass(frozen=True)
class ItMapping:
    key: ElementKey
    iso27035: IsoItem
    nist_refs: tuple[NistRef, ...]


@dataclass(frozen=True)
class OtClause:
    standard: Standard
    excerpt: str
    elements: FrozenSet[ElementKey]
    timing_rule: str | None = None


def _read_data(name: str) -> str:
    return resources.files("air_engine.data").joinpath(name).read_text(encoding="utf-8")


def _verify_checksums() -> None:
    recorded: dict[str, str] = {}
    for line in _read_data("crosswalk.sha256").splitlines():
        line = line.strip()
        if not line:
            continue
        digest, _, filename = line.partition("  ")
        recorded[filename.strip()] = digest.strip()
    for filename in ("it_crosswalk.tsv", "ot_clauses.tsv"):
        if filename not in recorded:
            raise CrosswalkIntegrityError(f"no recorded checksum for {filename}")
        actual = sha256_hex(_read_data(filename))
        if actual != recorded[filename]:
            raise CrosswalkIntegrityError(
                f"{filename} does not match its recorded checksum "
                f"(expected {recorded[filename]}, got {actual})")


def _data_rows(name: str, columns: int) -> list[list[str]]:
    rows = []
    for lineno, raw in enumerate(_read_data(name).splitlines(), start=1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        cells = raw.split("\t")
        if len(cells) != columns:
            raise CrosswalkIntegrityError(f"{name}:{lineno}: expected {columns} columns, got {len(cells)}")
        rows.append([c.strip() for c in cells])
    return rows


def _parse_it_rows() -> dict[ElementKey, ItMapping]:
    mappings: dict[ElementKey, ItMapping] = {}
    for key_cell, iso_cell, nist_cell in _data_rows("it_crosswalk.tsv", 3):
        key = coerce_key(key_cell)
        if key in mappings:
            raise CrosswalkIntegrityError(f"duplicate IT row for {key.value}")
        if iso_cell == "-":
            iso = IsoItem(state="none")
        elif iso_cell.startswith("adapted:"):
            iso = IsoItem(state="adapted", text=iso_cell[len("adapted:"):])
        else:
            iso = IsoItem(state="linked", text=iso_cell)
        refs: list[NistRef] = []
        if nist_cell != "-":
            for token in nist_cell.split(","):
                token = token.strip()
                if token.startswith("adapted:"):
                    refs.append(NistRef(csf_id=token[len("adapted:"):], adapted=True))
                elif token:
                    refs.append(NistRef(csf_id=token))
        mappings[key] = ItMapping(key=key, iso27035=iso, nist_refs=tuple(refs))
    missing = [k.value for k in ALL_KEYS if k not in mappings]
    if missing:
        raise CrosswalkIntegrityError(f"IT crosswalk misses rows for: {missing}")
    return mappings


def _parse_ot_rows() -> tuple[OtClause, ...]:
    clauses: list[OtClause] = []
    for std_cell, excerpt, elements_cell, rule_cell in _data_rows("ot_clauses.tsv", 4):
        elements = frozenset(coerce_key(t.strip()) for t in elements_cell.split(",") if t.strip())
        if not elements:
            raise CrosswalkIntegrityError(f"clause {excerpt!r} maps to no elements")
        clauses.append(OtClause(
            standard=coerce_standard(std_cell),
            excerpt=excerpt,
            elements=elements,
            timing_rule=None if rule_cell == "-" else rule_cell,
        ))
    return tuple(clauses)


_IT_MAPPINGS: dict[ElementKey, ItMapping] | None = None
_OT_CLAUSES: tuple[OtClause, ...] | None = None


def _dataset() -> tuple[dict[ElementKey, ItMapping], tuple[OtClause, ...]]:
    global _IT_MAPPINGS, _OT_CLAUSES
    if _IT_MAPPINGS is None or _OT_CLAUSES is None:
        _verify_checksums()
        _IT_MAPPINGS = _parse_it_rows()
        _OT_CLAUSES = _parse_ot_rows()
    return _IT_MAPPINGS, _OT_CLAUSES


def it_mapping(key: str | ElementKey) -> ItMapping:
    """Static IT-standards row for one element; total over the 25 keys."""
    mappings, _ = _dataset()
    return mappings[coerce_key(key)]


def all_it_mappings() -> list[ItMapping]:
    mappings, _ = _dataset()
    return [mappings[k] for k in ALL_KEYS]


def ot_clauses(standard: str | Standard | None = None) -> list[OtClause]:
    _, clauses = _dataset()
    if standard is None:
        return list(clauses)
    std = coerce_standard(standard)
    return [c for c in clauses if c.standard is std]


def ot_clause_elements(standard: str | Standard, excerpt: str) -> frozenset[ElementKey]:
    """Elements required by one clause excerpt; UnknownClause if not encoded."""
    std = coerce_standard(standard)
    for clause in ot_clauses(std):
        if clause.excerpt == excerpt:
            return clause.elements
    raise UnknownClause(f"no encoded clause {excerpt!r} under {std.value}")


def reverse_lookup(key: str | ElementKey) -> list[tuple[Standard, str]]:
    """All clauses whose element set contains the key, in dataset order."""
    key = coerce_key(key)
    return [(c.standard, c.excerpt) for c in ot_clauses() if key in c.elements]


class CoverageStatus(str, Enum):
    SATISFIED = "satisfied"
    PARTIAL = "partial"
    MISSING = "missing"


@dataclass(frozen=True)
class CoverageRow:
    excerpt: str
    required: tuple[ElementKey, ...]
    populated: tuple[ElementKey, ...]
    status: CoverageStatus
    note: str | None = None

    def to_json(self) -> dict[str, Any]:
        return {
            "excerpt": self.excerpt,
            "required": [k.value for k in self.required],
            "populated": [k.value for k in self.populated],
            "status": self.status.value,
            "note": self.note,
        }


@dataclass(frozen=True)
class CoverageReport:
    standard: Standard
    rows: tuple[CoverageRow, ...]
    summary: float

    def row(self, excerpt: str) -> CoverageRow:
        for r in self.rows:
            if r.excerpt == excerpt:
                return r
        raise UnknownClause(f"no coverage row for {excerpt!r}")

    def to_json(self) -> dict[str, Any]:
        return {
            "standard": self.standard.value,
            "standard_label": STANDARD_LABELS[self.standard],
            "summary": self.summary,
            "rows": [r.to_json() for r in self.rows],
        }


def coverage_report(
    report: IncidentReport,
    standard: str | Standard,
    met_timing_rules: Iterable[str] = (),
) -> CoverageReport:
    """Score every clause of a standard against the report's population.

    ``met_timing_rules`` lists notification-rule ids whose deadline was met;
    a timing clause only reaches Satisfied when its rule is in that set.
    """
    std = coerce_standard(standard)
    met = set(met_timing_rules)
    rows: list[CoverageRow] = []
    for clause in ot_clauses(std):
        required = tuple(sort_keys_canonically(clause.elements))
        populated = tuple(k for k in required if report.elements[k].populated)
        note = None
        if not populated:
            status = CoverageStatus.MISSING
        elif len(populated) < len(required):
            status = CoverageStatus.PARTIAL
        elif clause.timing_rule and clause.timing_rule not in met:
            status = CoverageStatus.PARTIAL
            note = f"elements populated but notification rule {clause.timing_rule!r} not met in time"
        else:
            status = CoverageStatus.SATISFIED
            if clause.timing_rule:
                note = f"notification rule {clause.timing_rule!r} met in time"
        rows.append(CoverageRow(excerpt=clause.excerpt, required=required,
                                populated=populated, status=status, note=note))
    satisfied = sum(1 for r in rows if r.status is CoverageStatus.SATISFIED)
    return CoverageReport(standard=std, rows=tuple(rows),
                          summary=satisfied / len(rows) if rows else 1.0)
