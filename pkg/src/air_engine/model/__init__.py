"""Canonical report model: registry, value types, report container."""

from .registry import (
    ALL_KEYS,
    GROUP_LABELS,
    GROUP_ORDER,
    ElementDescriptor,
    ElementGroup,
    ElementKey,
    QuestionTag,
    coerce_key,
    descriptor,
    group_members,
    kind_of,
    question_tags,
    registry,
    registry_index,
)
from .report import (
    DEFAULT_PRIORITY_SCALE,
    Completeness,
    ElementState,
    IncidentReport,
    PriorityScale,
    Revision,
    UNKNOWN,
    Violation,
    apply_revision,
    clear_element,
    completeness,
    create_report,
    empty_report,
    fold_revisions,
    hard_violations,
    report_state_json,
    set_element,
    sort_keys_canonically,
    state_digest,
    state_from_json,
    state_to_json,
    states_equal,
    validate,
)
from .values import (
    Contact,
    Direction,
    Duration,
    ElementValue,
    EventList,
    EvidenceList,
    ItemList,
    NotificationEntry,
    NotificationLedger,
    NotificationStatus,
    PriorityBand,
    PriorityRating,
    RtoProgress,
    Text,
    TimelineEvent,
    Timestamp,
    ValueKind,
    format_utc,
    parse_utc,
    utc_now,
    value_from_json,
    value_to_json,
)

__all__ = [name for name in dir() if not name.startswith("_")]
