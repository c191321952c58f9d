"""Engine configuration.

One JSON file configures a deployment: where the store lives, the
activation threshold, the mandatory element set, the audience matrix file,
notification trigger rules, clock-skew tolerance, the site priority scale
and the API bearer tokens. Everything referenced must exist and parse at
startup — a misconfigured engine refuses to start rather than limping.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .lifecycle import default_mandatory_set
from .model.registry import ElementKey, coerce_key
from .model.report import DEFAULT_PRIORITY_SCALE, PriorityScale
from .model.values import PriorityBand
from .regclock import NERC_ONE_HOUR, RegTriggerRule
from .views import AudienceMatrix, default_matrix, load_matrix

DEFAULT_LISTEN_ADDRESS = "127.0.0.1:8478"
DEFAULT_ACTIVATION_THRESHOLD = 0.7
CONFIG_ENV_VAR = "AIR_CONFIG"


@dataclass
class EngineConfig:
    data_dir: Path
    listen_address: str = DEFAULT_LISTEN_ADDRESS
    activation_threshold: float = DEFAULT_ACTIVATION_THRESHOLD
    mandatory_set: set[ElementKey] = field(default_factory=default_mandatory_set)
    audience_matrix: AudienceMatrix = field(default_factory=default_matrix)
    audience_matrix_path: Path | None = None
    trigger_rules: dict[str, RegTriggerRule] = field(default_factory=lambda: {NERC_ONE_HOUR.rule_id: NERC_ONE_HOUR})
    clock_skew_seconds: int = 300
    priority_scale: PriorityScale = DEFAULT_PRIORITY_SCALE
    tokens: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not math.isfinite(self.activation_threshold) or self.activation_threshold < 0:
            raise ConfigError(f"activation_threshold must be finite and non-negative, "
                              f"got {self.activation_threshold!r}")
        if self.clock_skew_seconds < 0:
            raise ConfigError("clock_skew_seconds must be non-negative")


def default_config(data_dir: str | Path = "./air-data") -> EngineConfig:
    return EngineConfig(data_dir=Path(data_dir))


def load_config(path: str | Path) -> EngineConfig:
    """Parse and fully validate a configuration file; fails fast."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"configuration file not found: {path}")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: configuration must be a JSON object")

    base = path.parent

    def resolve(p: str) -> Path:
        candidate = Path(p)
        return candidate if candidate.is_absolute() else base / candidate

    known = {"data_dir", "listen_address", "activation_threshold", "mandatory_set",
             "audience_matrix_path", "trigger_rules", "clock_skew_seconds",
             "priority_scale", "tokens"}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"{path}: unknown configuration keys: {sorted(unknown)}")

    if "data_dir" not in raw:
        raise ConfigError(f"{path}: data_dir is required")
    data_dir = resolve(raw["data_dir"])

    mandatory = default_mandatory_set()
    if "mandatory_set" in raw:
        try:
            mandatory = {coerce_key(k) for k in raw["mandatory_set"]}
        except Exception as exc:
            raise ConfigError(f"{path}: bad mandatory_set: {exc}") from exc

    matrix = default_matrix()
    matrix_path = None
    if raw.get("audience_matrix_path"):
        matrix_path = resolve(raw["audience_matrix_path"])
        if not matrix_path.is_file():
            raise ConfigError(f"{path}: audience matrix file not found: {matrix_path}")
        matrix = load_matrix(matrix_path)

    rules: dict[str, RegTriggerRule] = {NERC_ONE_HOUR.rule_id: NERC_ONE_HOUR}
    if "trigger_rules" in raw:
        rules = {}
        for i, obj in enumerate(raw["trigger_rules"]):
            try:
                rule = RegTriggerRule.from_json(obj)
            except Exception as exc:
                raise ConfigError(f"{path}: trigger_rules[{i}] malformed: {exc}") from exc
            if rule.rule_id in rules:
                raise ConfigError(f"{path}: duplicate trigger rule id {rule.rule_id!r}")
            rules[rule.rule_id] = rule

    scale = DEFAULT_PRIORITY_SCALE
    if "priority_scale" in raw:
        obj = raw["priority_scale"]
        try:
            scale = PriorityScale(
                bands=frozenset(PriorityBand(b) for b in obj.get("bands", [b.value for b in PriorityBand])),
                score_min=obj.get("score_min", 1),
                score_max=obj.get("score_max", 25),
            )
        except Exception as exc:
            raise ConfigError(f"{path}: bad priority_scale: {exc}") from exc

    tokens = raw.get("tokens", {})
    if not isinstance(tokens, dict) or not all(
            isinstance(k, str) and isinstance(v, str) for k, v in tokens.items()):
        raise ConfigError(f"{path}: tokens must map token strings to caller identities")

    return EngineConfig(
        data_dir=data_dir,
        listen_address=raw.get("listen_address", DEFAULT_LISTEN_ADDRESS),
        activation_threshold=raw.get("activation_threshold", DEFAULT_ACTIVATION_THRESHOLD),
        mandatory_set=mandatory,
        audience_matrix=matrix,
        audience_matrix_path=matrix_path,
        trigger_rules=rules,
        clock_skew_seconds=raw.get("clock_skew_seconds", 300),
        priority_scale=scale,
        tokens=dict(tokens),
    )


def resolve_config(explicit_path: str | None = None) -> EngineConfig:
    """Config from an explicit path, the environment variable, or defaults."""
    if explicit_path:
        return load_config(explicit_path)
    env_path = os.environ.get(CONFIG_ENV_VAR)
    if env_path:
        return load_config(env_path)
    return default_config()
