"""Canonical JSON and SHA-256 digests.

Digests over JSON-serializable structures always go through the same
canonical rendering (sorted keys, no whitespace, UTF-8) so that two
processes computing the digest of the same logical state agree byte for
byte.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any

DIGEST_ALGORITHM = "sha256"


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def sha256_hex(data: bytes | str) -> str:
    if isinstance(data, str):
        data = data.encode("utf-8")
    return hashlib.sha256(data).hexdigest()


def digest_obj(obj: Any) -> str:
    """SHA-256 of the canonical JSON rendering of a structure."""
    return sha256_hex(canonical_json(obj))
