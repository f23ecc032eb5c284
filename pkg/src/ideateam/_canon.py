"""Canonical JSON encoding shared by the wire format and the event log.

Key order follows model field declaration order; no insignificant whitespace.
Identical values must always encode to identical bytes.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any

from pydantic import BaseModel


def to_jsonable(obj: Any) -> Any:
    if isinstance(obj, BaseModel):
        return obj.model_dump(mode="json", by_alias=True)
    return obj


def canonical_dumps(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), ensure_ascii=False, separators=(",", ":"))


def digest(obj: Any) -> str:
    """Hex sha256 of the canonical encoding."""
    return hashlib.sha256(canonical_dumps(obj).encode("utf-8")).hexdigest()
