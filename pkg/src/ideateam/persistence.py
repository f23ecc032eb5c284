"""Durable storage and bit-exact replay of team configs and session event logs.

Log files are one header line plus one canonical-JSON event per line, so each
line parses independently and identical logs are byte-identical files. A
partially written final line (crash) is detected and truncated on next open.
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Optional

from ._canon import canonical_dumps
from .engine import FoldState, fold_events
from .events import SessionEvent, parse_event
from .team import TeamConfig

FORMAT_VERSION = 1


class SequenceGapError(ValueError):
    """Appended event does not continue the sequence."""


class CorruptLogError(ValueError):
    def __init__(self, line_no: int, detail: str) -> None:
        super().__init__(f"line {line_no}: {detail}")
        self.line_no = line_no
        self.detail = detail


class UnsupportedVersionError(ValueError):
    """Missing header or a format version this build cannot read."""


def log_path(data_dir: Path, session_id: str) -> Path:
    return Path(data_dir) / "sessions" / f"{session_id}.events.jsonl"


def team_path(data_dir: Path, team_id: str) -> Path:
    return Path(data_dir) / "teams" / f"{team_id}.json"


class LogWriter:
    """Single writer per log file; every event is flushed as one line."""

    def __init__(self, path: Path, session_id: str, config_digest: str) -> None:
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._last_seq: Optional[int] = None
        header = {
            "format_version": FORMAT_VERSION,
            "session_id": session_id,
            "config_digest": config_digest,
        }
        self._fh = open(self.path, "w", encoding="utf-8", newline="\n")
        self._fh.write(json.dumps(header, ensure_ascii=False, separators=(",", ":")) + "\n")
        self._fh.flush()

    def append(self, event: SessionEvent) -> None:
        expected = 0 if self._last_seq is None else self._last_seq + 1
        if event.seq != expected:
            raise SequenceGapError(f"expected seq {expected}, got {event.seq}")
        self._fh.write(event.to_json() + "\n")
        self._fh.flush()
        os.fsync(self._fh.fileno())
        self._last_seq = event.seq

    def close(self) -> None:
        if not self._fh.closed:
            self._fh.close()

    def __enter__(self) -> "LogWriter":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def recover_truncated_tail(path: Path) -> bool:
    """Drop a partial final line left by a crash; True if anything was cut."""
    raw = Path(path).read_bytes()
    if not raw or raw.endswith(b"\n"):
        return False
    keep = raw.rfind(b"\n") + 1
    with open(path, "wb") as fh:
        fh.write(raw[:keep])
    return True


def read_log(path: Path) -> tuple[dict, list[SessionEvent]]:
    """Parse header and events; recovers a truncated tail first."""
    path = Path(path)
    recover_truncated_tail(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines:
        raise UnsupportedVersionError("empty file (missing header)")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise UnsupportedVersionError(f"unreadable header: {exc}") from exc
    if not isinstance(header, dict) or header.get("format_version") != FORMAT_VERSION:
        raise UnsupportedVersionError(f"unsupported format: {header!r}")

    events: list[SessionEvent] = []
    expected_seq = 0
    for line_no, line in enumerate(lines[1:], start=2):
        try:
            event = parse_event(line)
        except Exception as exc:
            raise CorruptLogError(line_no, str(exc)) from None
        if event.seq != expected_seq:
            raise CorruptLogError(line_no, f"sequence gap: expected {expected_seq}, got {event.seq}")
        expected_seq += 1
        events.append(event)

    if events:
        first = events[0]
        if getattr(first, "config", None) is not None:
            if first.config.digest() != header.get("config_digest"):
                raise CorruptLogError(2, "header digest does not match the embedded config")
    return header, events


def replay(path: Path) -> tuple[FoldState, list[SessionEvent]]:
    """Fold a stored log back into the observable final session state."""
    _, events = read_log(path)
    return fold_events(events), events


def write_team(data_dir: Path, config: TeamConfig) -> str:
    """Store a config under its content digest; idempotent."""
    team_id = config.digest()[:12]
    path = team_path(data_dir, team_id)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(config.canonical_json() + "\n", encoding="utf-8")
    return team_id


def read_team(data_dir: Path, team_id: str) -> TeamConfig:
    path = team_path(data_dir, team_id)
    return TeamConfig.model_validate_json(path.read_text(encoding="utf-8"))
