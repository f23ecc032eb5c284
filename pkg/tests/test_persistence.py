"""Log files: append discipline, crash recovery, corruption detection, replay."""

import json

import pytest

from ideateam.engine import states_equal
from ideateam.persistence import (
    CorruptLogError,
    LogWriter,
    SequenceGapError,
    UnsupportedVersionError,
    log_path,
    read_log,
    recover_truncated_tail,
    replay,
    read_team,
    write_team,
)
from ideateam.reflection import member_activity, summarize

from conftest import run_fuzz_session, star_config


def write_session(tmp_path, seed: int = 5):
    session, log = run_fuzz_session(seed)
    path = log_path(tmp_path, session.session_id)
    with LogWriter(path, session.session_id, session.config.digest()) as writer:
        for event in log:
            writer.append(event)
    return session, log, path


class TestAppend:
    def test_lines_are_header_plus_events(self, tmp_path):
        session, log, path = write_session(tmp_path)
        lines = path.read_text().splitlines()
        assert len(lines) == len(log) + 1
        header = json.loads(lines[0])
        assert header == {
            "format_version": 1,
            "session_id": session.session_id,
            "config_digest": session.config.digest(),
        }

    def test_sequence_gap_rejected(self, tmp_path):
        _, log, _ = write_session(tmp_path)
        writer = LogWriter(tmp_path / "gap.jsonl", "s", "d")
        writer.append(log[0])
        with pytest.raises(SequenceGapError):
            writer.append(log[2])
        writer.close()

    def test_identical_logs_are_byte_identical_files(self, tmp_path):
        _, _, path_a = write_session(tmp_path / "a", seed=8)
        _, _, path_b = write_session(tmp_path / "b", seed=8)
        assert path_a.read_bytes() == path_b.read_bytes()


class TestCrashRecovery:
    def test_truncated_final_line_is_dropped(self, tmp_path):
        _, log, path = write_session(tmp_path)
        raw = path.read_bytes()
        cut = raw[: len(raw) - 17]  # mid-line, no trailing newline
        path.write_bytes(cut)
        assert recover_truncated_tail(path)
        _, events = read_log(path)
        assert len(events) == len(log) - 1
        assert events[-1].seq == len(events) - 1

    def test_read_log_recovers_implicitly(self, tmp_path):
        _, log, path = write_session(tmp_path)
        path.write_bytes(path.read_bytes()[:-9])
        _, events = read_log(path)
        assert len(events) == len(log) - 1

    def test_clean_file_is_untouched(self, tmp_path):
        _, _, path = write_session(tmp_path)
        before = path.read_bytes()
        assert not recover_truncated_tail(path)
        assert path.read_bytes() == before


class TestCorruption:
    def test_tampered_line_reports_line_number(self, tmp_path):
        _, _, path = write_session(tmp_path)
        lines = path.read_text().splitlines()
        lines[4] = lines[4][:-3] + "..."
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(CorruptLogError) as excinfo:
            read_log(path)
        assert excinfo.value.line_no == 5

    def test_sequence_gap_in_file_is_corrupt(self, tmp_path):
        _, _, path = write_session(tmp_path)
        lines = path.read_text().splitlines()
        del lines[3]
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(CorruptLogError) as excinfo:
            read_log(path)
        assert excinfo.value.line_no == 4

    def test_empty_file_is_unsupported_version(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        path.write_text("")
        with pytest.raises(UnsupportedVersionError):
            read_log(path)

    def test_wrong_version_rejected(self, tmp_path):
        _, _, path = write_session(tmp_path)
        lines = path.read_text().splitlines()
        lines[0] = lines[0].replace('"format_version":1', '"format_version":99')
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(UnsupportedVersionError):
            read_log(path)

    def test_digest_mismatch_is_corrupt(self, tmp_path):
        _, _, path = write_session(tmp_path)
        lines = path.read_text().splitlines()
        header = json.loads(lines[0])
        header["config_digest"] = "0" * 64
        lines[0] = json.dumps(header, separators=(",", ":"))
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(CorruptLogError):
            read_log(path)


class TestReplay:
    @pytest.mark.parametrize("seed", [2, 9, 23])
    def test_replayed_state_equals_live(self, tmp_path, seed):
        session, log, path = write_session(tmp_path, seed=seed)
        state, events = replay(path)
        assert states_equal(state.to_dict(), session.snapshot())
        assert len(events) == len(log)

    def test_reflection_identical_after_replay(self, tmp_path):
        session, log, path = write_session(tmp_path, seed=31)
        _, events = replay(path)
        assert summarize(events) == summarize(log)
        assert member_activity(events) == member_activity(log)

    def test_round_trip_serialization_is_identity(self, tmp_path):
        _, log, path = write_session(tmp_path, seed=12)
        _, events = replay(path)
        assert [e.to_json() for e in events] == [e.to_json() for e in log]


class TestTeamStore:
    def test_write_then_read_round_trips(self, tmp_path):
        config = star_config()
        team_id = write_team(tmp_path, config)
        loaded = read_team(tmp_path, team_id)
        assert loaded.canonical_json() == config.canonical_json()

    def test_storage_is_idempotent(self, tmp_path):
        config = star_config()
        assert write_team(tmp_path, config) == write_team(tmp_path, config)
