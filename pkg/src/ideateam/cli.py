"""Headless operation: simulate sessions with scripted human policies, replay
stored logs, export statistics, and serve the HTTP API.

Exit codes: 0 clean run, 2 invalid team config, 3 provider unreachable.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import os
import sys
from pathlib import Path

import click

from . import events as ev
from ._canon import to_jsonable
from .engine import InvalidTeamError, start_session
from .persistence import (
    CorruptLogError,
    LogWriter,
    UnsupportedVersionError,
    log_path,
    read_log,
    replay as replay_log,
)
from .policies import load_policy, run_simulation
from .providers import HttpProvider, MockProvider, ProviderConfig
from .reflection import (
    flow,
    formation_stats,
    ideation_stats,
    member_activity,
    rank_ideas,
    summarize,
    timeline,
)
from .team import RoleKind, TeamConfig, validate_team

EXIT_OK = 0
EXIT_INVALID_CONFIG = 2
EXIT_PROVIDER_UNREACHABLE = 3

logging.basicConfig(level=os.environ.get("IDEATEAM_LOG_LEVEL", "WARNING"))


def _build_provider(mode: str, seed: int):
    if mode == "mock":
        return MockProvider(seed=seed)
    config = ProviderConfig(
        endpoint_url=os.environ.get("PROVIDER_ENDPOINT", "http://localhost:8000/v1/chat/completions"),
        model_name=os.environ.get("PROVIDER_MODEL", "gpt-4o-2024-08-06"),
        credential_env_var=os.environ.get("PROVIDER_CREDENTIAL_ENV", "IDEATEAM_API_KEY"),
    )
    return HttpProvider(config)


def _reflection_payload(log) -> dict:
    return {
        "summary": to_jsonable(summarize(log)),
        "member_activity": {m: to_jsonable(row) for m, row in member_activity(log).items()},
        "flows": {
            "feedback": to_jsonable(flow(log, RoleKind.FEEDBACK)),
            "request": to_jsonable(flow(log, RoleKind.REQUEST)),
        },
        "ranked_ideas": [to_jsonable(r) for r in rank_ideas(log)],
        "timeline": [to_jsonable(t) for t in timeline(log)],
    }


@click.group()
def main() -> None:
    """Form agent teams, run ideation sessions, and analyze them."""


@main.command()
@click.option("--team", "team_file", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--policy", "policy_ref", default="passive", show_default=True,
              help="Preset name (evaluator|requester|passive) or a policy JSON file.")
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--duration", default=200.0, show_default=True, type=float, help="Virtual seconds to run.")
@click.option("--time-scale", default=0.0, show_default=True, type=float,
              help="Scales agent wait durations; 0 makes agents re-plan immediately.")
@click.option("--provider", "provider_mode", default="mock", show_default=True,
              type=click.Choice(["mock", "http"]))
@click.option("--out", "out_dir", default="runs", show_default=True, type=click.Path(file_okay=False))
def simulate(team_file, policy_ref, seed, duration, time_scale, provider_mode, out_dir) -> None:
    """Run one full session headlessly and write the sealed log plus reflection."""
    config = TeamConfig.model_validate_json(Path(team_file).read_text(encoding="utf-8"))
    report = validate_team(config)
    if not report.ok:
        click.echo("team config is invalid:", err=True)
        for violation in report.violations:
            subject = f" [{violation.subject}]" if violation.subject else ""
            click.echo(f"  - {violation.rule}{subject}: {violation.detail}", err=True)
        sys.exit(EXIT_INVALID_CONFIG)

    policy = load_policy(policy_ref)
    provider = _build_provider(provider_mode, seed)
    session = start_session(config, provider, seed=seed, time_scale=time_scale)

    out = Path(out_dir)
    writer = LogWriter(log_path(out, session.session_id), session.session_id, config.digest())
    for event in session.log:  # the opening event predates sink attachment
        writer.append(event)
    session.sinks.append(writer.append)

    try:
        log = run_simulation(session, policy, duration)
    except InvalidTeamError:  # pragma: no cover - validated above
        sys.exit(EXIT_INVALID_CONFIG)
    finally:
        writer.close()

    reflection_file = out / "sessions" / f"{session.session_id}.reflection.json"
    reflection_file.write_text(
        json.dumps(_reflection_payload(log), indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
    )

    summary = summarize(log)
    click.echo(f"session {session.session_id}: {len(log)} events")
    click.echo(
        f"ideas {summary.total_ideas}, evaluations {summary.evaluations}, "
        f"feedback sessions {summary.feedback_sessions}, requests {summary.requests}"
    )
    click.echo(f"log: {log_path(out, session.session_id)}")

    unreachable = getattr(provider, "unreachable_seen", False) or any(
        isinstance(e, ev.ActionSkipped) and e.reason == "provider_unreachable" for e in log
    )
    if unreachable:
        click.echo("provider was unreachable during the run", err=True)
        sys.exit(EXIT_PROVIDER_UNREACHABLE)
    sys.exit(EXIT_OK)


@main.command()
@click.argument("log_file", type=click.Path(exists=True, dir_okay=False))
def replay(log_file) -> None:
    """Re-fold a stored log, verify integrity, and print its summary."""
    try:
        state, log = replay_log(Path(log_file))
    except (CorruptLogError, UnsupportedVersionError) as exc:
        click.echo(f"replay failed: {exc}", err=True)
        sys.exit(1)
    if state.ended:
        summary = summarize(log)
        click.echo(
            f"{state.session_id}: {summary.total_ideas} ideas, {summary.evaluations} evaluations, "
            f"{summary.feedback_sessions} feedback sessions, {summary.requests} requests"
        )
    else:
        click.echo(f"{state.session_id}: live log, {len(log)} events so far")
    click.echo("replay OK")
    sys.exit(EXIT_OK)


def _formation_rows(stats) -> list[list]:
    header = ["metric"] + [f"cycle_{i + 1}" for i in range(len(stats.cycles))] + ["total"]
    columns = stats.cycles + [stats.total]

    def fmt(value):
        return "" if value is None else (f"{value:.2f}" if isinstance(value, float) else value)

    rows = [header]

    def add(metric: str, getter) -> None:
        rows.append([metric] + [fmt(getter(c)) for c in columns])

    add("teams", lambda c: c.teams)
    add("size_mean", lambda c: c.size.mean)
    add("size_sd", lambda c: c.size.sd)
    for klass in ("flat", "single_tier", "multi_tier"):
        add(f"structure_{klass}", lambda c, k=klass: c.structure_counts[k])
    add("roles_per_member_all_mean", lambda c: c.roles_per_member_all.mean)
    add("roles_per_member_all_sd", lambda c: c.roles_per_member_all.sd)
    add("roles_per_member_agents_mean", lambda c: c.roles_per_member_agents.mean)
    add("roles_per_member_agents_sd", lambda c: c.roles_per_member_agents.sd)
    add("roles_per_member_human_mean", lambda c: c.roles_per_member_human.mean)
    add("roles_per_member_human_sd", lambda c: c.roles_per_member_human.sd)
    for role in RoleKind:
        add(f"agents_in_{role.value}_mean", lambda c, r=role.value: c.agents_per_role[r].mean)
        add(f"agents_in_{role.value}_sd", lambda c, r=role.value: c.agents_per_role[r].sd)
    add("human_persona_pct", lambda c: c.persona_completion.human_pct)
    add("agents_social_pct", lambda c: c.persona_completion.agents_social_pct)
    add("agents_personal_pct", lambda c: c.persona_completion.agents_personal_pct)
    add("agents_life_context_pct", lambda c: c.persona_completion.agents_life_context_pct)
    add("smm_length_chars_mean", lambda c: c.smm_length_chars.mean)
    add("smm_length_chars_sd", lambda c: c.smm_length_chars.sd)
    return rows


def _ideation_rows(stats) -> list[list]:
    rows = [["cycle", "actor_class", "metric", "value"]]

    def fmt(value):
        return "" if value is None else (f"{value:.2f}" if isinstance(value, float) else value)

    for index, cycle in enumerate(stats.cycles, start=1):
        for klass, block in (("users", cycle.users), ("agents", cycle.agents)):
            metrics = [
                ("generation_count", block.generation.count),
                ("generation_per_member_mean", block.generation.per_member.mean),
                ("generation_per_member_sd", block.generation.per_member.sd),
                ("idea_length_chars_mean", block.generation.text_length_chars.mean),
                ("idea_length_chars_sd", block.generation.text_length_chars.sd),
                ("evaluation_count", block.evaluation.count),
                ("evaluation_per_member_mean", block.evaluation.per_member.mean),
                ("evaluation_per_member_sd", block.evaluation.per_member.sd),
                ("comment_length_chars_mean", block.evaluation.comment_length_chars.mean),
                ("comment_length_chars_sd", block.evaluation.comment_length_chars.sd),
                ("rating_novelty_mean", block.evaluation.rating_novelty_mean),
                ("rating_completeness_mean", block.evaluation.rating_completeness_mean),
                ("rating_quality_mean", block.evaluation.rating_quality_mean),
                ("feedback_session_count", block.feedback.session_count),
                ("feedback_per_member_mean", block.feedback.per_member.mean),
                ("feedback_per_member_sd", block.feedback.per_member.sd),
                ("message_length_chars_mean", block.feedback.message_length_chars.mean),
                ("message_length_chars_sd", block.feedback.message_length_chars.sd),
                ("feedback_turns_mean", block.feedback.turns.mean),
                ("feedback_turns_sd", block.feedback.turns.sd),
                ("request_count", block.requests.count),
                ("request_per_member_mean", block.requests.per_member.mean),
                ("request_per_member_sd", block.requests.per_member.sd),
                ("request_length_chars_mean", block.requests.message_length_chars.mean),
                ("request_length_chars_sd", block.requests.message_length_chars.sd),
                ("request_type_generation", block.requests.type_counts["idea_generation"]),
                ("request_type_evaluation", block.requests.type_counts["idea_evaluation"]),
                ("request_type_feedback", block.requests.type_counts["feedback"]),
            ]
            for metric, value in metrics:
                rows.append([index, klass, metric, fmt(value)])
    return rows


def _csv_text(rows: list[list]) -> str:
    buffer = io.StringIO()
    csv.writer(buffer, lineterminator="\n").writerows(rows)
    return buffer.getvalue()


@main.command()
@click.argument("log_files", nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--format", "fmt", default="json", show_default=True, type=click.Choice(["json", "csv"]))
@click.option("--out", "out_dir", default=None, type=click.Path(file_okay=False))
def stats(log_files, fmt, out_dir) -> None:
    """Formation and ideation statistics; each log file is one cycle."""
    logs = []
    configs = []
    for log_file in log_files:
        try:
            _, events_list = read_log(Path(log_file))
        except (CorruptLogError, UnsupportedVersionError) as exc:
            click.echo(f"cannot read {log_file}: {exc}", err=True)
            sys.exit(1)
        logs.append(events_list)
        configs.append(events_list[0].config)

    formation = formation_stats([[c] for c in configs])
    ideation = ideation_stats(logs, configs)

    if fmt == "json":
        payload = {"formation": to_jsonable(formation), "ideation": to_jsonable(ideation)}
        if out_dir:
            out = Path(out_dir)
            out.mkdir(parents=True, exist_ok=True)
            (out / "stats.json").write_text(json.dumps(payload, indent=2, ensure_ascii=False) + "\n", "utf-8")
            click.echo(f"wrote {out / 'stats.json'}")
        else:
            click.echo(json.dumps(payload, indent=2, ensure_ascii=False))
    else:
        formation_csv = _csv_text(_formation_rows(formation))
        ideation_csv = _csv_text(_ideation_rows(ideation))
        if not out_dir:
            click.echo("--format csv requires --out", err=True)
            sys.exit(1)
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "formation.csv").write_text(formation_csv, encoding="utf-8")
        (out / "ideation.csv").write_text(ideation_csv, encoding="utf-8")
        click.echo(f"wrote {out / 'formation.csv'} and {out / 'ideation.csv'}")
    sys.exit(EXIT_OK)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=None, type=int, help="Defaults to PORT env var or 8040.")
@click.option("--data-dir", default=None, type=click.Path(file_okay=False),
              help="Defaults to DATA_DIR env var or ./data.")
def serve(host, port, data_dir) -> None:
    """Run the HTTP API (teams, sessions, event streams, reflection)."""
    import uvicorn

    from .api.app import create_app

    app = create_app(data_dir=Path(data_dir or os.environ.get("DATA_DIR", "data")))
    uvicorn.run(app, host=host, port=port or int(os.environ.get("PORT", "8040")))


if __name__ == "__main__":
    main()
