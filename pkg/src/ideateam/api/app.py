"""FastAPI application wrapping the session engine.

Routing stays a thin adapter: every response is reproducible by calling the
underlying module operation directly. All session mutations funnel through a
per-session lock into the engine's single-writer commit point; event streams
read only the flushed prefix and push strictly in sequence order.
"""

from __future__ import annotations

import asyncio
import logging
import os
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import AsyncIterator, Optional

from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse, StreamingResponse

from .._canon import to_jsonable
from ..engine import HumanAction, Session, start_session
from ..persistence import LogWriter, log_path, read_log, read_team, write_team
from ..providers import HttpProvider, MockProvider, ProviderConfig
from ..reflection import (
    NotSealedError,
    flow,
    member_activity,
    rank_ideas,
    summarize,
    timeline,
)
from ..team import RoleKind, TeamConfig, validate_team
from .models import (
    ActionAccepted,
    ApiError,
    SessionCreated,
    SessionSealed,
    SessionStatus,
    TeamCreated,
)

logger = logging.getLogger(__name__)


def _error(status: int, code: str, message: str, details: Optional[dict] = None) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content=ApiError(code=code, message=message, details=details).model_dump(mode="json"),
    )


@dataclass
class LiveSession:
    session: Session
    writer: LogWriter
    lock: asyncio.Lock = field(default_factory=asyncio.Lock)
    changed: asyncio.Condition = field(default_factory=asyncio.Condition)
    task: Optional[asyncio.Task] = None

    async def notify(self) -> None:
        async with self.changed:
            self.changed.notify_all()


class SessionManager:
    def __init__(self, data_dir: Path, provider_mode: str, step_interval: float) -> None:
        self.data_dir = data_dir
        self.provider_mode = provider_mode
        self.step_interval = step_interval
        self.live: dict[str, LiveSession] = {}
        self.sealed: dict[str, list] = {}  # sealed logs reloaded from disk

    def _provider(self, seed: int):
        if self.provider_mode == "http":
            return HttpProvider(
                ProviderConfig(
                    endpoint_url=os.environ.get(
                        "PROVIDER_ENDPOINT", "http://localhost:8000/v1/chat/completions"
                    ),
                    model_name=os.environ.get("PROVIDER_MODEL", "gpt-4o-2024-08-06"),
                    credential_env_var=os.environ.get("PROVIDER_CREDENTIAL_ENV", "IDEATEAM_API_KEY"),
                )
            )
        return MockProvider(seed=seed)

    def create(self, config: TeamConfig, seed: int, time_scale: float) -> LiveSession:
        session = start_session(
            config,
            self._provider(seed),
            seed=seed,
            time_scale=time_scale,
            session_id=uuid.uuid4().hex[:12],
        )
        writer = LogWriter(
            log_path(self.data_dir, session.session_id), session.session_id, config.digest()
        )
        for event in session.log:
            writer.append(event)
        session.sinks.append(writer.append)
        live = LiveSession(session=session, writer=writer)
        self.live[session.session_id] = live
        return live

    def events_of(self, session_id: str) -> Optional[list]:
        if session_id in self.live:
            return self.live[session_id].session.log
        if session_id in self.sealed:
            return self.sealed[session_id]
        path = log_path(self.data_dir, session_id)
        if path.exists():
            _, events = read_log(path)
            self.sealed[session_id] = events
            return events
        return None

    async def close(self) -> None:
        for live in self.live.values():
            if live.task is not None:
                live.task.cancel()
            live.writer.close()


async def _autorun(live: LiveSession, interval: float) -> None:
    try:
        while True:
            async with live.lock:
                if live.session.ended:
                    return
                live.session.step()
            await live.notify()
            await asyncio.sleep(interval)
    except asyncio.CancelledError:  # session ended or server shutdown
        return


def create_app(
    data_dir: Path | str = "data",
    provider_mode: Optional[str] = None,
    step_interval: Optional[float] = None,
) -> FastAPI:
    data_dir = Path(data_dir)
    manager = SessionManager(
        data_dir=data_dir,
        provider_mode=provider_mode or os.environ.get("PROVIDER_MODE", "mock"),
        step_interval=step_interval
        if step_interval is not None
        else float(os.environ.get("IDEATEAM_STEP_INTERVAL", "1.0")),
    )

    from contextlib import asynccontextmanager

    @asynccontextmanager
    async def lifespan(_: FastAPI):
        yield
        await manager.close()

    app = FastAPI(title="ideateam", version="0.1.0", lifespan=lifespan)
    app.state.manager = manager

    from fastapi.middleware.cors import CORSMiddleware

    # Single-operator tool: the browser client may be served from another port.
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"],
    )

    from fastapi.exceptions import RequestValidationError

    @app.exception_handler(RequestValidationError)
    async def validation_error_handler(_request: Request, exc: RequestValidationError):
        errors = exc.errors()
        # Unparseable JSON is a malformed body (400); shape/type mismatches are 422.
        if any(e.get("type") == "json_invalid" for e in errors):
            return _error(400, "BadRequest", "request body is not valid JSON")
        return _error(
            422, "ValidationFailed", "request body failed validation",
            details={"errors": [{k: str(v) for k, v in e.items() if k != "input"} for e in errors]},
        )

    # --- teams -----------------------------------------------------------------

    @app.post("/teams", status_code=201)
    async def create_team(config: TeamConfig):
        report = validate_team(config)
        if not report.ok:
            return _error(
                422, "ValidationFailed", "team config failed validation",
                details=to_jsonable(report),
            )
        team_id = write_team(data_dir, config)
        return TeamCreated(team_id=team_id)

    @app.get("/teams/{team_id}")
    async def get_team(team_id: str):
        try:
            config = read_team(data_dir, team_id)
        except FileNotFoundError:
            return _error(404, "NotFound", f"no team {team_id}")
        return JSONResponse(content=to_jsonable(config))

    # --- sessions ---------------------------------------------------------------

    @app.post("/teams/{team_id}/sessions", status_code=201)
    async def create_session(
        team_id: str,
        seed: int = Query(default=0),
        time_scale: float = Query(default=1.0, ge=0),
        autorun: bool = Query(default=True),
    ):
        try:
            config = read_team(data_dir, team_id)
        except FileNotFoundError:
            return _error(404, "NotFound", f"no team {team_id}")
        report = validate_team(config)
        if not report.ok:
            return _error(422, "ValidationFailed", "stored config no longer valid", to_jsonable(report))
        live = manager.create(config, seed, time_scale)
        if autorun:
            live.task = asyncio.create_task(_autorun(live, manager.step_interval))
        return SessionCreated(session_id=live.session.session_id)

    def _live_or_none(session_id: str) -> Optional[LiveSession]:
        return manager.live.get(session_id)

    @app.get("/sessions/{session_id}")
    async def session_status(session_id: str):
        live = _live_or_none(session_id)
        if live is not None:
            session = live.session
            return SessionStatus(
                session_id=session_id,
                ended=session.ended,
                gate_open=session.gate_open,
                clock=session.clock.now(),
                next_seq=len(session.log),
                phases={m: a.phase.value for m, a in sorted(session.agents.items())},
                open_feedback_sessions=[
                    ref for ref, t in session.feedback_sessions.items() if t.open
                ],
            )
        events = manager.events_of(session_id)
        if events is None:
            return _error(404, "NotFound", f"no session {session_id}")
        from ..engine import fold_events

        state = fold_events(events)
        return SessionStatus(
            session_id=session_id,
            ended=state.ended,
            gate_open=state.gate_open,
            clock=events[-1].at if events else 0.0,
            next_seq=state.next_seq,
            phases={m: p.value for m, p in sorted(state.phases.items())},
        )

    @app.post("/sessions/{session_id}/step")
    async def step_session(session_id: str, steps: int = Query(default=1, ge=1, le=1000)):
        live = _live_or_none(session_id)
        if live is None:
            return _error(404, "NotFound", f"no live session {session_id}")
        emitted = []
        async with live.lock:
            for _ in range(steps):
                emitted += live.session.step()
        await live.notify()
        return ActionAccepted(events=[to_jsonable(e) for e in emitted])

    @app.post("/sessions/{session_id}/actions")
    async def submit_action(session_id: str, action: HumanAction):
        live = _live_or_none(session_id)
        if live is None:
            return _error(404, "NotFound", f"no live session {session_id}")
        if live.session.ended:
            return _error(409, "SessionEnded", "the session is sealed")
        async with live.lock:
            outcome = live.session.submit_human_action(action)
        await live.notify()
        if not outcome.ok:
            return _error(
                403,
                outcome.rejection.rule,
                outcome.rejection.detail,
                details={"events": [to_jsonable(e) for e in outcome.events]},
            )
        return ActionAccepted(events=[to_jsonable(e) for e in outcome.events])

    @app.post("/sessions/{session_id}/end")
    async def end_session(session_id: str):
        live = _live_or_none(session_id)
        if live is None:
            events = manager.events_of(session_id)
            if events is None:
                return _error(404, "NotFound", f"no session {session_id}")
            return SessionSealed(events=len(events))  # already sealed: idempotent
        async with live.lock:
            log = live.session.end()
        if live.task is not None:
            live.task.cancel()
        live.writer.close()
        await live.notify()
        return SessionSealed(events=len(log))

    # --- event stream -------------------------------------------------------------

    @app.get("/sessions/{session_id}/events")
    async def event_stream(session_id: str, request: Request, from_seq: int = Query(default=0, ge=0)):
        live = _live_or_none(session_id)
        if live is None:
            events = manager.events_of(session_id)
            if events is None:
                return _error(404, "NotFound", f"no session {session_id}")

            async def sealed_feed() -> AsyncIterator[bytes]:
                for event in events[from_seq:]:
                    yield (event.to_json() + "\n").encode("utf-8")

            return StreamingResponse(sealed_feed(), media_type="application/x-ndjson")

        async def live_feed() -> AsyncIterator[bytes]:
            cursor = from_seq
            while True:
                log = live.session.log
                while cursor < len(log):
                    event = log[cursor]
                    cursor += 1
                    yield (event.to_json() + "\n").encode("utf-8")
                if live.session.ended:
                    return
                if await request.is_disconnected():
                    return
                async with live.changed:
                    try:
                        await asyncio.wait_for(live.changed.wait(), timeout=1.0)
                    except asyncio.TimeoutError:
                        pass  # re-check for disconnect/end

        return StreamingResponse(live_feed(), media_type="application/x-ndjson")

    # --- reflection -----------------------------------------------------------------

    def _sealed_events(session_id: str):
        live = _live_or_none(session_id)
        if live is not None:
            if not live.session.ended:
                return None, _error(409, "NotSealed", "end the session before reading reflection")
            return live.session.log, None
        events = manager.events_of(session_id)
        if events is None:
            return None, _error(404, "NotFound", f"no session {session_id}")
        return events, None

    @app.get("/sessions/{session_id}/reflection")
    async def reflection(session_id: str):
        events, error = _sealed_events(session_id)
        if error is not None:
            return error
        try:
            payload = {
                "summary": to_jsonable(summarize(events)),
                "member_activity": {m: to_jsonable(r) for m, r in member_activity(events).items()},
                "flows": {
                    "feedback": to_jsonable(flow(events, RoleKind.FEEDBACK)),
                    "request": to_jsonable(flow(events, RoleKind.REQUEST)),
                },
                "ranked_ideas": [to_jsonable(r) for r in rank_ideas(events)],
            }
        except NotSealedError:
            return _error(409, "NotSealed", "end the session before reading reflection")
        return JSONResponse(content=payload)

    @app.get("/sessions/{session_id}/timeline")
    async def session_timeline(session_id: str, member: Optional[str] = Query(default=None)):
        events, error = _sealed_events(session_id)
        if error is not None:
            return error
        try:
            entries = timeline(events, member_filter=member)
        except NotSealedError:
            return _error(409, "NotSealed", "end the session before reading the timeline")
        return JSONResponse(content={"entries": [to_jsonable(e) for e in entries]})

    return app
