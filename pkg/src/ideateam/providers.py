"""Chat-completion backends behind a structured-output contract.

Every pipeline call goes through :func:`complete_structured`, which parses the
backend's raw text as JSON, validates it against the registered schema (plus an
optional semantic check), and re-asks with the error appended until the retry
budget runs out. The deterministic mock backend powers every test; the HTTP
backend speaks the common chat-completion wire shape.
"""

from __future__ import annotations

import hashlib
import json
import re
import threading
from importlib import resources
from typing import Callable, Optional, Protocol, Type

import httpx
from pydantic import BaseModel, ConfigDict, Field, ValidationError


class ProviderError(Exception):
    """Base for all backend failures. Callers skip the action and wait."""


class ProviderUnreachableError(ProviderError):
    pass


class ProviderTimeoutError(ProviderError):
    pass


class MalformedOutputError(ProviderError):
    """Output still failed schema or semantic validation after all retries."""


class UnsupportedError(ProviderError):
    """Operation not available on this provider (e.g. traffic recording)."""


class CompletionRequest(BaseModel):
    model_config = ConfigDict(frozen=True)

    system_prompt: str = Field(min_length=1)
    user_prompt: str = Field(min_length=1)
    temperature: float = Field(ge=0.0, le=2.0)
    schema_id: str
    max_tokens: int = Field(gt=0)


class ProviderConfig(BaseModel):
    endpoint_url: str
    model_name: str = "gpt-4o-2024-08-06"
    credential_env_var: str = "IDEATEAM_API_KEY"
    request_timeout: float = Field(default=30.0, gt=0)
    max_retries: int = Field(default=2, ge=0)


class Provider(Protocol):
    max_retries: int

    def complete(self, request: CompletionRequest) -> str:
        """Return the raw model text for one request."""
        ...


# --- schema registry ---------------------------------------------------------

_REGISTRY: dict[str, Type[BaseModel]] = {}


def register_schema(schema_id: str, model: Type[BaseModel]) -> None:
    existing = _REGISTRY.get(schema_id)
    if existing is not None and existing is not model:
        raise ValueError(f"schema id {schema_id} already registered to {existing.__name__}")
    _REGISTRY[schema_id] = model


def schema_model(schema_id: str) -> Type[BaseModel]:
    try:
        return _REGISTRY[schema_id]
    except KeyError:
        raise KeyError(f"schema id not registered: {schema_id}") from None


def schema_doc(schema_id: str) -> dict:
    """Load the shipped, versioned schema document for a pipeline output."""
    name, _, version = schema_id.partition("@")
    filename = f"{name}.v{version or '1'}.json"
    path = resources.files("ideateam").joinpath("schemas", filename)
    return json.loads(path.read_text(encoding="utf-8"))


def complete_structured(
    provider: Provider,
    request: CompletionRequest,
    extra_check: Optional[Callable[[BaseModel], Optional[str]]] = None,
) -> BaseModel:
    """Run one structured call: complete, parse, validate, retry on bad output.

    ``extra_check`` covers semantic rules a static schema cannot express
    (target exists, recipient adjacent, ...); it returns an error string or
    None. Schema and semantic failures both consume the retry budget; transport
    failures propagate immediately.
    """
    model = schema_model(request.schema_id)
    attempts = provider.max_retries + 1
    current = request
    last_error = ""
    for _ in range(attempts):
        raw = provider.complete(current)
        try:
            record = model.model_validate(json.loads(_strip_fences(raw)))
        except (json.JSONDecodeError, ValidationError) as exc:
            last_error = str(exc)
        else:
            if extra_check is None:
                return record
            problem = extra_check(record)
            if problem is None:
                return record
            last_error = problem
        current = current.model_copy(
            update={
                "user_prompt": (
                    current.user_prompt
                    + f"\n\nYour previous reply was invalid: {last_error}\n"
                    + "Reply again with only a valid JSON object for the requested schema."
                )
            }
        )
    raise MalformedOutputError(f"{request.schema_id}: {last_error}")


def _strip_fences(text: str) -> str:
    text = text.strip()
    if text.startswith("```"):
        text = re.sub(r"^```[a-zA-Z0-9_-]*\s*", "", text)
        text = re.sub(r"\s*```$", "", text)
    return text.strip()


def record_traffic(provider: object) -> list[CompletionRequest]:
    """Every request the provider saw, in issue order (recording providers only)."""
    recorded = getattr(provider, "recorded", None)
    if recorded is None:
        raise UnsupportedError(f"{type(provider).__name__} does not record traffic")
    return list(recorded)


# --- deterministic mock ------------------------------------------------------

def _line(prompt: str, label: str) -> Optional[str]:
    m = re.search(rf"^{re.escape(label)}: (.*)$", prompt, flags=re.MULTILINE)
    return m.group(1).strip() if m else None


def _csv_line(prompt: str, label: str) -> list[str]:
    raw = _line(prompt, label)
    if not raw or raw == "none":
        return []
    return [part.strip() for part in raw.split(",") if part.strip()]


class MockProvider:
    """Seeded, schema-valid stand-in for the chat backend.

    Output is a pure function of (seed, schema id, prompt digest, per-schema
    call counter): decisions cycle round-robin over the candidate lines the
    pipelines embed in their prompts, and content fields are templated from the
    topic. Two fresh instances with equal seeds replay identically.
    """

    def __init__(self, seed: int = 0, feedback_turn_cap: int = 6) -> None:
        self.seed = seed
        self.feedback_turn_cap = feedback_turn_cap
        self.max_retries = 2
        self.recorded: list[CompletionRequest] = []
        self._counters: dict[str, int] = {}
        self._lock = threading.Lock()

    def _next(self, schema_id: str) -> int:
        with self._lock:
            n = self._counters.get(schema_id, 0)
            self._counters[schema_id] = n + 1
            return n

    def _digest(self, request: CompletionRequest, counter: int) -> int:
        prompt_digest = hashlib.sha256(
            (request.system_prompt + "\x00" + request.user_prompt).encode("utf-8")
        ).hexdigest()
        mixed = hashlib.sha256(
            f"{self.seed}|{request.schema_id}|{prompt_digest}|{counter}".encode("utf-8")
        ).hexdigest()
        return int(mixed[:12], 16)

    def complete(self, request: CompletionRequest) -> str:
        with self._lock:
            self.recorded.append(request)
        counter = self._next(request.schema_id)
        h = self._digest(request, counter)
        name = request.schema_id.partition("@")[0]
        builder = getattr(self, f"_build_{name}", None)
        if builder is None:
            raise UnsupportedError(f"mock cannot fabricate schema {request.schema_id}")
        return json.dumps(builder(request.user_prompt, counter, h))

    # One fabricator per pipeline schema; each reads the candidate lines the
    # pipeline embedded in the user prompt.

    def _build_plan_decision(self, prompt: str, counter: int, h: int) -> dict:
        options = _csv_line(prompt, "Options")
        chosen = options[counter % len(options)] if options else "wait"
        return {"chosen": chosen, "rationale": f"Round-robin pick #{counter}."}

    def _build_generation_decision(self, prompt: str, counter: int, h: int) -> dict:
        ideas = _csv_line(prompt, "Existing ideas")
        topic = _line(prompt, "Topic") or "the topic"
        if ideas and counter % 2 == 1:
            return {
                "mode": "update",
                "target": ideas[counter % len(ideas)],
                "strategy": f"Deepen an existing direction on {topic} (pass {counter}).",
            }
        return {"mode": "new", "target": None, "strategy": f"Open a fresh angle on {topic} (pass {counter})."}

    def _build_idea_content(self, prompt: str, counter: int, h: int) -> dict:
        topic = _line(prompt, "Topic") or "the topic"
        mode = _line(prompt, "Mode") or "new"
        n = counter + 1
        if mode == "update":
            parent = _line(prompt, "Template idea id") or "the original"
            return {
                "title": f"Idea-{n} on {topic} (revision of {parent})",
                "object": f"Revised take on {parent} for {topic}",
                "function": f"Sharpens what {parent} set out to do for {topic}",
                "behavior": f"Keeps the template behavior of {parent} but tightens step {n}",
                "structure": f"Reuses the component layout of {parent} with module {n} swapped",
            }
        return {
            "title": f"Idea-{n} on {topic}",
            "object": f"A {topic} concept (variant {n})",
            "function": f"Addresses an unmet {topic} need, angle {n}",
            "behavior": f"Responds to users in scenario {n} and adapts over time",
            "structure": f"Three-part assembly {n}: sensing, reasoning, delivery",
        }

    def _build_evaluation_target(self, prompt: str, counter: int, h: int) -> dict:
        ideas = _csv_line(prompt, "Candidate ideas")
        return {"idea_id": ideas[counter % len(ideas)] if ideas else "idea-1"}

    def _build_evaluation_result(self, prompt: str, counter: int, h: int) -> dict:
        target = _line(prompt, "Target idea") or "the idea"
        return {
            "novelty": 3 + h % 5,
            "completeness": 3 + (h // 5) % 5,
            "quality": 3 + (h // 25) % 5,
            "comment": f"Balanced assessment #{counter} of {target}: promising, needs grounding.",
        }

    def _build_feedback_target(self, prompt: str, counter: int, h: int) -> dict:
        members = _csv_line(prompt, "Candidate recipients")
        return {"recipient": members[counter % len(members)] if members else ""}

    def _build_feedback_turn(self, prompt: str, counter: int, h: int) -> dict:
        turns_so_far = int(_line(prompt, "Turns so far") or "0")
        recipient = _line(prompt, "Recipient") or "you"
        conclude = (turns_so_far + 1) >= self.feedback_turn_cap
        return {
            "message": f"Turn {turns_so_far + 1} for {recipient}: strengths noted, one risk, one suggestion.",
            "conclude": conclude,
        }

    def _build_request_decision(self, prompt: str, counter: int, h: int) -> dict:
        pairs = _csv_line(prompt, "Request candidates")
        if not pairs:
            return {"recipient": "", "action": "idea_generation"}
        recipient, _, actions_raw = pairs[counter % len(pairs)].partition("=")
        actions = [a for a in actions_raw.split("|") if a]
        action = actions[counter % len(actions)] if actions else "idea_generation"
        return {"recipient": recipient, "action": action}

    def _build_request_message(self, prompt: str, counter: int, h: int) -> dict:
        action = _line(prompt, "Requested action") or "an action"
        recipient = _line(prompt, "Recipient") or "teammate"
        return {"message": f"Could you take on {action} next, {recipient}? It would unblock the board (ask #{counter})."}

    def _build_reflection_delta(self, prompt: str, counter: int, h: int) -> dict:
        involved = _csv_line(prompt, "Involved members")
        kind = _line(prompt, "Trigger kind") or "evaluation"
        strategy_key = "idea_generation" if kind == "evaluation" else "feedback"
        return {
            "new_knowledge": [f"Takeaway {counter + 1} from a {kind}: anchor claims in concrete user scenarios."],
            "strategy_revisions": {strategy_key: f"Lead with specifics; refined after {kind} #{counter + 1}."},
            "relationship_updates": {m: f"Engaged and responsive (observation {counter + 1})." for m in involved},
        }


# --- HTTP backend ------------------------------------------------------------

class HttpProvider:
    """Chat-completion HTTP backend (OpenAI-style request/response bodies).

    The credential is read from the configured environment variable at call
    time and never logged.
    """

    def __init__(self, config: ProviderConfig, transport: Optional[httpx.BaseTransport] = None) -> None:
        self.config = config
        self.max_retries = config.max_retries
        self.unreachable_seen = False
        self._client = httpx.Client(
            timeout=config.request_timeout,
            transport=transport,
        )

    def _headers(self) -> dict[str, str]:
        import os

        headers = {"Content-Type": "application/json"}
        credential = os.environ.get(self.config.credential_env_var)
        if credential:
            headers["Authorization"] = f"Bearer {credential}"
        return headers

    def complete(self, request: CompletionRequest) -> str:
        doc = schema_doc(request.schema_id)
        body = {
            "model": self.config.model_name,
            "messages": [
                {"role": "system", "content": request.system_prompt},
                {
                    "role": "user",
                    "content": request.user_prompt
                    + "\n\nReply with only a JSON object matching this schema:\n"
                    + json.dumps(doc["schema"]),
                },
            ],
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
            "response_format": {"type": "json_object"},
        }
        try:
            response = self._client.post(self.config.endpoint_url, json=body, headers=self._headers())
        except httpx.TimeoutException as exc:
            raise ProviderTimeoutError(str(exc)) from exc
        except httpx.HTTPError as exc:
            self.unreachable_seen = True
            raise ProviderUnreachableError(str(exc)) from exc
        if response.status_code != 200:
            self.unreachable_seen = True
            raise ProviderUnreachableError(f"backend returned HTTP {response.status_code}")
        try:
            return response.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, ValueError) as exc:
            raise ProviderUnreachableError(f"unexpected response shape: {exc}") from exc

    def close(self) -> None:
        self._client.close()
