"""Chat-model providers.

AssistantStep is what a provider returns for one round trip: either plain
text (the turn's answer) or a list of tool calls. Two implementations:

  * ScriptedProvider - replays a recorded step sequence (JSONL cassette,
    one step object per line); used by all replay and acceptance tests.
  * HttpChatProvider - chat-completions-style JSON client with exponential
    backoff on 429/5xx (1s, 2s, 4s, max 3 retries).

Cassette step schema:
  {"kind": "text", "text": "..."}
  {"kind": "tool_calls", "calls": [{"call_id": "...", "tool_name": "...",
                                    "arguments": {...}}, ...]}
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

from ..errors import ProviderError, ProviderTimeoutError
from .registry import ToolCall, ToolDefinition


@dataclass(frozen=True)
class AssistantStep:
    kind: str  # "text" | "tool_calls"
    text: str = ""
    tool_calls: tuple[ToolCall, ...] = ()

    @classmethod
    def of_text(cls, text: str) -> "AssistantStep":
        return cls(kind="text", text=text)

    @classmethod
    def of_tool_calls(cls, calls: Sequence[ToolCall]) -> "AssistantStep":
        return cls(kind="tool_calls", tool_calls=tuple(calls))

    def to_json(self) -> dict[str, Any]:
        if self.kind == "text":
            return {"kind": "text", "text": self.text}
        return {"kind": "tool_calls", "calls": [c.to_json() for c in self.tool_calls]}

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> "AssistantStep":
        if obj["kind"] == "text":
            return cls.of_text(obj["text"])
        if obj["kind"] == "tool_calls":
            calls = [
                ToolCall(
                    call_id=c.get("call_id", f"call-{i}"),
                    tool_name=c["tool_name"],
                    arguments=c.get("arguments", {}),
                )
                for i, c in enumerate(obj["calls"], start=1)
            ]
            return cls.of_tool_calls(calls)
        raise ValueError(f"unknown step kind {obj.get('kind')!r}")


class ScriptedProvider:
    """Deterministic replay of a fixed step sequence, keyed by call index."""

    def __init__(self, steps: Sequence[AssistantStep], repeat_last: bool = False):
        if not steps:
            raise ValueError("a scripted provider needs at least one step")
        self._steps = list(steps)
        self._index = 0
        self.repeat_last = repeat_last

    @classmethod
    def from_jsonl(cls, path: str | Path, repeat_last: bool = False) -> "ScriptedProvider":
        steps = []
        with Path(path).open(encoding="utf-8") as f:
            for line in f:
                line = line.strip()
                if line:
                    steps.append(AssistantStep.from_json(json.loads(line)))
        return cls(steps, repeat_last=repeat_last)

    def chat(self, messages: list[dict[str, Any]],
             tool_definitions: Sequence[ToolDefinition]) -> AssistantStep:
        if not messages:
            raise ValueError("messages must be non-empty")
        if self._index >= len(self._steps):
            if self.repeat_last:
                return self._steps[-1]
            raise ProviderError("scripted provider ran out of steps")
        step = self._steps[self._index]
        self._index += 1
        return step

    def reset(self) -> None:
        self._index = 0


class LoopingProvider:
    """Adversarial provider that requests the same tool calls forever."""

    def __init__(self, step: AssistantStep):
        self._step = step

    def chat(self, messages, tool_definitions) -> AssistantStep:
        return self._step


class HttpChatProvider:
    """Chat-completions-style client. Auth token read from the environment."""

    RETRY_DELAYS = (1.0, 2.0, 4.0)

    def __init__(self, base_url: str, model: str,
                 token_env: str = "AGENT_PROVIDER_TOKEN",
                 session=None, sleep=time.sleep, timeout: float = 30.0):
        import requests

        self.base_url = base_url.rstrip("/")
        self.model = model
        self.token_env = token_env
        self.timeout = timeout
        self._session = session or requests.Session()
        self._sleep = sleep

    def chat(self, messages: list[dict[str, Any]],
             tool_definitions: Sequence[ToolDefinition]) -> AssistantStep:
        if not messages:
            raise ValueError("messages must be non-empty")
        headers = {}
        token = os.environ.get(self.token_env)
        if token:
            headers["Authorization"] = f"Bearer {token}"
        body = {
            "model": self.model,
            "messages": messages,
            "tools": [
                {"type": "function", "function": d.to_json()}
                for d in tool_definitions
            ],
        }
        last_error: Exception | None = None
        for delay in (0.0,) + self.RETRY_DELAYS:
            if delay:
                self._sleep(delay)
            try:
                resp = self._session.post(
                    f"{self.base_url}/chat/completions",
                    json=body, headers=headers, timeout=self.timeout,
                )
            except Exception as exc:
                last_error = exc
                continue
            if resp.status_code == 429 or resp.status_code >= 500:
                last_error = RuntimeError(f"HTTP {resp.status_code}")
                continue
            resp.raise_for_status()
            return self._parse_completion(resp.json())
        import requests
        if isinstance(last_error, requests.Timeout):
            raise ProviderTimeoutError(f"chat request timed out after retries: {last_error}")
        raise ProviderError(f"chat request failed after retries: {last_error}")

    @staticmethod
    def _parse_completion(doc: dict[str, Any]) -> AssistantStep:
        message = doc["choices"][0]["message"]
        raw_calls = message.get("tool_calls") or []
        if raw_calls:
            calls = [
                ToolCall(
                    call_id=c.get("id", f"call-{i}"),
                    tool_name=c["function"]["name"],
                    arguments=json.loads(c["function"].get("arguments") or "{}"),
                )
                for i, c in enumerate(raw_calls, start=1)
            ]
            return AssistantStep.of_tool_calls(calls)
        return AssistantStep.of_text(message.get("content") or "")
