"""The iterate-until-answer control loop.

One iteration = one provider round trip. A step that returns tool calls
consumes an iteration; the calls are dispatched sequentially in the given
order and their results (including errors) are appended as tool messages so
the provider can self-correct within the remaining budget.
"""

from __future__ import annotations

import json
import uuid
from dataclasses import dataclass, field
from typing import Any

from ..errors import ProviderError, ProviderTimeoutError
from ..trace import TraceRecorder
from .registry import ToolCall, ToolRegistry, ToolResult

DEFAULT_MAX_ITERATIONS = 5


@dataclass
class Conversation:
    session_id: str
    system_prompt: str
    messages: list[dict[str, Any]] = field(default_factory=list)

    def __post_init__(self):
        if not self.messages:
            self.messages.append({"role": "system", "content": self.system_prompt})

    @classmethod
    def new(cls, system_prompt: str) -> "Conversation":
        return cls(session_id=f"session-{uuid.uuid4().hex[:12]}", system_prompt=system_prompt)


@dataclass(frozen=True)
class TurnOutcome:
    kind: str  # "answered" | "iteration_limit" | "provider_error"
    final_text: str
    iterations_used: int
    tool_calls_made: tuple[tuple[ToolCall, ToolResult], ...]

    def to_json(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "final_text": self.final_text,
            "iterations_used": self.iterations_used,
            "tool_calls_made": [
                {"call": c.to_json(), "result": r.to_json()}
                for c, r in self.tool_calls_made
            ],
        }


def run_turn(conversation: Conversation, user_prompt: str, registry: ToolRegistry,
             provider, max_iterations: int = DEFAULT_MAX_ITERATIONS,
             tracer: TraceRecorder | None = None) -> TurnOutcome:
    """Run one user turn to completion, an iteration cap, or provider failure."""
    scope = conversation.session_id
    conversation.messages.append({"role": "user", "content": user_prompt})
    made: list[tuple[ToolCall, ToolResult]] = []

    for iteration in range(1, max_iterations + 1):
        if tracer is not None:
            tracer.record(scope, "llm_request", {
                "iteration": iteration,
                "message_count": len(conversation.messages),
            })
        try:
            step = provider.chat(conversation.messages, registry.definitions())
        except ProviderError as exc:
            if tracer is not None:
                tracer.record(scope, "error", {"error_kind": "provider_error", "message": str(exc)})
            if isinstance(exc, ProviderTimeoutError):
                raise  # callers map timeouts to a distinct failure mode (HTTP 504)
            return TurnOutcome("provider_error", "", iteration, tuple(made))
        if tracer is not None:
            tracer.record(scope, "llm_response", step.to_json())

        if step.kind == "text":
            conversation.messages.append({"role": "assistant", "content": step.text})
            return TurnOutcome("answered", step.text, iteration, tuple(made))

        conversation.messages.append({
            "role": "assistant",
            "content": "",
            "tool_calls": [c.to_json() for c in step.tool_calls],
        })
        for call in step.tool_calls:
            result = registry.dispatch(call, tracer=tracer, scope_id=scope)
            made.append((call, result))
            conversation.messages.append({
                "role": "tool",
                "call_id": call.call_id,
                "content": json.dumps(result.to_json(), ensure_ascii=False),
            })

    return TurnOutcome("iteration_limit", "", max_iterations, tuple(made))
