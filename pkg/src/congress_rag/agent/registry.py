"""Tool registry and dispatch.

Tools are standalone callables with a JSON-schema parameter contract.
Dispatch never raises past its boundary: unknown names, invalid arguments,
and handler exceptions all come back as error ToolResults so the model can
self-correct. Every dispatch emits exactly one tool_call/tool_result trace
event pair.
"""

from __future__ import annotations

import re
import time
from dataclasses import dataclass, field
from typing import Any, Callable

import jsonschema

from ..errors import ToolError
from ..trace import TraceRecorder, truncate_payload

_NAME_RE = re.compile(r"^[a-z][a-z0-9_]*$")


@dataclass(frozen=True)
class ToolDefinition:
    name: str
    description: str
    parameters_schema: dict[str, Any]

    def __post_init__(self):
        if not _NAME_RE.match(self.name):
            raise ValueError(f"tool name {self.name!r} must match [a-z][a-z0-9_]*")

    def to_json(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "description": self.description,
            "parameters": self.parameters_schema,
        }


@dataclass(frozen=True)
class ToolCall:
    call_id: str
    tool_name: str
    arguments: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        return {"call_id": self.call_id, "tool_name": self.tool_name, "arguments": self.arguments}


@dataclass(frozen=True)
class ToolResult:
    call_id: str
    outcome: str  # "ok" | "error"
    payload: Any

    @property
    def is_error(self) -> bool:
        return self.outcome == "error"

    def to_json(self) -> dict[str, Any]:
        return {"call_id": self.call_id, "outcome": self.outcome, "payload": self.payload}


Handler = Callable[[dict[str, Any]], Any]


class ToolRegistry:
    """Immutable-after-startup mapping of tool name -> (definition, handler)."""

    def __init__(self):
        self._tools: dict[str, tuple[ToolDefinition, Handler]] = {}

    def register(self, definition: ToolDefinition, handler: Handler) -> "ToolRegistry":
        if definition.name in self._tools:
            raise ValueError(f"tool {definition.name!r} is already registered")
        self._tools[definition.name] = (definition, handler)
        return self

    def definitions(self) -> list[ToolDefinition]:
        return [d for d, _ in self._tools.values()]

    def names(self) -> list[str]:
        return list(self._tools)

    def __len__(self) -> int:
        return len(self._tools)

    def __contains__(self, name: str) -> bool:
        return name in self._tools

    def dispatch(self, call: ToolCall, tracer: TraceRecorder | None = None,
                 scope_id: str = "") -> ToolResult:
        if tracer is not None:
            tracer.record(scope_id, "tool_call", call.to_json())
        started = time.monotonic()
        result = self._dispatch_inner(call)
        latency_ms = int((time.monotonic() - started) * 1000)
        if tracer is not None:
            tracer.record(scope_id, "tool_result", result.to_json(), latency_ms=latency_ms)
        return result

    def _dispatch_inner(self, call: ToolCall) -> ToolResult:
        entry = self._tools.get(call.tool_name)
        if entry is None:
            return ToolResult(call.call_id, "error", {
                "error_kind": "unknown_tool",
                "message": f"no tool named {call.tool_name!r}",
            })
        definition, handler = entry
        try:
            jsonschema.validate(call.arguments, definition.parameters_schema)
        except jsonschema.ValidationError as exc:
            return ToolResult(call.call_id, "error", {
                "error_kind": "invalid_arguments",
                "message": exc.message,
            })
        try:
            payload = handler(call.arguments)
        except ToolError as exc:
            return ToolResult(call.call_id, "error", {
                "error_kind": exc.error_kind,
                "message": exc.message,
                **exc.extra,
            })
        except Exception as exc:  # handler bugs become data, not crashes
            return ToolResult(call.call_id, "error", {
                "error_kind": "handler_failure",
                "message": f"{type(exc).__name__}: {exc}",
            })
        return ToolResult(call.call_id, "ok", truncate_payload(payload))
