from .registry import ToolDefinition, ToolCall, ToolResult, ToolRegistry
from .providers import AssistantStep, ScriptedProvider, HttpChatProvider
from .loop import Conversation, TurnOutcome, run_turn

__all__ = [
    "ToolDefinition", "ToolCall", "ToolResult", "ToolRegistry",
    "AssistantStep", "ScriptedProvider", "HttpChatProvider",
    "Conversation", "TurnOutcome", "run_turn",
]
