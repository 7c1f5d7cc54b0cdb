// Chat view: a message thread where each assistant turn expands to show its
// tool calls inline, with deep links into the trace view.

import { escapeHtml, truncate } from "./format.js";
import type { ToolCallPair, TurnOutcome } from "./types.js";

export interface ChatEntry {
  prompt: string;
  outcome: TurnOutcome;
}

function renderToolCard(pair: ToolCallPair, sessionId: string): string {
  const args = truncate(JSON.stringify(pair.call.arguments));
  const payload = truncate(JSON.stringify(pair.result.payload));
  const status = pair.result.outcome === "error" ? "error" : "ok";
  return (
    `<details class="tool-card ${status}">` +
    `<summary>${escapeHtml(pair.call.tool_name)} <span class="status">${status}</span>` +
    `</summary>` +
    `<code class="args">${escapeHtml(args)}</code>` +
    `<code class="payload">${escapeHtml(payload)}</code>` +
    `<a class="trace-link" href="#trace/${escapeHtml(sessionId)}">view in trace</a>` +
    `</details>`
  );
}

export function renderTurn(entry: ChatEntry, sessionId: string): string {
  const { prompt, outcome } = entry;
  const cards = outcome.tool_calls_made
    .map((pair) => renderToolCard(pair, sessionId))
    .join("");
  const banner =
    outcome.kind === "iteration_limit"
      ? `<div class="banner iteration-limit">The agent hit its iteration cap ` +
        `(${outcome.iterations_used}) without answering.</div>`
      : outcome.kind === "provider_error"
        ? `<div class="banner provider-error">The model provider failed.</div>`
        : "";
  const answer =
    outcome.kind === "answered"
      ? `<div class="assistant">${escapeHtml(outcome.final_text)}</div>`
      : "";
  return (
    `<article class="turn" data-kind="${outcome.kind}">` +
    `<div class="user">${escapeHtml(prompt)}</div>` +
    `${banner}${cards}${answer}</article>`
  );
}

export function renderThread(entries: ChatEntry[], sessionId: string): string {
  return (
    `<div class="chat-thread" data-session="${escapeHtml(sessionId)}">` +
    entries.map((e) => renderTurn(e, sessionId)).join("") +
    `</div>`
  );
}
