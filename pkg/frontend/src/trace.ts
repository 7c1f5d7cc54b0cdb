// Trace timeline: parse the JSONL export, filter by kind, and pair
// tool_call/tool_result events by call_id for expandable display.

import { escapeHtml, truncate } from "./format.js";
import type { TraceEvent } from "./types.js";

export function parseTrace(jsonl: string): TraceEvent[] {
  return jsonl
    .split("\n")
    .filter((line) => line.trim().length > 0)
    .map((line) => JSON.parse(line) as TraceEvent);
}

export function filterEvents(events: TraceEvent[], kind?: string): TraceEvent[] {
  return kind ? events.filter((e) => e.kind === kind) : events;
}

export interface CallPair {
  call: TraceEvent;
  result: TraceEvent | null;
}

/** Pair each tool_call with its tool_result by call_id, in call order. */
export function pairToolEvents(events: TraceEvent[]): CallPair[] {
  const results = new Map<string, TraceEvent>();
  for (const event of events) {
    if (event.kind === "tool_result") {
      results.set(String(event.payload["call_id"]), event);
    }
  }
  return events
    .filter((e) => e.kind === "tool_call")
    .map((call) => ({
      call,
      result: results.get(String(call.payload["call_id"])) ?? null,
    }));
}

export function countStepBoundaries(events: TraceEvent[]): number {
  return events.filter((e) => e.kind === "step_boundary").length;
}

export function renderTimeline(events: TraceEvent[], kindFilter?: string): string {
  const visible = filterEvents(events, kindFilter);
  const rows = visible
    .map((event) => {
      const classes = event.kind === "override" ? "event override" : "event";
      const extra =
        event.kind === "override"
          ? `<span class="actor">${escapeHtml(String(event.payload["actor"] ?? ""))}` +
            ` @ ${escapeHtml(String(event.payload["at"] ?? event.timestamp))}</span>`
          : "";
      return (
        `<li class="${classes}" data-seq="${event.seq}" data-kind="${event.kind}">` +
        `<span class="kind">${event.kind}</span>` +
        `<code>${escapeHtml(truncate(JSON.stringify(event.payload)))}</code>` +
        `${extra}</li>`
      );
    })
    .join("");
  return `<ol class="trace-timeline">${rows}</ol>`;
}
