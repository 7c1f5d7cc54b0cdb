// Browser wiring: hash routing between the four views, event delegation for
// review controls, 1 s polling for run state. All business values come from
// the server; this file only moves strings into the DOM.

import { ApiClient, pollRun } from "./api.js";
import { renderThread, type ChatEntry } from "./chat.js";
import { renderGridlockChart } from "./chart.js";
import { ReviewController, renderRunReview } from "./review.js";
import { parseTrace, renderTimeline } from "./trace.js";

const api = new ApiClient("");

async function showChart(root: HTMLElement): Promise<void> {
  const series = await api.getGridlockSeries(113, 118);
  root.innerHTML = renderGridlockChart(series);
}

async function showTrace(root: HTMLElement, scopeId: string): Promise<void> {
  const jsonl = await api.getRunTrace(scopeId).catch(() => api.getSessionTrace(scopeId));
  const events = parseTrace(jsonl);
  root.innerHTML =
    `<select id="kind-filter"><option value="">all kinds</option>` +
    ["llm_request", "llm_response", "tool_call", "tool_result", "retrieval",
      "override", "step_boundary", "error"]
      .map((k) => `<option>${k}</option>`)
      .join("") +
    `</select><div id="timeline">${renderTimeline(events)}</div>`;
  root.querySelector("#kind-filter")?.addEventListener("change", (ev) => {
    const kind = (ev.target as HTMLSelectElement).value || undefined;
    (root.querySelector("#timeline") as HTMLElement).innerHTML =
      renderTimeline(events, kind);
  });
}

async function showReview(root: HTMLElement, runId: string): Promise<void> {
  const run = await pollRun(api, runId);
  const controller = new ReviewController(api, runId);
  root.innerHTML = renderRunReview(run);

  root.addEventListener("change", async (ev) => {
    const target = ev.target as HTMLElement;
    if (target.classList.contains("threshold-slider")) {
      const slider = target as HTMLInputElement;
      await controller.setThreshold(slider.dataset.cluster!, Number(slider.value));
    } else if (target.classList.contains("include-toggle")) {
      const toggle = target as HTMLInputElement;
      const cluster = toggle.closest(".cluster") as HTMLElement;
      await controller.setIncluded(
        cluster.dataset.cluster!, toggle.dataset.bill!, toggle.checked);
    } else {
      return;
    }
    root.innerHTML = renderRunReview(await api.getRun(runId));
  });

  root.addEventListener("click", async (ev) => {
    const target = ev.target as HTMLElement;
    if (target.classList.contains("finalize")) {
      if (!window.confirm("Finalize this run? Edits will be locked.")) return;
      await controller.finalize();
      root.innerHTML = renderRunReview(await api.getRun(runId));
    }
  });
}

async function showChat(root: HTMLElement): Promise<void> {
  const { session_id } = await api.createSession();
  const entries: ChatEntry[] = [];
  root.innerHTML =
    `<div id="thread"></div>` +
    `<form id="composer"><input id="prompt" placeholder="Ask the agent…">` +
    `<button>Send</button></form>`;
  root.querySelector("#composer")?.addEventListener("submit", async (ev) => {
    ev.preventDefault();
    const input = root.querySelector("#prompt") as HTMLInputElement;
    const prompt = input.value.trim();
    if (!prompt) return;
    input.value = "";
    const outcome = await api.sendMessage(session_id, prompt);
    entries.push({ prompt, outcome });
    (root.querySelector("#thread") as HTMLElement).innerHTML =
      renderThread(entries, session_id);
  });
}

async function route(): Promise<void> {
  const root = document.getElementById("app")!;
  const hash = window.location.hash.replace(/^#/, "");
  const [view, arg] = hash.split("/");
  if (view === "review" && arg) await showReview(root, arg);
  else if (view === "trace" && arg) await showTrace(root, arg);
  else if (view === "chat") await showChat(root);
  else await showChart(root);
}

window.addEventListener("hashchange", () => void route());
window.addEventListener("DOMContentLoaded", () => void route());
