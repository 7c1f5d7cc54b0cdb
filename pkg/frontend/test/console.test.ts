// Criterion coverage for the console, run against the in-process fixture
// server: six chart bars with the replayed scores, exactly one PATCH per
// slider move with the score re-rendered from the response, and a trace view
// that pairs call/result events.

import { afterEach, beforeEach, describe, expect, it } from "vitest";

import { ApiClient, pollRun } from "../src/api.js";
import { renderGridlockChart } from "../src/chart.js";
import { renderThread } from "../src/chat.js";
import { ReviewController, renderClusterTable, renderRunReview } from "../src/review.js";
import {
  countStepBoundaries, filterEvents, pairToolEvents, parseTrace, renderTimeline,
} from "../src/trace.js";
import { FixtureServer } from "./fixtureServer.js";

let server: FixtureServer;
let api: ApiClient;

beforeEach(async () => {
  server = new FixtureServer();
  const baseUrl = await server.listen();
  api = new ApiClient(baseUrl);
});

afterEach(async () => {
  await server.close();
});

describe("gridlock chart", () => {
  it("renders six bars matching the replayed series", async () => {
    const series = await api.getGridlockSeries(113, 118);
    const svg = renderGridlockChart(series);
    const bars = [...svg.matchAll(/<rect class="bar"[^>]*data-score="([^"]+)"/g)]
      .map((m) => Number(m[1]));
    expect(bars).toEqual([0.5, 0.1, 0.375, 0.4, 0.7, 0.5]);
    const congresses = [...svg.matchAll(/data-congress="(\d+)"/g)].map((m) => m[1]);
    expect(congresses).toEqual(["113", "114", "115", "116", "117", "118"]);
  });

  it("scales bar heights from the score", async () => {
    const svg = renderGridlockChart(await api.getGridlockSeries(113, 118));
    const heights = [...svg.matchAll(/height="([0-9.]+)" fill/g)].map((m) => Number(m[1]));
    expect(heights[4]).toBeGreaterThan(heights[1]); // 0.7 bar taller than 0.1
    expect(heights[0]).toBeCloseTo(heights[5]); // equal scores, equal bars
  });

  it("renders an empty state for an empty series", () => {
    expect(renderGridlockChart([])).toContain("empty-state");
  });

  it("tooltips carry the exact score and Y/Z decomposition", async () => {
    const svg = renderGridlockChart(await api.getGridlockSeries(113, 118));
    expect(svg).toContain("<title>115th: 0.375 (3/8)</title>");
  });
});

describe("run review", () => {
  it("threshold slider issues exactly one PATCH and re-renders the server score", async () => {
    const controller = new ReviewController(api, "run-113-fixture");
    const response = await controller.setThreshold("Immigration Reform", 0.75);
    expect(server.patchCount).toBe(1);

    // 0.75 filters out the only enacted bill (score 0.7): both clusters are
    // now gridlocked and the server reports 2/2 = 1.0.
    expect(response.cluster_report.total_bills_found).toBe(1);
    expect(response.gridlock.score).toBe(1.0);

    const readout = renderRunReview({
      ...(await api.getRun("run-113-fixture")),
      result: response.gridlock,
    });
    expect(readout).toContain('data-score="1"');
    expect(readout).toContain("gridlock: 1.00 (2/2)");
    expect(server.patchCount).toBe(1); // rendering never re-PATCHes
  });

  it("include toggle issues one PATCH and flips the cluster to gridlocked", async () => {
    const controller = new ReviewController(api, "run-113-fixture");
    const response = await controller.setIncluded(
      "Immigration Reform", "113-hr-2", false);
    expect(server.patchCount).toBe(1);
    expect(response.cluster_report.has_enacted_legislation).toBe(false);
    expect(renderClusterTable(response.cluster_report)).toContain("gridlocked");
    // The excluded bill's checkbox renders unchecked.
    const row = renderClusterTable(response.cluster_report);
    expect(row).toMatch(/data-bill="113-hr-2"(?! checked)[^>]*>/);
  });

  it("displays aggregates straight from the server", async () => {
    const clusters = await api.getClusters("run-113-fixture");
    const html = renderClusterTable(clusters[0]);
    expect(html).toContain("bills: 3");
    expect(html).toContain("enacted: 1");
    expect(html).toContain('badge enacted');
  });

  it("finalize transitions the run and locks the button away", async () => {
    const controller = new ReviewController(api, "run-113-fixture");
    let run = await pollRun(api, "run-113-fixture", 0, async () => {});
    expect(renderRunReview(run)).toContain("finalize");
    const result = await controller.finalize();
    expect(result.score).toBe(0.5);
    run = await api.getRun("run-113-fixture");
    expect(run.state).toBe("finalized");
    expect(renderRunReview(run)).not.toContain("<button");
    // A second finalize conflicts server-side.
    await expect(api.finalizeRun("run-113-fixture")).rejects.toMatchObject({ status: 409 });
  });
});

describe("trace view", () => {
  it("pairs tool_call events with their results for a completed run", async () => {
    const events = parseTrace(await api.getRunTrace("run-113-fixture"));
    const pairs = pairToolEvents(events);
    expect(pairs).toHaveLength(2);
    for (const pair of pairs) {
      expect(pair.result).not.toBeNull();
      expect(pair.result!.payload["call_id"]).toBe(pair.call.payload["call_id"]);
    }
  });

  it("shows three step boundaries and filters by kind", async () => {
    const events = parseTrace(await api.getRunTrace("run-113-fixture"));
    expect(countStepBoundaries(events)).toBe(3);
    const calls = filterEvents(events, "tool_call");
    expect(calls.every((e) => e.kind === "tool_call")).toBe(true);
    const html = renderTimeline(events, "tool_call");
    expect([...html.matchAll(/data-kind="tool_call"/g)]).toHaveLength(2);
  });

  it("distinguishes override events and shows actor + timestamp", async () => {
    const events = parseTrace(await api.getRunTrace("run-113-fixture"));
    const html = renderTimeline(events);
    expect(html).toContain('class="event override"');
    expect(html).toContain("console @ 2026-08-23T00:00:00Z");
  });
});

describe("chat view", () => {
  it("renders a turn with inline tool cards and a trace deep-link", async () => {
    const { session_id } = await api.createSession();
    const outcome = await api.sendMessage(session_id, "find immigration bills");
    const html = renderThread([{ prompt: "find immigration bills", outcome }], session_id);
    expect(html).toContain("fixture answer");
    expect(html).toContain("search_bill_summaries");
    expect(html).toContain(`#trace/${session_id}`);
  });

  it("renders a distinct banner for iteration_limit outcomes", () => {
    const html = renderThread([{
      prompt: "p",
      outcome: { kind: "iteration_limit", final_text: "", iterations_used: 5,
                 tool_calls_made: [] },
    }], "s");
    expect(html).toContain("iteration-limit");
    expect(html).toContain("(5)");
  });
});
