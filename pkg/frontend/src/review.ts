// Run review: per-cluster bill tables with a threshold slider and include
// toggles. Every change issues exactly one PATCH; the re-rendered aggregates
// and gridlock score come from the server response, never a local recompute.

import type { ApiClient } from "./api.js";
import type { ClusterReport, GridlockResult, PatchResponse, RunDoc } from "./types.js";
import { escapeHtml, round2 } from "./format.js";

export function renderClusterTable(report: ClusterReport): string {
  const included = report.included ?? {};
  const rows = report.bills
    .map((bill) => {
      const on = included[bill.bill_id] !== false;
      return (
        `<tr data-bill="${escapeHtml(bill.bill_id)}">` +
        `<td>${escapeHtml(bill.bill_id)}</td>` +
        `<td>${escapeHtml(bill.title)}</td>` +
        `<td>${bill.score.toFixed(6)}</td>` +
        `<td>${bill.enacted ? '<span class="badge enacted">enacted</span>' : ""}</td>` +
        `<td><input type="checkbox" class="include-toggle" ` +
        `data-bill="${escapeHtml(bill.bill_id)}" ${on ? "checked" : ""}></td>` +
        `</tr>`
      );
    })
    .join("");
  return (
    `<section class="cluster" data-cluster="${escapeHtml(report.cluster_name)}">` +
    `<h3>${escapeHtml(report.cluster_name)}</h3>` +
    `<p class="aggregates">bills: ${report.total_bills_found} · enacted: ` +
    `${report.enacted_bills} · rate: ${round2(report.enactment_rate)} · ` +
    `${report.has_enacted_legislation ? "productive" : "gridlocked"}</p>` +
    `<label>threshold <input type="range" class="threshold-slider" min="-1" max="1" ` +
    `step="0.01" value="${report.threshold}" ` +
    `data-cluster="${escapeHtml(report.cluster_name)}"></label>` +
    `<table><tr><th>bill</th><th>title</th><th>score</th><th></th><th>include</th></tr>` +
    rows +
    `</table></section>`
  );
}

export function renderRunReview(run: RunDoc): string {
  const clusters = run.cluster_reports.map(renderClusterTable).join("");
  const score = run.result
    ? `<div class="score-readout" data-score="${run.result.score}">gridlock: ` +
      `${round2(run.result.score)} (${run.result.gridlocked_clusters}/` +
      `${run.result.total_clusters})</div>`
    : `<div class="score-readout pending">score pending review</div>`;
  const finalize = run.state === "awaiting_review"
    ? `<button class="finalize" data-confirm="true">Finalize run</button>`
    : "";
  return (
    `<div class="run-review" data-run="${escapeHtml(run.run_id)}" ` +
    `data-state="${escapeHtml(run.state)}">${score}${finalize}${clusters}</div>`
  );
}

/** Orchestrates review mutations. UI layers call these and re-render with the
 * returned server state. */
export class ReviewController {
  patchCount = 0;
  lastGridlock: GridlockResult | null = null;

  constructor(private api: ApiClient, private runId: string) {}

  async setThreshold(clusterName: string, threshold: number): Promise<PatchResponse> {
    this.patchCount += 1;
    const response = await this.api.patchCluster(this.runId, clusterName, { threshold });
    this.lastGridlock = response.gridlock;
    return response;
  }

  async setIncluded(
    clusterName: string,
    billId: string,
    included: boolean,
  ): Promise<PatchResponse> {
    this.patchCount += 1;
    const response = await this.api.patchCluster(this.runId, clusterName, {
      bill_overrides: { [billId]: included },
    });
    this.lastGridlock = response.gridlock;
    return response;
  }

  async finalize(): Promise<GridlockResult> {
    const result = await this.api.finalizeRun(this.runId);
    this.lastGridlock = result;
    return result;
  }
}
