// Gridlock bar chart: one bar per Congress, heights straight from the API.

import { escapeHtml, round2 } from "./format.js";
import type { GridlockEntry } from "./types.js";

const WIDTH = 640;
const HEIGHT = 360;
const MARGIN = 40;

export function renderGridlockChart(series: GridlockEntry[]): string {
  if (series.length === 0) {
    return (
      `<div class="empty-state">No finalized runs yet. ` +
      `Start a run to populate the gridlock series.</div>`
    );
  }
  const plotW = WIDTH - 2 * MARGIN;
  const plotH = HEIGHT - 2 * MARGIN;
  const gap = plotW / series.length;
  const barW = gap * 0.7;
  const parts: string[] = [
    `<svg class="gridlock-chart" xmlns="http://www.w3.org/2000/svg" ` +
      `width="${WIDTH}" height="${HEIGHT}" role="img">`,
    `<line x1="${MARGIN}" y1="${HEIGHT - MARGIN}" x2="${WIDTH - MARGIN}" ` +
      `y2="${HEIGHT - MARGIN}" stroke="#333"/>`,
  ];
  series.forEach((entry, i) => {
    const barH = entry.score * plotH;
    const x = MARGIN + i * gap + (gap - barW) / 2;
    const y = HEIGHT - MARGIN - barH;
    // The title element is the hover tooltip: exact score plus Y/Z decomposition.
    parts.push(
      `<rect class="bar" data-congress="${entry.congress}" ` +
        `data-score="${entry.score}" x="${x.toFixed(1)}" y="${y.toFixed(1)}" ` +
        `width="${barW.toFixed(1)}" height="${barH.toFixed(1)}" fill="#4472a8">` +
        `<title>${entry.congress}th: ${entry.score} ` +
        `(${entry.gridlocked_clusters}/${entry.total_clusters})</title></rect>`,
      `<text x="${(x + barW / 2).toFixed(1)}" y="${HEIGHT - MARGIN + 16}" ` +
        `text-anchor="middle" font-size="12">${entry.congress}</text>`,
      `<text class="bar-label" x="${(x + barW / 2).toFixed(1)}" ` +
        `y="${(y - 4).toFixed(1)}" text-anchor="middle" font-size="11">` +
        `${escapeHtml(round2(entry.score))}</text>`,
    );
  });
  parts.push("</svg>");
  return parts.join("");
}
