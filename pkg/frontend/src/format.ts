/** Presentation rounding only (2 decimals); scores themselves are never
 * recomputed client-side. */
export function round2(value: number): string {
  return value.toFixed(2);
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Truncate long payloads for inline display. */
export function truncate(text: string, max = 200): string {
  return text.length <= max ? text : `${text.slice(0, max)}…`;
}
