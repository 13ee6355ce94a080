export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Attribute-safe exact value: what tests compare against the payload. */
export function exact(value: number | null): string {
  return value === null ? "" : String(value);
}

export function fmtDays(value: number): string {
  return `${value.toFixed(1)} d`;
}

export function fmtPercent(value: number): string {
  return `${value.toFixed(1)}%`;
}

export function fmtDate(iso: string): string {
  return iso.slice(0, 10);
}

const PALETTE = [
  "#4e79a7",
  "#f28e2b",
  "#59a14f",
  "#e15759",
  "#b07aa1",
  "#76b7b2",
  "#edc948",
  "#9c755f",
  "#bab0ac",
  "#ff9da7",
];

/** Stable color per group within one page render. */
export function colorScale(groups: string[]): (group: string) => string {
  const order = [...groups].sort();
  return (group) => PALETTE[Math.max(0, order.indexOf(group)) % PALETTE.length];
}
