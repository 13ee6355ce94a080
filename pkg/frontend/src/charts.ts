// Pure SVG builders. Every datum carries data-* attributes holding the
// exact payload value so the numbers on screen are auditable against the
// API response (and tested that way).

import { colorScale, escapeHtml, exact } from "./format.js";
import type { SeriesBucket } from "./types.js";

const W = 640;
const H = 220;
const PAD = { left: 44, right: 12, top: 12, bottom: 28 };

export const EMPTY_MESSAGE = "No data for this filter.";

export function emptyState(): string {
  return `<p class="empty">${EMPTY_MESSAGE}</p>`;
}

function groupsOf(buckets: SeriesBucket[]): string[] {
  const groups = new Set<string>();
  for (const bucket of buckets) {
    for (const group of Object.keys(bucket.values)) groups.add(group);
  }
  return [...groups].sort();
}

function xAt(index: number, count: number): number {
  const inner = W - PAD.left - PAD.right;
  return PAD.left + (count <= 1 ? inner / 2 : (index * inner) / (count - 1));
}

function axisLabels(months: string[]): string {
  const step = Math.max(1, Math.ceil(months.length / 8));
  let out = "";
  for (let i = 0; i < months.length; i += step) {
    out += `<text class="axis" x="${xAt(i, months.length).toFixed(1)}" y="${
      H - 8
    }" text-anchor="middle">${escapeHtml(months[i])}</text>`;
  }
  return out;
}

function legend(
  groups: string[],
  color: (g: string) => string,
  drillPrefix?: string
): string {
  const items = groups
    .map((group) => {
      const drill = drillPrefix
        ? ` data-drill="${escapeHtml(`${drillPrefix}:${group}`)}" role="button"`
        : "";
      return `<span class="legend-item"${drill}><i style="background:${color(
        group
      )}"></i>${escapeHtml(group)}</span>`;
    })
    .join("");
  return `<div class="legend">${items}</div>`;
}

export interface LineChartOptions {
  title: string;
  /** legend entries become clickable drill targets "<prefix>:<group>" */
  drillPrefix?: string;
  /** series id stamped on each datum, for tests and tooltips */
  series: string;
}

export function lineChart(buckets: SeriesBucket[], opts: LineChartOptions): string {
  if (buckets.length === 0) return emptyState();
  const groups = groupsOf(buckets);
  if (groups.length === 0) return emptyState();
  const color = colorScale(groups);
  const months = buckets.map((b) => b.month);
  const max = Math.max(
    1e-9,
    ...buckets.flatMap((b) => Object.values(b.values))
  );
  const innerH = H - PAD.top - PAD.bottom;
  const yAt = (v: number) => PAD.top + innerH - (v / max) * innerH;

  let body = "";
  for (const group of groups) {
    const points: string[] = [];
    let dots = "";
    buckets.forEach((bucket, i) => {
      const value = bucket.values[group];
      if (value === undefined) return; // gap: group absent that month
      const x = xAt(i, months.length);
      const y = yAt(value);
      points.push(`${x.toFixed(1)},${y.toFixed(1)}`);
      dots +=
        `<circle class="dot" cx="${x.toFixed(1)}" cy="${y.toFixed(1)}" r="3"` +
        ` fill="${color(group)}" data-series="${escapeHtml(opts.series)}"` +
        ` data-month="${escapeHtml(bucket.month)}" data-group="${escapeHtml(group)}"` +
        ` data-value="${exact(value)}"><title>${escapeHtml(group)} ${escapeHtml(
          bucket.month
        )}: ${exact(value)}</title></circle>`;
    });
    if (points.length > 1) {
      body += `<polyline fill="none" stroke="${color(group)}" stroke-width="1.5" points="${points.join(" ")}"/>`;
    }
    body += dots;
  }
  return (
    `<figure class="chart" data-chart="${escapeHtml(opts.series)}">` +
    `<figcaption>${escapeHtml(opts.title)}</figcaption>` +
    legend(groups, color, opts.drillPrefix) +
    `<svg viewBox="0 0 ${W} ${H}" role="img">${body}${axisLabels(months)}</svg>` +
    `</figure>`
  );
}

/** Stacked 100% bars; the input values of each bucket sum to 1. */
export function stackedProportionChart(
  buckets: SeriesBucket[],
  title: string,
  series: string
): string {
  const nonEmpty = buckets.filter((b) => Object.keys(b.values).length > 0);
  if (nonEmpty.length === 0) return emptyState();
  const groups = groupsOf(nonEmpty);
  const color = colorScale(groups);
  const months = nonEmpty.map((b) => b.month);
  const innerH = H - PAD.top - PAD.bottom;
  const slot = (W - PAD.left - PAD.right) / months.length;
  const barW = Math.max(2, Math.min(24, slot * 0.7));

  let body = "";
  nonEmpty.forEach((bucket, i) => {
    const x = PAD.left + i * slot + (slot - barW) / 2;
    let yTop = PAD.top + innerH;
    for (const group of groups) {
      const value = bucket.values[group];
      if (value === undefined || value === 0) continue;
      const h = value * innerH;
      yTop -= h;
      body +=
        `<rect x="${x.toFixed(1)}" y="${yTop.toFixed(1)}" width="${barW.toFixed(1)}"` +
        ` height="${h.toFixed(2)}" fill="${color(group)}"` +
        ` data-series="${escapeHtml(series)}" data-month="${escapeHtml(bucket.month)}"` +
        ` data-group="${escapeHtml(group)}" data-value="${exact(value)}">` +
        `<title>${escapeHtml(group)} ${escapeHtml(bucket.month)}: ${(value * 100).toFixed(1)}%</title></rect>`;
    }
  });
  return (
    `<figure class="chart" data-chart="${escapeHtml(series)}">` +
    `<figcaption>${escapeHtml(title)}</figcaption>` +
    legend(groups, color) +
    `<svg viewBox="0 0 ${W} ${H}" role="img">${body}${axisLabels(months)}</svg>` +
    `</figure>`
  );
}

/** Horizontal bars in payload order (the API already ranks descending). */
export function rankingChart(
  rows: { group: string; avg_days: number }[],
  title: string,
  series: string,
  valueLabel: (v: number) => string
): string {
  if (rows.length === 0) return emptyState();
  const color = colorScale(rows.map((r) => r.group));
  const max = Math.max(1e-9, ...rows.map((r) => r.avg_days));
  const rowH = 26;
  const height = rows.length * rowH + 8;
  const innerW = W - 180;
  let body = "";
  rows.forEach((row, i) => {
    const y = 4 + i * rowH;
    const w = (row.avg_days / max) * innerW;
    body +=
      `<text class="axis" x="150" y="${y + 15}" text-anchor="end">${escapeHtml(row.group)}</text>` +
      `<rect x="156" y="${y}" width="${w.toFixed(1)}" height="${rowH - 8}"` +
      ` fill="${color(row.group)}" data-series="${escapeHtml(series)}"` +
      ` data-group="${escapeHtml(row.group)}" data-rank="${i}" data-value="${exact(row.avg_days)}">` +
      `<title>${escapeHtml(row.group)}: ${exact(row.avg_days)} days</title></rect>` +
      `<text class="axis" x="${(160 + w).toFixed(1)}" y="${y + 15}">${escapeHtml(valueLabel(row.avg_days))}</text>`;
  });
  return (
    `<figure class="chart" data-chart="${escapeHtml(series)}">` +
    `<figcaption>${escapeHtml(title)}</figcaption>` +
    `<svg viewBox="0 0 ${W} ${height}" role="img">${body}</svg>` +
    `</figure>`
  );
}
