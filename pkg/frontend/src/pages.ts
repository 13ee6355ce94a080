// Pure page renderers: (fetched payloads, view state) -> HTML string.
// No metric is recomputed here; values are lifted verbatim from the API.

import {
  EMPTY_MESSAGE,
  emptyState,
  lineChart,
  rankingChart,
  stackedProportionChart,
} from "./charts.js";
import { forceLayout } from "./force.js";
import { colorScale, escapeHtml, exact, fmtPercent } from "./format.js";
import type { ViewState } from "./state.js";
import { attentionTable, contributorTable } from "./tables.js";
import type {
  AttentionPayload,
  ContributorsPayload,
  MetricSeriesPayload,
  NetworkPayload,
  RankingPayload,
  SeriesBucket,
  TurnoverPayload,
} from "./types.js";

export type Fetched<T> = { ok: true; data: T } | { ok: false; error: string };

function section<T>(
  title: string,
  fetched: Fetched<T>,
  render: (data: T) => string
): string {
  const body = fetched.ok
    ? render(fetched.data)
    : `<p class="error" role="alert">${escapeHtml(fetched.error)}</p>`;
  return `<section><h2>${escapeHtml(title)}</h2>${body}</section>`;
}

// --- retention ---------------------------------------------------------

export interface RetentionData {
  turnover: Fetched<TurnoverPayload>;
  retention: Fetched<MetricSeriesPayload>;
}

const TURNOVER_CATEGORIES = ["newcomers", "left", "might_be_leaving"] as const;

function categoryBuckets(
  turnover: TurnoverPayload,
  category: (typeof TURNOVER_CATEGORIES)[number]
): SeriesBucket[] {
  return turnover.months.map((month) => ({
    month: month.month,
    values: Object.fromEntries(
      Object.entries(month.groups).map(([group, cells]) => [group, cells[category]])
    ),
  }));
}

export function renderRetentionPage(data: RetentionData, state: ViewState): string {
  const charts = section("Contributor turnover", data.turnover, (turnover) => {
    if (turnover.months.length === 0) return emptyState();
    return TURNOVER_CATEGORIES.map((category) =>
      lineChart(categoryBuckets(turnover, category), {
        title: category.replace(/_/g, " "),
        series: category,
        drillPrefix: category,
      })
    ).join("");
  });
  const trend = section("Retention trend", data.retention, (retention) =>
    lineChart(retention.buckets, { title: "retention rate", series: "retention" })
  );

  let drill = "";
  const [category, ...rest] = state.drill.split(":");
  const group = rest.join(":");
  if (data.turnover.ok && group && (TURNOVER_CATEGORIES as readonly string[]).concat("active").includes(category)) {
    const rows = data.turnover.data.drill_down[category]?.[group] ?? [];
    drill =
      `<section class="drill" data-drill-target="${escapeHtml(state.drill)}">` +
      `<h2>${escapeHtml(category.replace(/_/g, " "))} — ${escapeHtml(group)}</h2>` +
      contributorTable(rows) +
      `</section>`;
  }
  return charts + trend + drill;
}

// --- communication ------------------------------------------------------

export interface CommunicationData {
  network: Fetched<NetworkPayload>;
  attention: Fetched<AttentionPayload>;
  timeToMerge: Fetched<RankingPayload>;
}

function renderGraph(network: NetworkPayload): string {
  if (network.nodes.length === 0) return emptyState();
  const width = 640;
  const height = 480;
  const positions = forceLayout(network.nodes, network.edges, width, height);
  const color = colorScale(network.nodes.map((n) => n.group));
  const maxWeight = Math.max(1, ...network.edges.map((e) => e.weight));

  let edges = "";
  for (const edge of network.edges) {
    const a = positions.get(edge.source)!;
    const b = positions.get(edge.target)!;
    edges +=
      `<line class="edge" x1="${a.x.toFixed(1)}" y1="${a.y.toFixed(1)}"` +
      ` x2="${b.x.toFixed(1)}" y2="${b.y.toFixed(1)}"` +
      ` stroke-width="${(0.8 + (edge.weight / maxWeight) * 4).toFixed(2)}"` +
      ` data-source="${escapeHtml(edge.source)}" data-target="${escapeHtml(edge.target)}"` +
      ` data-weight="${exact(edge.weight)}">` +
      `<title>${exact(edge.weight)} shared PRs</title></line>`;
  }
  let nodes = "";
  for (const node of network.nodes) {
    const p = positions.get(node.id)!;
    const r = 4 + 2.5 * Math.sqrt(node.size);
    nodes +=
      `<circle class="node" cx="${p.x.toFixed(1)}" cy="${p.y.toFixed(1)}" r="${r.toFixed(1)}"` +
      ` fill="${color(node.group)}" data-id="${escapeHtml(node.id)}"` +
      ` data-group="${escapeHtml(node.group)}" data-size="${exact(node.size)}"` +
      ` data-drill="identity:${escapeHtml(node.id)}">` +
      `<title>${escapeHtml(node.name)} (${escapeHtml(node.group)}): ${exact(node.size)} PRs authored</title></circle>`;
  }
  const groups = [...new Set(network.nodes.map((n) => n.group))].sort();
  const legend = groups
    .map(
      (group) =>
        `<span class="legend-item"><i style="background:${color(group)}"></i>${escapeHtml(group)}</span>`
    )
    .join("");
  return (
    `<div class="legend">${legend}</div>` +
    `<svg class="network" viewBox="0 0 ${width} ${height}" role="img">${edges}${nodes}</svg>`
  );
}

export function renderCommunicationPage(
  data: CommunicationData,
  _state: ViewState
): string {
  return (
    section("PR communication network", data.network, renderGraph) +
    section("PRs needing attention", data.attention, (attention) =>
      attentionTable(attention.rows)
    ) +
    section("Average days to merge", data.timeToMerge, (ttm) =>
      rankingChart(ttm.ranking, "time to merge (descending)", "time_to_merge", (v) =>
        v.toFixed(2)
      )
    )
  );
}

// --- contributions ------------------------------------------------------

export interface ContributionsData {
  contributors: Fetched<ContributorsPayload>;
  prCount: Fetched<MetricSeriesPayload>;
  prProportion: Fetched<MetricSeriesPayload>;
  issueCount: Fetched<MetricSeriesPayload>;
  qaCount: Fetched<MetricSeriesPayload>;
  timeToMerge: Fetched<RankingPayload>;
  firstAttention: Fetched<RankingPayload>;
}

function contributorTotals(payload: ContributorsPayload): string {
  const groups = Object.keys(payload.groups).sort();
  if (groups.length === 0) return emptyState();
  const body = groups
    .map((group) => {
      const cell = payload.groups[group];
      return (
        `<tr data-group="${escapeHtml(group)}">` +
        `<td>${escapeHtml(group)}</td>` +
        `<td class="num" data-field="count" data-value="${exact(cell.count)}">${exact(cell.count)}</td>` +
        `<td class="num" data-field="percentage" data-value="${exact(cell.percentage)}">${fmtPercent(cell.percentage)}</td>` +
        `</tr>`
      );
    })
    .join("");
  return (
    `<table class="rows totals"><thead><tr><th>Group</th><th>Contributors</th><th>Share</th></tr></thead>` +
    `<tbody>${body}</tbody></table>`
  );
}

export function renderContributionsPage(
  data: ContributionsData,
  _state: ViewState
): string {
  return (
    section("Contributors", data.contributors, contributorTotals) +
    section("PRs over time", data.prCount, (series) =>
      lineChart(series.buckets, { title: "PRs per month", series: "pr_count" })
    ) +
    section("PR proportion over time", data.prProportion, (series) =>
      stackedProportionChart(series.buckets, "share of PRs per month", "pr_proportion")
    ) +
    section("Issues over time", data.issueCount, (series) =>
      lineChart(series.buckets, { title: "issues per month", series: "issue_count" })
    ) +
    section("Q&A questions over time", data.qaCount, (series) =>
      lineChart(series.buckets, { title: "questions per month", series: "qa_count" })
    ) +
    section("Average days to merge", data.timeToMerge, (ttm) =>
      rankingChart(ttm.ranking, "time to merge (descending)", "time_to_merge", (v) =>
        v.toFixed(2)
      )
    ) +
    section("Days to first attention", data.firstAttention, (fa) => {
      const never = fa.never_attended ?? {};
      const counts = Object.keys(never)
        .sort()
        .map(
          (group) =>
            `<li data-group="${escapeHtml(group)}" data-value="${exact(never[group])}">` +
            `${escapeHtml(group)}: ${exact(never[group])} never attended</li>`
        )
        .join("");
      return (
        rankingChart(fa.ranking, "first attention (descending)", "first_attention", (v) =>
          v.toFixed(2)
        ) + (counts ? `<ul class="never-attended">${counts}</ul>` : "")
      );
    })
  );
}

export { EMPTY_MESSAGE };
