import { escapeHtml, exact, fmtDate } from "./format.js";
import type { AttentionRowPayload, ContributorRowPayload } from "./types.js";

export function contributorTable(rows: ContributorRowPayload[]): string {
  if (rows.length === 0) {
    return `<p class="empty">No contributors in this category.</p>`;
  }
  const body = rows
    .map(
      (row) =>
        `<tr data-identity="${escapeHtml(row.identity_id)}">` +
        `<td><a href="#" data-drill="identity:${escapeHtml(row.identity_id)}">${escapeHtml(row.display_name)}</a></td>` +
        `<td class="num" data-field="contribution_count" data-value="${exact(row.contribution_count)}">${exact(row.contribution_count)}</td>` +
        `<td>${escapeHtml(row.affiliation)}</td>` +
        `<td>${escapeHtml(fmtDate(row.last_contribution))}</td>` +
        `</tr>`
    )
    .join("");
  return (
    `<table class="rows contributors"><thead><tr>` +
    `<th>Name</th><th># contributions</th><th>Affiliation</th><th>Last contribution</th>` +
    `</tr></thead><tbody>${body}</tbody></table>`
  );
}

export function attentionTable(rows: AttentionRowPayload[]): string {
  if (rows.length === 0) {
    return `<p class="empty">Every PR in this window got attention.</p>`;
  }
  const body = rows
    .map(
      (row) =>
        `<tr data-artifact="${escapeHtml(row.artifact_id)}">` +
        `<td><a href="${escapeHtml(row.artifact_url)}" target="_blank" rel="noopener">${escapeHtml(row.artifact_id)}</a></td>` +
        `<td>${escapeHtml(row.author_name)}</td>` +
        `<td>${escapeHtml(row.author_affiliation)}</td>` +
        `<td>${escapeHtml(row.author_gender)}</td>` +
        `<td>${escapeHtml(fmtDate(row.created_at))}</td>` +
        `<td class="num" data-field="age_days" data-value="${exact(row.age_days)}">${row.age_days.toFixed(1)}</td>` +
        `</tr>`
    )
    .join("");
  return (
    `<table class="rows attention"><thead><tr>` +
    `<th>PR</th><th>Author</th><th>Affiliation</th><th>Gender</th><th>Opened</th><th>Age (days)</th>` +
    `</tr></thead><tbody>${body}</tbody></table>`
  );
}
