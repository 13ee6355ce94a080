import { escapeHtml, exact, fmtDate } from "./format.js";

export interface IdentityDetailPayload {
  identity_id: string;
  display_name: string;
  profiles: {
    source_kind: string;
    username: string;
    email: string;
    full_name: string;
    profile_url: string;
  }[];
  is_bot: boolean;
  affiliation: { org_name: string; evidence_domain: string; evidence_profile: string };
  gender: { gender: string; probability: number; origin: string; provenance: string };
  contribution_count: number;
  last_contribution: string | null;
}

export function renderIdentityDetail(detail: IdentityDetailPayload): string {
  const profiles = detail.profiles
    .map(
      (p) =>
        `<li>${escapeHtml(p.source_kind)}: ${escapeHtml(p.username)}` +
        (p.email ? ` &lt;${escapeHtml(p.email)}&gt;` : "") +
        `</li>`
    )
    .join("");
  return (
    `<aside class="identity" data-identity="${escapeHtml(detail.identity_id)}">` +
    `<h3>${escapeHtml(detail.display_name)}</h3>` +
    `<p>Affiliation: ${escapeHtml(detail.affiliation.org_name)}</p>` +
    `<p>Gender: ${escapeHtml(detail.gender.gender)} (${escapeHtml(detail.gender.provenance)})</p>` +
    `<p>Contributions: <span data-field="contribution_count" data-value="${exact(detail.contribution_count)}">${exact(detail.contribution_count)}</span></p>` +
    (detail.last_contribution
      ? `<p>Last contribution: ${escapeHtml(fmtDate(detail.last_contribution))}</p>`
      : "") +
    `<ul>${profiles}</ul>` +
    `</aside>`
  );
}
