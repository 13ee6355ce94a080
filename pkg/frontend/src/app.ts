// Bootstraps the dashboard: URL -> state -> concurrent API fetches ->
// page render, with history integration so every view is a shareable link.

import { ApiClient } from "./api.js";
import { renderIdentityDetail, type IdentityDetailPayload } from "./identity.js";
import {
  renderCommunicationPage,
  renderContributionsPage,
  renderRetentionPage,
  type Fetched,
} from "./pages.js";
import {
  parseViewState,
  serializeViewState,
  withQuery,
  type Page,
  type ViewState,
} from "./state.js";
import type {
  AttentionPayload,
  ContributorsPayload,
  MetricSeriesPayload,
  NetworkPayload,
  RankingPayload,
  TurnoverPayload,
} from "./types.js";

const PAGES: { page: Page; label: string }[] = [
  { page: "retention", label: "Contributor Retention Trends" },
  { page: "communication", label: "Communication" },
  { page: "contributions", label: "Types of Contributions" },
];

export class Dashboard {
  state: ViewState;

  constructor(
    private root: HTMLElement,
    private api: ApiClient,
    private win: Window
  ) {
    this.state = parseViewState(win.location.search);
    win.addEventListener("popstate", () => {
      this.state = parseViewState(win.location.search);
      void this.render();
    });
    root.addEventListener("click", (event) => this.onClick(event));
    root.addEventListener("change", () => this.onFilterChange());
  }

  setState(patch: Partial<ViewState>, push = true): Promise<void> {
    this.state = { ...this.state, ...patch };
    if (push) {
      const url = this.win.location.pathname + serializeViewState(this.state);
      this.win.history.pushState(null, "", url);
    }
    return this.render();
  }

  private onClick(event: Event): void {
    const target = (event.target as HTMLElement).closest<HTMLElement>(
      "[data-drill], [data-page]"
    );
    if (!target) return;
    if (target.dataset.page) {
      event.preventDefault();
      void this.setState({ page: target.dataset.page as Page, drill: "" });
    } else if (target.dataset.drill !== undefined) {
      event.preventDefault();
      void this.setState({ drill: target.dataset.drill });
    }
  }

  private onFilterChange(): void {
    const from = this.input("filter-from")?.value ?? "";
    const to = this.input("filter-to")?.value ?? "";
    const lens = (this.input("filter-lens")?.value ?? "none") as ViewState["lens"];
    const group = this.input("filter-group")?.value ?? "";
    void this.setState({ from, to, lens, group, drill: "" });
  }

  private input(id: string): HTMLInputElement | null {
    return this.root.querySelector<HTMLInputElement>(`#${id}`);
  }

  private chrome(): string {
    const nav = PAGES.map(
      ({ page, label }) =>
        `<a href="#" data-page="${page}" class="${page === this.state.page ? "active" : ""}">${label}</a>`
    ).join("");
    const lensOptions = (["none", "gender", "affiliation"] as const)
      .map(
        (lens) =>
          `<option value="${lens}" ${lens === this.state.lens ? "selected" : ""}>${lens}</option>`
      )
      .join("");
    return (
      `<nav>${nav}</nav>` +
      `<form class="filters" onsubmit="return false">` +
      `<label>From <input type="date" id="filter-from" value="${this.state.from}"></label>` +
      `<label>To <input type="date" id="filter-to" value="${this.state.to}"></label>` +
      `<label>Lens <select id="filter-lens">${lensOptions}</select></label>` +
      `<label>Group <input type="text" id="filter-group" value="${this.state.group}"></label>` +
      `</form>`
    );
  }

  async render(): Promise<void> {
    const seq = this.api.nextSeq();
    const state = this.state;
    let body: string;
    if (state.page === "retention") {
      const [turnover, retention] = await Promise.all([
        this.api.get<TurnoverPayload>(withQuery("/v1/metrics/turnover", state)),
        this.api.get<MetricSeriesPayload>(withQuery("/v1/metrics/retention", state)),
      ]);
      body = renderRetentionPage({ turnover, retention }, state);
    } else if (state.page === "communication") {
      const [network, attention, timeToMerge] = await Promise.all([
        this.api.get<NetworkPayload>(withQuery("/v1/network/pr", state)),
        this.api.get<AttentionPayload>(withQuery("/v1/attention/prs", state)),
        this.api.get<RankingPayload>(withQuery("/v1/metrics/time-to-merge", state)),
      ]);
      body = renderCommunicationPage({ network, attention, timeToMerge }, state);
    } else {
      const series = (extra: string) =>
        this.api.get<MetricSeriesPayload>(
          withQuery("/v1/metrics/contributions", state, extra)
        );
      const [contributors, prCount, prProportion, issueCount, qaCount, timeToMerge, firstAttention] =
        await Promise.all([
          this.api.get<ContributorsPayload>(withQuery("/v1/metrics/contributors", state)),
          series("kind=pr&measure=count"),
          series("kind=pr&measure=proportion"),
          series("kind=issue&measure=count"),
          series("kind=qa_question&measure=count"),
          this.api.get<RankingPayload>(withQuery("/v1/metrics/time-to-merge", state)),
          this.api.get<RankingPayload>(withQuery("/v1/metrics/first-attention", state)),
        ]);
      body = renderContributionsPage(
        { contributors, prCount, prProportion, issueCount, qaCount, timeToMerge, firstAttention },
        state
      );
    }

    let drillPanel = "";
    if (state.drill.startsWith("identity:")) {
      const identityId = state.drill.slice("identity:".length);
      const detail = (await this.api.get<IdentityDetailPayload>(
        `/v1/identities/${encodeURIComponent(identityId)}`
      )) as Fetched<IdentityDetailPayload>;
      drillPanel = detail.ok
        ? renderIdentityDetail(detail.data)
        : `<p class="error" role="alert">${detail.error}</p>`;
    }

    if (!this.api.isCurrent(seq)) return; // a newer render superseded us
    this.root.innerHTML = this.chrome() + `<main>${body}${drillPanel}</main>`;
  }
}

export function boot(win: Window, baseUrl = ""): Dashboard {
  const root = win.document.getElementById("app");
  if (!root) throw new Error("missing #app container");
  const dashboard = new Dashboard(root as HTMLElement, new ApiClient(baseUrl), win);
  void dashboard.render();
  return dashboard;
}

declare global {
  interface Window {
    __dashboard?: Dashboard;
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  window.__dashboard = boot(window);
}
