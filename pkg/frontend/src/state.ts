// View state <-> URL. Every view is deep-linkable: serialize/parse
// round-trip exactly, and defaults are omitted from the URL.

import type { Lens } from "./types.js";

export type Page = "retention" | "communication" | "contributions";

export interface ViewState {
  page: Page;
  from: string; // YYYY-MM-DD or ""
  to: string;
  lens: Lens;
  group: string;
  // drill-down selection, e.g. "might_be_leaving:woman" or "identity:<id>"
  drill: string;
}

export const DEFAULT_STATE: ViewState = {
  page: "retention",
  from: "",
  to: "",
  lens: "none",
  group: "",
  drill: "",
};

const PAGES: Page[] = ["retention", "communication", "contributions"];
const LENSES: Lens[] = ["none", "gender", "affiliation"];

export function parseViewState(search: string): ViewState {
  const params = new URLSearchParams(search);
  const page = params.get("page") ?? "";
  const lens = params.get("lens") ?? "";
  return {
    page: PAGES.includes(page as Page) ? (page as Page) : DEFAULT_STATE.page,
    from: params.get("from") ?? "",
    to: params.get("to") ?? "",
    lens: LENSES.includes(lens as Lens) ? (lens as Lens) : DEFAULT_STATE.lens,
    group: params.get("group") ?? "",
    drill: params.get("drill") ?? "",
  };
}

export function serializeViewState(state: ViewState): string {
  const params = new URLSearchParams();
  for (const key of ["page", "from", "to", "lens", "group", "drill"] as const) {
    if (state[key] !== DEFAULT_STATE[key]) params.set(key, state[key]);
  }
  const text = params.toString();
  return text ? `?${text}` : "";
}

/** Query string fragment shared by every API call on a page. */
export function filterQuery(state: ViewState): string {
  const params = new URLSearchParams();
  if (state.from) params.set("from", state.from);
  if (state.to) params.set("to", state.to);
  if (state.lens !== "none") params.set("lens", state.lens);
  if (state.group) params.set("group", state.group);
  return params.toString();
}

export function withQuery(path: string, state: ViewState, extra = ""): string {
  const parts = [filterQuery(state), extra].filter(Boolean);
  return parts.length ? `${path}?${parts.join("&")}` : path;
}
