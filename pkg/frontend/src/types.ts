// Wire shapes of the /v1 API. The dashboard never recomputes metrics;
// every rendered figure comes straight from one of these payloads.

export type Lens = "none" | "gender" | "affiliation";

export interface SeriesBucket {
  month: string;
  values: Record<string, number>;
}

export interface MetricSeriesPayload {
  lens: Lens;
  measure: string;
  buckets: SeriesBucket[];
}

export interface TurnoverMonthGroups {
  newcomers: number;
  left: number;
  might_be_leaving: number;
  retention_rate: number | null;
}

export interface ContributorRowPayload {
  identity_id: string;
  display_name: string;
  contribution_count: number;
  affiliation: string;
  gender: string;
  last_contribution: string;
}

export interface TurnoverPayload {
  as_of: string;
  lens: Lens;
  months: { month: string; groups: Record<string, TurnoverMonthGroups> }[];
  drill_down: Record<string, Record<string, ContributorRowPayload[]>>;
}

export interface RankingPayload {
  lens: Lens;
  ranking: { group: string; avg_days: number }[];
  never_attended?: Record<string, number>;
}

export interface PrOverviewPayload {
  lens: Lens;
  groups: Record<
    string,
    { pr_count: number; comment_count: number; reaction_count: number }
  >;
}

export interface ContributorsPayload {
  lens: Lens;
  groups: Record<string, { count: number; percentage: number }>;
}

export interface AttentionRowPayload {
  artifact_id: string;
  artifact_url: string;
  created_at: string;
  author_id: string;
  author_name: string;
  author_affiliation: string;
  author_gender: string;
  age_days: number;
}

export interface AttentionPayload {
  lens: Lens;
  rows: AttentionRowPayload[];
}

export interface GraphNode {
  id: string;
  name: string;
  group: string;
  size: number;
}

export interface GraphEdge {
  source: string;
  target: string;
  weight: number;
}

export interface NetworkPayload {
  lens: Lens;
  nodes: GraphNode[];
  edges: GraphEdge[];
  isolated: AttentionRowPayload[];
}

export interface HealthPayload {
  status: string;
  events: number;
  as_of: string | null;
}
