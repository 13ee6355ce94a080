"""JSON payload builders shared by the HTTP API and the CLI exporter.

Both surfaces serialize these dicts with the same compact separators, so
an exported file is byte-identical to the corresponding /v1 response.
"""

from __future__ import annotations

import json

from . import metrics, network
from .errors import UnknownMetric
from .events import format_utc
from .metrics import FilterSpec


def dumps(payload) -> str:
    return json.dumps(payload, ensure_ascii=False, allow_nan=False, separators=(",", ":"))


def turnover(snapshot, registry, spec: FilterSpec):
    return metrics.turnover_snapshot(snapshot, registry, spec).to_dict()


def retention(snapshot, registry, spec: FilterSpec):
    return metrics.retention_trend(snapshot, registry, spec).to_dict()


def newcomers(snapshot, registry, spec: FilterSpec):
    return metrics.newcomers_by_month(snapshot, registry, spec).to_dict()


def contributions(snapshot, registry, spec: FilterSpec, kind="pr", measure="count"):
    return metrics.contribution_series(snapshot, registry, kind, measure, spec).to_dict()


def time_to_merge(snapshot, registry, spec: FilterSpec):
    ranking = metrics.time_to_merge(snapshot, registry, spec.lens, spec)
    return {
        "lens": spec.lens,
        "ranking": [
            {"group": group, "avg_days": round(days, 6)} for group, days in ranking
        ],
    }


def first_attention(snapshot, registry, spec: FilterSpec):
    ranking, never = metrics.time_to_first_attention(snapshot, registry, spec.lens, spec)
    return {
        "lens": spec.lens,
        "ranking": [
            {"group": group, "avg_days": round(days, 6)} for group, days in ranking
        ],
        "never_attended": never,
    }


def pr_overview(snapshot, registry, spec: FilterSpec):
    return {"lens": spec.lens, "groups": metrics.pr_overview(snapshot, registry, spec.lens, spec)}


def contributors(snapshot, registry, spec: FilterSpec):
    groups = metrics.contributor_totals(snapshot, registry, spec.lens, spec)
    for cell in groups.values():
        cell["percentage"] = round(cell["percentage"], 6)
    return {"lens": spec.lens, "groups": groups}


def attention_prs(snapshot, registry, spec: FilterSpec):
    rows = metrics.prs_needing_attention(snapshot, registry, spec)
    return {"lens": spec.lens, "rows": [row.to_dict() for row in rows]}


def network_pr(snapshot, registry, spec: FilterSpec):
    graph = network.build_pr_network(snapshot, registry, spec)
    isolated = network.isolated_contributors(graph, snapshot, registry, spec)
    payload = graph.to_dict()
    payload["isolated"] = [row.to_dict() for row in isolated]
    return payload


def identity_detail(snapshot, registry, identity_id):
    identity = registry.by_id.get(identity_id)
    if identity is None:
        return None
    events = [
        e
        for e in snapshot
        if registry.identity_for(e.actor) is identity
    ]
    detail = identity.to_dict()
    detail["contribution_count"] = len(events)
    detail["last_contribution"] = (
        format_utc(max(e.timestamp for e in events)) if events else None
    )
    return detail


METRIC_BUILDERS = {
    "turnover": turnover,
    "retention": retention,
    "newcomers": newcomers,
    "contributions": contributions,
    "time-to-merge": time_to_merge,
    "first-attention": first_attention,
    "pr-overview": pr_overview,
    "contributors": contributors,
    "attention-prs": attention_prs,
    "network-pr": network_pr,
}


def build(name, snapshot, registry, spec, **kwargs):
    try:
        builder = METRIC_BUILDERS[name]
    except KeyError:
        raise UnknownMetric(
            f"unknown metric {name!r}; valid: {', '.join(sorted(METRIC_BUILDERS))}"
        ) from None
    return builder(snapshot, registry, spec, **kwargs)


# --- CSV rendering ---------------------------------------------------------


def to_csv(name, payload) -> str:
    """Stable tabular rendering of a metric payload."""
    lines = []
    if name in ("retention", "newcomers", "contributions"):
        lines.append("month,group,value")
        for bucket in payload["buckets"]:
            for group, value in bucket["values"].items():
                lines.append(f"{bucket['month']},{_q(group)},{value}")
    elif name in ("time-to-merge", "first-attention"):
        lines.append("group,avg_days")
        for row in payload["ranking"]:
            lines.append(f"{_q(row['group'])},{row['avg_days']}")
    elif name == "pr-overview":
        lines.append("group,pr_count,comment_count,reaction_count")
        for group, cell in payload["groups"].items():
            lines.append(
                f"{_q(group)},{cell['pr_count']},{cell['comment_count']},{cell['reaction_count']}"
            )
    elif name == "contributors":
        lines.append("group,count,percentage")
        for group, cell in payload["groups"].items():
            lines.append(f"{_q(group)},{cell['count']},{cell['percentage']}")
    elif name == "attention-prs":
        lines.append(
            "artifact_id,artifact_url,created_at,author_name,author_affiliation,author_gender,age_days"
        )
        for row in payload["rows"]:
            lines.append(
                ",".join(
                    _q(str(row[k]))
                    for k in (
                        "artifact_id",
                        "artifact_url",
                        "created_at",
                        "author_name",
                        "author_affiliation",
                        "author_gender",
                        "age_days",
                    )
                )
            )
    elif name == "network-pr":
        lines.append("source,target,weight")
        for edge in payload["edges"]:
            lines.append(f"{_q(edge['source'])},{_q(edge['target'])},{edge['weight']}")
    elif name == "turnover":
        lines.append("month,group,newcomers,left,might_be_leaving,retention_rate")
        for month in payload["months"]:
            for group, cell in month["groups"].items():
                rate = cell["retention_rate"]
                lines.append(
                    f"{month['month']},{_q(group)},{cell['newcomers']},{cell['left']},"
                    f"{cell['might_be_leaving']},{'' if rate is None else rate}"
                )
    else:
        raise UnknownMetric(f"no CSV rendering for {name!r}")
    return "\n".join(lines) + "\n"


def _q(value: str) -> str:
    if any(c in value for c in ',"\n'):
        return '"' + value.replace('"', '""') + '"'
    return value
