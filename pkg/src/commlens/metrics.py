"""Community metrics over an event snapshot and a resolved registry.

All operations are pure: (snapshot, registry, parameters) -> value. Bots
are excluded everywhere. Metrics disaggregate by a lens (gender or
affiliation); identities whose group is not known land in an explicit
"Unknown"/"unknown" group rather than being dropped.

Turnover states at a reference instant are disjoint and exhaustive:
  left             last activity more than 6 months before the instant
  might_be_leaving last activity in the (3, 6]-month band
  active           anything more recent
"""

from __future__ import annotations

import calendar
from collections import defaultdict
from dataclasses import dataclass, field
from datetime import datetime, timezone

from .events import EventSnapshot, format_utc
from .identity import IdentityRegistry

LENSES = ("gender", "affiliation", "none")

CONTRIBUTION_KINDS = {
    "pr": "pr_opened",
    "issue": "issue_opened",
    "qa_question": "qa_question",
    "qa_answer": "qa_answer",
}

SECONDS_PER_DAY = 86400.0


# --- filters and time helpers ----------------------------------------------


@dataclass(frozen=True)
class FilterSpec:
    start: datetime | None = None
    end: datetime | None = None
    lens: str = "none"
    group_filter: str | None = None

    def __post_init__(self):
        if self.lens not in LENSES:
            raise ValueError(f"unknown lens: {self.lens!r}")
        if self.start is not None and self.end is not None and self.start > self.end:
            raise ValueError("time_range start must not exceed end")

    def contains(self, ts) -> bool:
        if self.start is not None and ts < self.start:
            return False
        if self.end is not None and ts > self.end:
            return False
        return True


def month_of(ts) -> str:
    ts = ts.astimezone(timezone.utc)
    return f"{ts.year:04d}-{ts.month:02d}"


def month_start(month: str) -> datetime:
    year, mon = map(int, month.split("-"))
    return datetime(year, mon, 1, tzinfo=timezone.utc)


def next_month(month: str) -> str:
    year, mon = map(int, month.split("-"))
    if mon == 12:
        return f"{year + 1:04d}-01"
    return f"{year:04d}-{mon + 1:02d}"


def month_span(first: str, last: str):
    months = []
    current = first
    while current <= last:
        months.append(current)
        current = next_month(current)
    return months


def months_before(ts, count: int) -> datetime:
    """Same instant `count` calendar months earlier, day clamped."""
    ts = ts.astimezone(timezone.utc)
    total = ts.year * 12 + (ts.month - 1) - count
    year, mon = divmod(total, 12)
    mon += 1
    day = min(ts.day, calendar.monthrange(year, mon)[1])
    return ts.replace(year=year, month=mon, day=day)


def group_of(identity, lens: str) -> str:
    if lens == "gender":
        return identity.gender.gender or "unknown"
    if lens == "affiliation":
        return identity.affiliation.org_name or "Unknown"
    return "all"


# --- result shapes ---------------------------------------------------------


@dataclass
class MetricSeries:
    lens: str
    measure: str  # count | proportion | avg_days | rate
    buckets: list = field(default_factory=list)  # [(month, {group: value})]

    def to_dict(self):
        return {
            "lens": self.lens,
            "measure": self.measure,
            "buckets": [
                {"month": month, "values": {g: values[g] for g in sorted(values)}}
                for month, values in self.buckets
            ],
        }

    def total(self):
        return sum(sum(values.values()) for _, values in self.buckets)


@dataclass
class ContributorRow:
    identity_id: str
    display_name: str
    contribution_count: int
    affiliation: str
    gender: str
    last_contribution: datetime

    def to_dict(self):
        return {
            "identity_id": self.identity_id,
            "display_name": self.display_name,
            "contribution_count": self.contribution_count,
            "affiliation": self.affiliation,
            "gender": self.gender,
            "last_contribution": format_utc(self.last_contribution),
        }


@dataclass
class AttentionRow:
    artifact_id: str
    artifact_url: str
    created_at: datetime
    author_id: str
    author_name: str
    author_affiliation: str
    author_gender: str
    age_days: float

    def to_dict(self):
        return {
            "artifact_id": self.artifact_id,
            "artifact_url": self.artifact_url,
            "created_at": format_utc(self.created_at),
            "author_id": self.author_id,
            "author_name": self.author_name,
            "author_affiliation": self.author_affiliation,
            "author_gender": self.author_gender,
            "age_days": round(self.age_days, 6),
        }


@dataclass
class TurnoverSnapshot:
    as_of: datetime
    lens: str
    months: list = field(default_factory=list)
    drill_down: dict = field(default_factory=dict)  # category -> group -> rows

    def to_dict(self):
        return {
            "as_of": format_utc(self.as_of),
            "lens": self.lens,
            "months": self.months,
            "drill_down": {
                category: {
                    group: [row.to_dict() for row in rows]
                    for group, rows in sorted(groups.items())
                }
                for category, groups in sorted(self.drill_down.items())
            },
        }


# --- shared scans ----------------------------------------------------------


def _human_events(snapshot, registry, spec=None):
    """(event, identity) pairs for non-bot actors, optionally time-filtered."""
    pairs = []
    for event in snapshot:
        if spec is not None and not spec.contains(event.timestamp):
            continue
        identity = registry.identity_for(event.actor)
        if identity is None or identity.is_bot:
            continue
        pairs.append((event, identity))
    return pairs


def _first_last_events(snapshot, registry):
    first = {}
    last = {}
    counts = defaultdict(int)
    for event, identity in _human_events(snapshot, registry):
        iid = identity.identity_id
        if iid not in first or event.timestamp < first[iid]:
            first[iid] = event.timestamp
        if iid not in last or event.timestamp > last[iid]:
            last[iid] = event.timestamp
        counts[iid] += 1
    return first, last, counts


def _series_from_counts(counts_by_month, spec, measure="count"):
    """Zero-filled contiguous series from {month: {group: count}}."""
    if not counts_by_month:
        return MetricSeries(lens=spec.lens, measure=measure, buckets=[])
    first = (
        month_of(spec.start) if spec.start is not None else min(counts_by_month)
    )
    last = month_of(spec.end) if spec.end is not None else max(counts_by_month)
    groups = sorted({g for values in counts_by_month.values() for g in values})
    if spec.group_filter is not None:
        groups = [g for g in groups if g == spec.group_filter]
    buckets = []
    for month in month_span(first, last):
        values = counts_by_month.get(month, {})
        buckets.append((month, {g: values.get(g, 0) for g in groups}))
    series = MetricSeries(lens=spec.lens, measure=measure, buckets=buckets)
    if measure == "proportion":
        for _, values in series.buckets:
            total = sum(values.values())
            if total > 0:
                for g in values:
                    values[g] = values[g] / total
            else:
                values.clear()
    return series


def _contributor_row(identity, counts, last):
    last_ts = last[identity.identity_id]
    return ContributorRow(
        identity_id=identity.identity_id,
        display_name=identity.display_name,
        contribution_count=counts[identity.identity_id],
        affiliation=identity.affiliation.org_name,
        gender=identity.gender.gender,
        last_contribution=last_ts,
    )


def _sort_rows(rows):
    rows.sort(key=lambda r: (-r.contribution_count, r.display_name, r.identity_id))
    return rows


# --- operations ------------------------------------------------------------


def newcomers_by_month(snapshot, registry, spec: FilterSpec) -> MetricSeries:
    """Identities whose earliest snapshot event falls in each month."""
    first, _, _ = _first_last_events(snapshot, registry)
    counts = defaultdict(lambda: defaultdict(int))
    for identity in registry.humans():
        ts = first.get(identity.identity_id)
        if ts is None or not spec.contains(ts):
            continue
        counts[month_of(ts)][group_of(identity, spec.lens)] += 1
    return _series_from_counts(counts, spec)


def turnover_states(snapshot, registry, as_of):
    """Disjoint {identity_id: state} for contributors active on or before as_of."""
    _, last, _ = _first_last_events(snapshot, registry)
    six = months_before(as_of, 6)
    three = months_before(as_of, 3)
    states = {}
    for iid, ts in last.items():
        if ts > as_of:
            continue
        if ts <= six:
            states[iid] = "left"
        elif ts <= three:
            states[iid] = "might_be_leaving"
        else:
            states[iid] = "active"
    return states


def departures(snapshot, registry, as_of, lens="none"):
    """Left and might-be-leaving contributors at as_of, rows per group."""
    _, last, counts = _first_last_events(snapshot, registry)
    states = turnover_states(snapshot, registry, as_of)
    result = {"left": defaultdict(list), "might_be_leaving": defaultdict(list)}
    for identity in registry.humans():
        state = states.get(identity.identity_id)
        if state not in result:
            continue
        group = group_of(identity, lens)
        result[state][group].append(_contributor_row(identity, counts, last))
    for groups in result.values():
        for rows in groups.values():
            _sort_rows(rows)
    return {category: dict(groups) for category, groups in result.items()}


def retention_trend(snapshot, registry, spec: FilterSpec) -> MetricSeries:
    """Per cohort month, the fraction of newcomers who contributed again
    in a strictly later calendar month. Empty cohorts are omitted."""
    first, _, _ = _first_last_events(snapshot, registry)
    active_months = defaultdict(set)
    for event, identity in _human_events(snapshot, registry):
        active_months[identity.identity_id].add(month_of(event.timestamp))

    cohorts = defaultdict(lambda: defaultdict(lambda: [0, 0]))  # month -> group -> [total, retained]
    for identity in registry.humans():
        ts = first.get(identity.identity_id)
        if ts is None or not spec.contains(ts):
            continue
        cohort = month_of(ts)
        group = group_of(identity, spec.lens)
        if spec.group_filter is not None and group != spec.group_filter:
            continue
        cell = cohorts[cohort][group]
        cell[0] += 1
        if any(m > cohort for m in active_months[identity.identity_id]):
            cell[1] += 1

    buckets = []
    for month in sorted(cohorts):
        values = {}
        for group, (total, retained) in sorted(cohorts[month].items()):
            if total > 0:
                values[group] = retained / total
        if values:
            buckets.append((month, values))
    return MetricSeries(lens=spec.lens, measure="rate", buckets=buckets)


def contribution_series(
    snapshot, registry, kind: str, measure: str, spec: FilterSpec
) -> MetricSeries:
    """Monthly counts or within-month proportions of opened artifacts."""
    if kind not in CONTRIBUTION_KINDS:
        raise ValueError(f"unknown contribution kind: {kind!r}")
    if measure not in ("count", "proportion"):
        raise ValueError(f"unknown measure: {measure!r}")
    event_kind = CONTRIBUTION_KINDS[kind]
    counts = defaultdict(lambda: defaultdict(int))
    for event, identity in _human_events(snapshot, registry, spec):
        if event.kind != event_kind:
            continue
        counts[month_of(event.timestamp)][group_of(identity, spec.lens)] += 1
    return _series_from_counts(counts, spec, measure=measure)


def _pr_index(snapshot, registry, spec):
    """Per (repo, artifact): author identity, opened/merged/closed events,
    qualifying comment count. Only PRs opened inside the window count."""
    prs = {}
    events_by_pr = defaultdict(list)
    for event, identity in _human_events(snapshot, registry, spec):
        if not event.kind.startswith("pr_"):
            continue
        events_by_pr[(event.repo_id, event.artifact_id)].append((event, identity))
    for key, pairs in events_by_pr.items():
        opened = [(e, i) for e, i in pairs if e.kind == "pr_opened"]
        if not opened:
            continue
        opened_event, author = min(opened, key=lambda p: p[0].sort_key())
        merged = [e for e, _ in pairs if e.kind == "pr_merged"]
        closed = [e for e, _ in pairs if e.kind == "pr_closed"]
        qualifying = [
            (e, i)
            for e, i in pairs
            if e.kind in ("pr_comment", "pr_review")
            and i.identity_id != author.identity_id
        ]
        prs[key] = {
            "opened": opened_event,
            "author": author,
            "merged_at": min(e.timestamp for e in merged) if merged else None,
            "closed": bool(closed),
            "qualifying": qualifying,
            "events": pairs,
        }
    return prs


def time_to_merge(snapshot, registry, lens, spec=None):
    """Mean fractional days from PR open to merge, per group, descending."""
    spec = spec or FilterSpec(lens=lens)
    prs = _pr_index(snapshot, registry, spec)
    durations = defaultdict(list)
    for pr in prs.values():
        if pr["merged_at"] is None:
            continue
        days = (pr["merged_at"] - pr["opened"].timestamp).total_seconds() / SECONDS_PER_DAY
        durations[group_of(pr["author"], lens)].append(days)
    ranking = [
        (group, sum(values) / len(values)) for group, values in durations.items()
    ]
    ranking.sort(key=lambda item: (-item[1], item[0]))
    return ranking


def time_to_first_attention(snapshot, registry, lens, spec=None):
    """Mean days from issue open to first qualifying comment, per group.

    Returns (ranking, never_attended) where never_attended counts issues
    that got no qualifying comment, per group.
    """
    spec = spec or FilterSpec(lens=lens)
    issues = {}
    comments = defaultdict(list)
    for event, identity in _human_events(snapshot, registry, spec):
        key = (event.repo_id, event.artifact_id)
        if event.kind == "issue_opened":
            if key not in issues or event.sort_key() < issues[key][0].sort_key():
                issues[key] = (event, identity)
        elif event.kind == "issue_comment":
            comments[key].append((event, identity))
    waits = defaultdict(list)
    never = defaultdict(int)
    for key, (opened, author) in issues.items():
        group = group_of(author, lens)
        qualifying = [
            e
            for e, i in comments[key]
            if i.identity_id != author.identity_id and e.timestamp >= opened.timestamp
        ]
        if qualifying:
            first = min(e.timestamp for e in qualifying)
            waits[group].append((first - opened.timestamp).total_seconds() / SECONDS_PER_DAY)
        else:
            never[group] += 1
    ranking = [(group, sum(v) / len(v)) for group, v in waits.items()]
    ranking.sort(key=lambda item: (-item[1], item[0]))
    return ranking, dict(sorted(never.items()))


def prs_needing_attention(snapshot, registry, spec: FilterSpec):
    """Open or merged PRs with zero qualifying comments, oldest first."""
    prs = _pr_index(snapshot, registry, spec)
    as_of = spec.end or snapshot.as_of
    rows = []
    for pr in prs.values():
        if pr["qualifying"]:
            continue
        if pr["closed"] and pr["merged_at"] is None:
            continue  # abandoned, not awaiting attention
        opened = pr["opened"]
        author = pr["author"]
        if spec.group_filter is not None and group_of(author, spec.lens) != spec.group_filter:
            continue
        rows.append(
            AttentionRow(
                artifact_id=opened.artifact_id,
                artifact_url=opened.artifact_url,
                created_at=opened.timestamp,
                author_id=author.identity_id,
                author_name=author.display_name,
                author_affiliation=author.affiliation.org_name,
                author_gender=author.gender.gender,
                age_days=(as_of - opened.timestamp).total_seconds() / SECONDS_PER_DAY,
            )
        )
    rows.sort(key=lambda r: (-r.age_days, r.artifact_id))
    return rows


def pr_overview(snapshot, registry, lens, spec=None):
    """Per group: PRs authored, comments received on them, reactions on them."""
    spec = spec or FilterSpec(lens=lens)
    prs = _pr_index(snapshot, registry, spec)
    totals = defaultdict(lambda: {"pr_count": 0, "comment_count": 0, "reaction_count": 0})
    for pr in prs.values():
        group = group_of(pr["author"], lens)
        if spec.group_filter is not None and group != spec.group_filter:
            continue
        cell = totals[group]
        cell["pr_count"] += 1
        cell["comment_count"] += sum(
            1 for e, _ in pr["events"] if e.kind == "pr_comment"
        )
        cell["reaction_count"] += sum(e.reactions for e, _ in pr["events"])
    return dict(sorted(totals.items()))


def contributor_totals(snapshot, registry, lens, spec=None):
    """Distinct active contributors per group with percentage shares."""
    spec = spec or FilterSpec(lens=lens)
    seen = defaultdict(set)
    for event, identity in _human_events(snapshot, registry, spec):
        seen[group_of(identity, lens)].add(identity.identity_id)
    total = len(set().union(*seen.values())) if seen else 0
    result = {}
    for group in sorted(seen):
        if spec.group_filter is not None and group != spec.group_filter:
            continue
        count = len(seen[group])
        result[group] = {"count": count, "percentage": 100.0 * count / total}
    return result


def turnover_snapshot(snapshot, registry, spec: FilterSpec) -> TurnoverSnapshot:
    """Monthly newcomer/left/might-be-leaving/retention trends plus
    drill-down contributor lists at the final reference instant."""
    as_of = spec.end or snapshot.as_of
    newcomers = newcomers_by_month(snapshot, registry, spec)
    retention = retention_trend(snapshot, registry, spec)
    retention_by_month = dict(retention.buckets)

    first, last, counts = _first_last_events(snapshot, registry)
    months = []
    for month, newcomer_values in newcomers.buckets:
        boundary = month_start(next_month(month))
        states = turnover_states(snapshot, registry, min(boundary, as_of))
        by_group = defaultdict(lambda: {"newcomers": 0, "left": 0, "might_be_leaving": 0})
        for group, value in newcomer_values.items():
            by_group[group]["newcomers"] = value
        for identity in registry.humans():
            state = states.get(identity.identity_id)
            if state not in ("left", "might_be_leaving"):
                continue
            group = group_of(identity, spec.lens)
            if spec.group_filter is not None and group != spec.group_filter:
                continue
            by_group[group][state] += 1
        rates = retention_by_month.get(month, {})
        months.append(
            {
                "month": month,
                "groups": {
                    group: {**values, "retention_rate": rates.get(group)}
                    for group, values in sorted(by_group.items())
                },
            }
        )

    drill = {"newcomers": defaultdict(list), "left": defaultdict(list),
             "might_be_leaving": defaultdict(list), "active": defaultdict(list)}
    final_states = turnover_states(snapshot, registry, as_of)
    for identity in registry.humans():
        iid = identity.identity_id
        if iid not in first:
            continue
        group = group_of(identity, spec.lens)
        if spec.group_filter is not None and group != spec.group_filter:
            continue
        row = _contributor_row(identity, counts, last)
        if spec.contains(first[iid]):
            drill["newcomers"][group].append(row)
        state = final_states.get(iid)
        if state:
            drill[state][group].append(row)
    for groups in drill.values():
        for rows in groups.values():
            _sort_rows(rows)
    return TurnoverSnapshot(
        as_of=as_of,
        lens=spec.lens,
        months=months,
        drill_down={category: dict(groups) for category, groups in drill.items()},
    )
