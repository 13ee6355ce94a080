import pytest

from commlens import metrics
from commlens.events import EventSnapshot, parse_utc
from commlens.identity import DomainRegistry
from commlens.metrics import FilterSpec
from helpers import enriched_registry, ev, profile
from oracles import (
    oracle_contributor_counts,
    oracle_kind_counts,
    oracle_merge_times,
    oracle_newcomer_counts,
    oracle_retention,
    oracle_turnover_states,
    shift_months,
)


def snap(events):
    return EventSnapshot.build(events)


def series_as_sparse(series):
    """Drop zero-filled entries so series compare against sparse oracles."""
    out = {}
    for month, values in series.buckets:
        nonzero = {g: v for g, v in values.items() if v}
        if nonzero:
            out[month] = nonzero
    return out


# --- newcomers -------------------------------------------------------------


def test_newcomers_basic_counts():
    events = [
        ev("commit", profile("a"), "2023-01-05T00:00:00Z"),
        ev("commit", profile("b"), "2023-01-20T00:00:00Z"),
        ev("commit", profile("c"), "2023-03-02T00:00:00Z"),
        ev("commit", profile("a"), "2023-03-09T00:00:00Z"),  # repeat, not a newcomer
    ]
    snapshot = snap(events)
    registry = enriched_registry(snapshot)
    series = metrics.newcomers_by_month(snapshot, registry, FilterSpec())
    assert [(m, v["all"]) for m, v in series.buckets] == [
        ("2023-01", 2), ("2023-02", 0), ("2023-03", 1)
    ]


def test_newcomers_empty_snapshot():
    snapshot = snap([])
    registry = enriched_registry(snapshot)
    series = metrics.newcomers_by_month(snapshot, registry, FilterSpec())
    assert series.buckets == []


def test_newcomers_lens_partition():
    events = [
        ev("commit", profile("a", full_name="Alice Ann"), "2023-01-05T00:00:00Z"),
        ev("commit", profile("b", full_name="Bob Berg"), "2023-01-10T00:00:00Z"),
    ]
    snapshot = snap(events)
    registry = enriched_registry(snapshot)
    by_name = {i.display_name: i for i in registry}
    by_name["Alice Ann"].gender.gender = "woman"
    by_name["Bob Berg"].gender.gender = "man"
    series = metrics.newcomers_by_month(snapshot, registry, FilterSpec(lens="gender"))
    assert series.buckets[0][1] == {"woman": 1, "man": 1}


def test_newcomers_match_oracle_on_standard(standard):
    for lens in ("none", "gender", "affiliation"):
        series = metrics.newcomers_by_month(
            standard["snapshot"], standard["registry"], FilterSpec(lens=lens)
        )
        expected = oracle_newcomer_counts(standard["snapshot"], standard["registry"], lens)
        assert series_as_sparse(series) == expected


def test_newcomer_conservation(standard):
    series = metrics.newcomers_by_month(
        standard["snapshot"], standard["registry"], FilterSpec()
    )
    active = {
        standard["registry"].identity_for(e.actor).identity_id
        for e in standard["snapshot"]
        if not standard["registry"].identity_for(e.actor).is_bot
    }
    assert series.total() == len(active)


# --- turnover states -------------------------------------------------------


def turnover_fixture(as_of):
    return [
        # last active 7 months before as_of: left
        ev("commit", profile("gone"), "2023-05-10T00:00:00Z"),
        # last active 4 months before: might be leaving
        ev("commit", profile("fading"), "2023-08-10T00:00:00Z"),
        # active yesterday
        ev("commit", profile("here"), "2023-12-09T00:00:00Z"),
    ]


def test_turnover_band_classification():
    as_of = parse_utc("2023-12-10T00:00:00Z")
    snapshot = snap(turnover_fixture(as_of))
    registry = enriched_registry(snapshot)
    result = metrics.departures(snapshot, registry, as_of)
    left = [r.display_name for rows in result["left"].values() for r in rows]
    fading = [
        r.display_name for rows in result["might_be_leaving"].values() for r in rows
    ]
    assert left == ["gone"]
    assert fading == ["fading"]


def test_turnover_boundaries_exact():
    as_of = parse_utc("2023-12-15T12:00:00Z")
    events = [
        # exactly 6 months before: left (inclusive)
        ev("commit", profile("sixmo"), "2023-06-15T12:00:00Z"),
        # one second inside the 6 month window: might be leaving
        ev("commit", profile("justin"), "2023-06-15T12:00:01Z"),
        # exactly 3 months before: might be leaving (inclusive)
        ev("commit", profile("threemo"), "2023-09-15T12:00:00Z"),
        # one second later: active
        ev("commit", profile("fresh"), "2023-09-15T12:00:01Z"),
    ]
    snapshot = snap(events)
    registry = enriched_registry(snapshot)
    states = metrics.turnover_states(snapshot, registry, as_of)
    by_name = {
        i.display_name: states[i.identity_id] for i in registry.humans()
    }
    assert by_name == {
        "sixmo": "left",
        "justin": "might_be_leaving",
        "threemo": "might_be_leaving",
        "fresh": "active",
    }


def test_turnover_states_match_oracle(standard):
    for as_of_str in ("2024-01-01T00:00:00Z", "2023-06-30T23:59:59Z", "2022-12-01T00:00:00Z"):
        as_of = parse_utc(as_of_str)
        got = metrics.turnover_states(standard["snapshot"], standard["registry"], as_of)
        assert got == oracle_turnover_states(
            standard["snapshot"], standard["registry"], as_of
        )


def test_turnover_states_partition(standard):
    as_of = standard["snapshot"].as_of
    states = metrics.turnover_states(standard["snapshot"], standard["registry"], as_of)
    humans_with_events = {
        standard["registry"].identity_for(e.actor).identity_id
        for e in standard["snapshot"]
        if not standard["registry"].identity_for(e.actor).is_bot
    }
    assert set(states) == humans_with_events
    assert set(states.values()) <= {"active", "might_be_leaving", "left"}


# --- retention -------------------------------------------------------------


def test_retention_cohort_fraction():
    events = [
        ev("commit", profile("r1"), "2023-01-05T00:00:00Z"),
        ev("commit", profile("r2"), "2023-01-06T00:00:00Z"),
        ev("commit", profile("r3"), "2023-01-07T00:00:00Z"),
        ev("commit", profile("r4"), "2023-01-08T00:00:00Z"),
        # three of the four return in later months
        ev("commit", profile("r1"), "2023-02-01T00:00:00Z"),
        ev("commit", profile("r2"), "2023-03-01T00:00:00Z"),
        ev("commit", profile("r3"), "2023-05-01T00:00:00Z"),
    ]
    snapshot = snap(events)
    registry = enriched_registry(snapshot)
    series = metrics.retention_trend(snapshot, registry, FilterSpec())
    assert dict(series.buckets)["2023-01"]["all"] == pytest.approx(0.75)


def test_retention_same_month_repeat_does_not_count():
    events = [
        ev("commit", profile("s1"), "2023-01-05T00:00:00Z"),
        ev("commit", profile("s1"), "2023-01-25T00:00:00Z"),
    ]
    snapshot = snap(events)
    registry = enriched_registry(snapshot)
    series = metrics.retention_trend(snapshot, registry, FilterSpec())
    assert dict(series.buckets)["2023-01"]["all"] == 0.0


def test_retention_empty_cohort_omitted():
    events = [
        ev("commit", profile("t1"), "2023-01-05T00:00:00Z"),
        ev("commit", profile("t2"), "2023-03-05T00:00:00Z"),
    ]
    snapshot = snap(events)
    registry = enriched_registry(snapshot)
    months = [m for m, _ in metrics.retention_trend(snapshot, registry, FilterSpec()).buckets]
    assert "2023-02" not in months


def test_retention_matches_oracle(standard):
    for lens in ("none", "gender", "affiliation"):
        series = metrics.retention_trend(
            standard["snapshot"], standard["registry"], FilterSpec(lens=lens)
        )
        got = {m: v for m, v in series.buckets}
        expected = oracle_retention(standard["snapshot"], standard["registry"], lens)
        expected = {m: g for m, g in expected.items() if g}
        assert got.keys() == expected.keys()
        for month in got:
            for group, rate in expected[month].items():
                assert got[month][group] == pytest.approx(rate, abs=1e-12)


# --- contribution series ---------------------------------------------------


def test_contribution_proportions():
    acme = DomainRegistry(corporate={"a.com": "A", "b.com": "B"})
    events = [
        ev("pr_opened", profile("a1", email="a1@a.com"), "2023-01-03T00:00:00Z", artifact="p1"),
        ev("pr_opened", profile("a2", email="a2@a.com"), "2023-01-04T00:00:00Z", artifact="p2"),
        ev("pr_opened", profile("a3", email="a3@a.com"), "2023-01-05T00:00:00Z", artifact="p3"),
        ev("pr_opened", profile("b1", email="b1@b.com"), "2023-01-06T00:00:00Z", artifact="p4"),
    ]
    snapshot = snap(events)
    registry = enriched_registry(snapshot, domains=acme)
    spec = FilterSpec(lens="affiliation")
    prop = metrics.contribution_series(snapshot, registry, "pr", "proportion", spec)
    assert prop.buckets[0][1] == {"A": pytest.approx(0.75), "B": pytest.approx(0.25)}
    count = metrics.contribution_series(snapshot, registry, "pr", "count", spec)
    assert count.buckets[0][1] == {"A": 3, "B": 1}


def test_contribution_series_empty_kind(standard):
    # fixture has Q&A events; a window before the project starts is empty
    spec = FilterSpec(
        start=parse_utc("2010-01-01T00:00:00Z"), end=parse_utc("2010-12-31T00:00:00Z")
    )
    series = metrics.contribution_series(
        standard["snapshot"], standard["registry"], "qa_answer", "count", spec
    )
    assert series.buckets == []


def test_contribution_counts_match_oracle(standard):
    for kind, event_kind in metrics.CONTRIBUTION_KINDS.items():
        for lens in ("none", "affiliation"):
            series = metrics.contribution_series(
                standard["snapshot"], standard["registry"], kind, "count",
                FilterSpec(lens=lens),
            )
            expected = oracle_kind_counts(
                standard["snapshot"], standard["registry"], event_kind, lens
            )
            assert series_as_sparse(series) == expected


def test_proportions_sum_to_one(standard):
    for lens in ("gender", "affiliation"):
        series = metrics.contribution_series(
            standard["snapshot"], standard["registry"], "pr", "proportion",
            FilterSpec(lens=lens),
        )
        for _, values in series.buckets:
            if values:
                assert sum(values.values()) == pytest.approx(1.0, abs=1e-9)


def test_lens_sums_equal_none_totals(standard):
    spec_none = FilterSpec()
    base = metrics.contribution_series(
        standard["snapshot"], standard["registry"], "pr", "count", spec_none
    )
    for lens in ("gender", "affiliation"):
        series = metrics.contribution_series(
            standard["snapshot"], standard["registry"], "pr", "count",
            FilterSpec(lens=lens),
        )
        got = {m: sum(v.values()) for m, v in series.buckets}
        expected = {m: sum(v.values()) for m, v in base.buckets}
        assert got == expected


def test_filter_coherence_narrowing_never_increases(standard):
    wide = metrics.contribution_series(
        standard["snapshot"], standard["registry"], "pr", "count", FilterSpec()
    )
    narrow = metrics.contribution_series(
        standard["snapshot"], standard["registry"], "pr", "count",
        FilterSpec(start=parse_utc("2022-06-01T00:00:00Z"),
                   end=parse_utc("2023-05-31T23:59:59Z")),
    )
    wide_by_month = dict(wide.buckets)
    for month, values in narrow.buckets:
        assert sum(values.values()) <= sum(wide_by_month[month].values())


# --- time to merge ---------------------------------------------------------


def test_time_to_merge_mean_and_order():
    domains = DomainRegistry(corporate={"a.com": "A", "b.com": "B"})
    events = [
        ev("pr_opened", profile("a1", email="a1@a.com"), "2023-01-01T00:00:00Z", artifact="p1"),
        ev("pr_merged", profile("m", email="m@b.com"), "2023-01-03T00:00:00Z", artifact="p1"),
        ev("pr_opened", profile("a1", email="a1@a.com"), "2023-01-05T00:00:00Z", artifact="p2"),
        ev("pr_merged", profile("m", email="m@b.com"), "2023-01-09T00:00:00Z", artifact="p2"),
        ev("pr_opened", profile("b1", email="b1@b.com"), "2023-01-02T00:00:00Z", artifact="p3"),
        ev("pr_merged", profile("m", email="m@b.com"), "2023-01-07T12:00:00Z", artifact="p3"),
    ]
    snapshot = snap(events)
    registry = enriched_registry(snapshot, domains=domains)
    ranking = metrics.time_to_merge(snapshot, registry, "affiliation")
    assert ranking[0][0] == "B"
    assert ranking[0][1] == pytest.approx(5.5)
    by_group = dict(ranking)
    assert by_group["A"] == pytest.approx(3.0)
    # descending order
    assert [g for g, _ in ranking] == ["B", "A"]


def test_merge_same_instant_is_zero_days():
    events = [
        ev("pr_opened", profile("z"), "2023-01-01T00:00:00Z", artifact="p1"),
        ev("pr_merged", profile("z"), "2023-01-01T00:00:00Z", artifact="p1"),
    ]
    snapshot = snap(events)
    registry = enriched_registry(snapshot)
    ranking = metrics.time_to_merge(snapshot, registry, "affiliation")
    assert ranking == [("Unknown", 0.0)]


def test_time_to_merge_matches_oracle(standard):
    for lens in ("gender", "affiliation"):
        ranking = dict(
            metrics.time_to_merge(standard["snapshot"], standard["registry"], lens)
        )
        expected = oracle_merge_times(standard["snapshot"], standard["registry"], lens)
        assert ranking.keys() == expected.keys()
        for group, values in expected.items():
            assert ranking[group] == pytest.approx(sum(values) / len(values))


# --- time to first attention -----------------------------------------------


def test_first_attention_basic():
    events = [
        ev("issue_opened", profile("op"), "2023-01-01T00:00:00Z", artifact="i1"),
        ev("issue_comment", profile("other"), "2023-01-03T00:00:00Z", artifact="i1"),
    ]
    snapshot = snap(events)
    registry = enriched_registry(snapshot)
    ranking, never = metrics.time_to_first_attention(snapshot, registry, "affiliation")
    assert ranking == [("Unknown", pytest.approx(2.0))]
    assert never == {}


def test_first_attention_self_comment_excluded():
    events = [
        ev("issue_opened", profile("op"), "2023-01-01T00:00:00Z", artifact="i1"),
        ev("issue_comment", profile("op"), "2023-01-02T00:00:00Z", artifact="i1"),
    ]
    snapshot = snap(events)
    registry = enriched_registry(snapshot)
    ranking, never = metrics.time_to_first_attention(snapshot, registry, "affiliation")
    assert ranking == []
    assert never == {"Unknown": 1}


def test_first_attention_no_issues():
    snapshot = snap([ev("commit", profile("a"), "2023-01-01T00:00:00Z")])
    registry = enriched_registry(snapshot)
    ranking, never = metrics.time_to_first_attention(snapshot, registry, "gender")
    assert ranking == []
    assert never == {}


# --- PRs needing attention -------------------------------------------------


def attention_fixture():
    rules_bot = profile("dependabot[bot]")
    return [
        # only a bot comment: included
        ev("pr_opened", profile("a"), "2023-01-01T00:00:00Z", artifact="p1"),
        ev("pr_comment", rules_bot, "2023-01-02T00:00:00Z", artifact="p1"),
        # only the author's own comment: included
        ev("pr_opened", profile("b"), "2023-01-03T00:00:00Z", artifact="p2"),
        ev("pr_comment", profile("b"), "2023-01-04T00:00:00Z", artifact="p2"),
        # one human comment from another: excluded
        ev("pr_opened", profile("c"), "2023-01-05T00:00:00Z", artifact="p3"),
        ev("pr_comment", profile("d"), "2023-01-06T00:00:00Z", artifact="p3"),
        # closed without merge: excluded even though uncommented
        ev("pr_opened", profile("e"), "2023-01-07T00:00:00Z", artifact="p4"),
        ev("pr_closed", profile("e"), "2023-01-08T00:00:00Z", artifact="p4"),
    ]


def test_prs_needing_attention_rules():
    snapshot = snap(attention_fixture())
    registry = enriched_registry(snapshot)
    rows = metrics.prs_needing_attention(snapshot, registry, FilterSpec())
    assert [r.artifact_id for r in rows] == ["p1", "p2"]
    # oldest (largest age) first
    assert rows[0].age_days >= rows[1].age_days


def test_pr_overview_totals():
    domains = DomainRegistry(corporate={"a.com": "A"})
    events = [
        ev("pr_opened", profile("a1", email="a1@a.com"), "2023-01-01T00:00:00Z",
           artifact="p1", reactions=2),
        ev("pr_comment", profile("x"), "2023-01-02T00:00:00Z", artifact="p1"),
        ev("pr_comment", profile("y"), "2023-01-03T00:00:00Z", artifact="p1"),
        ev("pr_opened", profile("a1", email="a1@a.com"), "2023-01-04T00:00:00Z",
           artifact="p2", reactions=3),
        ev("pr_comment", profile("x"), "2023-01-05T00:00:00Z", artifact="p2"),
    ]
    snapshot = snap(events)
    registry = enriched_registry(snapshot, domains=domains)
    totals = metrics.pr_overview(snapshot, registry, "affiliation")
    assert totals["A"] == {"pr_count": 2, "comment_count": 3, "reaction_count": 5}


def test_pr_overview_empty_window(standard):
    spec = FilterSpec(
        start=parse_utc("2010-01-01T00:00:00Z"), end=parse_utc("2010-02-01T00:00:00Z")
    )
    assert metrics.pr_overview(
        standard["snapshot"], standard["registry"], "gender", spec
    ) == {}


def test_pr_overview_unknown_gender_bucket():
    events = [
        ev("pr_opened", profile("nameless"), "2023-01-01T00:00:00Z", artifact="p1"),
    ]
    snapshot = snap(events)
    registry = enriched_registry(snapshot)
    totals = metrics.pr_overview(snapshot, registry, "gender")
    assert "unknown" in totals


# --- contributor totals ----------------------------------------------------


def test_contributor_totals_percentages():
    domains = DomainRegistry(corporate={"a.com": "A", "b.com": "B"})
    events = [
        ev("commit", profile(f"a{i}", email=f"a{i}@a.com"), f"2023-01-{i + 1:02d}T00:00:00Z")
        for i in range(7)
    ] + [
        ev("commit", profile(f"b{i}", email=f"b{i}@b.com"), f"2023-02-{i + 1:02d}T00:00:00Z")
        for i in range(3)
    ]
    snapshot = snap(events)
    registry = enriched_registry(snapshot, domains=domains)
    totals = metrics.contributor_totals(snapshot, registry, "affiliation")
    assert totals["A"] == {"count": 7, "percentage": pytest.approx(70.0)}
    assert totals["B"] == {"count": 3, "percentage": pytest.approx(30.0)}


def test_contributor_totals_minority_share():
    events = [
        ev("commit", profile(f"m{i}", full_name=f"Man {i}"), f"2023-01-{i + 1:02d}T00:00:00Z")
        for i in range(14)
    ] + [ev("commit", profile("w", full_name="Woman One"), "2023-01-20T00:00:00Z")]
    snapshot = snap(events)
    registry = enriched_registry(snapshot)
    for identity in registry:
        identity.gender.gender = (
            "woman" if identity.display_name.startswith("Woman") else "man"
        )
    totals = metrics.contributor_totals(snapshot, registry, "gender")
    assert totals["woman"]["count"] == 1
    assert totals["woman"]["percentage"] == pytest.approx(100.0 / 15)
    assert sum(c["percentage"] for c in totals.values()) == pytest.approx(100.0, abs=1e-7)


def test_contributor_totals_match_oracle(standard):
    for lens in ("none", "gender", "affiliation"):
        totals = metrics.contributor_totals(
            standard["snapshot"], standard["registry"], lens
        )
        expected = oracle_contributor_counts(
            standard["snapshot"], standard["registry"], lens
        )
        assert {g: c["count"] for g, c in totals.items()} == expected
        assert sum(c["percentage"] for c in totals.values()) == pytest.approx(
            100.0, abs=1e-7
        )


# --- composite turnover snapshot -------------------------------------------


def test_turnover_snapshot_counts_equal_drilldown_lengths(standard):
    result = metrics.turnover_snapshot(
        standard["snapshot"], standard["registry"], FilterSpec(lens="gender")
    )
    states = metrics.turnover_states(
        standard["snapshot"], standard["registry"], standard["snapshot"].as_of
    )
    for category in ("left", "might_be_leaving"):
        rows = sum(len(r) for r in result.drill_down[category].values())
        assert rows == sum(1 for s in states.values() if s == category)


def test_filter_spec_validation():
    with pytest.raises(ValueError):
        FilterSpec(start=parse_utc("2023-02-01T00:00:00Z"), end=parse_utc("2023-01-01T00:00:00Z"))
    with pytest.raises(ValueError):
        FilterSpec(lens="age")


def test_months_before_clamps_day():
    assert metrics.months_before(parse_utc("2023-03-31T00:00:00Z"), 1) == parse_utc(
        "2023-02-28T00:00:00Z"
    )
    assert shift_months(parse_utc("2023-03-31T00:00:00Z"), 1) == parse_utc(
        "2023-02-28T00:00:00Z"
    )
