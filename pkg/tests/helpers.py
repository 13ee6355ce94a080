"""Small builders for hand-rolled test events."""

from __future__ import annotations

from commlens.events import ActivityEvent, RawProfile, parse_utc
from commlens.gender import DictionaryClassifier
from commlens.identity import (
    DomainRegistry,
    IdentityRules,
    assign_affiliations,
    detect_bots,
    resolve_identities,
)

_counter = [0]


def profile(username, source="github", email="", full_name=""):
    return RawProfile(
        source_kind=source, username=username, email=email, full_name=full_name
    )


def ev(kind, actor, ts, artifact="a1", repo="r", event_id=None, reactions=0, url=""):
    if event_id is None:
        _counter[0] += 1
        event_id = f"t-{_counter[0]:04d}"
    return ActivityEvent(
        event_id=event_id,
        source_kind="fixture",
        kind=kind,
        actor=actor,
        timestamp=parse_utc(ts),
        repo_id=repo,
        artifact_id=artifact,
        artifact_url=url,
        reactions=reactions,
    )


def enriched_registry(snapshot, rules=None, domains=None):
    rules = rules or IdentityRules()
    registry = resolve_identities(snapshot, rules)
    detect_bots(registry, rules)
    assign_affiliations(registry, domains or DomainRegistry(), snapshot)
    return registry


def classifier_from_rows(rows):
    return DictionaryClassifier(rows)
