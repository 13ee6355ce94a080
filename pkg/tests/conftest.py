import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fixture_gen import build_standard

from commlens.config import CliConfig
from commlens.events import SourceConfig
from commlens.gender import DictionaryClassifier, OverrideTable, resolve_genders
from commlens.identity import (
    DomainRegistry,
    IdentityRules,
    assign_affiliations,
    detect_bots,
    resolve_identities,
)
from commlens.sources import fetch_source
from commlens.store import EventStore


@pytest.fixture(scope="session")
def standard_paths(tmp_path_factory):
    root = tmp_path_factory.mktemp("standard")
    info = build_standard(root)
    return info


@pytest.fixture(scope="session")
def standard(standard_paths):
    """Fully ingested + enriched standard fixture."""
    root = standard_paths["root"]
    config = CliConfig.load(root / "commlens.json")
    store = EventStore(config.store_path).initialize()
    events = list(
        fetch_source(SourceConfig(source_kind="fixture", locator=str(root / "events.json")))
    )
    store.append_events(events)
    snapshot = store.load_snapshot()

    rules = IdentityRules.load(root / "identity_rules.json")
    registry = resolve_identities(snapshot, rules)
    detect_bots(registry, rules)
    assign_affiliations(registry, DomainRegistry.load(root / "domains.json"), snapshot)
    classifier = DictionaryClassifier.from_csv(root / "names.csv")
    overrides = OverrideTable.from_csv(root / "overrides.csv")
    resolve_genders(registry, classifier, 0.90, overrides)
    registry.save(config.registry_path)

    return {
        "root": root,
        "config": config,
        "store": store,
        "snapshot": snapshot,
        "registry": registry,
        "people": standard_paths["people"],
    }
