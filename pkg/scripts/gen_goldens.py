#!/usr/bin/env python3
"""Regenerate the golden API responses for the standard fixture.

Run from the repo root after any intentional change to payload shapes:

    python3 scripts/gen_goldens.py

Writes tests/golden/manifest.json plus one .json body per endpoint query.
"""

import json
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "tests"))

from fastapi.testclient import TestClient

from commlens.api import ApiConfig, create_app
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
from fixture_gen import build_standard

QUERIES = {
    "health": "/v1/health",
    "turnover_gender": "/v1/metrics/turnover?lens=gender",
    "turnover_affiliation": "/v1/metrics/turnover?lens=affiliation",
    "retention_gender": "/v1/metrics/retention?lens=gender",
    "retention_none": "/v1/metrics/retention",
    "newcomers_none": "/v1/metrics/newcomers",
    "newcomers_window": "/v1/metrics/newcomers?from=2023-01-01&to=2023-12-31",
    "contributions_pr_count_affiliation": "/v1/metrics/contributions?kind=pr&measure=count&lens=affiliation",
    "contributions_pr_proportion_gender": "/v1/metrics/contributions?kind=pr&measure=proportion&lens=gender",
    "contributions_issue_count_gender": "/v1/metrics/contributions?kind=issue&measure=count&lens=gender",
    "contributions_qa_question_none": "/v1/metrics/contributions?kind=qa_question&measure=count",
    "time_to_merge_affiliation": "/v1/metrics/time-to-merge?lens=affiliation",
    "time_to_merge_gender": "/v1/metrics/time-to-merge?lens=gender",
    "first_attention_gender": "/v1/metrics/first-attention?lens=gender",
    "first_attention_affiliation": "/v1/metrics/first-attention?lens=affiliation",
    "pr_overview_affiliation": "/v1/metrics/pr-overview?lens=affiliation",
    "contributors_gender": "/v1/metrics/contributors?lens=gender",
    "contributors_affiliation": "/v1/metrics/contributors?lens=affiliation",
    "attention_prs": "/v1/attention/prs",
    "attention_prs_window": "/v1/attention/prs?from=2023-01-01&to=2023-06-30",
    "network_pr_affiliation": "/v1/network/pr?lens=affiliation",
    "network_pr_window": "/v1/network/pr?from=2023-01-01&to=2023-06-30&lens=affiliation",
}


def build_app(root):
    info = build_standard(root)
    config = CliConfig.load(info["config"])
    store = EventStore(config.store_path).initialize()
    store.append_events(
        list(fetch_source(SourceConfig(source_kind="fixture", locator=str(info["events"]))))
    )
    snapshot = store.load_snapshot()
    rules = IdentityRules.load(root / "identity_rules.json")
    registry = resolve_identities(snapshot, rules)
    detect_bots(registry, rules)
    assign_affiliations(registry, DomainRegistry.load(root / "domains.json"), snapshot)
    resolve_genders(
        registry,
        DictionaryClassifier.from_csv(root / "names.csv"),
        0.90,
        OverrideTable.from_csv(root / "overrides.csv"),
    )
    registry.save(config.registry_path)
    return create_app(
        ApiConfig(store_path=config.store_path, registry_path=config.registry_path)
    )


def main():
    golden_dir = REPO / "tests" / "golden"
    golden_dir.mkdir(exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        app = build_app(Path(tmp))
        client = TestClient(app)
        for name, query in sorted(QUERIES.items()):
            resp = client.get(query)
            resp.raise_for_status()
            (golden_dir / f"{name}.json").write_bytes(resp.content)
            print(f"{name}: {len(resp.content)} bytes")
        # one identity drill-down, using a stable pick: first node of the graph
        graph = json.loads((golden_dir / "network_pr_affiliation.json").read_text())
        identity_id = graph["nodes"][0]["id"]
        resp = client.get(f"/v1/identities/{identity_id}")
        resp.raise_for_status()
        (golden_dir / "identity_detail.json").write_bytes(resp.content)
        manifest = dict(sorted(QUERIES.items()))
        manifest["identity_detail"] = f"/v1/identities/{identity_id}"
        (golden_dir / "manifest.json").write_text(
            json.dumps(manifest, indent=2) + "\n", encoding="utf-8"
        )
        print(f"identity_detail: {identity_id}")


if __name__ == "__main__":
    main()
