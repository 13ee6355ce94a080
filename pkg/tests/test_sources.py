import json

import pytest

from commlens.errors import AuthError, SchemaError, SourceUnavailable
from commlens.events import SourceConfig, parse_utc
from commlens.sources import fetch_source
from helpers import ev, profile


def write_fixture(path, events):
    path.write_text(json.dumps([e.to_dict() for e in events]), encoding="utf-8")


def five_pr_events():
    alice = profile("alice")
    return [
        ev("pr_opened", alice, f"2023-02-0{d}T10:00:00Z", artifact=f"pr-{d}",
           event_id=f"p{d}")
        for d in range(1, 6)
    ]


def test_fixture_roundtrip_in_order(tmp_path):
    path = tmp_path / "events.json"
    write_fixture(path, five_pr_events())
    config = SourceConfig(source_kind="fixture", locator=str(path))
    got = list(fetch_source(config))
    assert len(got) == 5
    assert [e.event_id for e in got] == [f"p{d}" for d in range(1, 6)]
    assert got == sorted(got, key=lambda e: e.timestamp)


def test_since_filters_strictly(tmp_path):
    path = tmp_path / "events.json"
    events = five_pr_events()
    write_fixture(path, events)
    config = SourceConfig(source_kind="fixture", locator=str(path))
    latest = max(e.timestamp for e in events)
    assert list(fetch_source(config, since=latest)) == []
    cutoff = parse_utc("2023-02-03T10:00:00Z")
    newer = list(fetch_source(config, since=cutoff))
    assert all(e.timestamp > cutoff for e in newer)
    assert len(newer) == 2


def test_malformed_record_skipped_and_reported(tmp_path):
    path = tmp_path / "events.json"
    records = [e.to_dict() for e in five_pr_events()]
    records += [e.to_dict() for e in [
        ev("commit", profile("bob"), f"2023-02-1{d}T10:00:00Z", event_id=f"c{d}")
        for d in range(4)
    ]]
    records.insert(3, {"event_id": "bad", "kind": "nonsense"})
    path.write_text(json.dumps(records), encoding="utf-8")
    config = SourceConfig(source_kind="fixture", locator=str(path))
    reported = []
    got = list(fetch_source(config, on_error=reported.append))
    assert len(got) == 9
    assert len(reported) == 1
    assert isinstance(reported[0], SchemaError)


def test_missing_fixture_file_raises(tmp_path):
    config = SourceConfig(source_kind="fixture", locator=str(tmp_path / "nope.json"))
    with pytest.raises(SourceUnavailable):
        list(fetch_source(config))


def test_qa_export(tmp_path):
    path = tmp_path / "qa.json"
    path.write_text(json.dumps([
        {"type": "question", "id": 11, "author": {"username": "carol"},
         "created_at": "2023-03-01T00:00:00Z"},
        {"type": "answer", "id": 12, "author": {"username": "dave"},
         "created_at": "2023-03-02T00:00:00Z"},
        {"type": "answer", "id": 13},  # malformed: no author/timestamp
    ]), encoding="utf-8")
    config = SourceConfig(source_kind="qa_forum", locator=str(path))
    reported = []
    got = list(fetch_source(config, on_error=reported.append))
    assert [e.kind for e in got] == ["qa_question", "qa_answer"]
    assert got[0].actor.username == "carol"
    assert len(reported) == 1


def test_github_missing_token_env(monkeypatch):
    monkeypatch.delenv("MISSING_TOKEN_VAR", raising=False)
    config = SourceConfig(
        source_kind="github", locator="owner/repo", credentials_ref="MISSING_TOKEN_VAR"
    )
    with pytest.raises(AuthError):
        list(fetch_source(config))


def test_git_source(tmp_path):
    import subprocess

    repo = tmp_path / "repo"
    repo.mkdir()
    env = {"GIT_AUTHOR_NAME": "Alice Smith", "GIT_AUTHOR_EMAIL": "alice@example.com",
           "GIT_COMMITTER_NAME": "Alice Smith", "GIT_COMMITTER_EMAIL": "alice@example.com",
           "GIT_COMMITTER_DATE": "2023-04-01T00:00:00Z", "PATH": "/usr/bin:/bin:/usr/local/bin",
           "HOME": str(tmp_path)}
    subprocess.run(["git", "init", "-q"], cwd=repo, check=True, env=env)
    (repo / "f.txt").write_text("x")
    subprocess.run(["git", "add", "f.txt"], cwd=repo, check=True, env=env)
    subprocess.run(["git", "commit", "-q", "-m", "initial"], cwd=repo, check=True, env=env)
    config = SourceConfig(source_kind="git", locator=str(repo))
    got = list(fetch_source(config))
    assert len(got) == 1
    assert got[0].kind == "commit"
    assert got[0].actor.email == "alice@example.com"
    assert got[0].actor.full_name == "Alice Smith"


def test_source_config_validation():
    with pytest.raises(ValueError):
        SourceConfig(source_kind="fixture", locator="")
    with pytest.raises(ValueError):
        SourceConfig(source_kind="fixture", locator="x", poll_interval_seconds=0)
