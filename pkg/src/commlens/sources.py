"""Source connectors: fixture replays, local git history, Q&A exports, GitHub.

Every connector yields normalized ActivityEvents through fetch_source().
Malformed upstream records are skipped and reported through the on_error
callback; a bad record never aborts a stream. When `since` is given, only
events strictly newer than it are yielded.
"""

from __future__ import annotations

import json
import os
import subprocess
import time
from datetime import timezone

import requests

from .errors import AuthError, SchemaError, SourceUnavailable
from .events import ActivityEvent, RawProfile, SourceConfig, format_utc, parse_utc

RETRY_ATTEMPTS = 3
RETRY_BACKOFF_SECONDS = 1.0


def fetch_source(config: SourceConfig, since=None, on_error=None):
    """Yield normalized events from a configured source, newest last.

    on_error: optional callable invoked with each SchemaError (skip-and-report).
    """
    if on_error is None:
        on_error = lambda exc: None
    if config.source_kind == "fixture":
        raw_iter = _iter_fixture(config)
    elif config.source_kind == "qa_forum":
        raw_iter = _iter_qa_export(config)
    elif config.source_kind == "git":
        raw_iter = _iter_git_log(config, since)
    elif config.source_kind == "github":
        raw_iter = _iter_github(config, since)
    else:
        raise ValueError(f"unsupported source kind {config.source_kind!r}")

    events = []
    for record in raw_iter:
        try:
            if isinstance(record, ActivityEvent):
                event = record
            else:
                event = ActivityEvent.from_dict(record)
        except SchemaError as exc:
            on_error(exc)
            continue
        if since is not None and event.timestamp <= since:
            continue
        events.append(event)
    events.sort(key=ActivityEvent.sort_key)
    yield from events


# --- fixture ---------------------------------------------------------------


def _iter_fixture(config):
    try:
        with open(config.locator, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SourceUnavailable(f"cannot read fixture {config.locator}: {exc}") from exc
    if not isinstance(data, list):
        raise SourceUnavailable(f"fixture {config.locator} must be a JSON array")
    return iter(data)


# --- Q&A forum export ------------------------------------------------------


def _iter_qa_export(config):
    """Read a Q&A export: a JSON array of {type, id, author, created_at, ...}."""
    try:
        with open(config.locator, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SourceUnavailable(f"cannot read Q&A export {config.locator}: {exc}") from exc
    for item in data:
        try:
            kind = {"question": "qa_question", "answer": "qa_answer"}[item["type"]]
            yield {
                "event_id": f"qa_forum:{item['id']}:{kind}",
                "source_kind": "qa_forum",
                "kind": kind,
                "actor": {
                    "source_kind": "qa_forum",
                    "username": item["author"].get("username", ""),
                    "email": item["author"].get("email", ""),
                    "full_name": item["author"].get("full_name", ""),
                },
                "timestamp": item["created_at"],
                "repo_id": item.get("site", config.locator),
                "artifact_id": str(item["id"]),
                "artifact_url": item.get("url", ""),
            }
        except (KeyError, TypeError, AttributeError) as exc:
            yield _schema_error_record(exc)


def _schema_error_record(exc):
    # Returned as a marker dict that from_dict will reject with the cause.
    return {"__error__": str(exc)}


# --- local git history -----------------------------------------------------

_GIT_FORMAT = "%H%x1f%an%x1f%ae%x1f%cI"


def _iter_git_log(config, since):
    cmd = ["git", "-C", config.locator, "log", "--all", f"--format={_GIT_FORMAT}"]
    if since is not None:
        cmd.append(f"--since={format_utc(since)}")
    try:
        out = subprocess.run(cmd, capture_output=True, text=True, check=True)
    except (OSError, subprocess.CalledProcessError) as exc:
        raise SourceUnavailable(f"git log failed for {config.locator}: {exc}") from exc
    for line in out.stdout.splitlines():
        parts = line.split("\x1f")
        if len(parts) != 4:
            yield _schema_error_record(f"bad git log line: {line!r}")
            continue
        sha, name, email, iso = parts
        yield {
            "event_id": f"git:{sha}:commit",
            "source_kind": "git",
            "kind": "commit",
            "actor": {
                "source_kind": "git",
                "username": email.split("@")[0] if email else name,
                "email": email,
                "full_name": name,
            },
            "timestamp": format_utc(parse_utc(iso)),
            "repo_id": config.locator,
            "artifact_id": sha,
        }


# --- GitHub REST API -------------------------------------------------------


def _github_token(config):
    if not config.credentials_ref:
        return None
    token = os.environ.get(config.credentials_ref)
    if token is None:
        raise AuthError(
            f"environment variable {config.credentials_ref!r} is not set"
        )
    return token


def _github_get(session, url, params, attempts=RETRY_ATTEMPTS):
    last = None
    for i in range(attempts):
        try:
            resp = session.get(url, params=params, timeout=30)
        except requests.RequestException as exc:
            last = exc
            time.sleep(RETRY_BACKOFF_SECONDS * (2**i))
            continue
        if resp.status_code in (401, 403):
            raise AuthError(f"GitHub rejected credentials for {url}: {resp.status_code}")
        if resp.status_code >= 500:
            last = SourceUnavailable(f"GitHub {resp.status_code} for {url}")
            time.sleep(RETRY_BACKOFF_SECONDS * (2**i))
            continue
        resp.raise_for_status()
        return resp
    raise SourceUnavailable(f"GitHub unreachable after {attempts} attempts: {last}")


def _iter_github(config, since):
    """Fetch PRs, issues, and their comments for an owner/name repo."""
    repo = config.locator.removeprefix("https://github.com/").strip("/")
    session = requests.Session()
    session.headers["Accept"] = "application/vnd.github+json"
    token = _github_token(config)
    if token:
        session.headers["Authorization"] = f"Bearer {token}"
    base = f"https://api.github.com/repos/{repo}"

    params = {"state": "all", "per_page": 100, "sort": "updated", "direction": "desc"}
    if since is not None:
        params["since"] = format_utc(since)

    for issue in _paginate(session, f"{base}/issues", params):
        try:
            yield from _github_issue_events(repo, issue)
        except (KeyError, TypeError) as exc:
            yield _schema_error_record(exc)
    comment_params = {"per_page": 100}
    if since is not None:
        comment_params["since"] = format_utc(since)
    for path, kind in (
        ("issues/comments", "comment"),
        ("pulls/comments", "pr_review"),
    ):
        for comment in _paginate(session, f"{base}/{path}", comment_params):
            try:
                yield _github_comment_event(repo, comment, kind)
            except (KeyError, TypeError) as exc:
                yield _schema_error_record(exc)


def _paginate(session, url, params):
    page = 1
    while True:
        resp = _github_get(session, url, {**params, "page": page})
        items = resp.json()
        if not items:
            return
        yield from items
        if "next" not in resp.links:
            return
        page += 1


def _github_actor(repo, user):
    return {
        "source_kind": "github",
        "username": (user or {}).get("login", ""),
        "full_name": (user or {}).get("name", "") or "",
        "profile_url": (user or {}).get("html_url", "") or "",
    }


def _github_issue_events(repo, issue):
    number = str(issue["number"])
    is_pr = "pull_request" in issue
    prefix = "pr" if is_pr else "issue"
    base = {
        "source_kind": "github",
        "actor": _github_actor(repo, issue.get("user")),
        "repo_id": repo,
        "artifact_id": number,
        "artifact_url": issue.get("html_url", ""),
        "reactions": (issue.get("reactions") or {}).get("total_count", 0),
    }
    yield {
        **base,
        "event_id": f"github:{repo}:{prefix}:{number}:opened",
        "kind": f"{prefix}_opened",
        "timestamp": issue["created_at"],
    }
    if is_pr and (issue.get("pull_request") or {}).get("merged_at"):
        yield {
            **base,
            "event_id": f"github:{repo}:pr:{number}:merged",
            "kind": "pr_merged",
            "timestamp": issue["pull_request"]["merged_at"],
        }
    elif issue.get("closed_at"):
        yield {
            **base,
            "event_id": f"github:{repo}:{prefix}:{number}:closed",
            "kind": f"{prefix}_closed",
            "timestamp": issue["closed_at"],
        }


def _github_comment_event(repo, comment, kind):
    url = comment.get("html_url", "")
    # issue comment URLs distinguish /pull/ from /issues/
    if kind == "pr_review":
        event_kind = "pr_review"
        artifact = comment.get("pull_request_url", "").rsplit("/", 1)[-1]
    else:
        event_kind = "pr_comment" if "/pull/" in url else "issue_comment"
        artifact = comment.get("issue_url", "").rsplit("/", 1)[-1]
    return {
        "event_id": f"github:{repo}:comment:{comment['id']}",
        "source_kind": "github",
        "kind": event_kind,
        "actor": _github_actor(repo, comment.get("user")),
        "timestamp": comment["created_at"],
        "repo_id": repo,
        "artifact_id": artifact,
        "artifact_url": url,
        "reactions": (comment.get("reactions") or {}).get("total_count", 0),
    }
