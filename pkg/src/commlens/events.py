"""Normalized activity events and snapshots.

Every connector emits the same flat ActivityEvent record, one per
contribution or interaction, so the rest of the pipeline never sees
source-specific payloads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone

SOURCE_KINDS = ("github", "git", "qa_forum", "fixture")

EVENT_KINDS = (
    "pr_opened",
    "pr_merged",
    "pr_closed",
    "pr_comment",
    "pr_review",
    "issue_opened",
    "issue_comment",
    "issue_closed",
    "commit",
    "qa_question",
    "qa_answer",
)


def parse_utc(value: str) -> datetime:
    """Parse an RFC 3339 timestamp into an aware UTC datetime."""
    if value.endswith("Z"):
        value = value[:-1] + "+00:00"
    dt = datetime.fromisoformat(value)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def format_utc(dt: datetime) -> str:
    """Render an aware datetime as RFC 3339 UTC with a Z suffix."""
    dt = dt.astimezone(timezone.utc)
    return dt.strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass(frozen=True)
class RawProfile:
    source_kind: str
    username: str = ""
    email: str = ""
    full_name: str = ""
    profile_url: str = ""

    def __post_init__(self):
        if not self.username and not self.email:
            raise ValueError("RawProfile needs at least one of username/email")

    @property
    def key(self) -> str:
        """Stable per-platform profile key."""
        handle = self.username or self.email
        return f"{self.source_kind}:{handle.lower()}"

    def to_dict(self) -> dict:
        return {
            "source_kind": self.source_kind,
            "username": self.username,
            "email": self.email,
            "full_name": self.full_name,
            "profile_url": self.profile_url,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RawProfile":
        return cls(
            source_kind=data["source_kind"],
            username=data.get("username", "") or "",
            email=data.get("email", "") or "",
            full_name=data.get("full_name", "") or "",
            profile_url=data.get("profile_url", "") or "",
        )


@dataclass(frozen=True)
class ActivityEvent:
    event_id: str
    source_kind: str
    kind: str
    actor: RawProfile
    timestamp: datetime
    repo_id: str
    artifact_id: str
    artifact_url: str = ""
    reactions: int = 0

    def __post_init__(self):
        if self.kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind: {self.kind!r}")
        if self.source_kind not in SOURCE_KINDS:
            raise ValueError(f"unknown source kind: {self.source_kind!r}")
        if self.timestamp.tzinfo is None:
            raise ValueError("timestamp must be timezone-aware UTC")
        if self.reactions < 0:
            raise ValueError("reactions must be non-negative")

    def to_dict(self) -> dict:
        return {
            "event_id": self.event_id,
            "source_kind": self.source_kind,
            "kind": self.kind,
            "actor": self.actor.to_dict(),
            "timestamp": format_utc(self.timestamp),
            "repo_id": self.repo_id,
            "artifact_id": self.artifact_id,
            "artifact_url": self.artifact_url,
            "reactions": self.reactions,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ActivityEvent":
        try:
            return cls(
                event_id=data["event_id"],
                source_kind=data["source_kind"],
                kind=data["kind"],
                actor=RawProfile.from_dict(data["actor"]),
                timestamp=parse_utc(data["timestamp"]),
                repo_id=data.get("repo_id", ""),
                artifact_id=data.get("artifact_id", ""),
                artifact_url=data.get("artifact_url", "") or "",
                reactions=int(data.get("reactions") or 0),
            )
        except (KeyError, TypeError, ValueError) as exc:
            from .errors import SchemaError

            raise SchemaError(f"bad event record: {exc}") from exc

    def sort_key(self):
        return (self.timestamp, self.event_id)


@dataclass(frozen=True)
class EventSnapshot:
    """Immutable, timestamp-ordered view of the store at a cutoff."""

    events: tuple[ActivityEvent, ...]
    as_of: datetime

    @classmethod
    def build(cls, events, as_of=None) -> "EventSnapshot":
        ordered = tuple(sorted(events, key=ActivityEvent.sort_key))
        if as_of is None:
            if ordered:
                as_of = ordered[-1].timestamp
            else:
                as_of = datetime.fromtimestamp(0, tz=timezone.utc)
        else:
            ordered = tuple(e for e in ordered if e.timestamp <= as_of)
        return cls(events=ordered, as_of=as_of)

    def __len__(self):
        return len(self.events)

    def __iter__(self):
        return iter(self.events)


@dataclass
class SourceConfig:
    source_kind: str
    locator: str
    credentials_ref: str = ""
    poll_interval_seconds: int = 24 * 3600
    name: str = ""

    def __post_init__(self):
        if self.source_kind not in SOURCE_KINDS:
            raise ValueError(f"unknown source kind: {self.source_kind!r}")
        if not self.locator:
            raise ValueError("locator must be non-empty")
        if self.poll_interval_seconds <= 0:
            raise ValueError("poll_interval must be positive")
        if not self.name:
            self.name = f"{self.source_kind}:{self.locator}"

    @classmethod
    def from_dict(cls, data: dict) -> "SourceConfig":
        return cls(
            source_kind=data["source_kind"],
            locator=data["locator"],
            credentials_ref=data.get("credentials_ref", "") or "",
            poll_interval_seconds=int(data.get("poll_interval_seconds", 24 * 3600)),
            name=data.get("name", "") or "",
        )
