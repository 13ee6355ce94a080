"""Append-only event store.

Layout on disk:

    <store>/events.ndjson   one JSON object per line, ActivityEvent schema
    <store>/event_ids.txt   side index, one event_id per line
    <store>/.write.lock     advisory lock taken for the duration of a batch

Writes go through a temp-file-then-rename of the index plus an fsync'd
append of the log, so a batch either lands completely or not at all.
Readers only ever see immutable snapshots.
"""

from __future__ import annotations

import fcntl
import json
import os
from contextlib import contextmanager
from pathlib import Path

from .errors import StorageError
from .events import ActivityEvent, EventSnapshot

LOG_NAME = "events.ndjson"
INDEX_NAME = "event_ids.txt"
LOCK_NAME = ".write.lock"


class EventStore:
    def __init__(self, root):
        self.root = Path(root)

    @property
    def log_path(self) -> Path:
        return self.root / LOG_NAME

    @property
    def index_path(self) -> Path:
        return self.root / INDEX_NAME

    def initialize(self):
        try:
            self.root.mkdir(parents=True, exist_ok=True)
            self.log_path.touch(exist_ok=True)
            self.index_path.touch(exist_ok=True)
        except OSError as exc:
            raise StorageError(f"cannot initialize store at {self.root}: {exc}") from exc
        return self

    def exists(self) -> bool:
        return self.log_path.exists()

    @contextmanager
    def _write_lock(self):
        lock_path = self.root / LOCK_NAME
        fd = os.open(lock_path, os.O_CREAT | os.O_RDWR, 0o644)
        try:
            fcntl.flock(fd, fcntl.LOCK_EX)
            yield
        finally:
            fcntl.flock(fd, fcntl.LOCK_UN)
            os.close(fd)

    def known_ids(self) -> set[str]:
        if not self.index_path.exists():
            return set()
        try:
            with open(self.index_path, encoding="utf-8") as fh:
                return {line.strip() for line in fh if line.strip()}
        except OSError as exc:
            raise StorageError(f"cannot read index: {exc}") from exc

    def append_events(self, events) -> int:
        """Append a batch, skipping event_ids already stored.

        Idempotent: re-appending the same batch is a no-op. The batch is
        written all-or-nothing. Returns the number of newly stored events.
        """
        if not self.exists():
            raise StorageError(f"store not initialized at {self.root}")
        with self._write_lock():
            known = self.known_ids()
            fresh = []
            seen_in_batch = set()
            for event in events:
                if event.event_id in known or event.event_id in seen_in_batch:
                    continue
                seen_in_batch.add(event.event_id)
                fresh.append(event)
            if not fresh:
                return 0
            lines = "".join(
                json.dumps(e.to_dict(), sort_keys=True, separators=(",", ":")) + "\n"
                for e in fresh
            )
            try:
                with open(self.log_path, "a", encoding="utf-8") as fh:
                    fh.write(lines)
                    fh.flush()
                    os.fsync(fh.fileno())
                tmp = self.index_path.with_suffix(".tmp")
                with open(tmp, "w", encoding="utf-8") as fh:
                    for eid in sorted(known | seen_in_batch):
                        fh.write(eid + "\n")
                    fh.flush()
                    os.fsync(fh.fileno())
                os.replace(tmp, self.index_path)
            except OSError as exc:
                raise StorageError(f"append failed: {exc}") from exc
            return len(fresh)

    def read_events(self):
        if not self.exists():
            raise StorageError(f"store not initialized at {self.root}")
        events = []
        try:
            with open(self.log_path, encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    events.append(ActivityEvent.from_dict(json.loads(line)))
        except (OSError, json.JSONDecodeError) as exc:
            raise StorageError(f"cannot read event log: {exc}") from exc
        return events

    def load_snapshot(self, as_of=None) -> EventSnapshot:
        """All events with timestamp <= as_of (or everything), sorted."""
        return EventSnapshot.build(self.read_events(), as_of=as_of)

    def max_timestamp(self):
        events = self.read_events()
        if not events:
            return None
        return max(e.timestamp for e in events)

    def fingerprint(self) -> float:
        """Cheap change detector for snapshot reloads."""
        try:
            stat = self.log_path.stat()
        except OSError:
            return -1.0
        return stat.st_mtime_ns + stat.st_size
