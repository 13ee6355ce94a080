"""Name-based gender inference.

Two-step procedure: infer the origin of a full name first, then infer
gender conditioned on that origin. Predictions below the probability
threshold (default 0.90) land in the "unknown" group. A manual override
table always wins over the classifier. Backends report confidence in
[0, 1]; remote scores on a -1..+1 scale are folded (sign is the class,
magnitude the confidence).
"""

from __future__ import annotations

import csv
from pathlib import Path

import requests

from .errors import ClassifierUnavailable
from .identity import GenderRecord, Identity

DEFAULT_THRESHOLD = 0.90

GENDERS = ("woman", "man", "unknown")


class NameClassifier:
    """Behavioral contract shared by the offline and remote backends."""

    def classify_origin(self, full_name: str):
        raise NotImplementedError

    def classify_gender(self, full_name: str, origin: str):
        raise NotImplementedError


class DictionaryClassifier(NameClassifier):
    """Offline backend over a CSV of (full_name, origin, gender, probability).

    Lookup is case-insensitive on the full name, falling back to the first
    given-name token for single-token dictionary rows.
    """

    def __init__(self, rows):
        self.rows = [
            (name.strip().lower(), origin.strip(), gender.strip(), float(prob))
            for name, origin, gender, prob in rows
        ]
        self.by_name = {}
        for name, origin, gender, prob in self.rows:
            self.by_name.setdefault(name, []).append((origin, gender, prob))

    @classmethod
    def from_csv(cls, path) -> "DictionaryClassifier":
        rows = []
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            for record in reader:
                rows.append(
                    (
                        record["full_name"],
                        record.get("origin", ""),
                        record["gender"],
                        record.get("probability", "0") or "0",
                    )
                )
        return cls(rows)

    def _lookup(self, full_name):
        name = " ".join(full_name.split()).lower()
        entries = self.by_name.get(name)
        if entries:
            return entries
        first = name.split(" ")[0] if name else ""
        return self.by_name.get(first, [])

    def classify_origin(self, full_name: str):
        full_name = full_name.strip()
        if not full_name:
            raise ValueError("full_name must be non-empty")
        entries = self._lookup(full_name)
        if not entries:
            return ("", 0.0)
        origin, _, prob = max(entries, key=lambda e: (e[2], e[0]))
        return (origin, prob)

    def classify_gender(self, full_name: str, origin: str):
        full_name = full_name.strip()
        if not full_name:
            raise ValueError("full_name must be non-empty")
        entries = self._lookup(full_name)
        if not entries:
            return ("unknown", 0.0)
        matching = [e for e in entries if e[0] == origin] or entries
        best = max(matching, key=lambda e: (e[2], e[1]))
        return (best[1], best[2])


class RemoteClassifier(NameClassifier):
    """HTTP JSON backend compatible with name-classification APIs that
    score on a -1..+1 scale."""

    def __init__(self, base_url, api_key="", session=None, timeout=30):
        self.base_url = base_url.rstrip("/")
        self.api_key = api_key
        self.session = session or requests.Session()
        self.timeout = timeout

    def _post(self, path, payload):
        headers = {}
        if self.api_key:
            headers["X-API-KEY"] = self.api_key
        try:
            resp = self.session.post(
                f"{self.base_url}{path}", json=payload, headers=headers, timeout=self.timeout
            )
            resp.raise_for_status()
            return resp.json()
        except requests.RequestException as exc:
            raise ClassifierUnavailable(f"remote classifier failed: {exc}") from exc

    def classify_origin(self, full_name: str):
        full_name = full_name.strip()
        if not full_name:
            raise ValueError("full_name must be non-empty")
        data = self._post("/origin", {"name": full_name})
        return (data.get("origin", ""), float(data.get("probability", 0.0)))

    def classify_gender(self, full_name: str, origin: str):
        full_name = full_name.strip()
        if not full_name:
            raise ValueError("full_name must be non-empty")
        data = self._post("/gender", {"name": full_name, "origin": origin})
        score = float(data.get("score", 0.0))
        # signed scale: negative leans man, positive leans woman
        if "gender" in data:
            gender = data["gender"]
            prob = float(data.get("probability", abs(score)))
        else:
            gender = "woman" if score > 0 else "man" if score < 0 else "unknown"
            prob = abs(score)
        return (gender, min(max(prob, 0.0), 1.0))


class OverrideTable:
    """Manual gender assignments keyed by identity id or full name."""

    def __init__(self, entries=None):
        self.entries = {str(k).strip().lower(): v for k, v in (entries or {}).items()}

    @classmethod
    def from_csv(cls, path) -> "OverrideTable":
        entries = {}
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            for record in reader:
                key = record["identity_key"].strip().lower()
                if key in entries:
                    raise ValueError(f"duplicate override key: {key}")
                entries[key] = record["gender"].strip()
        return cls(entries)

    def lookup(self, identity: Identity):
        for key in (identity.identity_id, identity.longest_full_name, identity.display_name):
            value = self.entries.get(key.strip().lower()) if key else None
            if value:
                return value
        return None


def resolve_gender(
    identity: Identity,
    classifier: NameClassifier,
    threshold: float = DEFAULT_THRESHOLD,
    overrides: OverrideTable | None = None,
    origin_threshold: float = 0.0,
) -> GenderRecord:
    """Override first; otherwise two-step classification on the longest
    full name. Degraded inputs always yield "unknown", never an error."""
    if not 0 < threshold <= 1:
        raise ValueError("threshold must be in (0, 1]")
    if overrides is not None:
        forced = overrides.lookup(identity)
        if forced:
            return GenderRecord(gender=forced, probability=1.0, provenance="override")
    name = identity.longest_full_name
    if not name:
        return GenderRecord(gender="unknown", probability=0.0, provenance="none")
    try:
        origin, origin_prob = classifier.classify_origin(name)
        if origin_prob < origin_threshold:
            origin = ""
        gender, prob = classifier.classify_gender(name, origin)
    except ClassifierUnavailable:
        return GenderRecord(gender="unknown", probability=0.0, provenance="classifier")
    if gender not in ("woman", "man") or prob < threshold:
        return GenderRecord(
            gender="unknown", probability=prob, origin=origin, provenance="classifier"
        )
    return GenderRecord(gender=gender, probability=prob, origin=origin, provenance="classifier")


def resolve_genders(registry, classifier, threshold=DEFAULT_THRESHOLD, overrides=None):
    for identity in registry:
        if identity.is_bot:
            continue
        identity.gender = resolve_gender(identity, classifier, threshold, overrides)
    return registry
