"""Identity resolution: merge per-platform profiles into contributors.

Profiles are merged when they share an email (case-insensitive), share a
username across sources (case-insensitive), or a manual rule joins them.
Manual splits cut edges before components are computed. Bots are flagged
by pattern or explicit list, and affiliation comes from corporate email
domains with a freemail registry mapping to UNKNOWN.
"""

from __future__ import annotations

import hashlib
import json
import re
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path

from .errors import RuleConflict
from .events import EventSnapshot, RawProfile

UNKNOWN = "Unknown"

DEFAULT_BOT_PATTERNS = ("*[bot]", "*-bot")


@dataclass
class IdentityRules:
    manual_merges: list = field(default_factory=list)  # list of profile-key groups
    manual_splits: list = field(default_factory=list)  # list of [key_a, key_b] pairs
    bot_patterns: list = field(default_factory=lambda: list(DEFAULT_BOT_PATTERNS))
    bot_list: list = field(default_factory=list)

    def validate(self):
        split_pairs = {frozenset(p) for p in self.manual_splits}
        conflicts = []
        for group in self.manual_merges:
            keys = sorted(set(group))
            for i, a in enumerate(keys):
                for b in keys[i + 1 :]:
                    if frozenset((a, b)) in split_pairs:
                        conflicts.append((a, b))
        if conflicts:
            raise RuleConflict(
                f"merge and split both demanded for {conflicts}", pairs=conflicts
            )
        return self

    @classmethod
    def load(cls, path) -> "IdentityRules":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(
            manual_merges=data.get("manual_merges", []),
            manual_splits=data.get("manual_splits", []),
            bot_patterns=data.get("bot_patterns", list(DEFAULT_BOT_PATTERNS)),
            bot_list=data.get("bot_list", []),
        ).validate()


@dataclass
class DomainRegistry:
    corporate: dict = field(default_factory=dict)  # domain -> organization
    freemail: set = field(default_factory=set)

    def __post_init__(self):
        self.corporate = {k.lower(): v for k, v in self.corporate.items()}
        self.freemail = {d.lower() for d in self.freemail}
        overlap = set(self.corporate) & self.freemail
        if overlap:
            raise ValueError(f"domains both corporate and freemail: {sorted(overlap)}")

    def org_for(self, email: str):
        domain = email.rsplit("@", 1)[-1].lower() if "@" in email else ""
        return self.corporate.get(domain)

    @classmethod
    def load(cls, path) -> "DomainRegistry":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(
            corporate=data.get("corporate", {}),
            freemail=set(data.get("freemail", [])),
        )


@dataclass
class AffiliationRecord:
    org_name: str = UNKNOWN
    evidence_domain: str = ""
    evidence_profile: str = ""

    def to_dict(self):
        return {
            "org_name": self.org_name,
            "evidence_domain": self.evidence_domain,
            "evidence_profile": self.evidence_profile,
        }


@dataclass
class GenderRecord:
    gender: str = "unknown"
    probability: float = 0.0
    origin: str = ""
    provenance: str = "none"  # classifier | override | none

    def to_dict(self):
        return {
            "gender": self.gender,
            "probability": self.probability,
            "origin": self.origin,
            "provenance": self.provenance,
        }


@dataclass
class Identity:
    identity_id: str
    profiles: tuple
    is_bot: bool = False
    affiliation: AffiliationRecord = field(default_factory=AffiliationRecord)
    gender: GenderRecord = field(default_factory=GenderRecord)

    @property
    def display_name(self) -> str:
        names = [p.full_name for p in self.profiles if p.full_name]
        if names:
            return max(names, key=lambda n: (len(n), n))
        usernames = [p.username for p in self.profiles if p.username]
        if usernames:
            return usernames[0]
        return self.profiles[0].email

    @property
    def longest_full_name(self) -> str:
        names = [p.full_name for p in self.profiles if p.full_name.strip()]
        if not names:
            return ""
        return max(names, key=lambda n: (len(n), n))

    @property
    def profile_keys(self):
        return tuple(p.key for p in self.profiles)

    def to_dict(self):
        return {
            "identity_id": self.identity_id,
            "display_name": self.display_name,
            "profiles": [p.to_dict() for p in self.profiles],
            "is_bot": self.is_bot,
            "affiliation": self.affiliation.to_dict(),
            "gender": self.gender.to_dict(),
        }


class IdentityRegistry:
    """Resolved identities plus the profile-key -> identity mapping."""

    def __init__(self, identities):
        self.identities = sorted(identities, key=lambda i: i.identity_id)
        self.by_profile_key = {}
        self.by_id = {}
        for identity in self.identities:
            self.by_id[identity.identity_id] = identity
            for key in identity.profile_keys:
                self.by_profile_key[key] = identity

    def __len__(self):
        return len(self.identities)

    def __iter__(self):
        return iter(self.identities)

    def identity_for(self, profile: RawProfile):
        return self.by_profile_key.get(profile.key)

    def humans(self):
        return [i for i in self.identities if not i.is_bot]

    def to_dict(self):
        return {"identities": [i.to_dict() for i in self.identities]}

    def save(self, path):
        Path(path).write_text(
            json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n",
            encoding="utf-8",
        )

    @classmethod
    def load(cls, path) -> "IdentityRegistry":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        identities = []
        for item in data["identities"]:
            identity = Identity(
                identity_id=item["identity_id"],
                profiles=tuple(RawProfile.from_dict(p) for p in item["profiles"]),
                is_bot=item["is_bot"],
                affiliation=AffiliationRecord(**item["affiliation"]),
                gender=GenderRecord(**item["gender"]),
            )
            identities.append(identity)
        return cls(identities)


def _identity_id(profile_keys) -> str:
    digest = hashlib.sha1("|".join(sorted(profile_keys)).encode("utf-8")).hexdigest()
    return digest[:16]


def resolve_identities(snapshot: EventSnapshot, rules: IdentityRules) -> IdentityRegistry:
    """Group observed profiles into identities via connected components."""
    rules.validate()

    profiles = {}
    emails = defaultdict(set)
    for event in snapshot:
        key = event.actor.key
        existing = profiles.get(key)
        if existing is None or _profile_richness(event.actor) > _profile_richness(existing):
            profiles[key] = event.actor
        if event.actor.email:
            emails[key].add(event.actor.email.lower())

    keys = sorted(profiles)
    edges = set()

    # link on every email ever observed for a key, not just the representative
    by_email = defaultdict(list)
    by_username = defaultdict(list)
    for key in keys:
        for email in sorted(emails[key]):
            by_email[email].append(key)
        profile = profiles[key]
        if profile.username:
            by_username[profile.username.lower()].append(key)
    merge_groups = list(by_email.values()) + list(by_username.values())
    merge_groups += [
        [k for k in sorted(set(group)) if k in profiles] for group in rules.manual_merges
    ]
    for group in merge_groups:
        # full clique, so cutting one pair leaves the rest connected
        for i, a in enumerate(group):
            for b in group[i + 1 :]:
                edges.add(frozenset((a, b)))

    for pair in rules.manual_splits:
        edges.discard(frozenset(pair))

    adjacency = defaultdict(set)
    for edge in edges:
        a, b = sorted(edge)
        adjacency[a].add(b)
        adjacency[b].add(a)

    identities = []
    seen = set()
    for key in keys:
        if key in seen:
            continue
        component = []
        stack = [key]
        while stack:
            node = stack.pop()
            if node in seen:
                continue
            seen.add(node)
            component.append(node)
            stack.extend(adjacency[node] - seen)
        component.sort()
        member_profiles = tuple(profiles[k] for k in component)
        identities.append(
            Identity(identity_id=_identity_id(component), profiles=member_profiles)
        )
    return IdentityRegistry(identities)


def _profile_richness(profile: RawProfile) -> tuple:
    return (
        len(profile.full_name),
        len(profile.email),
        len(profile.profile_url),
        profile.username,
    )


def detect_bots(registry: IdentityRegistry, rules: IdentityRules) -> IdentityRegistry:
    """Flag identities whose any profile matches a bot pattern or the bot list."""
    bot_list = {name.lower() for name in rules.bot_list}
    for identity in registry:
        identity.is_bot = any(
            _is_bot_profile(p, rules.bot_patterns, bot_list) for p in identity.profiles
        )
    return registry


def _glob_match(name, pattern):
    # only * and ? are wildcards; brackets are literal so "*[bot]" means
    # the literal suffix "[bot]"
    regex = "".join(
        ".*" if c == "*" else "." if c == "?" else re.escape(c) for c in pattern
    )
    return re.fullmatch(regex, name) is not None


def _is_bot_profile(profile, patterns, bot_list):
    candidates = [profile.username.lower(), profile.full_name.lower()]
    if any(name and name in bot_list for name in candidates):
        return True
    return any(
        name and _glob_match(name, pattern.lower())
        for name in candidates
        for pattern in patterns
    )


def assign_affiliation(
    identity: Identity, registry: DomainRegistry, last_activity=None
) -> AffiliationRecord:
    """Pick the organization of the corporate-domain email whose profile was
    most recently active; ties break on the smaller org name. UNKNOWN when
    no profile carries a corporate domain."""
    last_activity = last_activity or {}
    candidates = []
    for profile in identity.profiles:
        if not profile.email:
            continue
        org = registry.org_for(profile.email)
        if org is None:
            continue
        seen_at = last_activity.get(profile.key)
        candidates.append((seen_at, org, profile))
    if not candidates:
        return AffiliationRecord(org_name=UNKNOWN)

    def rank(entry):
        seen_at, org, profile = entry
        # most recent activity first; unknown activity sorts last
        return (seen_at is not None, seen_at, _neg_str(org))

    seen_at, org, profile = max(candidates, key=rank)
    return AffiliationRecord(
        org_name=org,
        evidence_domain=profile.email.rsplit("@", 1)[-1].lower(),
        evidence_profile=profile.key,
    )


class _neg_str(str):
    """Orders strings in reverse so max() picks the lexicographically smallest."""

    def __lt__(self, other):
        return str.__gt__(self, other)

    def __gt__(self, other):
        return str.__lt__(self, other)


def assign_affiliations(
    registry: IdentityRegistry, domains: DomainRegistry, snapshot: EventSnapshot
) -> IdentityRegistry:
    last_activity = {}
    for event in snapshot:
        key = event.actor.key
        current = last_activity.get(key)
        if current is None or event.timestamp > current:
            last_activity[key] = event.timestamp
    for identity in registry:
        identity.affiliation = assign_affiliation(identity, domains, last_activity)
    return registry
