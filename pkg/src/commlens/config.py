"""Project configuration file (JSON, human-editable).

Example:

    {
      "project": "sample",
      "store": "./store",
      "sources": [
        {"source_kind": "fixture", "locator": "./events.json"}
      ],
      "identity_rules": "./identity_rules.json",
      "domain_registry": "./domains.json",
      "gender_dictionary": "./names.csv",
      "gender_overrides": "./overrides.csv",
      "gender_threshold": 0.90,
      "api": {"host": "127.0.0.1", "port": 8000, "cors_origins": []}
    }

Credentials are never stored here; sources reference environment
variables by name via credentials_ref.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .events import SourceConfig


@dataclass
class CliConfig:
    project: str
    store: str
    sources: list = field(default_factory=list)
    identity_rules: str = ""
    domain_registry: str = ""
    gender_dictionary: str = ""
    gender_overrides: str = ""
    gender_threshold: float = 0.90
    api: dict = field(default_factory=dict)
    base_dir: Path = field(default_factory=Path)

    def __post_init__(self):
        if not 0 < self.gender_threshold <= 1:
            raise ValueError("gender_threshold must be in (0, 1]")

    def resolve(self, path: str) -> str:
        if not path:
            return ""
        return str((self.base_dir / path).resolve())

    @property
    def store_path(self) -> str:
        return self.resolve(self.store)

    @property
    def registry_path(self) -> str:
        return str(Path(self.store_path) / "identities.json")

    @classmethod
    def load(cls, path) -> "CliConfig":
        path = Path(path)
        data = json.loads(path.read_text(encoding="utf-8"))
        return cls(
            project=data.get("project", path.stem),
            store=data.get("store", "./store"),
            sources=[SourceConfig.from_dict(s) for s in data.get("sources", [])],
            identity_rules=data.get("identity_rules", ""),
            domain_registry=data.get("domain_registry", ""),
            gender_dictionary=data.get("gender_dictionary", ""),
            gender_overrides=data.get("gender_overrides", ""),
            gender_threshold=float(data.get("gender_threshold", 0.90)),
            api=data.get("api", {}),
            base_dir=path.parent,
        )
