"""Community analytics: ingestion, identity resolution, diversity and
turnover metrics, PR communication network, and a read-only HTTP API."""

__version__ = "0.1.0"
