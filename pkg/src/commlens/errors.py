"""Exception hierarchy shared across the pipeline."""


class CommlensError(Exception):
    """Base class for all commlens errors."""


class AuthError(CommlensError):
    """Credentials missing or rejected by an upstream source."""


class SourceUnavailable(CommlensError):
    """Upstream source unreachable after bounded retries."""


class SchemaError(CommlensError):
    """A single upstream record could not be parsed.

    Connectors skip-and-report these; they never abort a stream.
    """


class StorageError(CommlensError):
    """Event store I/O failure. The store is left consistent."""


class RuleConflict(CommlensError):
    """A manual merge and a manual split target the same profile pair."""

    def __init__(self, message, pairs=None):
        super().__init__(message)
        self.pairs = pairs or []


class ClassifierUnavailable(CommlensError):
    """Remote name classifier backend is down or rate limited."""


class ValidationError(CommlensError):
    """Bad filter or query parameters."""


class UnknownMetric(CommlensError):
    """Export requested for a metric name that does not exist."""
