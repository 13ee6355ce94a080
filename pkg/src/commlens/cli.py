"""Operator CLI: ingest sources, enrich identities, export metrics, serve.

Exit codes: 0 success, 1 partial (some records skipped-and-reported),
2 configuration or usage error.
"""

from __future__ import annotations

import sys
import time
from importlib import metadata as importlib_metadata
from pathlib import Path

import click

from . import payloads, sources
from .api import ApiConfig, serve as api_serve
from .config import CliConfig
from .errors import (
    AuthError,
    CommlensError,
    RuleConflict,
    SourceUnavailable,
    StorageError,
    UnknownMetric,
    ValidationError,
)
from .events import parse_utc
from .gender import DictionaryClassifier, OverrideTable, resolve_genders
from .identity import (
    DomainRegistry,
    IdentityRules,
    assign_affiliations,
    detect_bots,
    resolve_identities,
)
from .metrics import FilterSpec, LENSES
from .store import EventStore

EXIT_PARTIAL = 1
EXIT_CONFIG = 2


@click.group()
@click.option(
    "--config",
    "config_path",
    default="commlens.json",
    show_default=True,
    type=click.Path(),
    help="Project configuration file.",
)
@click.pass_context
def main(ctx, config_path):
    ctx.ensure_object(dict)
    ctx.obj["config_path"] = config_path


def _load_config(ctx) -> CliConfig:
    path = Path(ctx.obj["config_path"])
    if not path.exists():
        click.echo(f"error: config file not found: {path}", err=True)
        sys.exit(EXIT_CONFIG)
    try:
        return CliConfig.load(path)
    except (ValueError, KeyError) as exc:
        click.echo(f"error: bad config: {exc}", err=True)
        sys.exit(EXIT_CONFIG)


@main.command()
@click.option("--since", default=None, help="Only fetch events after this instant.")
@click.option("--source", "only_source", default=None, help="Restrict to one source by name.")
@click.option("--watch", is_flag=True, help="Loop forever at each source's poll interval.")
@click.pass_context
def ingest(ctx, since, only_source, watch):
    """Fetch events from configured sources into the store."""
    config = _load_config(ctx)
    store = EventStore(config.store_path).initialize()
    since_ts = None
    if since:
        try:
            since_ts = parse_utc(since)
        except ValueError as exc:
            click.echo(f"error: bad --since: {exc}", err=True)
            sys.exit(EXIT_CONFIG)
    selected = [
        s for s in config.sources if only_source is None or s.name == only_source
    ]
    if only_source is not None and not selected:
        click.echo(f"error: no source named {only_source!r}", err=True)
        sys.exit(EXIT_CONFIG)

    while True:
        status = _ingest_once(config, store, selected, since_ts)
        if not watch:
            sys.exit(status)
        time.sleep(min(s.poll_interval_seconds for s in selected))


def _ingest_once(config, store, selected, since_ts):
    status = 0
    for source in selected:
        skipped = []
        try:
            # resolve each source relative to the config file
            resolved = source
            if source.source_kind in ("fixture", "qa_forum", "git"):
                resolved = type(source)(
                    source_kind=source.source_kind,
                    locator=config.resolve(source.locator),
                    credentials_ref=source.credentials_ref,
                    poll_interval_seconds=source.poll_interval_seconds,
                    name=source.name,
                )
            events = list(
                sources.fetch_source(resolved, since=since_ts, on_error=skipped.append)
            )
            appended = store.append_events(events)
        except AuthError as exc:
            click.echo(f"{source.name}: auth error: {exc}", err=True)
            return EXIT_CONFIG
        except (SourceUnavailable, StorageError) as exc:
            click.echo(f"{source.name}: {exc}", err=True)
            return EXIT_CONFIG
        line = f"{source.name}: appended {appended}"
        if skipped:
            line += f" (skipped {len(skipped)} malformed)"
            status = EXIT_PARTIAL
        click.echo(line)
    return status


@main.command()
@click.pass_context
def enrich(ctx):
    """Resolve identities, flag bots, assign affiliation and gender."""
    config = _load_config(ctx)
    store = EventStore(config.store_path)
    if not store.exists():
        click.echo("error: store not initialized; run ingest first", err=True)
        sys.exit(EXIT_CONFIG)
    try:
        rules = (
            IdentityRules.load(config.resolve(config.identity_rules))
            if config.identity_rules
            else IdentityRules()
        )
    except RuleConflict as exc:
        click.echo(f"error: conflicting identity rules: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    domains = (
        DomainRegistry.load(config.resolve(config.domain_registry))
        if config.domain_registry
        else DomainRegistry()
    )
    snapshot = store.load_snapshot()
    try:
        registry = resolve_identities(snapshot, rules)
    except RuleConflict as exc:
        click.echo(f"error: conflicting identity rules: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    detect_bots(registry, rules)
    assign_affiliations(registry, domains, snapshot)
    if config.gender_dictionary:
        classifier = DictionaryClassifier.from_csv(config.resolve(config.gender_dictionary))
        overrides = (
            OverrideTable.from_csv(config.resolve(config.gender_overrides))
            if config.gender_overrides
            else None
        )
        resolve_genders(registry, classifier, config.gender_threshold, overrides)
    registry.save(config.registry_path)
    bots = sum(1 for i in registry if i.is_bot)
    click.echo(f"{len(registry)} identities ({bots} bot{'s' if bots != 1 else ''})")


@main.command()
@click.argument("metric")
@click.option("--lens", default="none", type=click.Choice(LENSES))
@click.option("--from", "start", default=None, help="Window start (RFC 3339 or date).")
@click.option("--to", "end", default=None, help="Window end (RFC 3339 or date).")
@click.option("--as-of", "as_of", default=None, help="Alias for --to.")
@click.option("--group", default=None, help="Restrict to one group value.")
@click.option("--kind", default="pr", help="Contribution kind (contributions metric).")
@click.option("--measure", default="count", help="count or proportion (contributions).")
@click.option("--format", "fmt", default="json", type=click.Choice(["json", "csv"]))
@click.option("--output", "-o", default="-", help="Output file, - for stdout.")
@click.pass_context
def export(ctx, metric, lens, start, end, as_of, group, kind, measure, fmt, output):
    """Export a metric as JSON (identical to the API body) or CSV."""
    config = _load_config(ctx)
    store = EventStore(config.store_path)
    if not store.exists():
        click.echo("error: store not initialized; run ingest first", err=True)
        sys.exit(EXIT_CONFIG)
    registry_path = Path(config.registry_path)
    if not registry_path.exists():
        click.echo("error: no enriched registry; run enrich first", err=True)
        sys.exit(EXIT_CONFIG)
    from .identity import IdentityRegistry

    registry = IdentityRegistry.load(registry_path)
    snapshot = store.load_snapshot()
    try:
        spec = FilterSpec(
            start=parse_utc(start) if start else None,
            end=parse_utc(end or as_of) if (end or as_of) else None,
            lens=lens,
            group_filter=group,
        )
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    kwargs = {"kind": kind, "measure": measure} if metric == "contributions" else {}
    try:
        payload = payloads.build(metric, snapshot, registry, spec, **kwargs)
    except (UnknownMetric, ValidationError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    text = payloads.dumps(payload) if fmt == "json" else payloads.to_csv(metric, payload)
    if output == "-":
        click.echo(text, nl=False)
        if fmt == "json":
            click.echo()
    else:
        Path(output).write_text(text if fmt == "csv" else text, encoding="utf-8")
        click.echo(f"wrote {output}")


@main.command()
@click.option("--host", default=None)
@click.option("--port", default=None, type=int)
@click.option("--token", default=None, help="Require this bearer token on /v1.")
@click.option("--static-dir", default=None, help="Serve dashboard assets from this dir.")
@click.pass_context
def serve(ctx, host, port, token, static_dir):
    """Run the HTTP API."""
    config = _load_config(ctx)
    store = EventStore(config.store_path)
    if not store.exists():
        click.echo("error: store not initialized; run ingest first", err=True)
        sys.exit(EXIT_CONFIG)
    api_cfg = config.api
    try:
        api_config = ApiConfig(
            store_path=config.store_path,
            registry_path=config.registry_path,
            host=host or api_cfg.get("host", "127.0.0.1"),
            port=port if port is not None else int(api_cfg.get("port", 8000)),
            auth_token=token or api_cfg.get("auth_token", ""),
            cors_origins=api_cfg.get("cors_origins", []),
            static_dir=static_dir or api_cfg.get("static_dir", ""),
        )
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    try:
        api_serve(api_config)
    except (StorageError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)


@main.command()
def version():
    """Print the package version."""
    try:
        click.echo(importlib_metadata.version("commlens"))
    except importlib_metadata.PackageNotFoundError:
        click.echo("0.0.0+unknown")


if __name__ == "__main__":
    main()
