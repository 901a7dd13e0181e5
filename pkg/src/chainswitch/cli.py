"""Operator CLI: run the daemon, replay scenarios, query and steer the daemon.

Exit codes: 0 success, 1 domain error (single ``error: ...`` line on stderr),
2 usage error. The default API address comes from ``CHAINSWITCH_API_URL``.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click
import httpx

from .api import create_app, parse_ts
from .core import ChainswitchError, ConfigError
from .gateway import Daemon, load_config, run_replay
from .report import render_ranking_table, write_report
from .scenarios import write_scenario

DEFAULT_API_URL = "http://127.0.0.1:8640"


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


def _api_client(api_url: str) -> httpx.Client:
    return httpx.Client(base_url=api_url, timeout=10.0)


@click.group()
def main() -> None:
    """Monitor blockchains, rank them by configurable criteria, and manage
    switchovers between them."""


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(path_type=Path),
              help="Instance config file (JSON).")
@click.option("--host", default=None, help="Override the API bind host.")
@click.option("--port", default=None, type=int, help="Override the API bind port.")
def run(config_path: Path, host: str | None, port: int | None) -> None:
    """Start the monitoring daemon and serve the HTTP API."""
    import uvicorn

    try:
        config = load_config(config_path)
    except ChainswitchError as exc:
        _fail(str(exc))
    daemon = Daemon(config, log_sink=click.echo)
    daemon.start()
    app = create_app(daemon)
    try:
        uvicorn.run(
            app,
            host=host or config.api.host,
            port=port if port is not None else config.api.port,
            log_level="warning",
        )
    finally:
        daemon.close()


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(path_type=Path),
              help="Instance config file (JSON).")
@click.option("--trace", "trace_path", default=None, type=click.Path(path_type=Path),
              help="Override the block trace file used by every trace-replay chain.")
@click.option("--until", default=None, help="Stop at this timestamp (epoch or ISO-8601).")
@click.option("--report-dir", default=None, type=click.Path(path_type=Path),
              help="Write CSV output and figures into this directory.")
@click.option("--quiet", is_flag=True, help="Suppress per-event log lines.")
def replay(config_path: Path, trace_path: Path | None, until: str | None,
           report_dir: Path | None, quiet: bool) -> None:
    """Replay trace files in virtual time and print the final ranking."""
    try:
        config = load_config(config_path)
        if trace_path is not None:
            from dataclasses import replace as dc_replace

            config = dc_replace(
                config,
                chains=tuple(
                    dc_replace(c, trace_path=trace_path) if c.proxy_kind == "trace-replay" else c
                    for c in config.chains
                ),
            )
        until_ts = None
        if until is not None:
            try:
                until_ts = parse_ts(until)
            except Exception:
                raise ConfigError(f"unparseable --until value {until!r}") from None
        sink = None if quiet else click.echo
        result = run_replay(config, until=until_ts, log_sink=sink)
    except ChainswitchError as exc:
        _fail(str(exc))

    pipeline = result.pipeline
    click.echo("")
    click.echo(render_ranking_table(pipeline.latest_ranking, pipeline.policy,
                                    list(pipeline.chains)))
    suggestions = pipeline.manager.all()
    if suggestions:
        click.echo("")
        click.echo("suggestions:")
        for s in suggestions:
            click.echo(f"  {s.id}  {s.from_chain} -> {s.to_chain}  [{s.state.value}]")
    if report_dir is not None:
        written = write_report(report_dir, pipeline)
        click.echo("")
        for path in written:
            click.echo(f"wrote {path}")


@main.command()
@click.option("--api", "api_url", envvar="CHAINSWITCH_API_URL", default=DEFAULT_API_URL,
              show_default=True, help="Daemon API base URL.")
def rank(api_url: str) -> None:
    """Print the daemon's latest ranking table."""
    try:
        with _api_client(api_url) as client:
            ranking = client.get("/v1/ranking").raise_for_status().json()
            policy = client.get("/v1/policy").raise_for_status().json()
            chains = client.get("/v1/chains").raise_for_status().json()
    except httpx.HTTPError as exc:
        _fail(f"API request failed: {exc}")
    chain_order = [c["id"] for c in chains]
    rows = {row["chain"]: row for row in ranking["chains"]}
    metric_rows = [k for k in ("m1", "m2", "m3", "m4", "m5", "m6", "m7", "m8")
                   if policy["weights"].get(k, 0) > 0]
    lines = [["Metric"] + chain_order]
    for key in metric_rows:
        lines.append(
            [key.upper()]
            + [str(rows[c]["weighted_scores"][key]) if c in rows else "-" for c in chain_order]
        )
    lines.append(
        ["Total"] + [str(rows[c]["benefit"]) if c in rows else "-" for c in chain_order]
    )
    widths = [max(len(line[i]) for line in lines) for i in range(len(lines[0]))]
    for line in lines:
        click.echo("  ".join(cell.rjust(widths[i]) if i else cell.ljust(widths[i])
                             for i, cell in enumerate(line)))
    winner = ranking.get("winner")
    click.echo(f"winner: {winner}" if winner else "no eligible blockchain")


def _decide(api_url: str, suggestion_id: str, action: str) -> None:
    try:
        with _api_client(api_url) as client:
            response = client.post(f"/v1/suggestions/{suggestion_id}/{action}")
    except httpx.HTTPError as exc:
        _fail(f"API request failed: {exc}")
    if response.status_code != 200:
        detail = response.json().get("detail", response.text)
        _fail(detail)
    body = response.json()
    click.echo(f"{body['id']}  {body['from']} -> {body['to']}  [{body['state']}]")


@main.command()
@click.argument("suggestion_id")
@click.option("--api", "api_url", envvar="CHAINSWITCH_API_URL", default=DEFAULT_API_URL,
              show_default=True)
def approve(suggestion_id: str, api_url: str) -> None:
    """Approve a pending switchover suggestion."""
    _decide(api_url, suggestion_id, "approve")


@main.command()
@click.argument("suggestion_id")
@click.option("--api", "api_url", envvar="CHAINSWITCH_API_URL", default=DEFAULT_API_URL,
              show_default=True)
def reject(suggestion_id: str, api_url: str) -> None:
    """Reject a pending switchover suggestion."""
    _decide(api_url, suggestion_id, "reject")


@main.command()
@click.option("--number", "-n", required=True, type=click.IntRange(1, 4),
              help="Scenario number (1-4).")
@click.option("--out", "out_dir", required=True, type=click.Path(path_type=Path),
              help="Directory to write config.json plus trace files into.")
def scenario(number: int, out_dir: Path) -> None:
    """Generate the fixture bundle for one of the built-in scenarios."""
    paths = write_scenario(number, out_dir)
    for name, path in paths.items():
        click.echo(f"{name}: {path}")


if __name__ == "__main__":
    main()
