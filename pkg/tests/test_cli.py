"""Command-line surface: replay output, fixture generation, API commands."""

from __future__ import annotations

import subprocess
import sys
from decimal import Decimal

import httpx
import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient

import chainswitch.cli as cli_module
from chainswitch.api import InlineHost, create_app
from chainswitch.cli import main
from chainswitch.gateway import NewBlock, QuoteUpdate

from conftest import make_block
from test_gateway import feed_chain, two_chain_pipeline


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def scenario1(tmp_path):
    runner = CliRunner()
    result = runner.invoke(main, ["scenario", "-n", "1", "--out", str(tmp_path / "s1")])
    assert result.exit_code == 0
    return tmp_path / "s1" / "config.json"


class TestScenarioCommand:
    def test_writes_fixture_bundle(self, tmp_path, runner):
        result = runner.invoke(main, ["scenario", "-n", "2", "--out", str(tmp_path)])
        assert result.exit_code == 0
        for name in ("config.json", "blocks.jsonl", "quotes.jsonl"):
            assert (tmp_path / name).exists()

    def test_rejects_unknown_number(self, runner):
        result = runner.invoke(main, ["scenario", "-n", "9", "--out", "x"])
        assert result.exit_code == 2


class TestReplayCommand:
    def test_hashrate_drop_log_lines(self, runner, scenario1):
        result = runner.invoke(main, ["replay", "--config", str(scenario1)])
        assert result.exit_code == 0
        assert "Hash rate (175.0 GH/s) violated" in result.output
        assert "Switchover suggestion: Ethereum Classic" in result.output
        assert "Expanse network hash rate: 180.0 GH/s" in result.output
        assert result.output.count("violated") == 1
        assert "winner: ethereum-classic" in result.output

    def test_output_is_deterministic(self, runner, scenario1):
        first = runner.invoke(main, ["replay", "--config", str(scenario1)])
        second = runner.invoke(main, ["replay", "--config", str(scenario1)])
        assert first.output == second.output

    def test_quiet_suppresses_event_log(self, runner, scenario1):
        result = runner.invoke(main, ["replay", "--config", str(scenario1), "--quiet"])
        assert result.exit_code == 0
        assert "network hash rate" not in result.output
        assert "winner: ethereum-classic" in result.output

    def test_until_cuts_replay_short(self, runner, scenario1):
        from chainswitch.scenarios import T0_HASHRATE_DROP

        result = runner.invoke(
            main,
            ["replay", "--config", str(scenario1), "--until", str(T0_HASHRATE_DROP + 10)],
        )
        assert result.exit_code == 0
        assert "violated" not in result.output

    def test_missing_config_exits_one(self, runner, tmp_path):
        result = runner.invoke(main, ["replay", "--config", str(tmp_path / "nope.json")])
        assert result.exit_code == 1
        assert result.stderr.startswith("error:")
        assert "\n" == result.stderr[result.stderr.index("\n"):]  # single line

    def test_malformed_trace_exits_one(self, runner, scenario1):
        blocks = scenario1.parent / "blocks.jsonl"
        blocks.write_text(blocks.read_text() + "{broken\n")
        result = runner.invoke(main, ["replay", "--config", str(scenario1)])
        assert result.exit_code == 1
        assert "error:" in result.stderr and "blocks.jsonl" in result.stderr

    def test_report_dir_writes_tables_and_figures(self, runner, scenario1, tmp_path):
        report = tmp_path / "report"
        result = runner.invoke(
            main, ["replay", "--config", str(scenario1), "--quiet", "--report-dir", str(report)]
        )
        assert result.exit_code == 0
        for name in ("ranking.csv", "benefit_history.csv", "benefits.png", "hashrate.png"):
            assert (report / name).exists(), name
        header = (report / "ranking.csv").read_text().splitlines()[0]
        assert header == "metric,weight,expanse,ethereum-classic"

    def test_unknown_flag_exits_two(self, runner, scenario1):
        result = runner.invoke(main, ["replay", "--config", str(scenario1), "--bogus"])
        assert result.exit_code == 2

    def test_trace_flag_overrides_config_paths(self, runner, scenario1, tmp_path):
        moved = tmp_path / "moved-blocks.jsonl"
        moved.write_bytes((scenario1.parent / "blocks.jsonl").read_bytes())
        (scenario1.parent / "blocks.jsonl").unlink()
        result = runner.invoke(
            main, ["replay", "--config", str(scenario1), "--trace", str(moved), "--quiet"]
        )
        assert result.exit_code == 0
        assert "winner: ethereum-classic" in result.output

    def test_selection_day_total_row(self, runner, tmp_path):
        runner.invoke(main, ["scenario", "-n", "2", "--out", str(tmp_path)])
        result = runner.invoke(
            main, ["replay", "--config", str(tmp_path / "config.json"), "--quiet"]
        )
        assert result.exit_code == 0
        (total_line,) = [l for l in result.output.splitlines() if l.startswith("Total")]
        assert total_line.split() == ["Total", "70", "90", "80", "55"]
        assert "winner: ethereum" in result.output


def _patched_api(monkeypatch) -> None:
    """Point the CLI's API client at an in-process app over a live pipeline."""
    pipeline = two_chain_pipeline()
    feed_chain(pipeline, "alpha", "AAA", 10.0)
    feed_chain(pipeline, "beta", "BBB", 20.0)
    pipeline.process_event(QuoteUpdate(ts=15_000.0, symbol="BBB", usd=Decimal(10)))
    pipeline.process_event(NewBlock(ts=15_000.0, block=make_block(chain="beta", ts=15_000.0)))
    app = create_app(InlineHost(pipeline))

    def fake_client(api_url: str) -> httpx.Client:
        return TestClient(app, base_url="http://daemon")

    monkeypatch.setattr(cli_module, "_api_client", fake_client)
    return pipeline


class TestApiCommands:
    def test_rank_prints_table_and_winner(self, runner, monkeypatch):
        _patched_api(monkeypatch)
        result = runner.invoke(main, ["rank"])
        assert result.exit_code == 0
        assert "Total" in result.output
        assert result.output.strip().endswith("winner: beta")

    def test_rank_against_selection_day_daemon(self, runner, monkeypatch, tmp_path):
        from chainswitch.gateway import load_config, run_replay
        from chainswitch.scenarios import write_scenario

        paths = write_scenario(2, tmp_path)
        replayed = run_replay(load_config(paths["config"]))
        app = create_app(InlineHost(replayed.pipeline))
        monkeypatch.setattr(
            cli_module, "_api_client",
            lambda api_url: TestClient(app, base_url="http://daemon"),
        )
        result = runner.invoke(main, ["rank"])
        assert result.exit_code == 0
        assert result.output.strip().endswith("winner: ethereum")

    def test_approve_pending(self, runner, monkeypatch):
        pipeline = _patched_api(monkeypatch)
        sid = pipeline.manager.all()[-1].id
        result = runner.invoke(main, ["approve", sid])
        assert result.exit_code == 0
        assert "[executed]" in result.output

    def test_reject_pending(self, runner, monkeypatch):
        pipeline = _patched_api(monkeypatch)
        sid = pipeline.manager.all()[-1].id
        result = runner.invoke(main, ["reject", sid])
        assert result.exit_code == 0
        assert "[rejected]" in result.output

    def test_approve_rejected_exits_one(self, runner, monkeypatch):
        pipeline = _patched_api(monkeypatch)
        sid = pipeline.manager.all()[-1].id
        runner.invoke(main, ["reject", sid])
        result = runner.invoke(main, ["approve", sid])
        assert result.exit_code == 1
        assert result.stderr.startswith("error:")

    def test_unknown_id_exits_one(self, runner, monkeypatch):
        _patched_api(monkeypatch)
        result = runner.invoke(main, ["approve", "sugg-424242"])
        assert result.exit_code == 1
        assert result.stderr.startswith("error:")

    def test_connection_failure_exits_one(self, runner):
        result = runner.invoke(main, ["rank", "--api", "http://127.0.0.1:1"])
        assert result.exit_code == 1
        assert result.stderr.startswith("error:")


def test_console_script_help_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "chainswitch.cli", "--help"],
        capture_output=True, text=True, timeout=60,
    )
    assert proc.returncode == 0
    assert "replay" in proc.stdout


def test_run_missing_config_exits_one(runner):
    result = runner.invoke(main, ["run", "--config", "/does/not/exist.json"])
    assert result.exit_code == 1
    assert result.stderr.startswith("error:")


def test_run_serves_chains_endpoint(tmp_path):
    """Daemon smoke test: start `run` as a subprocess and poll the API."""
    import json
    import socket
    import time

    with socket.socket() as probe:
        probe.bind(("127.0.0.1", 0))
        port = probe.getsockname()[1]

    config = {
        "chains": [
            {"id": "sim-a", "family": "bitcoin-like", "currency_symbol": "AAA",
             "reputation": 5,
             "proxy": {"kind": "sim", "mean_interblock_s": 0.1,
                       "miner_distribution": {"m": 1.0}, "difficulty": 1, "fee_rate": 1}},
        ],
        "policy": {
            "weights": {f"m{i}": 1 for i in range(1, 9)},
            "safs": {f"m{i}": [[0, "inf", 1]] for i in range(1, 9)},
        },
        "quotes": {"kind": "static", "static": {"AAA": 10}, "staleness_s": 600},
        "api": {"host": "127.0.0.1", "port": port},
        "history_log": str(tmp_path / "history.jsonl"),
    }
    config_path = tmp_path / "config.json"
    config_path.write_text(json.dumps(config))

    proc = subprocess.Popen(
        [sys.executable, "-m", "chainswitch.cli", "run", "--config", str(config_path)],
        stdout=subprocess.PIPE, stderr=subprocess.STDOUT, text=True,
    )
    try:
        body = None
        deadline = time.time() + 20.0
        while time.time() < deadline:
            try:
                body = httpx.get(f"http://127.0.0.1:{port}/v1/chains", timeout=2.0).json()
                break
            except httpx.HTTPError:
                time.sleep(0.25)
        assert body is not None, "daemon never came up"
        assert body[0]["id"] == "sim-a"
    finally:
        proc.terminate()
        proc.wait(timeout=10)
