"""Replay reporting: aligned ranking tables, CSV exports, and figures.

The table mirrors the evaluation layout — one column per chain in registration
order, one row per metric with its weighted score, then a Total row and the
winner. Metrics whose weight is zero are omitted from the table (they cannot
contribute) but kept in the CSV export. Figures are rendered with the Agg
backend so report generation works headless.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .gateway import Pipeline
from .metrics import METRIC_KEYS
from .selection import RankingPolicy, RankingResult


def render_ranking_table(
    ranking: RankingResult | None,
    policy: RankingPolicy,
    chain_order: list[str],
) -> str:
    """ASCII table of weighted scores per chain, with a Total row and winner line."""
    rows_present = {row.chain: row for row in (ranking.per_chain if ranking else ())}
    metric_rows = [k for k in METRIC_KEYS if policy.weights.get(k, 0) > 0]

    header = ["Metric"] + chain_order
    lines: list[list[str]] = [header]
    for key in metric_rows:
        line = [key.upper()]
        for chain in chain_order:
            row = rows_present.get(chain)
            line.append(str(row.weighted_scores[key]) if row else "-")
        lines.append(line)
    total = ["Total"]
    for chain in chain_order:
        row = rows_present.get(chain)
        total.append(str(row.benefit) if row else "-")
    lines.append(total)

    widths = [max(len(line[i]) for line in lines) for i in range(len(header))]
    rendered = []
    for line in lines:
        rendered.append(
            "  ".join(cell.rjust(widths[i]) if i else cell.ljust(widths[i])
                      for i, cell in enumerate(line))
        )
    winner = ranking.winner if ranking else None
    rendered.append(f"winner: {winner}" if winner else "no eligible blockchain")
    return "\n".join(rendered)


def write_ranking_csv(
    path: Path,
    ranking: RankingResult | None,
    policy: RankingPolicy,
    chain_order: list[str],
) -> None:
    rows_present = {row.chain: row for row in (ranking.per_chain if ranking else ())}
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["metric", "weight"] + chain_order)
        for key in METRIC_KEYS:
            line: list[object] = [key, policy.weights.get(key, 0)]
            for chain in chain_order:
                row = rows_present.get(chain)
                line.append(row.weighted_scores[key] if row else "")
            writer.writerow(line)
        writer.writerow(
            ["total", ""]
            + [rows_present[c].benefit if c in rows_present else "" for c in chain_order]
        )


def write_benefit_csv(path: Path, pipeline: Pipeline) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["timestamp", "chain", "benefit", "eligible", "winner"])
        for ts, chain, benefit, eligible, winner in pipeline.benefit_history:
            writer.writerow([ts, chain, benefit, int(eligible), int(winner)])


def save_figures(out_dir: Path, pipeline: Pipeline) -> list[Path]:
    """Render benefit and hash-rate progressions to PNG files; returns the paths."""
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    chain_order = list(pipeline.chains)

    by_chain_benefit: dict[str, tuple[list[float], list[int]]] = {c: ([], []) for c in chain_order}
    for ts, chain, benefit, _, _ in pipeline.benefit_history:
        by_chain_benefit[chain][0].append(ts)
        by_chain_benefit[chain][1].append(benefit)
    fig, ax = plt.subplots(figsize=(9, 4.5))
    for chain in chain_order:
        xs, ys = by_chain_benefit[chain]
        if xs:
            ax.step(xs, ys, where="post", label=chain)
    ax.set_xlabel("virtual time (s)")
    ax.set_ylabel("benefit (total weighted score)")
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    benefit_png = out_dir / "benefits.png"
    fig.savefig(benefit_png, dpi=120)
    plt.close(fig)
    written.append(benefit_png)

    by_chain_rate: dict[str, tuple[list[float], list[float]]] = {c: ([], []) for c in chain_order}
    for ts, chain, rate in pipeline.hashrate_history:
        by_chain_rate[chain][0].append(ts)
        by_chain_rate[chain][1].append(rate / 1e9)
    fig, ax = plt.subplots(figsize=(9, 4.5))
    any_points = False
    for chain in chain_order:
        xs, ys = by_chain_rate[chain]
        if xs:
            ax.plot(xs, ys, label=chain)
            any_points = True
    if any_points:
        ax.set_yscale("log")
    ax.set_xlabel("virtual time (s)")
    ax.set_ylabel("network hash rate (GH/s)")
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    rate_png = out_dir / "hashrate.png"
    fig.savefig(rate_png, dpi=120)
    plt.close(fig)
    written.append(rate_png)
    return written


def write_report(out_dir: Path, pipeline: Pipeline) -> list[Path]:
    """Full report bundle: ranking CSV, benefit history CSV, and figures."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    chain_order = list(pipeline.chains)
    ranking_csv = out_dir / "ranking.csv"
    write_ranking_csv(ranking_csv, pipeline.latest_ranking, pipeline.policy, chain_order)
    benefit_csv = out_dir / "benefit_history.csv"
    write_benefit_csv(benefit_csv, pipeline)
    return [ranking_csv, benefit_csv] + save_figures(out_dir, pipeline)
