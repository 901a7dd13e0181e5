"""Deterministic fixture generators for the four evaluation scenarios.

Each scenario materializes a config file plus block/quote traces into a
directory, ready for ``chainswitch replay --config <dir>/config.json``:

1. A monitored chain's hash rate declines from 200 GH/s in 5 GH/s steps while
   a hash-rate validation rule (>= 180 GH/s) is in force; crossing the
   threshold must produce exactly one violation and one switchover suggestion.
2. A full four-chain day (2018-09-25 data profile) under the evaluation
   weights; expected totals 70/90/80/55 with ethereum winning.
3. The 2018-10-07 profile; a scheduled policy update zeroes the weights of
   the security/reputation metrics, expected totals 10/55/60/50 with
   ethereum-classic winning and a switchover suggestion away from ethereum.
4. The 2018-10-17 profile; a scheduled update relaxes the inter-block-time
   scoring and demotes throughput to weight 3, expected totals 6/49/58/60
   with expanse winning.

Block counts, transaction totals, miner splits, difficulties, fee rates, and
quotes are chosen so every metric lands in the score interval that reproduces
the published weighted totals exactly; the trace spans exactly 24 hours so the
full window is live at evaluation time.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from decimal import Decimal
from pathlib import Path

from .core import BlockHeader, FeeStats
from .proxies import block_to_trace_line, quote_to_trace_line

# Evaluation-day midnights (UTC): 2018-09-25, 2018-10-07, 2018-10-17, and the
# hash-rate experiment anchored at 13:52:00 UTC so log lines read like the
# published excerpt.
T0_SELECTION_DAY = 1_537_833_600
T0_REWEIGHTED_DAY = 1_538_870_400
T0_RESCORED_DAY = 1_539_734_400
T0_HASHRATE_DROP = 1_550_584_320

DAY = 86_400

# Score assignment used across the evaluation scenarios (hash rate in H/s,
# miner share in percent of the biggest miner).
EVALUATION_SAFS: dict[str, list[list]] = {
    "m1": [[0, 1e-4, 4], [1e-4, 1e-2, 3], [1e-2, 0.1, 2], [0.1, 1, 1], [1, "inf", 0]],
    "m2": [[0, "inf", 4]],
    "m3": [[0, 50, 4], [50, 100, 3], [100, 250, 2], [250, 500, 1], [500, "inf", 0]],
    "m4": [[0, 20, 4], [20, 40, 3], [40, 60, 2], [60, 120, 1], [120, "inf", 0]],
    "m5": [[0, 0.45, 0], [0.45, 2, 1], [2, 5, 2], [5, 10, 3], [10, "inf", 4]],
    "m6": [[0, 22, 4], [22, 27, 3], [27, 30, 2], [30, 38, 1], [38, "inf", 0]],
    "m7": [[0, 1e14, 0], [1e14, 4e14, 1], [4e14, 7e14, 2], [7e14, 1e15, 3], [1e15, "inf", 4]],
    "m8": [[0, 2, 0], [2, 4, 1], [4, 6, 2], [6, 8, 3], [8, "inf", 4]],
}

RELAXED_BLOCKTIME_SAF = [[0, 60, 4], [60, 120, 3], [120, 180, 2], [180, 240, 1], [240, "inf", 0]]

CONSTANT_ONE_SAFS = {key: [[0, "inf", 1]] for key in EVALUATION_SAFS}

CHAIN_DEFS = [
    {"id": "bitcoin", "family": "bitcoin-like", "currency_symbol": "BTC", "reputation": 10},
    {"id": "ethereum", "family": "ethereum-like", "currency_symbol": "ETH", "reputation": 10},
    {"id": "ethereum-classic", "family": "ethereum-like", "currency_symbol": "ETC",
     "reputation": 9},
    {"id": "expanse", "family": "ethereum-like", "currency_symbol": "EXP", "reputation": 5},
]


@dataclass(frozen=True)
class DayPlan:
    """One chain's 24-hour block schedule."""

    chain_id: str
    block_count: int
    interval_s: int
    tx_total: int
    difficulty: int
    miner_counts: tuple[tuple[str, int], ...]


# Block counts follow the measured inter-block times (600 s, ~14 s, ~14 s,
# ~44 s); transaction totals equal throughput (tps) * 86,400 exactly; the top
# miner's count pins the biggest-miner percentage inside its score interval;
# difficulties pin the hash rates (and their published ratios: the bitcoin
# network ~217,000x ethereum, ethereum ~16x ethereum-classic, ~1,275x expanse).
DAY_PLANS = [
    DayPlan("bitcoin", 144, 600, 222_048, 7_000_000_000_000,
            (("btc-pool-1", 29), ("btc-pool-2", 23), ("btc-pool-3", 23),
             ("btc-pool-4", 23), ("btc-pool-5", 23), ("btc-pool-6", 23))),
    DayPlan("ethereum", 6171, 14, 495_936, 3_233_000_000_000_000,
            (("eth-pool-1", 1481), ("eth-pool-2", 1173), ("eth-pool-3", 1173),
             ("eth-pool-4", 1172), ("eth-pool-5", 1172))),
    DayPlan("ethereum-classic", 6171, 14, 40_608, 202_000_000_000_000,
            (("etc-pool-1", 2592), ("etc-pool-2", 1193), ("etc-pool-3", 1193),
             ("etc-pool-4", 1193))),
    DayPlan("expanse", 1963, 44, 5_184, 7_971_400_000_000,
            (("exp-pool-1", 942), ("exp-pool-2", 511), ("exp-pool-3", 510))),
]

# Per-scenario fee rates (satoshi/byte for bitcoin, wei gas price otherwise)
# and USD quotes; chosen so the 1 KB write cost lands in its target interval
# and the published cost ratios (~24x, ~154x, ~96x, ~42x, ~45x) hold.
DAY_FEES: dict[int, dict[str, Decimal]] = {
    2: {"bitcoin": Decimal(11), "ethereum": Decimal(5_540_000_000),
        "ethereum-classic": Decimal(719_470_000), "expanse": Decimal(34_170_000_000)},
    3: {"bitcoin": Decimal(10), "ethereum": Decimal(1_429_380_000),
        "ethereum-classic": Decimal(674_050_000), "expanse": Decimal(1_992_340_000)},
    4: {"bitcoin": Decimal(10), "ethereum": Decimal(1_585_820_000),
        "ethereum-classic": Decimal(701_678_000), "expanse": Decimal(469_950_000)},
}

DAY_QUOTES: dict[int, dict[str, Decimal]] = {
    2: {"BTC": Decimal("6394.25"), "ETH": Decimal("213.14"),
        "ETC": Decimal("10.66"), "EXP": Decimal("0.36")},
    3: {"BTC": Decimal("6609.00"), "ETH": Decimal("225.40"),
        "ETC": Decimal("11.38"), "EXP": Decimal("0.36")},
    4: {"BTC": Decimal("6589.00"), "ETH": Decimal("203.86"),
        "ETC": Decimal("10.85"), "EXP": Decimal("0.36")},
}

DAY_STARTS = {2: T0_SELECTION_DAY, 3: T0_REWEIGHTED_DAY, 4: T0_RESCORED_DAY}


def _hash_for(tag: str) -> str:
    return hashlib.sha256(tag.encode()).hexdigest()


def _day_blocks(plan: DayPlan, t0: int, scenario: int, fee: Decimal) -> list[BlockHeader]:
    """Blocks at t0, t0+interval, ... with the tx remainder spread over the
    first blocks and miners assigned by their planned counts."""
    base_tx, extra = divmod(plan.tx_total, plan.block_count)
    miners: list[str] = []
    for name, count in plan.miner_counts:
        miners.extend([name] * count)
    assert len(miners) == plan.block_count
    fee_stats = FeeStats(fee)
    blocks = []
    for i in range(plan.block_count):
        blocks.append(
            BlockHeader(
                chain=plan.chain_id,
                height=i,
                hash=_hash_for(f"s{scenario}:{plan.chain_id}:{i}"),
                timestamp=t0 + i * plan.interval_s,
                miner=miners[i],
                difficulty=plan.difficulty,
                tx_count=base_tx + (1 if i < extra else 0),
                is_uncle=False,
                fee_stats=fee_stats,
            )
        )
    return blocks


def _evaluation_policy(weights: dict[str, int], suppression_s: float,
                       safs: dict[str, list[list]] | None = None) -> dict:
    return {
        "weights": weights,
        "safs": safs or EVALUATION_SAFS,
        "validation": {"rules": {}, "formula": None},
        "suppression_period_s": suppression_s,
        "mode": "require-approval",
        "transfer_strategy": {"name": "none"},
    }


def _write_day_scenario(number: int, out_dir: Path) -> dict[str, Path]:
    t0 = DAY_STARTS[number]
    fees = DAY_FEES[number]
    blocks: list[BlockHeader] = []
    for plan in DAY_PLANS:
        blocks.extend(_day_blocks(plan, t0, number, fees[plan.chain_id]))
    blocks.sort(key=lambda b: (b.timestamp, b.chain, b.height))

    quotes = [(float(t0), symbol, usd) for symbol, usd in sorted(DAY_QUOTES[number].items())]

    full_weights = {"m1": 5, "m2": 0, "m3": 5, "m4": 5, "m5": 5, "m6": 5, "m7": 5, "m8": 5}
    cost_weights = {"m1": 5, "m2": 0, "m3": 5, "m4": 5, "m5": 5, "m6": 0, "m7": 0, "m8": 0}

    if number == 2:
        policy = _evaluation_policy(full_weights, suppression_s=3600.0)
        active = "bitcoin"
        updates: list[dict] = []
    elif number == 3:
        policy = _evaluation_policy(full_weights, suppression_s=0.0)
        active = "ethereum"
        updates = [{"at": t0 + DAY, "policy": _evaluation_policy(cost_weights, 0.0)}]
    else:
        policy = _evaluation_policy(cost_weights, suppression_s=0.0)
        active = "ethereum-classic"
        relaxed = dict(EVALUATION_SAFS)
        relaxed["m4"] = RELAXED_BLOCKTIME_SAF
        throughput_demoted = dict(cost_weights)
        throughput_demoted["m5"] = 3
        updates = [{"at": t0 + DAY, "policy": _evaluation_policy(throughput_demoted, 0.0, relaxed)}]

    config = {
        "chains": [
            {**chain, "proxy": {"kind": "trace-replay", "path": "blocks.jsonl"}}
            for chain in CHAIN_DEFS
        ],
        "policy": policy,
        "quotes": {"kind": "trace-replay", "path": "quotes.jsonl", "staleness_s": 2 * DAY},
        "clock": {"mode": "virtual-replay", "replay_start": t0, "replay_end": t0 + DAY},
        "history_log": "history.jsonl",
        "active_chain": active,
        "policy_updates": updates,
    }
    return _write_bundle(out_dir, config, blocks, quotes)


def _write_hashrate_drop_scenario(out_dir: Path) -> dict[str, Path]:
    t0 = T0_HASHRATE_DROP
    fee = FeeStats(Decimal(1_000_000_000))
    blocks: list[BlockHeader] = []

    def expanse_block(height: int, ts: float, difficulty: int) -> BlockHeader:
        return BlockHeader(
            chain="expanse", height=height, hash=_hash_for(f"s1:expanse:{height}"),
            timestamp=ts, miner="exp-pool-1", difficulty=difficulty, tx_count=1,
            is_uncle=False, fee_stats=fee,
        )

    # Five ballast blocks sized so each one's eviction, paired with one live
    # block's arrival, steps the 24 h difficulty sum down by 5 GH/s * 86,400.
    for i in range(1, 6):
        blocks.append(expanse_block(i - 1, t0 + 5 * i - DAY - 3, 439_000_000_000_000))
    # Anchor block that tops the window up to exactly 200 GH/s * 86,400 and
    # stays inside the window for the whole live phase.
    blocks.append(expanse_block(5, t0 - DAY + 26, 15_085_000_000_000_000))
    # The monitored decline: one block every 5 s, hash rate 195 -> 175 GH/s.
    for i in range(1, 6):
        blocks.append(expanse_block(5 + i, t0 + 5 * i, 7_000_000_000_000))

    for j in range(4):
        blocks.append(
            BlockHeader(
                chain="ethereum-classic", height=j,
                hash=_hash_for(f"s1:ethereum-classic:{j}"),
                timestamp=t0 - DAY + 30 + 10 * j, miner="etc-pool-1",
                difficulty=4_000_000_000_000_000, tx_count=1, is_uncle=False, fee_stats=fee,
            )
        )
    blocks.sort(key=lambda b: (b.timestamp, b.chain, b.height))

    quotes = [(float(t0 - DAY), "ETC", Decimal("10.66")), (float(t0 - DAY), "EXP", Decimal("0.36"))]

    policy = {
        "weights": {key: 1 for key in EVALUATION_SAFS},
        "safs": CONSTANT_ONE_SAFS,
        "validation": {
            "rules": {"m7": {"op": ">=", "threshold": 180e9}},
            "formula": None,
        },
        "suppression_period_s": 0.0,
        "mode": "require-approval",
        "transfer_strategy": {"name": "none"},
    }
    config = {
        "chains": [
            {"id": "expanse", "family": "ethereum-like", "currency_symbol": "EXP",
             "reputation": 5, "proxy": {"kind": "trace-replay", "path": "blocks.jsonl"}},
            {"id": "ethereum-classic", "family": "ethereum-like", "currency_symbol": "ETC",
             "reputation": 9, "proxy": {"kind": "trace-replay", "path": "blocks.jsonl"}},
        ],
        "policy": policy,
        "quotes": {"kind": "trace-replay", "path": "quotes.jsonl", "staleness_s": 3 * DAY},
        "clock": {"mode": "virtual-replay", "replay_start": t0 - DAY, "replay_end": t0 + 25},
        "history_log": "history.jsonl",
        "active_chain": "expanse",
        "policy_updates": [],
    }
    return _write_bundle(out_dir, config, blocks, quotes)


def _write_bundle(
    out_dir: Path,
    config: dict,
    blocks: list[BlockHeader],
    quotes: list[tuple[float, str, Decimal]],
) -> dict[str, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    blocks_path = out_dir / "blocks.jsonl"
    with open(blocks_path, "w", encoding="utf-8") as fh:
        for block in blocks:
            fh.write(block_to_trace_line(block) + "\n")
    quotes_path = out_dir / "quotes.jsonl"
    with open(quotes_path, "w", encoding="utf-8") as fh:
        for ts, symbol, usd in quotes:
            fh.write(quote_to_trace_line(ts, symbol, usd) + "\n")
    config_path = out_dir / "config.json"
    with open(config_path, "w", encoding="utf-8") as fh:
        json.dump(config, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return {"config": config_path, "blocks": blocks_path, "quotes": quotes_path}


def write_scenario(number: int, out_dir: Path) -> dict[str, Path]:
    """Materialize scenario 1-4 under ``out_dir``; returns the written paths."""
    if number == 1:
        return _write_hashrate_drop_scenario(out_dir)
    if number in DAY_STARTS:
        return _write_day_scenario(number, out_dir)
    raise ValueError(f"unknown scenario {number}; choose 1-4")
