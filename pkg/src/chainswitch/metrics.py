"""Per-chain metric computation over the rolling 24-hour window.

Eight metrics feed the selection layer: write cost per KB (m1), read cost per
KB (m2, fixed at zero since plain data-field reads are free), USD exchange
rate (m3), inter-block time (m4), transaction throughput (m5), miner share
distribution (m6), network hash rate (m7), and operator-assigned reputation
(m8). All computations are pure functions of a window snapshot plus the
descriptor, quote, and fee inputs, so identical inputs always reproduce the
same vector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal

from .core import (
    ChainDescriptor,
    ChainFamily,
    EmptyWindow,
    QuoteUnavailable,
    RollingWindow,
)
from .proxies import estimate_fee, write_cost_1kb_usd

DAY_SECONDS = 24 * 3600

# Expected hashes to find one Bitcoin block of difficulty D is D * 2^32; at the
# 600 s block target that normalizes to D * 2^32 / 600 hashes per second, and
# n/144 rescales for the actually observed block count.
BTC_HASHES_PER_DIFFICULTY = 2**32
BTC_TARGET_BLOCK_TIME_S = 600
BTC_BLOCKS_PER_DAY = 144

METRIC_KEYS = ("m1", "m2", "m3", "m4", "m5", "m6", "m7", "m8")

METRIC_LABELS = {
    "m1": "Write cost",
    "m2": "Read cost",
    "m3": "Exchange rate",
    "m4": "Inter-block time",
    "m5": "Throughput",
    "m6": "Biggest miner share",
    "m7": "Hash rate",
    "m8": "Reputation",
}


@dataclass(frozen=True)
class MetricVector:
    """The eight metric values for one chain at one instant."""

    chain: str
    m1_write_cost_usd_per_kb: Decimal
    m2_read_cost_usd_per_kb: Decimal
    m3_exchange_rate_usd: Decimal
    m4_interblock_s: float
    m5_tx_per_s: float
    m6_miner_shares: dict[str, float]
    m7_network_hashrate_hps: float
    m8_reputation: int
    computed_at: float

    def biggest_miner_share(self) -> float:
        return max(self.m6_miner_shares.values()) if self.m6_miner_shares else 0.0

    def scalar(self, key: str) -> float | Decimal | int:
        """The scalar fed to scoring/validation; m6 reduces to the biggest share."""
        if key == "m6":
            return self.biggest_miner_share()
        return getattr(self, _FIELDS[key])


_FIELDS = {
    "m1": "m1_write_cost_usd_per_kb",
    "m2": "m2_read_cost_usd_per_kb",
    "m3": "m3_exchange_rate_usd",
    "m4": "m4_interblock_s",
    "m5": "m5_tx_per_s",
    "m6": "m6_miner_shares",
    "m7": "m7_network_hashrate_hps",
    "m8": "m8_reputation",
}


def compute_m1(
    window: RollingWindow,
    descriptor: ChainDescriptor,
    quote_usd: Decimal,
    user_fee: Decimal | None = None,
) -> Decimal:
    """USD cost of writing one kilobyte, using the user fee or an estimate."""
    if quote_usd is None:
        raise QuoteUnavailable(f"no quote for {descriptor.id}")
    fee = user_fee
    if fee is None:
        fee = estimate_fee(window, descriptor.target_inclusion_blocks).median_fee_rate
    return write_cost_1kb_usd(descriptor.family, fee, quote_usd)


def compute_m2() -> Decimal:
    """USD cost of reading one kilobyte: zero, reads involve no transaction."""
    return Decimal(0)


def compute_m4(window: RollingWindow) -> float:
    """Average inter-block seconds: 86,400 / regular-block count (inf when empty)."""
    n = window.regular_count
    return DAY_SECONDS / n if n else math.inf


def compute_m5(window: RollingWindow) -> float:
    """Transactions per second: regular-block tx sum / 86,400."""
    return window.regular_tx_sum / DAY_SECONDS


def compute_m6(window: RollingWindow, family: ChainFamily) -> dict[str, float]:
    """Miner shares in percent; Ethereum-family counting includes uncles."""
    counts = window.miner_counts(include_uncles=family is ChainFamily.ETHEREUM_LIKE)
    total = sum(counts.values())
    if total == 0:
        raise EmptyWindow(f"no blocks to derive miner shares for {window.chain!r}")
    return {miner: count * 100.0 / total for miner, count in sorted(counts.items())}


def compute_m7(window: RollingWindow, family: ChainFamily) -> float:
    """Network hash rate in hashes/second.

    Bitcoin-family: (n / 144) * (D * 2^32 / 600) with D the latest regular
    block's difficulty. Ethereum-family: summed difficulty of regular and
    uncle blocks divided by 86,400.
    """
    if len(window) == 0:
        raise EmptyWindow(f"no blocks to derive hash rate for {window.chain!r}")
    if family is ChainFamily.BITCOIN_LIKE:
        n = window.regular_count
        d = window.latest_regular_difficulty()
        return (n / BTC_BLOCKS_PER_DAY) * (d * BTC_HASHES_PER_DIFFICULTY / BTC_TARGET_BLOCK_TIME_S)
    return window.difficulty_sum_all / DAY_SECONDS


def compute_vector(
    window: RollingWindow,
    descriptor: ChainDescriptor,
    quote_usd: Decimal,
    now: float,
    user_fee: Decimal | None = None,
) -> MetricVector:
    """Assemble the full vector; raises EmptyWindow when no blocks are present."""
    if len(window) == 0:
        raise EmptyWindow(f"no blocks in the last 24 h for {window.chain!r}")
    return MetricVector(
        chain=descriptor.id,
        m1_write_cost_usd_per_kb=compute_m1(window, descriptor, quote_usd, user_fee),
        m2_read_cost_usd_per_kb=compute_m2(),
        m3_exchange_rate_usd=Decimal(quote_usd),
        m4_interblock_s=compute_m4(window),
        m5_tx_per_s=compute_m5(window),
        m6_miner_shares=compute_m6(window, descriptor.family),
        m7_network_hashrate_hps=compute_m7(window, descriptor.family),
        m8_reputation=descriptor.reputation,
        computed_at=now,
    )
