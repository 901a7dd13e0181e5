"""Shared domain types: chains, blocks, the rolling 24-hour window, data records.

Every other module builds on these. A :class:`RollingWindow` keeps exactly the
blocks mined in the trailing 24 hours (closed boundary: a block exactly 24 h
old is still retained) and maintains the running aggregates the metric layer
reads, so per-event recomputation stays O(1) in window size.
"""

from __future__ import annotations

import bisect
import re
from collections import Counter
from dataclasses import dataclass, field
from decimal import Decimal
from enum import Enum

WINDOW_HORIZON_S = 24 * 3600

_CHAIN_ID_RE = re.compile(r"^[a-z0-9-]{1,32}$")


class ChainswitchError(Exception):
    """Base class for all domain errors raised by this package."""


class ChainMismatch(ChainswitchError):
    pass


class EmptyWindow(ChainswitchError):
    pass


class QuoteUnavailable(ChainswitchError):
    pass


class GasLimitExceeded(ChainswitchError):
    pass


class UnknownStrategy(ChainswitchError):
    pass


class UnknownChain(ChainswitchError):
    pass


class NoActiveChain(ChainswitchError):
    pass


class ProxyUnavailable(ChainswitchError):
    pass


class InvalidPayload(ChainswitchError):
    pass


class ConfigError(ChainswitchError):
    pass


class ChainFamily(Enum):
    BITCOIN_LIKE = "bitcoin-like"
    ETHEREUM_LIKE = "ethereum-like"


def validate_chain_id(chain_id: str) -> str:
    """Check a chain identifier: non-empty, <= 32 chars, [a-z0-9-] only."""
    if not isinstance(chain_id, str) or not _CHAIN_ID_RE.match(chain_id):
        raise ConfigError(
            f"invalid chain id {chain_id!r}: need 1-32 lowercase alphanumeric/'-' chars"
        )
    return chain_id


def display_name(chain_id: str) -> str:
    """Human-facing name derived from the id, e.g. 'ethereum-classic' -> 'Ethereum Classic'."""
    return chain_id.replace("-", " ").title()


@dataclass(frozen=True)
class ChainDescriptor:
    """Static facts about a registered chain.

    ``reputation`` is the operator-supplied renown score in [0, 10]; the
    family selects the cost model and hash-rate formula.
    """

    id: str
    family: ChainFamily
    currency_symbol: str
    reputation: int
    target_inclusion_blocks: int = 6

    def __post_init__(self) -> None:
        validate_chain_id(self.id)
        if not 0 <= self.reputation <= 10:
            raise ConfigError(f"reputation must be in [0, 10], got {self.reputation}")
        if self.target_inclusion_blocks < 1:
            raise ConfigError("target_inclusion_blocks must be positive")

    @property
    def display_name(self) -> str:
        return display_name(self.id)


@dataclass(frozen=True)
class FeeStats:
    """Observed fee level: satoshi/byte for Bitcoin-family chains, wei gas price otherwise."""

    median_fee_rate: Decimal

    def __post_init__(self) -> None:
        if self.median_fee_rate < 0:
            raise ConfigError("fee rate must be non-negative")


@dataclass(frozen=True)
class BlockHeader:
    """One mined block (or Ethereum-family uncle); the unit of monitoring input."""

    chain: str
    height: int
    hash: str
    timestamp: float
    miner: str
    difficulty: int
    tx_count: int
    is_uncle: bool = False
    fee_stats: FeeStats = field(default_factory=lambda: FeeStats(Decimal(0)))

    def __post_init__(self) -> None:
        if self.timestamp < 0 or self.timestamp != self.timestamp:
            raise ConfigError(f"block timestamp must be finite and >= 0, got {self.timestamp}")
        if self.height < 0 or self.tx_count < 0 or self.difficulty < 0:
            raise ConfigError("height, tx_count and difficulty must be non-negative")


class RollingWindow:
    """Time-ordered block store retaining only the trailing 24 hours.

    Single-writer: one per-chain event sequence calls :meth:`insert` /
    :meth:`evict`; readers take :meth:`snapshot` tuples. Duplicate hashes are
    ignored, so redelivery by a gossip layer is harmless. Aggregates
    (regular-block count, tx sum, difficulty sum, miner counts) are maintained
    incrementally and always equal their brute-force recomputation.
    """

    def __init__(self, chain: str, horizon_s: float = WINDOW_HORIZON_S) -> None:
        self.chain = chain
        self.horizon_s = horizon_s
        self._blocks: list[BlockHeader] = []
        self._hashes: set[str] = set()
        self._last_now: float | None = None
        self._n_regular = 0
        self._sum_tx_regular = 0
        self._sum_difficulty_all = 0
        self._miner_counts_all: Counter[str] = Counter()
        self._miner_counts_regular: Counter[str] = Counter()

    def __len__(self) -> int:
        return len(self._blocks)

    def insert(self, block: BlockHeader) -> None:
        """Add a block; duplicates (by hash) and blocks already older than the
        horizon are ignored, so contents always equal the filtered set of all
        inserted blocks."""
        if block.chain != self.chain:
            raise ChainMismatch(f"block for {block.chain!r} offered to window of {self.chain!r}")
        if block.hash in self._hashes:
            return
        if self._last_now is not None and block.timestamp < self._last_now - self.horizon_s:
            return
        bisect.insort(self._blocks, block, key=lambda b: (b.timestamp, b.height))
        self._hashes.add(block.hash)
        self._account(block, +1)

    def evict(self, now: float) -> None:
        """Drop blocks strictly older than ``now`` minus the horizon (closed
        boundary; ``now`` is clamped monotone)."""
        if self._last_now is not None and now < self._last_now:
            now = self._last_now
        self._last_now = now
        cutoff = now - self.horizon_s
        k = 0
        for b in self._blocks:
            if b.timestamp >= cutoff:
                break
            k += 1
        if k:
            for b in self._blocks[:k]:
                self._hashes.discard(b.hash)
                self._account(b, -1)
            del self._blocks[:k]

    def _account(self, block: BlockHeader, sign: int) -> None:
        self._sum_difficulty_all += sign * block.difficulty
        self._miner_counts_all[block.miner] += sign
        if self._miner_counts_all[block.miner] == 0:
            del self._miner_counts_all[block.miner]
        if not block.is_uncle:
            self._n_regular += sign
            self._sum_tx_regular += sign * block.tx_count
            self._miner_counts_regular[block.miner] += sign
            if self._miner_counts_regular[block.miner] == 0:
                del self._miner_counts_regular[block.miner]

    def snapshot(self) -> tuple[BlockHeader, ...]:
        return tuple(self._blocks)

    # Aggregates consumed by the metric layer.

    @property
    def regular_count(self) -> int:
        return self._n_regular

    @property
    def regular_tx_sum(self) -> int:
        return self._sum_tx_regular

    @property
    def difficulty_sum_all(self) -> int:
        return self._sum_difficulty_all

    def miner_counts(self, include_uncles: bool) -> Counter[str]:
        src = self._miner_counts_all if include_uncles else self._miner_counts_regular
        return Counter(src)

    def latest_regular_difficulty(self) -> int:
        for b in reversed(self._blocks):
            if not b.is_uncle:
                return b.difficulty
        raise EmptyWindow(f"no regular blocks in window of {self.chain!r}")

    def recent_fee_rates(self, count: int) -> list[Decimal]:
        """Fee rates of the most recent ``count`` regular blocks, oldest first."""
        rates: list[Decimal] = []
        for b in reversed(self._blocks):
            if not b.is_uncle:
                rates.append(b.fee_stats.median_fee_rate)
                if len(rates) == count:
                    break
        rates.reverse()
        return rates


@dataclass(frozen=True)
class DataRecord:
    """An application payload written to (or copied between) chains.

    ``record_id`` is the content identity (hash of payload and creation time),
    stable across copies; ``inclusion_time`` is set once mined.
    """

    record_id: str
    payload: bytes
    created_at: float
    chain_of_record: str
    inclusion_time: float | None = None
