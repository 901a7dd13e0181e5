"""Chain proxies: cost models, fee estimation, simulated chains, quote feeds.

A proxy translates one chain's behaviour into the neutral types of
:mod:`chainswitch.core` so the rest of the system never touches
family-specific detail. Only simulated proxies are built here; the JSON-line
trace formats double as the wire contract a real-node proxy would have to
satisfy (see README).

Money arithmetic is exact decimal fixed-point: satoshi and wei quantities stay
integral, USD results are quantized to 8 fractional digits (round-half-even)
at the final conversion only.
"""

from __future__ import annotations

import hashlib
import json
import math
import statistics
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal
from pathlib import Path
from typing import Iterator

from .core import (
    BlockHeader,
    ChainDescriptor,
    ChainFamily,
    ConfigError,
    DataRecord,
    EmptyWindow,
    FeeStats,
    GasLimitExceeded,
    InvalidPayload,
    QuoteUnavailable,
    RollingWindow,
)

# Bitcoin OP_RETURN carrier: 80 data bytes ride in a 282-byte transaction;
# a shorter final chunk shrinks the transaction by the missing data bytes.
OP_RETURN_CHUNK_BYTES = 80
OP_RETURN_TX_BYTES = 282

# Ethereum-family intrinsic costs: 21,000 gas per transaction plus 68 gas per
# non-zero calldata byte; the default block gas limit caps one transaction.
ETH_TX_BASE_GAS = 21_000
ETH_NONZERO_BYTE_GAS = 68
DEFAULT_BLOCK_GAS_LIMIT = 8_000_000

SATOSHI_PER_COIN = Decimal(10) ** 8
WEI_PER_COIN = Decimal(10) ** 18
_USD_QUANTUM = Decimal("0.00000001")


def _usd(value: Decimal) -> Decimal:
    return value.quantize(_USD_QUANTUM, rounding=ROUND_HALF_EVEN)


def btc_write_cost_bytes(payload_len: int) -> int:
    """Total transaction bytes to store ``payload_len`` bytes via OP_RETURN carriers."""
    if payload_len < 1:
        raise InvalidPayload("payload must be at least 1 byte")
    full, rest = divmod(payload_len, OP_RETURN_CHUNK_BYTES)
    total = full * OP_RETURN_TX_BYTES
    if rest:
        total += OP_RETURN_TX_BYTES - (OP_RETURN_CHUNK_BYTES - rest)
    return total


def btc_write_cost_usd(payload_len: int, fee_rate: Decimal, btc_usd: Decimal) -> Decimal:
    """USD cost of writing ``payload_len`` bytes at ``fee_rate`` satoshi/byte."""
    sat = Decimal(btc_write_cost_bytes(payload_len)) * Decimal(fee_rate)
    return _usd(sat / SATOSHI_PER_COIN * Decimal(btc_usd))


def eth_write_cost_gas(
    payload_len: int,
    nonzero_fraction: float = 1.0,
    block_gas_limit: int = DEFAULT_BLOCK_GAS_LIMIT,
) -> int:
    """Gas for one transaction carrying ``payload_len`` data bytes.

    ``nonzero_fraction`` scales the per-byte cost; 1.0 is the worst case where
    every byte is non-zero.
    """
    if payload_len < 1:
        raise InvalidPayload("payload must be at least 1 byte")
    gas = ETH_TX_BASE_GAS + ETH_NONZERO_BYTE_GAS * round(payload_len * nonzero_fraction)
    if gas > block_gas_limit:
        raise GasLimitExceeded(f"{gas} gas exceeds block gas limit {block_gas_limit}")
    return gas


def eth_write_cost_usd(gas: int, gas_price_wei: Decimal, coin_usd: Decimal) -> Decimal:
    """USD cost of ``gas`` at ``gas_price_wei``, with the coin quoted at ``coin_usd``."""
    wei = Decimal(gas) * Decimal(gas_price_wei)
    return _usd(wei / WEI_PER_COIN * Decimal(coin_usd))


def write_cost_1kb_usd(
    family: ChainFamily, fee_rate: Decimal, quote_usd: Decimal
) -> Decimal:
    """USD cost of writing one kilobyte, dispatched on chain family."""
    if family is ChainFamily.BITCOIN_LIKE:
        return btc_write_cost_usd(1024, fee_rate, quote_usd)
    return eth_write_cost_usd(eth_write_cost_gas(1024, 1.0), fee_rate, quote_usd)


def estimate_fee(window: RollingWindow, target_blocks: int) -> FeeStats:
    """Median fee rate over the latest ``target_blocks`` regular blocks.

    Fewer blocks than requested fall back to the median over what is present.
    """
    rates = window.recent_fee_rates(target_blocks)
    if not rates:
        raise EmptyWindow(f"cannot estimate fees: no blocks for {window.chain!r}")
    return FeeStats(Decimal(statistics.median(rates)))


# --------------------------------------------------------------------------
# Record chunking
# --------------------------------------------------------------------------

def record_id_for(payload: bytes, created_at: float) -> str:
    digest = hashlib.sha256()
    digest.update(repr(created_at).encode())
    digest.update(payload)
    return digest.hexdigest()[:32]


def chunk_payload(payload: bytes, family: ChainFamily,
                  block_gas_limit: int = DEFAULT_BLOCK_GAS_LIMIT) -> list[bytes]:
    """Split a payload into carrier-transaction chunks for the given family.

    Bitcoin-family carriers hold 80 bytes each (chunk ordering is carrier
    metadata, not payload framing, so the carrier count matches the byte cost
    model). Ethereum-family payloads ride in a single transaction data field
    as long as the intrinsic gas fits the block gas limit.
    """
    if not payload:
        raise InvalidPayload("payload must not be empty")
    if family is ChainFamily.BITCOIN_LIKE:
        return [
            payload[i : i + OP_RETURN_CHUNK_BYTES]
            for i in range(0, len(payload), OP_RETURN_CHUNK_BYTES)
        ]
    eth_write_cost_gas(len(payload), 1.0, block_gas_limit)  # raises if oversized
    return [payload]


# --------------------------------------------------------------------------
# Proxy interface and the simulated implementations
# --------------------------------------------------------------------------

@dataclass
class _StoredRecord:
    record: DataRecord
    chunks: list[bytes]


class BlockchainProxy:
    """Interface every chain adapter provides to the core logic.

    Implementations must guarantee that every emitted block carries this
    proxy's chain id and that a submitted record eventually reaches inclusion
    or a terminal failure.
    """

    def __init__(self, descriptor: ChainDescriptor) -> None:
        self._descriptor = descriptor
        self._records: dict[str, _StoredRecord] = {}

    def chain_descriptor(self) -> ChainDescriptor:
        return self._descriptor

    def subscribe_blocks(self) -> Iterator[BlockHeader]:
        raise NotImplementedError

    def estimate_fee(self, window: RollingWindow, target_blocks: int | None = None) -> FeeStats:
        return estimate_fee(window, target_blocks or self._descriptor.target_inclusion_blocks)

    def submit_record(
        self,
        payload: bytes,
        fee_rate: Decimal | None = None,
        *,
        record_id: str | None = None,
        created_at: float | None = None,
        now: float = 0.0,
    ) -> DataRecord:
        """Store a record on the simulated chain; included at ``now``.

        ``record_id``/``created_at`` are passed when copying an existing
        record so identity survives the transfer.
        """
        if not payload:
            raise InvalidPayload("payload must not be empty")
        created = now if created_at is None else created_at
        rid = record_id or record_id_for(payload, created)
        if rid in self._records:
            return self._records[rid].record
        chunks = chunk_payload(payload, self._descriptor.family)
        record = DataRecord(
            record_id=rid,
            payload=payload,
            created_at=created,
            chain_of_record=self._descriptor.id,
            inclusion_time=now,
        )
        self._records[rid] = _StoredRecord(record=record, chunks=chunks)
        return record

    def read_records(self, start: float, end: float) -> list[DataRecord]:
        """Records whose inclusion time falls inside [start, end], oldest first."""
        hits = [
            s.record
            for s in self._records.values()
            if s.record.inclusion_time is not None and start <= s.record.inclusion_time <= end
        ]
        hits.sort(key=lambda r: (r.inclusion_time, r.record_id))
        return hits

    def existing_record_ids(self) -> set[str]:
        return set(self._records)

    def carrier_count(self, record_id: str) -> int:
        return len(self._records[record_id].chunks)


@dataclass(frozen=True)
class SimChainConfig:
    """Parameters of a deterministic simulated chain."""

    family: ChainFamily
    mean_interblock_s: float
    miner_distribution: dict[str, float]
    difficulty: int
    fee_rate: Decimal
    tx_rate: float = 0.0
    uncle_rate: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.mean_interblock_s <= 0:
            raise ConfigError("mean_interblock_s must be positive")
        total = sum(self.miner_distribution.values())
        if abs(total - 1.0) > 1e-9:
            raise ConfigError(f"miner shares must sum to 1, got {total}")
        if not 0.0 <= self.uncle_rate < 1.0:
            raise ConfigError("uncle_rate must be in [0, 1)")
        if self.family is ChainFamily.BITCOIN_LIKE and self.uncle_rate != 0.0:
            raise ConfigError("uncle_rate must be 0 for bitcoin-like chains")


class CounterRng:
    """Counter-based deterministic generator: sha256(seed, counter) -> U(0,1).

    Platform-independent, so identical configs replay bit-identically.
    """

    def __init__(self, seed: int) -> None:
        self._seed = seed.to_bytes(8, "big", signed=False)
        self._counter = 0

    def uniform(self) -> float:
        digest = hashlib.sha256(self._seed + self._counter.to_bytes(8, "big")).digest()
        self._counter += 1
        return int.from_bytes(digest[:8], "big") / 2**64

    def exponential(self, mean: float) -> float:
        return -mean * math.log(1.0 - self.uniform())

    def poisson(self, lam: float) -> int:
        # Knuth's product method; fine for the modest rates simulated here.
        limit = math.exp(-lam)
        k, p = 0, 1.0
        while True:
            p *= self.uniform()
            if p <= limit:
                return k
            k += 1

    def choice(self, weighted: dict[str, float]) -> str:
        u = self.uniform()
        acc = 0.0
        last = next(iter(weighted))
        for key, share in weighted.items():
            acc += share
            last = key
            if u < acc:
                return key
        return last


class SimChainProxy(BlockchainProxy):
    """Deterministic simulated chain driven by a counter-based generator.

    Identical (config, seed) produce bit-identical block streams. Submitted
    records are mined instantly, which trivially satisfies the
    eventual-inclusion contract and keeps replays deterministic.
    """

    def __init__(self, descriptor: ChainDescriptor, config: SimChainConfig) -> None:
        super().__init__(descriptor)
        self.config = config
        self._rng = CounterRng(config.seed)
        self._height = 0
        self._clock = 0.0

    def _hash(self, height: int, uncle: bool) -> str:
        tag = f"{self.config.seed}:{self._descriptor.id}:{height}:{'u' if uncle else 'b'}"
        return hashlib.sha256(tag.encode()).hexdigest()

    def next_blocks(self) -> list[BlockHeader]:
        """Advance one inter-arrival step and return the block (plus any uncle)."""
        dt = self._rng.exponential(self.config.mean_interblock_s)
        self._clock += dt
        tx_count = self._rng.poisson(self.config.tx_rate * dt) if self.config.tx_rate else 0
        block = BlockHeader(
            chain=self._descriptor.id,
            height=self._height,
            hash=self._hash(self._height, uncle=False),
            timestamp=self._clock,
            miner=self._rng.choice(self.config.miner_distribution),
            difficulty=self.config.difficulty,
            tx_count=tx_count,
            is_uncle=False,
            fee_stats=FeeStats(self.config.fee_rate),
        )
        out = [block]
        if self.config.uncle_rate and self._rng.uniform() < self.config.uncle_rate:
            out.append(
                BlockHeader(
                    chain=self._descriptor.id,
                    height=self._height,
                    hash=self._hash(self._height, uncle=True),
                    timestamp=self._clock,
                    miner=self._rng.choice(self.config.miner_distribution),
                    difficulty=self.config.difficulty,
                    tx_count=0,
                    is_uncle=True,
                    fee_stats=FeeStats(self.config.fee_rate),
                )
            )
        self._height += 1
        return out

    def subscribe_blocks(self) -> Iterator[BlockHeader]:
        while True:
            yield from self.next_blocks()

    def generate_until(self, start: float, end: float) -> list[BlockHeader]:
        """All blocks with timestamps in (start, end], shifted to start at ``start``."""
        self._clock = start
        out: list[BlockHeader] = []
        while True:
            blocks = self.next_blocks()
            if blocks[0].timestamp > end:
                return out
            out.extend(blocks)


class TraceReplayProxy(BlockchainProxy):
    """Proxy whose block stream comes from a recorded trace file."""

    def __init__(self, descriptor: ChainDescriptor, trace_path: Path) -> None:
        super().__init__(descriptor)
        self.trace_path = Path(trace_path)

    def subscribe_blocks(self) -> Iterator[BlockHeader]:
        for _, block in read_block_trace(self.trace_path):
            if block.chain == self._descriptor.id:
                yield block


# --------------------------------------------------------------------------
# Quote feeds
# --------------------------------------------------------------------------

class QuoteFeed:
    """Supplies the USD market price for a currency symbol. Thread-safe."""

    def quote(self, symbol: str) -> Decimal:
        raise NotImplementedError


class StaticQuoteFeed(QuoteFeed):
    def __init__(self, quotes: dict[str, Decimal]) -> None:
        self._quotes = {k: Decimal(v) for k, v in quotes.items()}
        for symbol, usd in self._quotes.items():
            if usd < 0 or not usd.is_finite():
                raise ConfigError(f"quote for {symbol} must be finite and non-negative")

    def quote(self, symbol: str) -> Decimal:
        try:
            return self._quotes[symbol]
        except KeyError:
            raise QuoteUnavailable(f"no quote available for {symbol}") from None


# --------------------------------------------------------------------------
# Trace files (line-delimited JSON)
# --------------------------------------------------------------------------

_BLOCK_FIELDS = (
    "chain", "height", "hash", "timestamp", "miner",
    "difficulty", "tx_count", "is_uncle", "median_fee_rate",
)


def block_to_trace_line(block: BlockHeader) -> str:
    fee = block.fee_stats.median_fee_rate
    fee_json: int | float = int(fee) if fee == fee.to_integral_value() else float(fee)
    return json.dumps(
        {
            "chain": block.chain,
            "height": block.height,
            "hash": block.hash,
            "timestamp": block.timestamp,
            "miner": block.miner,
            "difficulty": block.difficulty,
            "tx_count": block.tx_count,
            "is_uncle": block.is_uncle,
            "median_fee_rate": fee_json,
        },
        separators=(",", ":"),
        sort_keys=True,
    )


def read_block_trace(path: Path) -> Iterator[tuple[int, BlockHeader]]:
    """Yield (line number, block) pairs; malformed lines raise ConfigError."""
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                raw = json.loads(line, parse_float=Decimal)
                yield lineno, BlockHeader(
                    chain=raw["chain"],
                    height=int(raw["height"]),
                    hash=str(raw["hash"]),
                    timestamp=float(raw["timestamp"]),
                    miner=str(raw["miner"]),
                    difficulty=int(raw["difficulty"]),
                    tx_count=int(raw["tx_count"]),
                    is_uncle=bool(raw["is_uncle"]),
                    fee_stats=FeeStats(Decimal(raw["median_fee_rate"])),
                )
            except (KeyError, ValueError, TypeError) as exc:
                raise ConfigError(f"{path}:{lineno}: malformed block trace line ({exc})") from exc


def read_quote_trace(path: Path) -> Iterator[tuple[int, float, str, Decimal]]:
    """Yield (line number, timestamp, symbol, usd) from a quote trace."""
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                raw = json.loads(line, parse_float=Decimal)
                yield lineno, float(raw["timestamp"]), str(raw["symbol"]), Decimal(raw["usd"])
            except (KeyError, ValueError, TypeError) as exc:
                raise ConfigError(f"{path}:{lineno}: malformed quote trace line ({exc})") from exc


def quote_to_trace_line(timestamp: float, symbol: str, usd: Decimal) -> str:
    usd_json: int | float = int(usd) if usd == usd.to_integral_value() else float(usd)
    return json.dumps(
        {"timestamp": timestamp, "symbol": symbol, "usd": usd_json},
        separators=(",", ":"),
        sort_keys=True,
    )
