"""Core orchestration: config, the event pipeline, replay driver, and daemon.

Every change flows through one serialized pipeline: a new block, quote update,
tick, policy update, or approval decision updates the affected chain's window,
recomputes its metric vector, re-ranks all chains, logs validation-rule edges,
and hands the ranking to the switchover manager. Replays drive the pipeline
from trace files under a virtual clock and are bit-for-bit deterministic; the
daemon drives it from simulated proxies under the wall clock and serves the
HTTP API.
"""

from __future__ import annotations

import heapq
import json
import logging
import threading
import time
from collections import deque
from dataclasses import dataclass, field
from datetime import datetime, timezone
from decimal import Decimal
from pathlib import Path
from queue import Queue
from typing import Callable, IO, Mapping

from .core import (
    BlockHeader,
    ChainDescriptor,
    ChainFamily,
    ConfigError,
    DataRecord,
    EmptyWindow,
    InvalidPayload,
    NoActiveChain,
    QuoteUnavailable,
    RollingWindow,
    UnknownChain,
    display_name,
)
from .metrics import METRIC_LABELS, MetricVector, compute_vector
from .proxies import (
    BlockchainProxy,
    SimChainConfig,
    SimChainProxy,
    TraceReplayProxy,
    read_block_trace,
    read_quote_trace,
    record_id_for,
)
from .selection import (
    RankingPolicy,
    RankingResult,
    SwitchMode,
    policy_from_document,
    rank,
)
from .switchover import (
    HistoryLog,
    SuggestionState,
    SwitchoverManager,
    SwitchoverSuggestion,
    TransferStrategyInput,
    evaluate_transfer,
    execute_transfer,
)

logger = logging.getLogger(__name__)

DEFAULT_QUOTE_STALENESS_S = 600.0
TICK_INTERVAL_S = 60.0


def format_log_ts(ts: float) -> str:
    """Listing-style timestamp: HH:MM:SS,mmm in UTC."""
    dt = datetime.fromtimestamp(ts, tz=timezone.utc)
    return dt.strftime("%H:%M:%S") + f",{int(round(ts * 1000)) % 1000:03d}"


# --------------------------------------------------------------------------
# Events
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class NewBlock:
    ts: float
    block: BlockHeader


@dataclass(frozen=True)
class QuoteUpdate:
    ts: float
    symbol: str
    usd: Decimal


@dataclass(frozen=True)
class Tick:
    ts: float


@dataclass(frozen=True)
class PolicyUpdate:
    ts: float
    policy: RankingPolicy


@dataclass(frozen=True)
class Approval:
    ts: float
    suggestion_id: str
    approve: bool


ChainEvent = NewBlock | QuoteUpdate | Tick | PolicyUpdate | Approval

# Merge priority at equal timestamps: quotes first so freshly priced vectors
# exist before the blocks that trigger rankings, policy updates after data,
# ticks last so the final flush sees everything.
_EVENT_PRIORITY = {QuoteUpdate: 0, NewBlock: 1, PolicyUpdate: 2, Approval: 3, Tick: 4}


# --------------------------------------------------------------------------
# Instance configuration
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ChainRuntimeConfig:
    descriptor: ChainDescriptor
    proxy_kind: str  # "sim" | "trace-replay"
    sim: SimChainConfig | None = None
    trace_path: Path | None = None
    user_fee: Decimal | None = None


@dataclass(frozen=True)
class QuotesConfig:
    kind: str  # "trace-replay" | "static"
    trace_path: Path | None = None
    static: dict[str, Decimal] = field(default_factory=dict)
    staleness_s: float = DEFAULT_QUOTE_STALENESS_S


@dataclass(frozen=True)
class ApiConfig:
    host: str = "127.0.0.1"
    port: int = 8640


@dataclass(frozen=True)
class ScheduledPolicyUpdate:
    at: float
    policy: RankingPolicy


@dataclass(frozen=True)
class InstanceConfig:
    chains: tuple[ChainRuntimeConfig, ...]
    policy: RankingPolicy
    quotes: QuotesConfig
    clock_mode: str = "virtual-replay"  # or "real-time"
    replay_start: float = 0.0
    replay_end: float | None = None
    api: ApiConfig = ApiConfig()
    history_log: Path | None = None
    active_chain: str | None = None
    policy_updates: tuple[ScheduledPolicyUpdate, ...] = ()

    def __post_init__(self) -> None:
        if not self.chains:
            raise ConfigError("config must register at least one chain")
        ids = [c.descriptor.id for c in self.chains]
        if len(set(ids)) != len(ids):
            raise ConfigError("chain ids must be unique")
        if self.active_chain is not None and self.active_chain not in ids:
            raise ConfigError(f"active_chain {self.active_chain!r} is not registered")


def _dec(value: object) -> Decimal:
    return value if isinstance(value, Decimal) else Decimal(str(value))


def config_from_document(doc: Mapping, base_dir: Path | None = None) -> InstanceConfig:
    """Build an InstanceConfig from the parsed JSON config document."""
    base = base_dir or Path(".")

    def resolve(p: str) -> Path:
        path = Path(p)
        return path if path.is_absolute() else base / path

    chains: list[ChainRuntimeConfig] = []
    for raw in doc.get("chains", []):
        try:
            descriptor = ChainDescriptor(
                id=raw["id"],
                family=ChainFamily(raw["family"]),
                currency_symbol=raw["currency_symbol"],
                reputation=int(raw["reputation"]),
                target_inclusion_blocks=int(raw.get("target_inclusion_blocks", 6)),
            )
            proxy = raw["proxy"]
            kind = proxy["kind"]
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"bad chain entry {raw!r}: {exc}") from exc
        sim = None
        trace_path = None
        if kind == "sim":
            sim = SimChainConfig(
                family=descriptor.family,
                mean_interblock_s=float(proxy["mean_interblock_s"]),
                miner_distribution={
                    k: float(v) for k, v in proxy["miner_distribution"].items()
                },
                difficulty=int(proxy["difficulty"]),
                fee_rate=_dec(proxy.get("fee_rate", 0)),
                tx_rate=float(proxy.get("tx_rate", 0.0)),
                uncle_rate=float(proxy.get("uncle_rate", 0.0)),
                seed=int(proxy.get("seed", 0)),
            )
        elif kind == "trace-replay":
            trace_path = resolve(proxy["path"])
        else:
            raise ConfigError(f"unknown proxy kind {kind!r}")
        chains.append(
            ChainRuntimeConfig(
                descriptor=descriptor,
                proxy_kind=kind,
                sim=sim,
                trace_path=trace_path,
                user_fee=_dec(raw["user_fee"]) if "user_fee" in raw else None,
            )
        )

    quotes_raw = doc.get("quotes", {"kind": "static", "static": {}})
    quotes = QuotesConfig(
        kind=quotes_raw.get("kind", "static"),
        trace_path=resolve(quotes_raw["path"]) if "path" in quotes_raw else None,
        static={k: _dec(v) for k, v in quotes_raw.get("static", {}).items()},
        staleness_s=float(quotes_raw.get("staleness_s", DEFAULT_QUOTE_STALENESS_S)),
    )

    clock = doc.get("clock", {})
    api_raw = doc.get("api", {})
    updates = tuple(
        ScheduledPolicyUpdate(at=float(u["at"]), policy=policy_from_document(u["policy"]))
        for u in doc.get("policy_updates", [])
    )

    try:
        policy = policy_from_document(doc["policy"])
    except KeyError:
        raise ConfigError("config is missing the policy section") from None

    return InstanceConfig(
        chains=tuple(chains),
        policy=policy,
        quotes=quotes,
        clock_mode=clock.get("mode", "virtual-replay"),
        replay_start=float(clock.get("replay_start", 0.0)),
        replay_end=float(clock["replay_end"]) if "replay_end" in clock else None,
        api=ApiConfig(
            host=api_raw.get("host", "127.0.0.1"),
            port=int(api_raw.get("port", 8640)),
        ),
        history_log=resolve(doc["history_log"]) if "history_log" in doc else None,
        active_chain=doc.get("active_chain"),
        policy_updates=updates,
    )


def load_config(path: Path) -> InstanceConfig:
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return config_from_document(doc, base_dir=path.parent)


# --------------------------------------------------------------------------
# Pipeline
# --------------------------------------------------------------------------

@dataclass
class _ChainState:
    descriptor: ChainDescriptor
    proxy: BlockchainProxy
    user_fee: Decimal | None
    window: RollingWindow
    vector: MetricVector | None = None
    vector_seq: int = 0
    last_block_at: float | None = None
    # per-metric validity from the previous ranking; None = never evaluated
    prev_validity: dict[str, bool | None] = field(
        default_factory=lambda: {k: None for k in METRIC_LABELS}
    )


def _format_violation(key: str, value: float) -> str:
    if key == "m7":
        return f"{value / 1e9:.1f} GH/s"
    if key == "m4":
        return f"{value:.1f} s"
    if key == "m5":
        return f"{value:.2f} tx/s"
    if key == "m6":
        return f"{value:.1f} %"
    if key == "m8":
        return f"{int(value)}"
    return f"{value} USD"


class Pipeline:
    """Single-writer event processor holding all runtime state.

    Readers take immutable snapshots (``latest_ranking``, ``vectors``); the
    daemon serializes writers with a lock, the replay driver is single-threaded
    by construction.
    """

    def __init__(
        self,
        config: InstanceConfig,
        history_sink: IO[str] | None = None,
        log_sink: Callable[[str], None] | None = None,
    ) -> None:
        self.config = config
        self.policy = config.policy
        self.now = config.replay_start
        self.active_chain = config.active_chain
        self._seq = 0
        self._log_sink = log_sink
        self._quotes: dict[str, tuple[Decimal, float]] = {}
        self._subscribers: list[Queue] = []
        self._recent_events: deque[dict] = deque(maxlen=64)
        self.latest_ranking: RankingResult | None = None
        self.benefit_history: list[tuple[float, str, int, bool, bool]] = []
        self.hashrate_history: list[tuple[float, str, float]] = []

        self.manager = SwitchoverManager(HistoryLog(history_sink), log=self._log)
        self.manager.set_suppression_period(self.policy.suppression_period_s)

        self.chains: dict[str, _ChainState] = {}
        for entry in config.chains:
            proxy: BlockchainProxy
            if entry.proxy_kind == "sim":
                assert entry.sim is not None
                proxy = SimChainProxy(entry.descriptor, entry.sim)
            else:
                assert entry.trace_path is not None
                proxy = TraceReplayProxy(entry.descriptor, entry.trace_path)
            self.chains[entry.descriptor.id] = _ChainState(
                descriptor=entry.descriptor,
                proxy=proxy,
                user_fee=entry.user_fee,
                window=RollingWindow(entry.descriptor.id),
            )

    # -- logging / eventing ---------------------------------------------------

    def _log(self, ts: float, message: str) -> None:
        line = f"{format_log_ts(ts)} - {message}"
        if self._log_sink is not None:
            self._log_sink(line)
        logger.info(line)
        self._publish({"ts": ts, "kind": "log", "message": message})

    def subscribe(self) -> Queue:
        """New event queue, pre-filled with the recent-event buffer."""
        q: Queue = Queue()
        for summary in self._recent_events:
            q.put(summary)
        self._subscribers.append(q)
        return q

    def unsubscribe(self, q: Queue) -> None:
        if q in self._subscribers:
            self._subscribers.remove(q)

    def _publish(self, summary: dict) -> None:
        self._recent_events.append(summary)
        for q in self._subscribers:
            q.put(summary)

    # -- event processing -------------------------------------------------

    def process_event(self, event: ChainEvent) -> None:
        self._seq += 1
        self.now = max(self.now, event.ts)

        if isinstance(event, NewBlock):
            self._on_block(event.block)
        elif isinstance(event, QuoteUpdate):
            self._quotes[event.symbol] = (event.usd, event.ts)
            for state in self.chains.values():
                if state.descriptor.currency_symbol == event.symbol:
                    self._rebuild_vector(state)
            self._publish({"ts": event.ts, "kind": "quote", "symbol": event.symbol,
                           "usd": float(event.usd)})
        elif isinstance(event, Tick):
            for state in self.chains.values():
                state.window.evict(self.now)
                self._rebuild_vector(state)
        elif isinstance(event, PolicyUpdate):
            self.policy = event.policy
            self.manager.set_suppression_period(event.policy.suppression_period_s)
            self._log(self.now, "Policy updated")
        elif isinstance(event, Approval):
            self._on_approval(event)

        self._evaluate()

    def _on_block(self, block: BlockHeader) -> None:
        if block.chain not in self.chains:
            raise UnknownChain(f"block for unregistered chain {block.chain!r}")
        state = self.chains[block.chain]
        state.window.insert(block)
        state.window.evict(self.now)
        state.last_block_at = block.timestamp
        self._rebuild_vector(state)
        if state.vector is not None:
            rate_ghs = state.vector.m7_network_hashrate_hps / 1e9
            self._log(
                self.now,
                f"{state.descriptor.display_name} network hash rate: {rate_ghs:.1f} GH/s",
            )
        self._publish({"ts": block.timestamp, "kind": "block", "chain": block.chain,
                       "height": block.height, "is_uncle": block.is_uncle})

    def _rebuild_vector(self, state: _ChainState) -> None:
        quote = self._quotes.get(state.descriptor.currency_symbol)
        if quote is None or len(state.window) == 0:
            state.vector = None
            return
        try:
            state.vector = compute_vector(
                state.window, state.descriptor, quote[0], self.now, user_fee=state.user_fee
            )
        except (EmptyWindow, QuoteUnavailable):
            # e.g. a window holding only uncles; the chain simply stays unranked
            state.vector = None
            return
        state.vector_seq = self._seq
        self.hashrate_history.append(
            (self.now, state.descriptor.id, state.vector.m7_network_hashrate_hps)
        )

    def _stale_chains(self) -> set[str]:
        stale: set[str] = set()
        for cid, state in self.chains.items():
            quote = self._quotes.get(state.descriptor.currency_symbol)
            if quote is None or self.now - quote[1] > self.config.quotes.staleness_s:
                stale.add(cid)
        return stale

    def _evaluate(self) -> None:
        """Re-rank, log validity edges, and let the switchover manager react."""
        vectors = [s.vector for s in self.chains.values() if s.vector is not None]
        ranking = rank(
            self.policy, vectors, active=self.active_chain,
            stale=frozenset(self._stale_chains()), now=self.now,
        )
        self.latest_ranking = ranking
        for row in ranking.per_chain:
            self.benefit_history.append(
                (self.now, row.chain, row.benefit, row.eligible, row.chain == ranking.winner)
            )
            self._log_validity_edges(row.chain, row.validation.as_dict())
        self._publish({"ts": self.now, "kind": "ranking", "winner": ranking.winner})

        if self.active_chain is None:
            if ranking.winner is not None:
                self.active_chain = ranking.winner
                self._log(self.now, f"Switchover suggestion: {display_name(ranking.winner)}")
            return

        suggestion = self.manager.consider(self.now, ranking, self.active_chain)
        if (
            suggestion is not None
            and suggestion.state == SuggestionState.PENDING
            and self.policy.mode == SwitchMode.AUTO_SWITCH
        ):
            self.manager.approve(suggestion.id, self.now)
            self._execute(suggestion)

    def _log_validity_edges(self, chain: str, flags: Mapping[str, bool]) -> None:
        state = self.chains[chain]
        vector = state.vector
        for key, label in METRIC_LABELS.items():
            new = flags[key]
            prev = state.prev_validity[key]
            if prev is True and new is False and vector is not None:
                value = float(vector.scalar(key))
                self._log(self.now, f"{label} ({_format_violation(key, value)}) violated")
            state.prev_validity[key] = new

    # -- switchover -----------------------------------------------------------

    def _on_approval(self, event: Approval) -> None:
        if not event.approve:
            suggestion = self.manager.reject(event.suggestion_id, self.now)
            self._log(self.now, f"Switchover rejected: {suggestion.id}")
            return
        suggestion = self.manager.approve(event.suggestion_id, self.now)
        self._execute(suggestion)

    def _execute(self, suggestion: SwitchoverSuggestion) -> None:
        current_row = suggestion.snapshot.row(suggestion.from_chain)
        suggested_row = suggestion.snapshot.row(suggestion.to_chain)
        if current_row is not None and suggested_row is not None:
            strategy_input = TransferStrategyInput(
                current_weighted_scores=current_row.weighted_scores,
                current_validation=current_row.validation,
                suggested_weighted_scores=suggested_row.weighted_scores,
                suggested_validation=suggested_row.validation,
            )
            suggestion.transfer_range = evaluate_transfer(
                self.policy.transfer_strategy, strategy_input, self.now
            )
        self.manager.begin_execution(suggestion.id, self.now)
        # Routing flips before copying: subsequent writes land on the new chain.
        self.active_chain = suggestion.to_chain
        report = execute_transfer(
            suggestion,
            self.chains[suggestion.from_chain].proxy,
            self.chains[suggestion.to_chain].proxy,
            self.now,
        )
        self.manager.finish_execution(suggestion.id, self.now, report)
        self._log(
            self.now,
            f"Switchover executed: {display_name(suggestion.from_chain)} -> "
            f"{display_name(suggestion.to_chain)} "
            f"({report.records_copied} records copied, {report.skipped_duplicates} skipped)",
        )

    # -- record interface -------------------------------------------------

    def write_record(self, payload: bytes, fee: Decimal | None = None) -> DataRecord:
        """Write a payload to the active chain; requires it to be eligible."""
        if not payload:
            raise InvalidPayload("payload must not be empty")
        if self.active_chain is None:
            raise NoActiveChain("no active chain selected yet")
        row = self.latest_ranking.row(self.active_chain) if self.latest_ranking else None
        if row is None or not row.eligible:
            raise NoActiveChain(f"active chain {self.active_chain!r} is not eligible")
        proxy = self.chains[self.active_chain].proxy
        record = proxy.submit_record(
            payload,
            fee_rate=fee,
            record_id=record_id_for(payload, self.now),
            created_at=self.now,
            now=self.now,
        )
        self._publish({"ts": self.now, "kind": "record", "record_id": record.record_id,
                       "chain": self.active_chain})
        return record

    def read_records(self, start: float, end: float, chain: str | None = None) -> list[DataRecord]:
        cid = chain or self.active_chain
        if cid is None:
            raise NoActiveChain("no active chain selected yet")
        if cid not in self.chains:
            raise UnknownChain(f"unknown chain {cid!r}")
        return self.chains[cid].proxy.read_records(start, end)

    # -- snapshots for the API ---------------------------------------------

    def chain_overview(self) -> list[dict]:
        stale = self._stale_chains()
        out = []
        for cid, state in self.chains.items():
            out.append(
                {
                    "id": cid,
                    "display_name": state.descriptor.display_name,
                    "family": state.descriptor.family.value,
                    "currency_symbol": state.descriptor.currency_symbol,
                    "reputation": state.descriptor.reputation,
                    "target_inclusion_blocks": state.descriptor.target_inclusion_blocks,
                    "stale": cid in stale,
                    "window_blocks": len(state.window),
                    "active": cid == self.active_chain,
                    "last_block_at": state.last_block_at,
                }
            )
        return out


# --------------------------------------------------------------------------
# Replay driver
# --------------------------------------------------------------------------

def _validate_monotone(path: Path, events: list[tuple[float, int, int, ChainEvent]]) -> None:
    prev = None
    for ts, _, lineno, _ in events:
        if prev is not None and ts < prev:
            raise ConfigError(f"{path}:{lineno}: timestamps must be non-decreasing")
        prev = ts


def _gather_replay_events(config: InstanceConfig, until: float | None) -> list[ChainEvent]:
    """Collect block/quote/policy events from all sources, merged by timestamp.

    Within one trace file the original order is kept; across sources events
    merge by (timestamp, kind priority, source order).
    """
    sources: list[list[tuple[float, int, int, ChainEvent]]] = []

    seen_traces: set[Path] = set()
    for entry in config.chains:
        if entry.proxy_kind == "trace-replay":
            assert entry.trace_path is not None
            if entry.trace_path in seen_traces:
                continue
            seen_traces.add(entry.trace_path)
            registered = {c.descriptor.id for c in config.chains}
            events = []
            for lineno, block in read_block_trace(entry.trace_path):
                if block.chain not in registered:
                    raise ConfigError(
                        f"{entry.trace_path}:{lineno}: block for unregistered chain "
                        f"{block.chain!r}"
                    )
                events.append(
                    (block.timestamp, _EVENT_PRIORITY[NewBlock], lineno,
                     NewBlock(ts=block.timestamp, block=block))
                )
            _validate_monotone(entry.trace_path, events)
            sources.append(events)

    end = until if until is not None else config.replay_end
    for entry in config.chains:
        if entry.proxy_kind == "sim":
            if end is None:
                raise ConfigError("replaying sim chains requires clock.replay_end")
            proxy = SimChainProxy(entry.descriptor, entry.sim)  # generation-only instance
            events = [
                (b.timestamp, _EVENT_PRIORITY[NewBlock], i, NewBlock(ts=b.timestamp, block=b))
                for i, b in enumerate(proxy.generate_until(config.replay_start, end))
            ]
            sources.append(events)

    if config.quotes.kind == "trace-replay":
        assert config.quotes.trace_path is not None
        events = []
        for lineno, ts, symbol, usd in read_quote_trace(config.quotes.trace_path):
            events.append(
                (ts, _EVENT_PRIORITY[QuoteUpdate], lineno,
                 QuoteUpdate(ts=ts, symbol=symbol, usd=usd))
            )
        _validate_monotone(config.quotes.trace_path, events)
        sources.append(events)
    else:
        sources.append(
            [
                (config.replay_start, _EVENT_PRIORITY[QuoteUpdate], i,
                 QuoteUpdate(ts=config.replay_start, symbol=symbol, usd=usd))
                for i, (symbol, usd) in enumerate(sorted(config.quotes.static.items()))
            ]
        )

    sources.append(
        [
            (u.at, _EVENT_PRIORITY[PolicyUpdate], i, PolicyUpdate(ts=u.at, policy=u.policy))
            for i, u in enumerate(config.policy_updates)
        ]
    )

    merged = [item[3] for item in heapq.merge(*sources, key=lambda it: (it[0], it[1], it[2]))]
    if until is not None:
        merged = [ev for ev in merged if ev.ts <= until]
    return merged


@dataclass
class ReplayResult:
    pipeline: Pipeline
    events_processed: int
    elapsed_s: float


def run_replay(
    config: InstanceConfig,
    until: float | None = None,
    log_sink: Callable[[str], None] | None = None,
) -> ReplayResult:
    """Run a virtual-time replay to completion (or ``until``) and return the
    finished pipeline."""
    events = _gather_replay_events(config, until)
    history_fh: IO[str] | None = None
    if config.history_log is not None:
        config.history_log.parent.mkdir(parents=True, exist_ok=True)
        history_fh = open(config.history_log, "w", encoding="utf-8")
    started = time.perf_counter()
    try:
        pipeline = Pipeline(config, history_sink=history_fh, log_sink=log_sink)
        for event in events:
            pipeline.process_event(event)
        end = until if until is not None else config.replay_end
        if end is None:
            end = max((ev.ts for ev in events), default=config.replay_start)
        pipeline.process_event(Tick(ts=end))
    finally:
        if history_fh is not None:
            history_fh.close()
    return ReplayResult(
        pipeline=pipeline,
        events_processed=len(events) + 1,
        elapsed_s=time.perf_counter() - started,
    )


# --------------------------------------------------------------------------
# Real-time daemon
# --------------------------------------------------------------------------

class Daemon:
    """Hosts a pipeline under the wall clock: sim proxies feed block events
    from producer threads, a tick fires every 60 s, and API mutations are
    serialized through the same lock as everything else."""

    def __init__(self, config: InstanceConfig, log_sink: Callable[[str], None] | None = None):
        self._history_fh: IO[str] | None = None
        if config.history_log is not None:
            config.history_log.parent.mkdir(parents=True, exist_ok=True)
            self._history_fh = open(config.history_log, "a", encoding="utf-8")
        start = time.time()
        config = InstanceConfig(
            chains=config.chains,
            policy=config.policy,
            quotes=config.quotes,
            clock_mode="real-time",
            replay_start=start,
            replay_end=None,
            api=config.api,
            history_log=config.history_log,
            active_chain=config.active_chain,
            policy_updates=config.policy_updates,
        )
        self.config = config
        self.pipeline = Pipeline(config, history_sink=self._history_fh, log_sink=log_sink)
        self._lock = threading.Lock()
        self._stop = threading.Event()
        self._threads: list[threading.Thread] = []

    def submit(self, event: ChainEvent) -> None:
        with self._lock:
            self.pipeline.process_event(event)

    def write_record(self, payload: bytes, fee: Decimal | None = None) -> DataRecord:
        with self._lock:
            self.pipeline.now = max(self.pipeline.now, time.time())
            return self.pipeline.write_record(payload, fee)

    def now(self) -> float:
        return time.time()

    def start(self) -> None:
        if self.config.quotes.kind == "static":
            for symbol, usd in sorted(self.config.quotes.static.items()):
                self.submit(QuoteUpdate(ts=time.time(), symbol=symbol, usd=usd))
        for cid, state in self.pipeline.chains.items():
            if isinstance(state.proxy, SimChainProxy):
                t = threading.Thread(
                    target=self._produce_blocks, args=(state.proxy,), daemon=True,
                    name=f"sim-{cid}",
                )
                t.start()
                self._threads.append(t)
        ticker = threading.Thread(target=self._tick_loop, daemon=True, name="ticker")
        ticker.start()
        self._threads.append(ticker)

    def stop(self) -> None:
        self._stop.set()

    def _produce_blocks(self, proxy: SimChainProxy) -> None:
        proxy._clock = time.time()
        while not self._stop.is_set():
            last = proxy._clock
            blocks = proxy.next_blocks()
            delay = max(0.0, blocks[0].timestamp - last)
            if self._stop.wait(delay):
                return
            for block in blocks:
                self.submit(NewBlock(ts=block.timestamp, block=block))

    def _tick_loop(self) -> None:
        while not self._stop.wait(TICK_INTERVAL_S):
            now = time.time()
            self.submit(Tick(ts=now))
            if self.config.quotes.kind == "static":
                for symbol, usd in sorted(self.config.quotes.static.items()):
                    self.submit(QuoteUpdate(ts=now, symbol=symbol, usd=usd))

    def close(self) -> None:
        self.stop()
        if self._history_fh is not None:
            self._history_fh.close()
