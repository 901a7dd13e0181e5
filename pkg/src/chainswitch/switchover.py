"""Switchover orchestration: suggestions, suppression, approval, data transfer.

A switchover routes all subsequent operations to another chain; historical
records inside a strategy-chosen date range are copied (never moved — nothing
is ever deleted from the source chain). Suggestions flow through a small state
machine::

    Pending -> Approved -> Executing -> Executed | Failed
    Pending -> Rejected
    Suppressed (terminal, created when the suppression period swallows one)

Every state transition is appended to a line-delimited JSON history log so the
whole lifecycle can be audited and replayed byte-identically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Callable, IO

from .core import ChainswitchError, ProxyUnavailable, UnknownStrategy
from .proxies import BlockchainProxy
from .selection import RankingResult, TransferStrategy, ValidationResult


class SuggestionState(Enum):
    PENDING = "pending"
    APPROVED = "approved"
    REJECTED = "rejected"
    EXECUTING = "executing"
    EXECUTED = "executed"
    SUPPRESSED = "suppressed"
    FAILED = "failed"


_TRANSITIONS: dict[SuggestionState, set[SuggestionState]] = {
    SuggestionState.PENDING: {SuggestionState.APPROVED, SuggestionState.REJECTED},
    SuggestionState.APPROVED: {SuggestionState.EXECUTING},
    SuggestionState.EXECUTING: {SuggestionState.EXECUTED, SuggestionState.FAILED},
    SuggestionState.FAILED: {SuggestionState.EXECUTING},
    SuggestionState.REJECTED: set(),
    SuggestionState.EXECUTED: set(),
    SuggestionState.SUPPRESSED: set(),
}


class IllegalTransition(ChainswitchError):
    pass


class UnknownSuggestion(ChainswitchError):
    pass


@dataclass
class SwitchoverSuggestion:
    id: str
    from_chain: str
    to_chain: str
    created_at: float
    snapshot: RankingResult
    state: SuggestionState = SuggestionState.PENDING
    transfer_range: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        if self.from_chain == self.to_chain:
            raise ChainswitchError("switchover source and destination must differ")


@dataclass(frozen=True)
class TransferStrategyInput:
    """Exactly the data handed to a transfer strategy: both chains' weighted
    scores and validation results."""

    current_weighted_scores: dict[str, int]
    current_validation: ValidationResult
    suggested_weighted_scores: dict[str, int]
    suggested_validation: ValidationResult


def evaluate_transfer(
    strategy: TransferStrategy, input_: TransferStrategyInput, now: float
) -> tuple[float, float] | None:
    """Date range of records to copy, or None for no transfer.

    Built-ins: ``none`` copies nothing; ``all`` copies the full history;
    ``last-days`` copies the trailing k days; ``on-trust-loss`` copies the
    full history when the trigger includes a miner-share (m6) or hash-rate
    (m7) violation on the current chain, else the trailing k days.
    """
    name = strategy.name
    if name == "none":
        return None
    if name == "all":
        return (0.0, now)
    if name == "last-days":
        days = strategy.days if strategy.days is not None else 7.0
        return (now - days * 86400.0, now)
    if name == "on-trust-loss":
        days = strategy.days if strategy.days is not None else 7.0
        cur = input_.current_validation
        if not cur.flag("m6") or not cur.flag("m7"):
            return (0.0, now)
        return (now - days * 86400.0, now)
    raise UnknownStrategy(f"unknown transfer strategy {name!r}")


@dataclass(frozen=True)
class ExecutionReport:
    records_copied: int
    skipped_duplicates: int
    failed_record_id: str | None = None


def execute_transfer(
    suggestion: SwitchoverSuggestion,
    source: BlockchainProxy,
    dest: BlockchainProxy,
    now: float,
) -> ExecutionReport:
    """Copy every source record inside the transfer range to the destination.

    Records already present on the destination (same record id) are skipped,
    so re-running after a partial failure copies only what is missing. The
    source store is never modified.
    """
    if suggestion.transfer_range is None:
        return ExecutionReport(records_copied=0, skipped_duplicates=0)
    start, end = suggestion.transfer_range
    existing = dest.existing_record_ids()
    copied = skipped = 0
    for record in source.read_records(start, end):
        if record.record_id in existing:
            skipped += 1
            continue
        try:
            dest.submit_record(
                record.payload,
                record_id=record.record_id,
                created_at=record.created_at,
                now=now,
            )
        except ProxyUnavailable:
            return ExecutionReport(copied, skipped, failed_record_id=record.record_id)
        copied += 1
    return ExecutionReport(copied, skipped)


class HistoryLog:
    """Append-only JSONL sink for suggestion state transitions."""

    def __init__(self, sink: IO[str] | None) -> None:
        self._sink = sink

    def append(self, ts: float, suggestion: SwitchoverSuggestion,
               prev: SuggestionState | None, reason: str | None = None) -> None:
        if self._sink is None:
            return
        entry = {
            "ts": ts,
            "suggestion_id": suggestion.id,
            "from": suggestion.from_chain,
            "to": suggestion.to_chain,
            "prev_state": prev.value if prev else None,
            "state": suggestion.state.value,
        }
        if reason:
            entry["reason"] = reason
        if suggestion.transfer_range is not None:
            entry["transfer_range"] = list(suggestion.transfer_range)
        self._sink.write(json.dumps(entry, sort_keys=True, separators=(",", ":")) + "\n")
        self._sink.flush()


class SwitchoverManager:
    """Serialized owner of the suggestion lifecycle and suppression timer.

    ``consider`` is called after every ranking; it emits at most one
    suggestion per suppression period, never re-suggests a target that is
    already pending, withdraws a pending suggestion when the active chain
    regains the top rank, and supersedes an older pending suggestion when a
    new one is emitted.
    """

    def __init__(
        self,
        history: HistoryLog,
        log: Callable[[float, str], None] | None = None,
    ) -> None:
        self._history = history
        self._log = log or (lambda ts, msg: None)
        self._suggestions: dict[str, SwitchoverSuggestion] = {}
        self._order: list[str] = []
        self._seq = 0
        self.last_suggestion_at: float | None = None

    # -- queries ------------------------------------------------------------

    def all(self, state: SuggestionState | None = None) -> list[SwitchoverSuggestion]:
        out = [self._suggestions[sid] for sid in self._order]
        if state is not None:
            out = [s for s in out if s.state == state]
        return out

    def get(self, suggestion_id: str) -> SwitchoverSuggestion:
        try:
            return self._suggestions[suggestion_id]
        except KeyError:
            raise UnknownSuggestion(f"no suggestion {suggestion_id!r}") from None

    def _pending(self) -> SwitchoverSuggestion | None:
        for sid in reversed(self._order):
            if self._suggestions[sid].state == SuggestionState.PENDING:
                return self._suggestions[sid]
        return None

    # -- lifecycle ----------------------------------------------------------

    def _transition(self, suggestion: SwitchoverSuggestion, new: SuggestionState,
                    ts: float, reason: str | None = None) -> SwitchoverSuggestion:
        if new not in _TRANSITIONS[suggestion.state]:
            raise IllegalTransition(
                f"suggestion {suggestion.id}: cannot go {suggestion.state.value} -> {new.value}"
            )
        prev = suggestion.state
        suggestion.state = new
        self._history.append(ts, suggestion, prev, reason)
        return suggestion

    def consider(
        self, now: float, ranking: RankingResult, active: str | None
    ) -> SwitchoverSuggestion | None:
        """Evaluate a fresh ranking; returns a newly created Pending/Suppressed
        suggestion, or None when nothing needs to happen."""
        winner = ranking.winner
        pending = self._pending()
        if winner is None or winner == active:
            if pending is not None:
                self._transition(
                    pending, SuggestionState.REJECTED, now,
                    reason="withdrawn: active chain ranks best again",
                )
            return None
        if pending is not None and pending.to_chain == winner:
            return None  # already suggested, waiting on the operator
        if active is None:
            return None  # initial adoption is handled by the pipeline

        self._seq += 1
        suggestion = SwitchoverSuggestion(
            id=f"sugg-{self._seq:06d}",
            from_chain=active,
            to_chain=winner,
            created_at=now,
            snapshot=ranking,
        )
        suppressed = (
            self.last_suggestion_at is not None
            and now - self.last_suggestion_at < self._suppression_period
        )
        if suppressed:
            suggestion.state = SuggestionState.SUPPRESSED
            self._register(suggestion)
            self._history.append(now, suggestion, None, reason="inside suppression period")
            return suggestion

        if pending is not None:
            self._transition(
                pending, SuggestionState.REJECTED, now,
                reason=f"superseded by {suggestion.id}",
            )
        self._register(suggestion)
        self._history.append(now, suggestion, None)
        self._log(now, f"Switchover suggestion: {_display(winner)}")
        self.last_suggestion_at = now
        return suggestion

    _suppression_period: float = 0.0

    def set_suppression_period(self, seconds: float) -> None:
        self._suppression_period = seconds

    def _register(self, suggestion: SwitchoverSuggestion) -> None:
        self._suggestions[suggestion.id] = suggestion
        self._order.append(suggestion.id)

    def approve(self, suggestion_id: str, now: float) -> SwitchoverSuggestion:
        return self._transition(self.get(suggestion_id), SuggestionState.APPROVED, now)

    def reject(self, suggestion_id: str, now: float) -> SwitchoverSuggestion:
        return self._transition(self.get(suggestion_id), SuggestionState.REJECTED, now)

    def begin_execution(self, suggestion_id: str, now: float) -> SwitchoverSuggestion:
        return self._transition(self.get(suggestion_id), SuggestionState.EXECUTING, now)

    def finish_execution(self, suggestion_id: str, now: float,
                         report: ExecutionReport) -> SwitchoverSuggestion:
        state = (
            SuggestionState.FAILED
            if report.failed_record_id is not None
            else SuggestionState.EXECUTED
        )
        reason = (
            f"copied {report.records_copied}, skipped {report.skipped_duplicates}"
            + (f", failed at {report.failed_record_id}" if report.failed_record_id else "")
        )
        return self._transition(self.get(suggestion_id), state, now, reason=reason)


def _display(chain_id: str) -> str:
    return chain_id.replace("-", " ").title()
