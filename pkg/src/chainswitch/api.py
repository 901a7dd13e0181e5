"""HTTP API over a running pipeline, consumed by the CLI and the dashboard.

All endpoints exchange JSON with ISO-8601 UTC timestamps. Mutations (policy
replacement, approval decisions, record writes) are funneled through the
host's serialized submit path; reads serve the pipeline's latest published
snapshots. ``GET /v1/events`` is a server-sent-event stream of event
summaries with a polling-friendly ``max_events`` bound.
"""

from __future__ import annotations

import base64
import binascii
import json
import math
from datetime import datetime, timezone
from decimal import Decimal, InvalidOperation
from queue import Empty, Queue

from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.responses import StreamingResponse

from .core import (
    ChainswitchError,
    ConfigError,
    InvalidPayload,
    NoActiveChain,
    UnknownChain,
)
from .gateway import Approval, Pipeline, PolicyUpdate
from .metrics import MetricVector
from .selection import RankingResult, policy_from_document, policy_to_document
from .switchover import (
    IllegalTransition,
    SuggestionState,
    SwitchoverSuggestion,
    UnknownSuggestion,
)


def iso(ts: float | None) -> str | None:
    if ts is None:
        return None
    return datetime.fromtimestamp(ts, tz=timezone.utc).isoformat()


def parse_ts(raw: str) -> float:
    """Accept ISO-8601 (Z suffix allowed) or a raw epoch number."""
    try:
        return float(raw)
    except ValueError:
        pass
    try:
        return datetime.fromisoformat(raw.replace("Z", "+00:00")).timestamp()
    except ValueError:
        raise HTTPException(status_code=422, detail=f"unparseable timestamp {raw!r}") from None


class InlineHost:
    """Host adapter that runs events inline; used for tests and for serving a
    finished replay's state."""

    def __init__(self, pipeline: Pipeline) -> None:
        self.pipeline = pipeline

    def submit(self, event) -> None:
        self.pipeline.process_event(event)

    def write_record(self, payload: bytes, fee: Decimal | None):
        return self.pipeline.write_record(payload, fee)

    def now(self) -> float:
        return self.pipeline.now


def vector_json(vector: MetricVector, stale: bool) -> dict:
    return {
        "chain": vector.chain,
        "m1_write_cost_usd_per_kb": float(vector.m1_write_cost_usd_per_kb),
        "m2_read_cost_usd_per_kb": float(vector.m2_read_cost_usd_per_kb),
        "m3_exchange_rate_usd": float(vector.m3_exchange_rate_usd),
        "m4_interblock_s": vector.m4_interblock_s if math.isfinite(vector.m4_interblock_s) else None,
        "m5_tx_per_s": vector.m5_tx_per_s,
        "m6_miner_shares": vector.m6_miner_shares,
        "m7_network_hashrate_hps": vector.m7_network_hashrate_hps,
        "m8_reputation": vector.m8_reputation,
        "computed_at": iso(vector.computed_at),
        "stale": stale,
    }


def ranking_json(ranking: RankingResult | None) -> dict:
    if ranking is None:
        return {"computed_at": None, "winner": None, "chains": []}
    return {
        "computed_at": iso(ranking.computed_at),
        "winner": ranking.winner,
        "chains": [
            {
                "chain": row.chain,
                "scores": row.scores,
                "weighted_scores": row.weighted_scores,
                "benefit": row.benefit,
                "validation": row.validation.as_dict(),
                "eligible": row.eligible,
                "stale": row.stale,
            }
            for row in ranking.per_chain
        ],
    }


def suggestion_json(s: SwitchoverSuggestion) -> dict:
    return {
        "id": s.id,
        "from": s.from_chain,
        "to": s.to_chain,
        "created_at": iso(s.created_at),
        "state": s.state.value,
        "transfer_range": (
            [iso(s.transfer_range[0]), iso(s.transfer_range[1])] if s.transfer_range else None
        ),
        "snapshot_winner": s.snapshot.winner,
    }


def create_app(host) -> FastAPI:
    app = FastAPI(title="chainswitch", docs_url=None, redoc_url=None)
    pipeline: Pipeline = host.pipeline

    @app.get("/v1/chains")
    def get_chains() -> list[dict]:
        entries = pipeline.chain_overview()
        for entry in entries:
            entry["last_block_at"] = iso(entry["last_block_at"])
        return entries

    @app.get("/v1/metrics")
    def get_metrics() -> dict:
        stale = pipeline._stale_chains()
        return {
            cid: vector_json(state.vector, cid in stale)
            for cid, state in pipeline.chains.items()
            if state.vector is not None
        }

    @app.get("/v1/ranking")
    def get_ranking() -> dict:
        return ranking_json(pipeline.latest_ranking)

    @app.get("/v1/suggestions")
    def get_suggestions(state: str | None = Query(default=None)) -> list[dict]:
        wanted: SuggestionState | None = None
        if state is not None:
            try:
                wanted = SuggestionState(state)
            except ValueError:
                raise HTTPException(status_code=422, detail=f"unknown state {state!r}") from None
        return [suggestion_json(s) for s in pipeline.manager.all(wanted)]

    def _decide(suggestion_id: str, approve: bool) -> dict:
        try:
            host.submit(Approval(ts=host.now(), suggestion_id=suggestion_id, approve=approve))
        except UnknownSuggestion as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        except IllegalTransition as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc
        return suggestion_json(pipeline.manager.get(suggestion_id))

    @app.post("/v1/suggestions/{suggestion_id}/approve")
    def approve_suggestion(suggestion_id: str) -> dict:
        return _decide(suggestion_id, approve=True)

    @app.post("/v1/suggestions/{suggestion_id}/reject")
    def reject_suggestion(suggestion_id: str) -> dict:
        return _decide(suggestion_id, approve=False)

    @app.get("/v1/policy")
    def get_policy() -> dict:
        return policy_to_document(pipeline.policy)

    @app.put("/v1/policy")
    async def put_policy(request: Request) -> dict:
        try:
            doc = await request.json()
            policy = policy_from_document(doc)
        except (ConfigError, json.JSONDecodeError, TypeError, AttributeError) as exc:
            raise HTTPException(status_code=400, detail=f"invalid policy: {exc}") from exc
        host.submit(PolicyUpdate(ts=host.now(), policy=policy))
        return policy_to_document(pipeline.policy)

    @app.post("/v1/records")
    async def post_record(request: Request) -> dict:
        body = await request.json()
        try:
            payload = base64.b64decode(body["payload"], validate=True)
        except (KeyError, binascii.Error, TypeError) as exc:
            raise HTTPException(status_code=400, detail="payload must be base64") from exc
        fee = None
        if body.get("fee") is not None:
            try:
                fee = Decimal(str(body["fee"]))
            except InvalidOperation as exc:
                raise HTTPException(status_code=400, detail="fee must be numeric") from exc
        try:
            record = host.write_record(payload, fee)
        except InvalidPayload as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        except NoActiveChain as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc
        return {
            "record_id": record.record_id,
            "chain": record.chain_of_record,
            "created_at": iso(record.created_at),
            "inclusion_time": iso(record.inclusion_time),
        }

    @app.get("/v1/records")
    def get_records(
        from_: str = Query(alias="from"),
        to: str = Query(),
        chain: str | None = Query(default=None),
    ) -> list[dict]:
        start, end = parse_ts(from_), parse_ts(to)
        try:
            records = pipeline.read_records(start, end, chain)
        except (UnknownChain, NoActiveChain) as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        return [
            {
                "record_id": r.record_id,
                "payload": base64.b64encode(r.payload).decode(),
                "created_at": iso(r.created_at),
                "chain": r.chain_of_record,
                "inclusion_time": iso(r.inclusion_time),
            }
            for r in records
        ]

    @app.get("/v1/events")
    def get_events(max_events: int | None = Query(default=None)) -> StreamingResponse:
        queue: Queue = pipeline.subscribe()

        def stream():
            sent = 0
            try:
                while max_events is None or sent < max_events:
                    try:
                        summary = queue.get(timeout=15.0)
                    except Empty:
                        yield ": keep-alive\n\n"
                        continue
                    yield f"data: {json.dumps(summary, sort_keys=True)}\n\n"
                    sent += 1
            finally:
                pipeline.unsubscribe(queue)

        return StreamingResponse(stream(), media_type="text/event-stream")

    @app.exception_handler(ChainswitchError)
    async def domain_error(_request: Request, exc: ChainswitchError):
        raise HTTPException(status_code=400, detail=str(exc))

    return app
