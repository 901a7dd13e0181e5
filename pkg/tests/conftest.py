"""Shared fixtures and builders for the test suite."""

from __future__ import annotations

import hashlib
import itertools
from decimal import Decimal

import pytest

from chainswitch.core import BlockHeader, ChainDescriptor, ChainFamily, FeeStats, RollingWindow

_counter = itertools.count()


def make_block(
    chain: str = "test-chain",
    ts: float = 0.0,
    height: int | None = None,
    miner: str = "miner-a",
    difficulty: int = 1,
    tx_count: int = 0,
    is_uncle: bool = False,
    fee: Decimal | int = 0,
    block_hash: str | None = None,
) -> BlockHeader:
    n = next(_counter)
    return BlockHeader(
        chain=chain,
        height=height if height is not None else n,
        hash=block_hash or hashlib.sha256(f"test:{chain}:{n}".encode()).hexdigest(),
        timestamp=ts,
        miner=miner,
        difficulty=difficulty,
        tx_count=tx_count,
        is_uncle=is_uncle,
        fee_stats=FeeStats(Decimal(fee)),
    )


def build_window(blocks, chain: str = "test-chain", now: float | None = None) -> RollingWindow:
    window = RollingWindow(chain)
    for block in blocks:
        window.insert(block)
    if now is not None:
        window.evict(now)
    return window


@pytest.fixture
def btc_descriptor() -> ChainDescriptor:
    return ChainDescriptor(
        id="btc-sim", family=ChainFamily.BITCOIN_LIKE, currency_symbol="BTC", reputation=10
    )


@pytest.fixture
def eth_descriptor() -> ChainDescriptor:
    return ChainDescriptor(
        id="eth-sim", family=ChainFamily.ETHEREUM_LIKE, currency_symbol="ETH", reputation=10
    )
