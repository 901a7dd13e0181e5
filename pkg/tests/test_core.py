"""Rolling-window behaviour: ordering, dedup, the 24 h closed boundary, and
oracle equivalence against a brute-force filter."""

from __future__ import annotations

import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chainswitch.core import (
    ChainDescriptor,
    ChainFamily,
    ChainMismatch,
    ConfigError,
    RollingWindow,
    WINDOW_HORIZON_S,
)

from conftest import build_window, make_block


def window_oracle(operations):
    """Brute-force reference: replay inserts/evicts on a plain list.

    Contents after any interleaving are the inserted blocks, deduplicated by
    hash, filtered to timestamp >= now - horizon for the largest now seen.
    """
    seen_hashes = set()
    kept = []
    now = None
    for op, arg in operations:
        if op == "insert":
            cutoff_ok = now is None or arg.timestamp >= now - WINDOW_HORIZON_S
            if arg.hash not in seen_hashes and cutoff_ok:
                seen_hashes.add(arg.hash)
                kept.append(arg)
        else:
            now = arg if now is None else max(now, arg)
            survivors = [b for b in kept if b.timestamp >= now - WINDOW_HORIZON_S]
            for b in kept:
                if b not in survivors:
                    seen_hashes.discard(b.hash)
            kept = survivors
    return sorted(kept, key=lambda b: (b.timestamp, b.height))


def test_insert_singleton():
    block = make_block(ts=100)
    window = build_window([block])
    assert window.snapshot() == (block,)


def test_insert_duplicate_hash_is_noop():
    block = make_block(ts=100)
    window = build_window([block, block])
    assert window.snapshot() == (block,)
    assert len(window) == 1


def test_insert_out_of_order_keeps_time_order():
    b1 = make_block(ts=100)
    b2 = make_block(ts=50)
    window = build_window([b1, b2])
    assert [b.timestamp for b in window.snapshot()] == [50, 100]


def test_insert_order_matches_sort_oracle_over_permutations():
    import itertools

    blocks = [make_block(ts=ts) for ts in (5, 1, 9, 3, 7)]
    expected = sorted(blocks, key=lambda b: (b.timestamp, b.height))
    for perm in itertools.permutations(blocks):
        window = build_window(perm)
        assert list(window.snapshot()) == expected


def test_insert_rejects_other_chain():
    window = RollingWindow("chain-a")
    with pytest.raises(ChainMismatch):
        window.insert(make_block(chain="chain-b"))


def test_evict_boundary_plus_one_drops():
    window = build_window([make_block(ts=0)])
    window.evict(86_401)
    assert window.snapshot() == ()


def test_evict_closed_boundary_retains():
    block = make_block(ts=0)
    window = build_window([block])
    window.evict(86_400)
    assert window.snapshot() == (block,)


def test_evict_filter_oracle():
    early = make_block(ts=10)
    late = make_block(ts=90_000)
    window = build_window([early, late])
    window.evict(100_000)
    assert window.snapshot() == (late,)


def test_random_interleaving_matches_oracle():
    rng = random.Random(1234)
    window = RollingWindow("test-chain")
    operations = []
    now = 200_000.0
    for _ in range(100):
        if rng.random() < 0.7:
            block = make_block(ts=max(0.0, now + rng.uniform(-2 * 86_400, 600)))
            operations.append(("insert", block))
            window.insert(block)
            if rng.random() < 0.2:  # redeliver
                operations.append(("insert", block))
                window.insert(block)
        else:
            now += rng.uniform(0, 40_000)
            operations.append(("evict", now))
            window.evict(now)
    assert list(window.snapshot()) == window_oracle(operations)


@settings(deadline=None, max_examples=60)
@given(
    ts_values=st.lists(st.integers(min_value=0, max_value=200_000), min_size=1, max_size=12),
    seed=st.integers(min_value=0, max_value=2**16),
)
def test_contents_insensitive_to_insertion_order(ts_values, seed):
    blocks = [make_block(ts=float(ts)) for ts in ts_values]
    shuffled = list(blocks)
    random.Random(seed).shuffle(shuffled)
    w1 = build_window(blocks, now=200_000)
    w2 = build_window(shuffled, now=200_000)
    assert w1.snapshot() == w2.snapshot()


def test_aggregates_match_brute_force():
    rng = random.Random(99)
    window = RollingWindow("test-chain")
    for _ in range(200):
        window.insert(
            make_block(
                ts=rng.uniform(0, 86_400),
                miner=f"m{rng.randrange(4)}",
                difficulty=rng.randrange(1, 1000),
                tx_count=rng.randrange(50),
                is_uncle=rng.random() < 0.2,
            )
        )
    window.evict(90_000)
    blocks = window.snapshot()
    regular = [b for b in blocks if not b.is_uncle]
    assert window.regular_count == len(regular)
    assert window.regular_tx_sum == sum(b.tx_count for b in regular)
    assert window.difficulty_sum_all == sum(b.difficulty for b in blocks)
    assert window.miner_counts(include_uncles=True) == Counter(b.miner for b in blocks)
    assert window.miner_counts(include_uncles=False) == Counter(b.miner for b in regular)
    assert window.latest_regular_difficulty() == regular[-1].difficulty


def test_late_stale_block_is_dropped_on_insert():
    window = RollingWindow("test-chain")
    window.evict(200_000)
    window.insert(make_block(ts=10))  # > 24 h older than the last now
    assert len(window) == 0


def test_recent_fee_rates_returns_latest_regular():
    blocks = [make_block(ts=i, fee=i) for i in range(10)]
    blocks.append(make_block(ts=10, fee=999, is_uncle=True))
    window = build_window(blocks)
    assert [int(r) for r in window.recent_fee_rates(3)] == [7, 8, 9]


def test_descriptor_validation():
    with pytest.raises(ConfigError):
        ChainDescriptor(id="BAD ID", family=ChainFamily.BITCOIN_LIKE,
                        currency_symbol="X", reputation=5)
    with pytest.raises(ConfigError):
        ChainDescriptor(id="ok-id", family=ChainFamily.BITCOIN_LIKE,
                        currency_symbol="X", reputation=11)
    with pytest.raises(ConfigError):
        ChainDescriptor(id="x" * 33, family=ChainFamily.BITCOIN_LIKE,
                        currency_symbol="X", reputation=5)
    descriptor = ChainDescriptor(id="ethereum-classic", family=ChainFamily.ETHEREUM_LIKE,
                                 currency_symbol="ETC", reputation=9)
    assert descriptor.display_name == "Ethereum Classic"


def test_block_header_validation():
    with pytest.raises(ConfigError):
        make_block(ts=-1)
    with pytest.raises(ConfigError):
        make_block(tx_count=-1)
