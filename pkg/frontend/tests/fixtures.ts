/** Stub payloads mirroring the gateway API, captured from a live replay. */

import type { ChainInfo, Ranking, Suggestion } from "../src/types.js";

const allValid = {
  m1: true, m2: true, m3: true, m4: true, m5: true, m6: true, m7: true, m8: true,
  overall: true,
};

export const selectionDayRanking: Ranking = {
  computed_at: "2018-09-26T00:00:00+00:00",
  winner: "ethereum",
  chains: [
    {
      chain: "bitcoin",
      scores: { m1: 0, m2: 4, m3: 0, m4: 0, m5: 2, m6: 4, m7: 4, m8: 4 },
      weighted_scores: { m1: 0, m2: 0, m3: 0, m4: 0, m5: 10, m6: 20, m7: 20, m8: 20 },
      benefit: 70,
      validation: { ...allValid },
      eligible: true,
      stale: false,
    },
    {
      chain: "ethereum",
      scores: { m1: 1, m2: 4, m3: 2, m4: 4, m5: 3, m6: 3, m7: 1, m8: 4 },
      weighted_scores: { m1: 5, m2: 0, m3: 10, m4: 20, m5: 15, m6: 15, m7: 5, m8: 20 },
      benefit: 90,
      validation: { ...allValid },
      eligible: true,
      stale: false,
    },
    {
      chain: "ethereum-classic",
      scores: { m1: 3, m2: 4, m3: 4, m4: 4, m5: 1, m6: 0, m7: 0, m8: 4 },
      weighted_scores: { m1: 15, m2: 0, m3: 20, m4: 20, m5: 5, m6: 0, m7: 0, m8: 20 },
      benefit: 80,
      validation: { ...allValid },
      eligible: true,
      stale: false,
    },
    {
      chain: "expanse",
      scores: { m1: 3, m2: 4, m3: 4, m4: 2, m5: 0, m6: 0, m7: 0, m8: 2 },
      weighted_scores: { m1: 15, m2: 0, m3: 20, m4: 10, m5: 0, m6: 0, m7: 0, m8: 10 },
      benefit: 55,
      validation: { ...allValid },
      eligible: true,
      stale: false,
    },
  ],
};

export const selectionDayChains: ChainInfo[] = [
  { id: "bitcoin", display_name: "Bitcoin", family: "bitcoin-like", currency_symbol: "BTC",
    reputation: 10, target_inclusion_blocks: 6, stale: false, window_blocks: 144,
    active: false, last_block_at: "2018-09-25T23:50:00+00:00" },
  { id: "ethereum", display_name: "Ethereum", family: "ethereum-like", currency_symbol: "ETH",
    reputation: 10, target_inclusion_blocks: 6, stale: false, window_blocks: 6171,
    active: true, last_block_at: "2018-09-25T23:59:40+00:00" },
  { id: "ethereum-classic", display_name: "Ethereum Classic", family: "ethereum-like",
    currency_symbol: "ETC", reputation: 9, target_inclusion_blocks: 6, stale: false,
    window_blocks: 6171, active: false, last_block_at: "2018-09-25T23:59:40+00:00" },
  { id: "expanse", display_name: "Expanse", family: "ethereum-like", currency_symbol: "EXP",
    reputation: 5, target_inclusion_blocks: 6, stale: true, window_blocks: 1963,
    active: false, last_block_at: "2018-09-25T23:58:48+00:00" },
];

export const pendingSuggestion: Suggestion = {
  id: "sugg-000001",
  from: "bitcoin",
  to: "ethereum",
  created_at: "2018-09-26T00:00:00+00:00",
  state: "pending",
  transfer_range: null,
  snapshot_winner: "ethereum",
};

export function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}
