/** Payload shapes served by the gateway HTTP API (v1). */

export const METRIC_KEYS = ["m1", "m2", "m3", "m4", "m5", "m6", "m7", "m8"] as const;
export type MetricKey = (typeof METRIC_KEYS)[number];

export interface ChainInfo {
  id: string;
  display_name: string;
  family: string;
  currency_symbol: string;
  reputation: number;
  target_inclusion_blocks: number;
  stale: boolean;
  window_blocks: number;
  active: boolean;
  last_block_at: string | null;
}

export interface RankingRow {
  chain: string;
  scores: Record<MetricKey, number>;
  weighted_scores: Record<MetricKey, number>;
  benefit: number;
  validation: Record<string, boolean>; // m1..m8 plus "overall"
  eligible: boolean;
  stale: boolean;
}

export interface Ranking {
  computed_at: string | null;
  winner: string | null;
  chains: RankingRow[];
}

export interface MetricVectorPayload {
  chain: string;
  m1_write_cost_usd_per_kb: number;
  m2_read_cost_usd_per_kb: number;
  m3_exchange_rate_usd: number;
  m4_interblock_s: number | null;
  m5_tx_per_s: number;
  m6_miner_shares: Record<string, number>;
  m7_network_hashrate_hps: number;
  m8_reputation: number;
  computed_at: string;
  stale: boolean;
}

export type SuggestionState =
  | "pending"
  | "approved"
  | "rejected"
  | "executing"
  | "executed"
  | "suppressed"
  | "failed";

export interface Suggestion {
  id: string;
  from: string;
  to: string;
  created_at: string;
  state: SuggestionState;
  transfer_range: [string | null, string | null] | null;
  snapshot_winner: string | null;
}

export interface PolicyDocument {
  weights: Record<MetricKey, number>;
  safs: Record<MetricKey, Array<[number, number | "inf", number]>>;
  validation: { rules: Record<string, { op: string; threshold: number }>; formula: string };
  suppression_period_s: number;
  mode: string;
  transfer_strategy: { name: string; days?: number };
}

export interface EventSummary {
  ts: number;
  kind: string;
  [key: string]: unknown;
}
