/**
 * Pure HTML renderers. Every number shown comes verbatim from an API payload;
 * no totals, scores, or benefits are ever computed here (the ranking endpoint
 * is the single source of truth).
 */

import { METRIC_KEYS } from "./types.js";
import type { ChainInfo, EventSummary, PolicyDocument, Ranking, Suggestion } from "./types.js";

export function escapeHtml(raw: string): string {
  return raw
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderRankingTable(ranking: Ranking, chains: ChainInfo[]): string {
  if (ranking.chains.length === 0) {
    return `<p class="notice">no ranking yet</p>`;
  }
  const stale = new Map(chains.map((c) => [c.id, c.stale]));
  const order = ranking.chains.map((row) => row.chain);
  const header = order
    .map((chain) => {
      const row = ranking.chains.find((r) => r.chain === chain)!;
      const classes = [
        chain === ranking.winner ? "winner" : "",
        row.eligible ? "" : "ineligible",
      ]
        .filter(Boolean)
        .join(" ");
      const badge = stale.get(chain) || row.stale ? ` <span class="badge stale">stale</span>` : "";
      return `<th class="${classes}">${escapeHtml(chain)}${badge}</th>`;
    })
    .join("");

  const body = METRIC_KEYS.map((key) => {
    const cells = ranking.chains
      .map((row) => {
        const valid = row.validation[key] !== false;
        return `<td class="${valid ? "" : "violated"}">${row.weighted_scores[key]}</td>`;
      })
      .join("");
    return `<tr><th>${key.toUpperCase()}</th>${cells}</tr>`;
  }).join("");

  const totals = ranking.chains
    .map(
      (row) =>
        `<td class="total ${row.chain === ranking.winner ? "winner" : ""}">${row.benefit}</td>`,
    )
    .join("");

  const winnerLine = ranking.winner
    ? `<p class="winner-line">winner: <strong>${escapeHtml(ranking.winner)}</strong></p>`
    : `<p class="notice">no eligible blockchain</p>`;

  return `<table class="ranking">
<thead><tr><th>Metric</th>${header}</tr></thead>
<tbody>${body}<tr class="totals"><th>Total</th>${totals}</tr></tbody>
</table>
${winnerLine}`;
}

const TERMINAL_STATES = new Set(["rejected", "executed", "suppressed"]);

export function renderSuggestionCard(s: Suggestion): string {
  const terminal = TERMINAL_STATES.has(s.state);
  const actionable = s.state === "pending";
  const disabled = actionable ? "" : "disabled";
  const range = s.transfer_range
    ? `<div class="range">transfer ${escapeHtml(s.transfer_range[0] ?? "start")} → ${escapeHtml(
        s.transfer_range[1] ?? "now",
      )}</div>`
    : "";
  return `<div class="suggestion state-${s.state}" data-id="${escapeHtml(s.id)}">
<div class="route">${escapeHtml(s.from)} → ${escapeHtml(s.to)}</div>
<div class="meta">${escapeHtml(s.id)} · ${escapeHtml(s.created_at)} · <span class="state">${s.state}</span></div>
${range}
<button data-action="approve" data-id="${escapeHtml(s.id)}" ${disabled}>approve</button>
<button data-action="reject" data-id="${escapeHtml(s.id)}" ${disabled}>reject</button>
${terminal ? `<span class="terminal">final</span>` : ""}
</div>`;
}

export function renderSuggestionList(suggestions: Suggestion[]): string {
  if (suggestions.length === 0) {
    return `<p class="notice">no switchover suggestions</p>`;
  }
  return suggestions.map(renderSuggestionCard).join("\n");
}

export function renderChainCards(chains: ChainInfo[]): string {
  return chains
    .map((c) => {
      const flags = [
        c.active ? `<span class="badge active">active</span>` : "",
        c.stale ? `<span class="badge stale">stale</span>` : "",
      ].join(" ");
      return `<div class="chain" data-id="${escapeHtml(c.id)}">
<strong>${escapeHtml(c.display_name)}</strong> ${flags}
<div>${escapeHtml(c.family)} · ${escapeHtml(c.currency_symbol)} · reputation ${c.reputation}</div>
<div>${c.window_blocks} blocks in window</div>
</div>`;
    })
    .join("\n");
}

export function renderPolicySummary(policy: PolicyDocument): string {
  const weights = METRIC_KEYS.map((k) => `${k.toUpperCase()}=${policy.weights[k]}`).join(" ");
  return `<div class="policy-summary">
<div>weights: ${weights}</div>
<div>mode: ${escapeHtml(policy.mode)} · suppression: ${policy.suppression_period_s}s · transfer: ${escapeHtml(policy.transfer_strategy.name)}</div>
</div>`;
}

export function renderEventFeed(events: EventSummary[], limit = 20): string {
  const recent = events.slice(-limit).reverse();
  if (recent.length === 0) return `<p class="notice">no events</p>`;
  const items = recent
    .map((e) => {
      const rest = Object.entries(e)
        .filter(([k]) => k !== "kind" && k !== "ts")
        .map(([k, v]) => `${k}=${String(v)}`)
        .join(" ");
      return `<li><span class="kind">${escapeHtml(e.kind)}</span> ${escapeHtml(rest)}</li>`;
    })
    .join("");
  return `<ul class="events">${items}</ul>`;
}

export function renderOfflineBanner(connected: boolean): string {
  return connected ? "" : `<div class="offline">connection lost — retrying…</div>`;
}

export function renderConflictToast(message: string): string {
  return `<div class="toast conflict">${escapeHtml(message)}</div>`;
}
