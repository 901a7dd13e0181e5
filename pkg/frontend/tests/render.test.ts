import { describe, expect, it } from "vitest";

import {
  renderChainCards,
  renderEventFeed,
  renderOfflineBanner,
  renderRankingTable,
  renderSuggestionCard,
  renderSuggestionList,
} from "../src/render.js";
import type { Ranking } from "../src/types.js";
import { pendingSuggestion, selectionDayChains, selectionDayRanking } from "./fixtures.js";

function totalsRow(html: string): string {
  const match = html.match(/<tr class="totals">.*?<\/tr>/s);
  expect(match).not.toBeNull();
  return match![0];
}

describe("ranking table", () => {
  it("renders the selection-day totals verbatim with the winner marked", () => {
    const html = renderRankingTable(selectionDayRanking, selectionDayChains);
    const totals = totalsRow(html);
    const cells = [...totals.matchAll(/<td[^>]*>(\d+)<\/td>/g)].map((m) => m[1]);
    expect(cells).toEqual(["70", "90", "80", "55"]);
    // the ethereum column (second chain) carries the winner mark
    expect(totals).toContain('<td class="total winner">90</td>');
    expect(html).toContain("winner: <strong>ethereum</strong>");
    expect(html).toMatchSnapshot();
  });

  it("shows totals exactly as served, never recomputing them", () => {
    const tampered: Ranking = JSON.parse(JSON.stringify(selectionDayRanking));
    tampered.chains[0].benefit = 999; // inconsistent with the weighted scores on purpose
    const totals = totalsRow(renderRankingTable(tampered, selectionDayChains));
    expect(totals).toContain(">999<");
  });

  it("renders a notice when no chain is eligible", () => {
    const empty: Ranking = { ...selectionDayRanking, winner: null };
    expect(renderRankingTable(empty, selectionDayChains)).toContain("no eligible blockchain");
  });

  it("adds a staleness badge to stale chains", () => {
    const html = renderRankingTable(selectionDayRanking, selectionDayChains);
    const expanseHeader = html.match(/<th[^>]*>expanse.*?<\/th>/s);
    expect(expanseHeader![0]).toContain('badge stale');
  });

  it("renders all eight metric rows plus the total", () => {
    const html = renderRankingTable(selectionDayRanking, selectionDayChains);
    for (const key of ["M1", "M2", "M3", "M4", "M5", "M6", "M7", "M8"]) {
      expect(html).toContain(`<th>${key}</th>`);
    }
  });
});

describe("suggestion cards", () => {
  it("pending cards have enabled decision buttons", () => {
    const html = renderSuggestionCard(pendingSuggestion);
    expect(html).toContain('data-action="approve" data-id="sugg-000001"');
    expect(html).not.toContain("disabled");
    expect(html).toMatchSnapshot();
  });

  it("terminal states disable the buttons", () => {
    for (const state of ["rejected", "executed", "suppressed"] as const) {
      const html = renderSuggestionCard({ ...pendingSuggestion, state });
      expect(html).toContain("disabled");
      expect(html).toContain('<span class="terminal">final</span>');
    }
  });

  it("escapes identifiers", () => {
    const html = renderSuggestionCard({
      ...pendingSuggestion,
      id: 'x"><script>alert(1)</script>',
    });
    expect(html).not.toContain("<script>");
  });

  it("empty list renders a notice", () => {
    expect(renderSuggestionList([])).toContain("no switchover suggestions");
  });
});

describe("chain cards and chrome", () => {
  it("marks active and stale chains", () => {
    const html = renderChainCards(selectionDayChains);
    expect(html).toContain('badge active');
    expect(html).toContain('badge stale');
    expect(html).toContain("Ethereum Classic");
  });

  it("offline banner toggles with connectivity", () => {
    expect(renderOfflineBanner(true)).toBe("");
    expect(renderOfflineBanner(false)).toContain("connection lost");
  });

  it("event feed renders most recent first", () => {
    const html = renderEventFeed([
      { ts: 1, kind: "block", chain: "bitcoin" },
      { ts: 2, kind: "ranking", winner: "ethereum" },
    ]);
    expect(html.indexOf("ranking")).toBeLessThan(html.indexOf("block"));
  });
});
