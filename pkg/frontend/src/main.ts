/**
 * Browser bootstrap: wires the API client, renderers, and the event feed to
 * the page. State changes render only after the API confirms them — there is
 * no optimistic UI.
 */

import { ApiClient, ApiError } from "./api.js";
import { startEventFeed } from "./events.js";
import {
  renderChainCards,
  renderConflictToast,
  renderEventFeed,
  renderOfflineBanner,
  renderPolicySummary,
  renderRankingTable,
  renderSuggestionList,
} from "./render.js";
import type { EventSummary } from "./types.js";

const API_BASE = (window as { CHAINSWITCH_API?: string }).CHAINSWITCH_API ?? "";
const api = new ApiClient(API_BASE);

const el = (id: string): HTMLElement => {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node;
};

const eventLog: EventSummary[] = [];

async function refresh(): Promise<void> {
  const [chains, ranking, suggestions, policy] = await Promise.all([
    api.getChains(),
    api.getRanking(),
    api.getSuggestions(),
    api.getPolicy(),
  ]);
  el("chains").innerHTML = renderChainCards(chains);
  el("ranking").innerHTML = renderRankingTable(ranking, chains);
  el("suggestions").innerHTML = renderSuggestionList(suggestions);
  el("policy-summary").innerHTML = renderPolicySummary(policy);
  const editor = el("policy-editor") as HTMLTextAreaElement;
  if (document.activeElement !== editor) {
    editor.value = JSON.stringify(policy, null, 2);
  }
}

function showToast(message: string): void {
  el("toast-slot").innerHTML = renderConflictToast(message);
  setTimeout(() => {
    el("toast-slot").innerHTML = "";
  }, 4000);
}

async function decide(action: "approve" | "reject", id: string): Promise<void> {
  try {
    if (action === "approve") await api.approveSuggestion(id);
    else await api.rejectSuggestion(id);
  } catch (error) {
    if (error instanceof ApiError && (error.status === 409 || error.status === 404)) {
      showToast(`suggestion ${id} changed state: ${error.message}`);
    } else {
      showToast(String(error));
    }
  }
  await refresh();
}

el("suggestions").addEventListener("click", (raw) => {
  const target = raw.target as HTMLElement;
  const action = target.dataset.action;
  const id = target.dataset.id;
  if ((action === "approve" || action === "reject") && id) {
    void decide(action, id);
  }
});

el("policy-apply").addEventListener("click", () => {
  const editor = el("policy-editor") as HTMLTextAreaElement;
  let parsed;
  try {
    parsed = JSON.parse(editor.value);
  } catch (error) {
    showToast(`policy is not valid JSON: ${String(error)}`);
    return;
  }
  api
    .putPolicy(parsed)
    .then(() => refresh())
    .catch((error) => showToast(`policy rejected: ${String(error)}`));
});

const feed = startEventFeed(
  API_BASE,
  {
    onEvent: (event) => {
      eventLog.push(event as EventSummary);
      el("events").innerHTML = renderEventFeed(eventLog);
      void refresh();
    },
    onConnectivity: (connected) => {
      el("offline-slot").innerHTML = renderOfflineBanner(connected);
    },
    poll: refresh,
  },
  { eventSourceFactory: "EventSource" in window ? (url) => new EventSource(url) : undefined },
);

window.addEventListener("beforeunload", () => feed.stop());

void refresh().catch(() => el("offline-slot").innerHTML = renderOfflineBanner(false));
