// Pure HTML renderers. No scoring happens here: every number shown is a
// verbatim literal from the API response body (see rawjson.ts), and the
// contract tests compare rendered digits byte-for-byte with the payload.

import { numberLiteral, numberLiterals, objectLiterals } from "./rawjson.js";
import type {
  AnalyticsResponse,
  ApiError,
  EvidencePath,
  ExpertsResponse,
  NeighborhoodResponse,
  TasksResponse,
} from "./types.js";
import { PRIORITY_WEIGHTS } from "./types.js";

export const NEIGHBORHOOD_NODE_LIMIT = 100;

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderBanner(error: ApiError | null): string {
  if (!error) return "";
  const text =
    error.code === "NoConceptsFound"
      ? "no matching concepts — try different wording"
      : `${error.code}: ${error.message}`;
  return `<div class="banner" data-code="${escapeHtml(error.code)}">${escapeHtml(text)}</div>`;
}

export function renderEmptyState(message: string): string {
  return `<div class="empty-state">${escapeHtml(message)}</div>`;
}

function renderPath(path: EvidencePath): string {
  const parts: string[] = [];
  path.nodes.forEach((node, i) => {
    parts.push(`<span class="node" title="${escapeHtml(node.type)}">${escapeHtml(node.name)}</span>`);
    const edge = path.edges[i];
    if (edge) {
      const arrow = edge.forward ? "→" : "←";
      parts.push(`<span class="edge">${arrow} ${escapeHtml(edge.relation)} ${arrow}</span>`);
    }
  });
  return `<li class="evidence-path">${parts.join(" ")}</li>`;
}

/** Ranked expert list with expandable evidence; scores verbatim. */
export function renderExperts(payload: ExpertsResponse, raw: string): string {
  if (payload.results.length === 0) {
    return renderEmptyState("No experts found for this query.");
  }
  const scoreTexts = numberLiterals(raw, "score");
  const rows = payload.results.map((result, i) => {
    const score = scoreTexts[i] ?? String(result.score);
    const evidence = result.evidence.map(renderPath).join("");
    return `
<li class="result expert" data-entity="${escapeHtml(result.item_id)}">
  <div class="result-head">
    <button class="link open-neighborhood" data-entity="${escapeHtml(result.item_id)}">${escapeHtml(result.name)}</button>
    <span class="score" data-field="score">${score}</span>
  </div>
  <div class="explanation">${escapeHtml(result.explanation)}</div>
  <details><summary>evidence (${result.evidence.length})</summary><ul>${evidence}</ul></details>
</li>`;
  });
  return `<ol class="results" data-query="${escapeHtml(payload.query)}">${rows.join("")}</ol>`;
}

/** Task priority list with the urgency/importance/dependency breakdown. */
export function renderTasks(payload: TasksResponse, raw: string): string {
  if (payload.results.length === 0) {
    return renderEmptyState("No open tasks for this user.");
  }
  const scoreTexts = numberLiterals(raw, "score");
  const componentTexts: Record<string, string[]> = {
    urgency: numberLiterals(raw, "urgency"),
    importance: numberLiterals(raw, "importance"),
    dependency: numberLiterals(raw, "dependency"),
  };
  const rows = payload.results.map((result, i) => {
    const score = scoreTexts[i] ?? String(result.score);
    const parts = Object.keys(PRIORITY_WEIGHTS)
      .map((key) => {
        const literal = componentTexts[key]?.[i] ?? "0";
        return `<span class="component" data-field="${key}">${key} ${literal}</span>`;
      })
      .join(" ");
    const consistent = componentsMatchScore(result.components ?? {}, result.score);
    return `
<li class="result task" data-entity="${escapeHtml(result.item_id)}" data-consistent="${consistent}">
  <div class="result-head">
    <span class="task-name">${escapeHtml(result.explanation || result.name)}</span>
    <span class="score" data-field="score">${score}</span>
  </div>
  <div class="components">${parts}</div>
</li>`;
  });
  return `<ol class="results" data-user="${escapeHtml(payload.user)}" data-horizon="${payload.horizon_days}">${rows.join("")}</ol>`;
}

/** Weighted components must reproduce the displayed score (float slack only). */
export function componentsMatchScore(components: Record<string, number>, score: number): boolean {
  let total = 0;
  for (const [key, weight] of Object.entries(PRIORITY_WEIGHTS)) {
    total += weight * (components[key] ?? 0);
  }
  return Math.abs(total - score) <= 1e-9;
}

export function renderAnalytics(payload: AnalyticsResponse, raw: string): string {
  const overall = numberLiteral(raw, "overall");
  const groups = objectLiterals(raw, "groups");
  const groupRows = [...groups.entries()]
    .map(
      ([name, literal]) =>
        `<tr><td>${escapeHtml(name)}</td><td data-field="group">${literal}</td>` +
        `<td>${escapeHtml(JSON.stringify(payload.support[name] ?? []))}</td></tr>`,
    )
    .join("");
  const table = groupRows
    ? `<table class="groups"><thead><tr><th>group</th><th>value</th><th>support</th></tr></thead><tbody>${groupRows}</tbody></table>`
    : "";
  return `
<div class="analytics">
  <p class="rendered">${escapeHtml(payload.rendered)}</p>
  <p class="overall">${payload.metric} = <span data-field="overall">${overall ?? "undefined"}</span>
    <span class="support">support ${escapeHtml(JSON.stringify(payload.overall_support))}</span></p>
  ${table}
</div>`;
}

export function renderNeighborhood(payload: NeighborhoodResponse): string {
  if (payload.nodes.length === 0) {
    return renderEmptyState("Empty neighborhood.");
  }
  const shown = payload.nodes.slice(0, NEIGHBORHOOD_NODE_LIMIT);
  const shownIds = new Set(shown.map((n) => n.id));
  const names = new Map(shown.map((n) => [n.id, n.name]));
  const nodes = shown
    .map(
      (n) =>
        `<li class="gnode${n.id === payload.center ? " center" : ""}" data-entity="${escapeHtml(n.id)}">` +
        `${escapeHtml(n.name)} <span class="etype">[${escapeHtml(n.type)}]</span></li>`,
    )
    .join("");
  const edges = payload.edges
    .filter((e) => shownIds.has(e.head) && shownIds.has(e.tail))
    .map(
      (e) =>
        `<li class="gedge">${escapeHtml(names.get(e.head) ?? e.head)} ` +
        `—${escapeHtml(e.relation)}${e.normalized ? "" : " (unnormalized)"}→ ` +
        `${escapeHtml(names.get(e.tail) ?? e.tail)}</li>`,
    )
    .join("");
  const capNote =
    payload.nodes.length > shown.length || payload.truncated
      ? `<p class="cap-note">showing ${shown.length} of ${payload.nodes.length}+ nodes</p>`
      : "";
  return `
<div class="neighborhood" data-center="${escapeHtml(payload.center)}" data-hops="${payload.hops}">
  ${capNote}
  <div class="columns">
    <ul class="gnodes">${nodes}</ul>
    <ul class="gedges">${edges}</ul>
  </div>
</div>`;
}
