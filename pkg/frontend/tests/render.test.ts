// Contract tests against recorded API fixtures: every number the console
// displays must be byte-equal to the corresponding payload field, and the
// expert ordering must match the CLI output for the same query.

import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import {
  componentsMatchScore,
  renderAnalytics,
  renderBanner,
  renderEmptyState,
  renderExperts,
  renderNeighborhood,
  renderTasks,
  NEIGHBORHOOD_NODE_LIMIT,
} from "../src/render.js";
import type {
  AnalyticsResponse,
  ApiError,
  ExpertsResponse,
  NeighborhoodResponse,
  TasksResponse,
} from "../src/types.js";

function fixture(name: string): string {
  return readFileSync(new URL(`./fixtures/${name}`, import.meta.url), "utf-8");
}

/** Independent literal extraction for the tests (regex only, no shared code). */
function literalsOf(raw: string, key: string): string[] {
  const out: string[] = [];
  for (const m of raw.matchAll(new RegExp(`"${key}":(-?[0-9][^,}\\]]*)`, "g"))) {
    out.push(m[1] as string);
  }
  return out;
}

describe("experts view", () => {
  const raw = fixture("experts.json");
  const payload = JSON.parse(raw) as ExpertsResponse;
  const html = renderExperts(payload, raw);

  it("renders one row per result with verbatim score bytes", () => {
    const expected = literalsOf(raw, "score");
    expect(expected.length).toBe(payload.results.length);
    const shown = [...html.matchAll(/data-field="score">([^<]+)</g)].map((m) => m[1]);
    expect(shown).toEqual(expected);
  });

  it("keeps ranking order and exposes evidence per expert", () => {
    const names = [...html.matchAll(/class="link open-neighborhood"[^>]*>([^<]+)</g)].map((m) => m[1]);
    expect(names).toEqual(payload.results.map((r) => r.name));
    expect((html.match(/class="evidence-path"/g) ?? []).length).toBe(
      payload.results.reduce((n, r) => n + r.evidence.length, 0),
    );
    for (const result of payload.results) {
      expect(result.score).toBeGreaterThan(0);
      expect(result.evidence.length).toBeGreaterThan(0);
      expect(html).toContain(`data-entity="${result.item_id}"`);
    }
  });

  it("matches the CLI ordering for the same query", () => {
    const cli = JSON.parse(fixture("cli_experts.json")) as { results: { item_id: string; score: number }[] };
    const apiIds = payload.results.map((r) => r.item_id);
    const cliIds = cli.results.map((r) => r.item_id);
    expect(apiIds).toEqual(cliIds);
    payload.results.forEach((r, i) => {
      expect(r.score).toBe(cli.results[i]!.score);
    });
  });

  it("tags results with the producing query", () => {
    expect(html).toContain(`data-query="${payload.query}"`);
  });
});

describe("tasks view", () => {
  const raw = fixture("tasks.json");
  const payload = JSON.parse(raw) as TasksResponse;
  const html = renderTasks(payload, raw);

  it("renders verbatim score and component bytes", () => {
    const shownScores = [...html.matchAll(/data-field="score">([^<]+)</g)].map((m) => m[1]);
    expect(shownScores).toEqual(literalsOf(raw, "score"));
    for (const key of ["urgency", "importance", "dependency"]) {
      const shown = [...html.matchAll(new RegExp(`data-field="${key}">${key} ([^<]+)<`, "g"))].map(
        (m) => m[1],
      );
      expect(shown).toEqual(literalsOf(raw, key));
    }
  });

  it("weighted components reproduce every displayed score", () => {
    for (const result of payload.results) {
      expect(componentsMatchScore(result.components ?? {}, result.score)).toBe(true);
    }
    expect(html).not.toContain('data-consistent="false"');
  });

  it("renders the empty state for a user with no open tasks", () => {
    const emptyRaw = fixture("tasks_empty.json");
    const empty = JSON.parse(emptyRaw) as TasksResponse;
    expect(empty.results).toEqual([]);
    expect(renderTasks(empty, emptyRaw)).toContain("empty-state");
  });
});

describe("analytics view", () => {
  const raw = fixture("analytics.json");
  const payload = JSON.parse(raw) as AnalyticsResponse;
  const html = renderAnalytics(payload, raw);

  it("shows the rendered sentence verbatim and the overall literal", () => {
    expect(html).toContain(payload.rendered);
    const overall = literalsOf(raw, "overall")[0];
    expect(overall).toBeDefined();
    expect(html).toContain(`data-field="overall">${overall}<`);
  });

  it("shows every group value with its raw bytes", () => {
    const groupSection = raw.slice(raw.indexOf('"groups"'), raw.indexOf('"support"'));
    for (const [, name, literal] of groupSection.matchAll(/"([a-z]+)":([0-9.e+-]+|null)/g)) {
      expect(html).toContain(`<td>${name}</td><td data-field="group">${literal}</td>`);
    }
  });
});

describe("neighborhood view", () => {
  const raw = fixture("neighborhood.json");
  const payload = JSON.parse(raw) as NeighborhoodResponse;
  const html = renderNeighborhood(payload);

  it("marks the center and caps at the legibility limit", () => {
    expect(html).toContain(`data-center="${payload.center}"`);
    const nodeCount = (html.match(/class="gnode[" ]/g) ?? []).length;
    expect(nodeCount).toBe(Math.min(payload.nodes.length, NEIGHBORHOOD_NODE_LIMIT));
  });

  it("only draws edges between shown nodes", () => {
    const shown = new Set(payload.nodes.slice(0, NEIGHBORHOOD_NODE_LIMIT).map((n) => n.id));
    const edgeCount = (html.match(/class="gedge"/g) ?? []).length;
    const expected = payload.edges.filter((e) => shown.has(e.head) && shown.has(e.tail)).length;
    expect(edgeCount).toBe(expected);
  });
});

describe("banners and empty states", () => {
  it("renders the structured error code", () => {
    const error = JSON.parse(fixture("error_noconcepts.json")) as ApiError;
    const html = renderBanner(error);
    expect(error.code).toBe("NoConceptsFound");
    expect(html).toContain("no matching concepts");
    expect(html).toContain('data-code="NoConceptsFound"');
  });

  it("renders generic errors with code and message", () => {
    const html = renderBanner({ code: "UnknownEntity", message: "nobody", stage: "query" });
    expect(html).toContain("UnknownEntity: nobody");
  });

  it("renders nothing without an error", () => {
    expect(renderBanner(null)).toBe("");
  });

  it("escapes markup in empty states", () => {
    expect(renderEmptyState("<b>hi</b>")).toContain("&lt;b&gt;hi&lt;/b&gt;");
  });
});
