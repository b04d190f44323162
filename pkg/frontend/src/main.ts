// Browser wiring: forms, view switching, and API calls.

import { ApiClient, ServiceError } from "./api.js";
import {
  renderAnalytics,
  renderBanner,
  renderEmptyState,
  renderExperts,
  renderNeighborhood,
  renderTasks,
} from "./render.js";
import { ViewStateStore, type ViewName } from "./state.js";
import type {
  AnalyticsResponse,
  ExpertsResponse,
  NeighborhoodResponse,
  TasksResponse,
} from "./types.js";

const store = new ViewStateStore();
const client = new ApiClient(localStorage.getItem("akg.base") ?? "http://127.0.0.1:8080",
                             localStorage.getItem("akg.key") ?? "");

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found as T;
}

function paintBanner(): void {
  el("banner-slot").innerHTML = renderBanner(store.state.errorBanner);
}

function switchView(view: ViewName): void {
  store.setActive(view);
  for (const name of ["experts", "tasks", "analytics", "graph"] as const) {
    el(`view-${name}`).style.display = name === view ? "" : "none";
    el(`tab-${name}`).classList.toggle("active", name === view);
  }
}

function wireNeighborhoodLinks(container: HTMLElement): void {
  for (const button of container.querySelectorAll<HTMLButtonElement>(".open-neighborhood")) {
    button.addEventListener("click", () => {
      const entity = button.dataset["entity"];
      if (entity) void loadNeighborhood(entity);
    });
  }
}

async function runExperts(): Promise<void> {
  const text = el<HTMLInputElement>("experts-text").value.trim();
  if (!text) return;
  const token = store.begin("experts", text);
  paintBanner();
  try {
    const { payload, raw } = await client.queryExperts<ExpertsResponse>(text, 10);
    if (store.resolve("experts", token, text, payload, raw)) {
      el("experts-results").innerHTML = renderExperts(payload, raw);
      wireNeighborhoodLinks(el("experts-results"));
      paintBanner();
    }
  } catch (error) {
    onError("experts", token, error);
  }
}

async function runTasks(): Promise<void> {
  const user = el<HTMLInputElement>("tasks-user").value.trim();
  const horizon = Number(el<HTMLInputElement>("tasks-horizon").value) || 7;
  if (!user) return;
  const tag = `${user}@${horizon}`;
  const token = store.begin("tasks", tag);
  paintBanner();
  try {
    const { payload, raw } = await client.taskPriorities<TasksResponse>(user, horizon);
    if (store.resolve("tasks", token, tag, payload, raw)) {
      el("tasks-results").innerHTML = renderTasks(payload, raw);
      paintBanner();
    }
  } catch (error) {
    onError("tasks", token, error);
  }
}

async function runAnalytics(): Promise<void> {
  const text = el<HTMLInputElement>("analytics-text").value.trim();
  if (!text) return;
  const token = store.begin("analytics", text);
  paintBanner();
  try {
    const { payload, raw } = await client.analytics<AnalyticsResponse>(text);
    if (store.resolve("analytics", token, text, payload, raw)) {
      el("analytics-results").innerHTML = renderAnalytics(payload, raw);
      paintBanner();
    }
  } catch (error) {
    onError("analytics", token, error);
  }
}

async function loadNeighborhood(entityId: string): Promise<void> {
  switchView("graph");
  store.state.selectedEntity = entityId;
  el<HTMLInputElement>("graph-entity").value = entityId;
  const token = store.begin("graph", entityId);
  paintBanner();
  try {
    const { payload, raw } = await client.neighborhood<NeighborhoodResponse>(entityId, 2);
    if (store.resolve("graph", token, entityId, payload, raw)) {
      el("graph-results").innerHTML = renderNeighborhood(payload);
      paintBanner();
    }
  } catch (error) {
    onError("graph", token, error);
  }
}

function onError(view: ViewName, token: number, error: unknown): void {
  if (error instanceof DOMException && error.name === "AbortError") {
    return; // superseded by a newer submission
  }
  const detail =
    error instanceof ServiceError
      ? error.detail
      : { code: "Unreachable", message: String(error), stage: "transport" };
  if (store.fail(view, token, detail)) {
    paintBanner();
  }
}

function init(): void {
  el("tab-experts").addEventListener("click", () => switchView("experts"));
  el("tab-tasks").addEventListener("click", () => switchView("tasks"));
  el("tab-analytics").addEventListener("click", () => switchView("analytics"));
  el("tab-graph").addEventListener("click", () => switchView("graph"));

  el("experts-form").addEventListener("submit", (e) => { e.preventDefault(); void runExperts(); });
  el("tasks-form").addEventListener("submit", (e) => { e.preventDefault(); void runTasks(); });
  el("tasks-refresh").addEventListener("click", () => void runTasks());
  el("analytics-form").addEventListener("submit", (e) => { e.preventDefault(); void runAnalytics(); });
  el("graph-form").addEventListener("submit", (e) => {
    e.preventDefault();
    const id = el<HTMLInputElement>("graph-entity").value.trim();
    if (id) void loadNeighborhood(id);
  });

  el("settings-form").addEventListener("submit", (e) => {
    e.preventDefault();
    const base = el<HTMLInputElement>("setting-base").value.trim();
    const key = el<HTMLInputElement>("setting-key").value.trim();
    localStorage.setItem("akg.base", base);
    localStorage.setItem("akg.key", key);
    client.configure(base, key);
  });
  el<HTMLInputElement>("setting-base").value = localStorage.getItem("akg.base") ?? "http://127.0.0.1:8080";

  for (const name of ["experts", "tasks", "analytics", "graph"]) {
    el(`${name}-results`).innerHTML = renderEmptyState("Run a query to see results.");
  }
  switchView("experts");
}

document.addEventListener("DOMContentLoaded", init);
