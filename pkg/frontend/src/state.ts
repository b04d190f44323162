// View state with a stale-result guard.
//
// Every submission gets a monotonically increasing token per view; a
// response is applied only when its token is still the latest, so results
// shown on screen are always tagged with the query that produced them.

import type { ApiError } from "./types.js";

export type ViewName = "experts" | "tasks" | "analytics" | "graph";

export interface TaggedResult<T> {
  query: string;
  payload: T;
  raw: string;
}

export interface ViewState {
  activeView: ViewName;
  lastQuery: Partial<Record<ViewName, string>>;
  results: Partial<Record<ViewName, TaggedResult<unknown>>>;
  selectedEntity: string | null;
  errorBanner: ApiError | null;
}

export function initialState(): ViewState {
  return {
    activeView: "experts",
    lastQuery: {},
    results: {},
    selectedEntity: null,
    errorBanner: null,
  };
}

export class ViewStateStore {
  state = initialState();
  private tokens: Partial<Record<ViewName, number>> = {};

  setActive(view: ViewName): void {
    this.state.activeView = view;
  }

  /** Register a new submission; older in-flight tokens become stale. */
  begin(view: ViewName, query: string): number {
    const token = (this.tokens[view] ?? 0) + 1;
    this.tokens[view] = token;
    this.state.lastQuery[view] = query;
    this.state.errorBanner = null;
    return token;
  }

  private isCurrent(view: ViewName, token: number): boolean {
    return this.tokens[view] === token;
  }

  /** Apply a result; returns false (and changes nothing) when stale. */
  resolve<T>(view: ViewName, token: number, query: string, payload: T, raw: string): boolean {
    if (!this.isCurrent(view, token)) {
      return false;
    }
    this.state.results[view] = { query, payload, raw };
    this.state.errorBanner = null;
    return true;
  }

  /** Surface an error; returns false when the submission is stale. */
  fail(view: ViewName, token: number, error: ApiError): boolean {
    if (!this.isCurrent(view, token)) {
      return false;
    }
    this.state.errorBanner = error;
    return true;
  }

  current<T>(view: ViewName): TaggedResult<T> | undefined {
    return this.state.results[view] as TaggedResult<T> | undefined;
  }
}
