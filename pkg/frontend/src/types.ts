// Payload shapes of the activitykg HTTP API (/v1/*).

export interface PathNode {
  id: string;
  name: string;
  type: string;
}

export interface PathEdge {
  relation: string;
  observed_at: string;
  confidence: number;
  forward: boolean;
}

export interface EvidencePath {
  nodes: PathNode[];
  edges: PathEdge[];
}

export interface RankedResult {
  item_id: string;
  name: string;
  score: number;
  explanation: string;
  evidence: EvidencePath[];
  components?: Record<string, number>;
}

export interface ExpertsResponse {
  query: string;
  results: RankedResult[];
}

export interface TasksResponse {
  user: string;
  horizon_days: number;
  results: RankedResult[];
}

export interface AnalyticsResponse {
  metric: string;
  target: string;
  overall: number | null;
  overall_support: [number, number];
  groups: Record<string, number | null>;
  support: Record<string, [number, number]>;
  rendered: string;
}

export interface EntityInfo {
  id: string;
  name: string;
  type: string;
  attributes: Record<string, string>;
  created_from: string[];
}

export interface NeighborhoodEdge {
  head: string;
  relation: string;
  tail: string;
  confidence: number;
  observed_at: string;
  normalized: boolean;
  head_name?: string;
  tail_name?: string;
}

export interface NeighborhoodResponse {
  center: string;
  hops: number;
  truncated: boolean;
  nodes: EntityInfo[];
  edges: NeighborhoodEdge[];
}

export interface ApiError {
  code: string;
  message: string;
  stage: string;
}

// Score component weights mirrored from the service config; the console
// never computes scores, it only checks that displayed components are
// consistent with the displayed total.
export const PRIORITY_WEIGHTS: Record<string, number> = {
  urgency: 0.4,
  importance: 0.3,
  dependency: 0.3,
};
