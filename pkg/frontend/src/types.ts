/** Payload shapes of the session service API. */

export interface NetworkDoc {
  version: number;
  name?: string;
  n_nodes: number;
  node_labels?: string[] | null;
  certain_edges: { src: number; dst: number; p: number }[];
  uncertain_edges: { src: number; dst: number; p: number; u: number }[];
}

export interface SessionConfig {
  K: number;
  T: number;
  L: number;
  planner: string;
  planner_params?: Record<string, unknown>;
  seed?: number;
  particles?: number;
  attendees_only?: boolean;
}

export interface CreatedSession {
  id: string;
  status: string;
  round: number;
}

export interface AnnotatedEdge {
  id: number;
  src: number;
  dst: number;
  p: number;
  u?: number;
  observed?: 0 | 1 | null;
}

export interface SessionState {
  id: string;
  status: "awaiting_recommendation" | "awaiting_observation" | "complete";
  round: number;
  K: number;
  T: number;
  L: number;
  planner: string;
  network: {
    n_nodes: number;
    node_labels: string[] | null;
    certain_edges: AnnotatedEdge[];
    uncertain_edges: AnnotatedEdge[];
  };
  history: unknown[];
  pending_recommendation: number[] | null;
  chosen_nodes: number[];
  spread_estimate: number;
}

export interface Recommendation {
  round: number;
  action: number[];
  status: string;
  rationale: {
    node_scores: Record<string, number>;
    expected_spread: number;
    observed_edges: number[];
  };
}

export interface ObservationResult {
  status: string;
  round: number;
  spread_estimate: number;
}
