import { ApiClient } from "./api.js";
import type {
  NetworkDoc,
  Recommendation,
  SessionConfig,
  SessionState,
} from "./types.js";

export type EdgeStyle = "solid" | "dashed" | "resolved-solid" | "removed";

export interface EdgeView {
  id: number;
  src: number;
  dst: number;
  certain: boolean;
  observed: 0 | 1 | null;
  style: EdgeStyle;
}

export interface NodeView {
  id: number;
  label: string;
  chosen: boolean;
  recommended: boolean;
}

export interface ConsoleView {
  status: string;
  round: number;
  totalRounds: number;
  nodes: NodeView[];
  edges: EdgeView[];
  recommendation: number[] | null;
  expectedSpread: number | null;
  spreadEstimate: number;
}

/** Style rule: dashed while unknown, solid once confirmed, gone once denied. */
export function edgeStyle(certain: boolean, observed: 0 | 1 | null): EdgeStyle {
  if (certain) return "solid";
  if (observed === null) return "dashed";
  return observed === 1 ? "resolved-solid" : "removed";
}

/**
 * Derive everything the screen shows from the latest server payloads.  No
 * planning or spread arithmetic happens here.
 */
export function buildView(
  state: SessionState,
  recommendation: Recommendation | null,
): ConsoleView {
  const labels = state.network.node_labels;
  const recSet = new Set(recommendation?.action ?? state.pending_recommendation ?? []);
  const chosen = new Set(state.chosen_nodes);
  const nodes: NodeView[] = [];
  for (let v = 0; v < state.network.n_nodes; v++) {
    nodes.push({
      id: v,
      label: labels ? (labels[v] ?? String(v)) : String(v),
      chosen: chosen.has(v),
      recommended: state.status !== "complete" && recSet.has(v),
    });
  }
  const edges: EdgeView[] = [];
  for (const e of state.network.certain_edges) {
    edges.push({ id: e.id, src: e.src, dst: e.dst, certain: true, observed: null, style: "solid" });
  }
  for (const e of state.network.uncertain_edges) {
    const observed = (e.observed ?? null) as 0 | 1 | null;
    edges.push({
      id: e.id,
      src: e.src,
      dst: e.dst,
      certain: false,
      observed,
      style: edgeStyle(false, observed),
    });
  }
  return {
    status: state.status,
    round: state.round,
    totalRounds: state.T,
    nodes,
    edges,
    recommendation: recommendation ? [...recommendation.action] : null,
    expectedSpread: recommendation ? recommendation.rationale.expected_spread : null,
    spreadEstimate: state.spread_estimate,
  };
}

/**
 * Edge-by-edge observation entry for one round.  Only the edges the current
 * recommendation actually observes can be set, and submission stays blocked
 * until every one of them has an explicit exists/absent answer.
 */
export class ObservationForm {
  private bits = new Map<number, 0 | 1>();
  private attendance: Set<number>;

  constructor(
    public readonly action: number[],
    public readonly observableEdges: number[],
  ) {
    this.attendance = new Set(action); // default: everyone showed up
  }

  setEdge(edgeId: number, exists: boolean): void {
    if (!this.observableEdges.includes(edgeId)) {
      throw new Error(`edge ${edgeId} is not observed by this round's action`);
    }
    this.bits.set(edgeId, exists ? 1 : 0);
  }

  clearEdge(edgeId: number): void {
    this.bits.delete(edgeId);
  }

  edgeValue(edgeId: number): 0 | 1 | null {
    return this.bits.get(edgeId) ?? null;
  }

  setAttendance(node: number, present: boolean): void {
    if (!this.action.includes(node)) {
      throw new Error(`node ${node} is not part of the action`);
    }
    if (present) this.attendance.add(node);
    else this.attendance.delete(node);
  }

  get attended(): number[] {
    return [...this.attendance].sort((a, b) => a - b);
  }

  get missingEdges(): number[] {
    return this.observableEdges.filter((e) => !this.bits.has(e));
  }

  get complete(): boolean {
    return this.missingEdges.length === 0;
  }

  payload(): { edges: Record<string, number>; attended: number[] } {
    if (!this.complete) {
      throw new Error(`missing bits for edges: ${this.missingEdges.join(", ")}`);
    }
    const edges: Record<string, number> = {};
    for (const [id, bit] of this.bits) edges[String(id)] = bit;
    return { edges, attended: this.attended };
  }
}

/**
 * One operator, one session: serializes its own requests and refetches the
 * authoritative state after every mutation, so the view can never drift from
 * the server.
 */
export class SessionController {
  state: SessionState | null = null;
  recommendation: Recommendation | null = null;
  form: ObservationForm | null = null;

  constructor(private api: ApiClient) {}

  get view(): ConsoleView {
    if (!this.state) throw new Error("no session yet");
    return buildView(this.state, this.recommendation);
  }

  async create(network: NetworkDoc, config: SessionConfig): Promise<string> {
    const created = await this.api.createSession(network, config);
    this.state = await this.api.getState(created.id);
    this.recommendation = null;
    this.form = null;
    return created.id;
  }

  async attach(id: string): Promise<void> {
    this.state = await this.api.getState(id);
    this.recommendation = null;
    this.form = null;
  }

  async fetchRecommendation(): Promise<Recommendation> {
    if (!this.state) throw new Error("no session yet");
    const rec = await this.api.getRecommendation(this.state.id);
    this.recommendation = rec;
    this.form = new ObservationForm(rec.action, rec.rationale.observed_edges);
    this.state = await this.api.getState(this.state.id);
    return rec;
  }

  async submit(): Promise<void> {
    if (!this.state || !this.form) throw new Error("nothing to submit");
    const { edges, attended } = this.form.payload();
    await this.api.submitObservation(this.state.id, edges, attended);
    this.state = await this.api.getState(this.state.id);
    this.recommendation = null;
    this.form = null;
  }
}
