// Wire types mirroring the session service responses. The client renders
// exactly what the service says; it performs no verification of its own.

export const SCHEMA_VERSION = 1;

export type SessionStatus =
  | "needs-input"
  | "verified"
  | "variable-time"
  | "exhausted";

export interface SuggestionView {
  candidate: string;
  weight: number;
  counterexample: string[];
  blame: string[];
  rationale: Record<string, string[]>;
}

export interface SessionView {
  schema_version: number;
  id: string;
  status: SessionStatus;
  iteration: number;
  suggestion: SuggestionView | null;
  assumptions: { public: string[]; flush: string[] };
  excluded: string[];
  design: string;
}

export interface GraphNode {
  name: string;
  round: number | null; // null: proven constant-time
  ct: boolean;
}

export interface GraphEdge {
  src: string;
  dst: string;
  kind: "data" | "ctrl";
}

export interface GraphView {
  nodes: GraphNode[];
  edges: GraphEdge[];
}

export interface CounterexampleView {
  nets: string[];
  scc_fallback: boolean;
  justifications: Record<string, string[]>;
}

export interface GraphPayload {
  schema_version: number;
  id: string;
  graph: GraphView | null;
  reduced: GraphView | null;
  counterexample: CounterexampleView | null;
  blame?: string[];
}

export interface TracePayload {
  schema_version: number;
  id: string;
  trace: string | null;
  violation: {
    sink: string;
    cycle: number;
    live_l: boolean;
    live_r: boolean;
  } | null;
}
