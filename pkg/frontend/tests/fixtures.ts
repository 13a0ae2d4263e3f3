// Canned service payloads for the bundled two-stage pipeline session,
// mirroring the JSON the service returns on a fresh session and after an
// accepted suggestion.

import { GraphPayload, SessionView } from "../src/types.js";

export const pipelineSession: SessionView = {
  schema_version: 1,
  id: "abc123def456",
  status: "needs-input",
  iteration: 1,
  suggestion: {
    candidate: "IF_pc",
    weight: 1,
    counterexample: ["ID_instr"],
    blame: ["Stall"],
    rationale: { ID_instr: ["ID_instr"] },
  },
  assumptions: { public: [], flush: [] },
  excluded: [],
  design: "pipeline",
};

export const verifiedSession: SessionView = {
  schema_version: 1,
  id: "abc123def456",
  status: "verified",
  iteration: 2,
  suggestion: null,
  assumptions: {
    public: ["IF_pc"],
    flush: ["EX_rt", "ID_instr", "ID_rt", "IF_inst", "Stall"],
  },
  excluded: [],
  design: "pipeline",
};

export const rejectedSession: SessionView = {
  ...pipelineSession,
  iteration: 2,
  suggestion: {
    candidate: "IF_inst",
    weight: 2,
    counterexample: ["ID_instr"],
    blame: ["Stall"],
    rationale: { ID_instr: ["ID_instr"] },
  },
  excluded: ["IF_pc"],
};

export const pipelineGraph: GraphPayload = {
  schema_version: 1,
  id: "abc123def456",
  graph: {
    nodes: [
      { name: "IF_pc", round: null, ct: true },
      { name: "IF_inst", round: null, ct: true },
      { name: "ID_instr", round: 1, ct: false },
      { name: "ID_rt", round: 2, ct: false },
      { name: "Stall", round: 3, ct: false },
      { name: "EX_rt", round: 3, ct: false },
    ],
    edges: [
      { src: "EX_rt", dst: "Stall", kind: "data" },
      { src: "ID_instr", dst: "ID_rt", kind: "data" },
      { src: "ID_rt", dst: "EX_rt", kind: "data" },
      { src: "ID_rt", dst: "Stall", kind: "data" },
      { src: "IF_inst", dst: "ID_instr", kind: "data" },
      { src: "IF_pc", dst: "IF_inst", kind: "data" },
      { src: "Stall", dst: "EX_rt", kind: "ctrl" },
      { src: "Stall", dst: "ID_instr", kind: "ctrl" },
    ],
  },
  reduced: {
    nodes: [{ name: "ID_instr", round: 1, ct: false }],
    edges: [],
  },
  counterexample: {
    nets: ["ID_instr"],
    scc_fallback: false,
    justifications: { ID_instr: ["ID_instr"] },
  },
  blame: ["Stall"],
};

export const verifiedGraph: GraphPayload = {
  schema_version: 1,
  id: "abc123def456",
  graph: null,
  reduced: null,
  counterexample: null,
};

export const emptyGraph: GraphPayload = {
  schema_version: 1,
  id: "abc123def456",
  graph: { nodes: [], edges: [] },
  reduced: { nodes: [], edges: [] },
  counterexample: null,
};
