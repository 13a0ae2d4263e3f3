import { describe, expect, it } from "vitest";

import { layerLayout } from "../src/layout.js";
import { pipelineGraph } from "./fixtures.js";

const graph = pipelineGraph.graph!;

describe("layerLayout", () => {
  it("assigns every node a position", () => {
    const layout = layerLayout(graph);
    for (const node of graph.nodes) {
      expect(layout.positions.has(node.name)).toBe(true);
    }
  });

  it("ranks roots at zero and dependents after their inputs", () => {
    const layout = layerLayout(graph);
    expect(layout.ranks.get("IF_pc")).toBe(0);
    expect(layout.ranks.get("IF_inst")).toBe(1);
    expect(layout.ranks.get("ID_instr")).toBeGreaterThan(layout.ranks.get("IF_inst")!);
  });

  it("is deterministic for a shuffled copy of the same payload", () => {
    const shuffled = {
      nodes: [...graph.nodes].reverse(),
      edges: [...graph.edges].reverse(),
    };
    const a = layerLayout(graph);
    const b = layerLayout(shuffled);
    expect([...a.positions.entries()].sort()).toEqual(
      [...b.positions.entries()].sort(),
    );
  });

  it("handles cycles without diverging", () => {
    const cyclic = {
      nodes: [
        { name: "a", round: 1, ct: false },
        { name: "b", round: 1, ct: false },
      ],
      edges: [
        { src: "a", dst: "b", kind: "data" as const },
        { src: "b", dst: "a", kind: "data" as const },
      ],
    };
    const layout = layerLayout(cyclic);
    expect(layout.positions.size).toBe(2);
  });
});
