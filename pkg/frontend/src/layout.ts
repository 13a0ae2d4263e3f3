// Deterministic layered layout: rank = longest dependency distance from a
// root, order within a rank is alphabetical. The same payload always lands
// on the same pixels, which keeps screenshots stable for visual regression.

import { GraphView } from "./types.js";

export interface Point {
  x: number;
  y: number;
}

export interface Layout {
  ranks: Map<string, number>;
  positions: Map<string, Point>;
  width: number;
  height: number;
}

const X_STEP = 190;
const Y_STEP = 86;
const MARGIN = 60;

export function layerLayout(graph: GraphView): Layout {
  const names = graph.nodes.map((n) => n.name).sort();
  const ranks = new Map<string, number>(names.map((n) => [n, 0]));
  const edges = [...graph.edges].sort(
    (a, b) => a.src.localeCompare(b.src) || a.dst.localeCompare(b.dst),
  );
  // longest-path relaxation; the iteration cap keeps cycles finite and the
  // sorted sweep keeps the result deterministic
  for (let pass = 0; pass < names.length; pass += 1) {
    let changed = false;
    for (const e of edges) {
      const want = (ranks.get(e.src) ?? 0) + 1;
      if (want > (ranks.get(e.dst) ?? 0) && want <= names.length) {
        ranks.set(e.dst, want);
        changed = true;
      }
    }
    if (!changed) break;
  }
  const byRank = new Map<number, string[]>();
  for (const name of names) {
    const r = ranks.get(name) ?? 0;
    const bucket = byRank.get(r) ?? [];
    bucket.push(name);
    byRank.set(r, bucket);
  }
  const positions = new Map<string, Point>();
  let maxRank = 0;
  let maxLane = 0;
  for (const [rank, members] of byRank) {
    members.sort();
    members.forEach((name, lane) => {
      positions.set(name, { x: MARGIN + rank * X_STEP, y: MARGIN + lane * Y_STEP });
      maxLane = Math.max(maxLane, lane);
    });
    maxRank = Math.max(maxRank, rank);
  }
  return {
    ranks,
    positions,
    width: MARGIN * 2 + maxRank * X_STEP + 120,
    height: MARGIN * 2 + maxLane * Y_STEP + 40,
  };
}
