// Pure rendering: payloads in, virtual trees out. Visual conventions: solid
// data edges, dashed control edges, a check or cross plus the drop round on
// every node, counterexample nodes emphasized, blamed nodes outlined.

import { h, text, VNode } from "./dom.js";
import { layerLayout } from "./layout.js";
import {
  GraphPayload,
  GraphView,
  SCHEMA_VERSION,
  SessionView,
} from "./types.js";

export interface GraphHandlers {
  onSelect(net: string): void;
}

export function schemaBanner(got: number): VNode {
  return text(
    "div",
    `schema version mismatch: service sent v${got}, client expects v${SCHEMA_VERSION}`,
    { class: "banner banner-error" },
  );
}

export function emptyGraphPlaceholder(): VNode {
  return text("div", "reduced graph is empty: verified or vacuous", {
    class: "placeholder",
  });
}

function nodeLabel(name: string, round: number | null, ct: boolean): string {
  return ct ? `${name} (✓, ⊥)` : `${name} (✗, ${round})`;
}

function edgeView(
  view: GraphView,
  positions: Map<string, { x: number; y: number }>,
  kind: "data" | "ctrl",
): VNode[] {
  return view.edges
    .filter((e) => e.kind === kind)
    .map((e) => {
      const a = positions.get(e.src);
      const b = positions.get(e.dst);
      if (!a || !b) return text("g", "");
      const attrs: Record<string, string> = {
        class: `edge edge-${kind}`,
        x1: String(a.x),
        y1: String(a.y),
        x2: String(b.x),
        y2: String(b.y),
        stroke: "#555",
        "marker-end": "url(#arrow)",
      };
      if (kind === "ctrl") {
        attrs["stroke-dasharray"] = "6 4";
      }
      return h("line", attrs);
    });
}

export function renderGraph(payload: GraphPayload, handlers: GraphHandlers): VNode {
  if (payload.schema_version !== SCHEMA_VERSION) {
    return schemaBanner(payload.schema_version);
  }
  const view = payload.graph;
  if (!view || view.nodes.length === 0) {
    return emptyGraphPlaceholder();
  }
  const layout = layerLayout(view);
  const cex = new Set(payload.counterexample?.nets ?? []);
  const blame = new Set(payload.blame ?? []);
  const nodes = view.nodes.map((n) => {
    const p = layout.positions.get(n.name)!;
    const classes = ["node", n.ct ? "node-ct" : "node-vartime"];
    if (cex.has(n.name)) classes.push("node-cex");
    if (blame.has(n.name)) classes.push("node-blame");
    return h(
      "g",
      { class: classes.join(" "), "data-net": n.name },
      [
        h("ellipse", {
          cx: String(p.x),
          cy: String(p.y),
          rx: "72",
          ry: "26",
          fill: cex.has(n.name) ? "#ffe3e3" : "#f5f7fb",
          stroke: cex.has(n.name) ? "#c0392b" : blame.has(n.name) ? "#b8860b" : "#2c3e50",
          "stroke-width": cex.has(n.name) ? "3" : "1.5",
        }),
        text("text", nodeLabel(n.name, n.round, n.ct), {
          x: String(p.x),
          y: String(p.y + 4),
          "text-anchor": "middle",
          class: "node-label",
        }),
      ],
      null,
      { click: () => handlers.onSelect(n.name) },
    );
  });
  const arrow = h("defs", {}, [
    h(
      "marker",
      {
        id: "arrow",
        viewBox: "0 0 10 10",
        refX: "9",
        refY: "5",
        markerWidth: "7",
        markerHeight: "7",
        orient: "auto-start-reverse",
      },
      [h("polygon", { points: "0,0 10,5 0,10", fill: "#555" })],
    ),
  ]);
  return h(
    "svg",
    {
      class: "depgraph",
      viewBox: `0 0 ${layout.width} ${layout.height}`,
      width: String(layout.width),
      height: String(layout.height),
    },
    [arrow, ...edgeView(view, layout.positions, "data"), ...edgeView(view, layout.positions, "ctrl"), ...nodes],
  );
}

export function renderNodeDetail(
  payload: GraphPayload,
  selected: string | null,
): VNode {
  if (!selected) {
    return text("div", "click a node for its justification", { class: "detail" });
  }
  const node = payload.graph?.nodes.find((n) => n.name === selected);
  const lines: VNode[] = [
    text("h3", selected),
    text(
      "div",
      node?.ct
        ? "proven constant-time (⊥)"
        : `lost constant-time in round ${node?.round}`,
      { class: "detail-round" },
    ),
  ];
  const path = payload.counterexample?.justifications[selected];
  if (path) {
    lines.push(
      text("div", `path to sink: ${path.join(" → ")}`, { class: "detail-path" }),
    );
  }
  return h("div", { class: "detail" }, lines);
}

export interface SessionHandlers {
  accept(): void;
  reject(): void;
  retry(): void;
}

export function renderSession(
  view: SessionView,
  error: string | null,
  handlers: SessionHandlers,
): VNode {
  if (view.schema_version !== SCHEMA_VERSION) {
    return schemaBanner(view.schema_version);
  }
  const terminal = view.status !== "needs-input";
  const rows: VNode[] = [
    text("h2", `${view.design}: ${view.status}`, { class: `status status-${view.status}` }),
    text("div", `iteration ${view.iteration}`, { class: "iteration" }),
  ];
  if (error) {
    rows.push(
      h("div", { class: "banner banner-error" }, [
        text("span", error),
        h("button", { class: "retry" }, [], "retry", { click: handlers.retry }),
      ]),
    );
  }
  if (view.suggestion) {
    rows.push(
      h("div", { class: "suggestion" }, [
        text("div", `Mark '${view.suggestion.candidate}' as PUBLIC? [Y/n]`, {
          class: "prompt",
        }),
        text(
          "div",
          `counterexample: ${view.suggestion.counterexample.join(", ")} — ` +
            `blame: ${view.suggestion.blame.join(", ")} (weight ${view.suggestion.weight})`,
          { class: "suggestion-context" },
        ),
      ]),
    );
  }
  const buttonAttrs = (cls: string): Record<string, string> =>
    terminal ? { class: cls, disabled: "disabled" } : { class: cls };
  rows.push(
    h("div", { class: "controls" }, [
      h("button", buttonAttrs("accept"), [], "Accept", {
        click: () => {
          if (!terminal) handlers.accept();
        },
      }),
      h("button", buttonAttrs("reject"), [], "Reject", {
        click: () => {
          if (!terminal) handlers.reject();
        },
      }),
    ]),
  );
  rows.push(
    text("div", `public: ${view.assumptions.public.join(" ") || "(none)"}`, {
      class: "assume-public",
    }),
    text("div", `flush: ${view.assumptions.flush.join(" ") || "(none)"}`, {
      class: "assume-flush",
    }),
    text("div", `excluded: ${view.excluded.join(" ") || "(none)"}`, {
      class: "assume-excluded",
    }),
  );
  return h("div", { class: "session" }, rows);
}
