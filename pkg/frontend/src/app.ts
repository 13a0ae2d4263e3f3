// Session controller: holds the latest service responses and turns them
// into a view tree. All state comes from the service; reloading a page (or
// constructing a second controller on the same session id) reproduces the
// identical view. Answers post to the service and then re-fetch; a failed
// request leaves the current view untouched and offers a retry.

import { h, text, VNode } from "./dom.js";
import { Api } from "./api.js";
import { renderGraph, renderNodeDetail, renderSession } from "./render.js";
import { GraphPayload, SessionView } from "./types.js";

export class SessionController {
  view: SessionView | null = null;
  graph: GraphPayload | null = null;
  error: string | null = null;
  selected: string | null = null;
  private pendingAnswer: "accept" | "reject" | null = null;
  onChange: () => void = () => {};

  constructor(private api: Api) {}

  async open(id: string): Promise<void> {
    this.view = await this.api.getSession(id);
    this.graph = await this.api.getGraph(id);
    this.error = null;
    this.onChange();
  }

  async respond(answer: "accept" | "reject"): Promise<void> {
    if (!this.view || this.view.status !== "needs-input") return;
    const id = this.view.id;
    try {
      this.view = await this.api.respond(id, answer);
      // poll the derived artifacts only after the round has advanced
      this.graph = await this.api.getGraph(id);
      this.error = null;
      this.pendingAnswer = null;
      this.selected = null;
    } catch (err) {
      this.error = `request failed: ${(err as Error).message}`;
      this.pendingAnswer = answer;
    }
    this.onChange();
  }

  async retry(): Promise<void> {
    if (this.pendingAnswer) {
      const answer = this.pendingAnswer;
      this.pendingAnswer = null;
      await this.respond(answer);
    }
  }

  select(net: string): void {
    this.selected = net;
    this.onChange();
  }

  render(): VNode {
    if (!this.view) {
      return text("div", "no session loaded", { class: "placeholder" });
    }
    const session = renderSession(this.view, this.error, {
      accept: () => void this.respond("accept"),
      reject: () => void this.respond("reject"),
      retry: () => void this.retry(),
    });
    const graph = this.graph
      ? renderGraph(this.graph, { onSelect: (net) => this.select(net) })
      : text("div", "graph unavailable", { class: "placeholder" });
    const detail = this.graph
      ? renderNodeDetail(this.graph, this.selected)
      : text("div", "", { class: "detail" });
    return h("div", { class: "app" }, [session, graph, detail]);
  }
}
