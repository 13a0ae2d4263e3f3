// A thin virtual-node layer so rendering is a pure function of payloads.
// Views are plain trees that tests can walk and count without a browser;
// `mount` realizes a tree against whatever Document implementation it is
// handed (the real DOM in the browser, a stub in tests).

export interface VNode {
  tag: string;
  attrs: Record<string, string>;
  children: VNode[];
  text: string | null;
  on: Record<string, () => void>;
}

export function h(
  tag: string,
  attrs: Record<string, string> = {},
  children: VNode[] = [],
  text: string | null = null,
  on: Record<string, () => void> = {},
): VNode {
  return { tag, attrs, children, text, on };
}

export function text(tag: string, value: string, attrs: Record<string, string> = {}): VNode {
  return h(tag, attrs, [], value);
}

/** Depth-first collection of nodes matching a predicate. */
export function collect(root: VNode, pred: (n: VNode) => boolean): VNode[] {
  const out: VNode[] = [];
  const walk = (n: VNode) => {
    if (pred(n)) out.push(n);
    n.children.forEach(walk);
  };
  walk(root);
  return out;
}

export function byClass(root: VNode, cls: string): VNode[] {
  return collect(root, (n) => (n.attrs["class"] ?? "").split(" ").includes(cls));
}

const SVG_NS = "http://www.w3.org/2000/svg";
const SVG_TAGS = new Set([
  "svg", "g", "ellipse", "line", "path", "text", "defs", "marker", "polygon",
]);

interface MinimalElement {
  setAttribute(name: string, value: string): void;
  appendChild(child: unknown): unknown;
  addEventListener(event: string, handler: () => void): void;
  textContent: string | null;
}

interface MinimalDocument {
  createElement(tag: string): MinimalElement;
  createElementNS?(ns: string, tag: string): MinimalElement;
}

export function mount(node: VNode, doc: MinimalDocument): MinimalElement {
  const el =
    SVG_TAGS.has(node.tag) && doc.createElementNS
      ? doc.createElementNS(SVG_NS, node.tag)
      : doc.createElement(node.tag);
  for (const [name, value] of Object.entries(node.attrs)) {
    el.setAttribute(name, value);
  }
  if (node.text !== null) {
    el.textContent = node.text;
  }
  for (const [event, handler] of Object.entries(node.on)) {
    el.addEventListener(event, handler);
  }
  for (const child of node.children) {
    el.appendChild(mount(child, doc));
  }
  return el;
}
