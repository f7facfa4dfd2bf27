/** Tiny virtual-node layer: views are pure data, mounting is browser-only.
 * Tests assert on VNode trees without a DOM. */

export interface VNode {
  tag: string;
  attrs: Record<string, string>;
  on?: Record<string, (ev: Event) => void>;
  children: (VNode | string)[];
}

export function h(
  tag: string,
  attrs: Record<string, string> = {},
  children: (VNode | string)[] = [],
  on?: Record<string, (ev: Event) => void>,
): VNode {
  return { tag, attrs, children, on };
}

const SVG_NS = "http://www.w3.org/2000/svg";
const SVG_TAGS = new Set(["svg", "polyline", "circle", "line", "text", "g", "title", "rect"]);

export function mount(node: VNode | string, doc: Document): Node {
  if (typeof node === "string") return doc.createTextNode(node);
  const el = SVG_TAGS.has(node.tag)
    ? doc.createElementNS(SVG_NS, node.tag)
    : doc.createElement(node.tag);
  for (const [key, value] of Object.entries(node.attrs)) {
    el.setAttribute(key, value);
  }
  if (node.on) {
    for (const [event, handler] of Object.entries(node.on)) {
      el.addEventListener(event, handler);
    }
  }
  for (const child of node.children) {
    el.appendChild(mount(child, doc));
  }
  return el;
}

export function replaceChildren(target: Element, node: VNode, doc: Document): void {
  target.replaceChildren(mount(node, doc));
}

/** Depth-first search helpers used by tests and event wiring. */
export function findAll(node: VNode | string, pred: (n: VNode) => boolean): VNode[] {
  if (typeof node === "string") return [];
  const here = pred(node) ? [node] : [];
  return here.concat(...node.children.map((c) => findAll(c, pred)));
}

export function textOf(node: VNode | string): string {
  if (typeof node === "string") return node;
  return node.children.map(textOf).join("");
}
