import type { ConsoleView, EdgeView, NodeView } from "./model.js";

/**
 * Deterministic circular layout rendered to an SVG string.  Uncertain edges
 * are dashed until an observation resolves them; confirmed ones turn solid,
 * denied ones disappear.  Recommended nodes get a highlight ring.
 */

export interface LayoutPoint {
  x: number;
  y: number;
}

export function circularLayout(n: number, width: number, height: number): LayoutPoint[] {
  const cx = width / 2;
  const cy = height / 2;
  const r = Math.min(width, height) / 2 - 26;
  const pts: LayoutPoint[] = [];
  for (let i = 0; i < n; i++) {
    const angle = (2 * Math.PI * i) / n - Math.PI / 2;
    pts.push({ x: cx + r * Math.cos(angle), y: cy + r * Math.sin(angle) });
  }
  return pts;
}

function edgeElement(e: EdgeView, pts: LayoutPoint[]): string {
  if (e.style === "removed") return "";
  const a = pts[e.src];
  const b = pts[e.dst];
  if (!a || !b) return "";
  const cls =
    e.style === "dashed" ? "edge dashed" : e.style === "resolved-solid" ? "edge resolved" : "edge";
  const dash = e.style === "dashed" ? ' stroke-dasharray="6 4"' : "";
  return (
    `<line class="${cls}" data-edge="${e.id}" x1="${a.x.toFixed(1)}" y1="${a.y.toFixed(1)}"` +
    ` x2="${b.x.toFixed(1)}" y2="${b.y.toFixed(1)}"${dash} marker-end="url(#arrow)"/>`
  );
}

function nodeElement(v: NodeView, pts: LayoutPoint[]): string {
  const p = pts[v.id];
  if (!p) return "";
  const classes = ["node"];
  if (v.chosen) classes.push("chosen");
  if (v.recommended) classes.push("recommended");
  const ring = v.recommended
    ? `<circle class="ring" cx="${p.x.toFixed(1)}" cy="${p.y.toFixed(1)}" r="14"/>`
    : "";
  return (
    ring +
    `<circle class="${classes.join(" ")}" data-node="${v.id}" cx="${p.x.toFixed(1)}"` +
    ` cy="${p.y.toFixed(1)}" r="9"/>` +
    `<text class="label" x="${p.x.toFixed(1)}" y="${(p.y - 13).toFixed(1)}">${v.label}</text>`
  );
}

export function renderGraphSvg(view: ConsoleView, width = 720, height = 560): string {
  const pts = circularLayout(view.nodes.length, width, height);
  const defs =
    '<defs><marker id="arrow" viewBox="0 0 8 8" refX="7" refY="4" markerWidth="6"' +
    ' markerHeight="6" orient="auto-start-reverse"><path d="M0,0 L8,4 L0,8 z"/></marker></defs>';
  const edges = view.edges.map((e) => edgeElement(e, pts)).join("");
  const nodes = view.nodes.map((v) => nodeElement(v, pts)).join("");
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}"` +
    ` width="${width}" height="${height}">${defs}<g>${edges}</g><g>${nodes}</g></svg>`
  );
}
