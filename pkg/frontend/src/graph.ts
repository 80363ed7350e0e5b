/**
 * Deterministic node-link rendering of the server's graph document.
 *
 * Parts are laid out on a circle in document order (which the server keeps
 * equal to BOM order), edges drawn as chords labelled with their pin pair.
 * Rendering produces an SVG string, so it is testable without a DOM and
 * the UI only has to assign innerHTML.
 */
import { GraphDoc } from "./api.js";

export interface PlacedNode {
  id: string;
  label: string;
  x: number;
  y: number;
}

export interface Layout {
  width: number;
  height: number;
  nodes: PlacedNode[];
}

export function layoutGraph(doc: GraphDoc, width = 640, height = 480): Layout {
  const cx = width / 2;
  const cy = height / 2;
  const radius = Math.max(40, Math.min(width, height) / 2 - 70);
  const count = doc.nodes.length;
  const nodes = doc.nodes.map((node, i) => {
    const angle = (2 * Math.PI * i) / Math.max(count, 1) - Math.PI / 2;
    return {
      id: node.id,
      label: node.label,
      x: count === 1 ? cx : cx + radius * Math.cos(angle),
      y: count === 1 ? cy : cy + radius * Math.sin(angle),
    };
  });
  return { width, height, nodes };
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export interface RenderOptions {
  width?: number;
  height?: number;
  highlight?: string | null;
}

export function renderGraphSvg(doc: GraphDoc, options: RenderOptions = {}): string {
  const { width = 640, height = 480, highlight = null } = options;
  const layout = layoutGraph(doc, width, height);
  const byId = new Map(layout.nodes.map((n) => [n.id, n]));
  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}" class="netgraph" role="img">`,
  );
  for (const edge of doc.edges) {
    const a = byId.get(edge.source);
    const b = byId.get(edge.target);
    if (!a || !b) continue;
    const mx = (a.x + b.x) / 2;
    const my = (a.y + b.y) / 2;
    parts.push(
      `<line x1="${a.x.toFixed(1)}" y1="${a.y.toFixed(1)}" x2="${b.x.toFixed(1)}" y2="${b.y.toFixed(1)}" class="edge"/>`,
      `<text x="${mx.toFixed(1)}" y="${my.toFixed(1)}" class="edge-label">${escapeXml(edge.label)}</text>`,
    );
  }
  for (const node of layout.nodes) {
    const classes = node.id === highlight ? "node highlight" : "node";
    parts.push(
      `<g class="${classes}" data-node="${escapeXml(node.id)}">`,
      `<circle cx="${node.x.toFixed(1)}" cy="${node.y.toFixed(1)}" r="26"/>`,
      `<text x="${node.x.toFixed(1)}" y="${(node.y + 42).toFixed(1)}" class="node-label">${escapeXml(node.label)}</text>`,
      `</g>`,
    );
  }
  parts.push("</svg>");
  return parts.join("");
}
