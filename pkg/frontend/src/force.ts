// Small deterministic force-directed layout: charge repulsion, spring
// edges, center gravity. No randomness — initial positions are hashed
// from node ids, so the same graph always lays out the same way.

import type { GraphEdge, GraphNode } from "./types.js";

export interface Point {
  x: number;
  y: number;
}

function hash(text: string): number {
  let h = 2166136261;
  for (let i = 0; i < text.length; i++) {
    h ^= text.charCodeAt(i);
    h = Math.imul(h, 16777619);
  }
  return (h >>> 0) / 4294967296;
}

export function forceLayout(
  nodes: GraphNode[],
  edges: GraphEdge[],
  width = 640,
  height = 480,
  iterations = 150
): Map<string, Point> {
  const pos = new Map<string, Point>();
  const vel = new Map<string, Point>();
  for (const node of nodes) {
    pos.set(node.id, {
      x: width * (0.15 + 0.7 * hash(node.id)),
      y: height * (0.15 + 0.7 * hash(node.id + "#y")),
    });
    vel.set(node.id, { x: 0, y: 0 });
  }
  const ids = nodes.map((n) => n.id);
  const area = width * height;
  const k = Math.sqrt(area / Math.max(1, nodes.length)) * 0.6;

  for (let step = 0; step < iterations; step++) {
    const cool = 1 - step / iterations;
    // pairwise repulsion
    for (let i = 0; i < ids.length; i++) {
      for (let j = i + 1; j < ids.length; j++) {
        const a = pos.get(ids[i])!;
        const b = pos.get(ids[j])!;
        let dx = a.x - b.x;
        let dy = a.y - b.y;
        let d2 = dx * dx + dy * dy;
        if (d2 < 1e-6) {
          // deterministic nudge for coincident nodes
          dx = 0.01 * (i - j);
          dy = 0.01;
          d2 = dx * dx + dy * dy;
        }
        const f = (k * k) / d2;
        const va = vel.get(ids[i])!;
        const vb = vel.get(ids[j])!;
        va.x += dx * f * 0.01;
        va.y += dy * f * 0.01;
        vb.x -= dx * f * 0.01;
        vb.y -= dy * f * 0.01;
      }
    }
    // spring attraction along edges, stiffer for heavier edges
    for (const edge of edges) {
      const a = pos.get(edge.source);
      const b = pos.get(edge.target);
      if (!a || !b) continue;
      const dx = b.x - a.x;
      const dy = b.y - a.y;
      const d = Math.max(1e-3, Math.sqrt(dx * dx + dy * dy));
      const f = ((d - k) / d) * 0.02 * Math.min(4, edge.weight);
      const va = vel.get(edge.source)!;
      const vb = vel.get(edge.target)!;
      va.x += dx * f;
      va.y += dy * f;
      vb.x -= dx * f;
      vb.y -= dy * f;
    }
    // gravity toward center + integrate
    for (const id of ids) {
      const p = pos.get(id)!;
      const v = vel.get(id)!;
      v.x += (width / 2 - p.x) * 0.002;
      v.y += (height / 2 - p.y) * 0.002;
      p.x += v.x * cool;
      p.y += v.y * cool;
      v.x *= 0.6;
      v.y *= 0.6;
      p.x = Math.min(width - 12, Math.max(12, p.x));
      p.y = Math.min(height - 12, Math.max(12, p.y));
    }
  }
  return pos;
}
