/** Layered positions for the diagram view.
 *
 * Nodes sit in the layer given by their longest predecessor chain, sorted
 * lexicographically within a layer -- the same deterministic ordering the
 * engine uses, so the picture is stable across reloads. */

import type { DiagramDocument } from "./types.js";

export interface PlacedNode {
  name: string;
  kind: "chance" | "decision" | "value";
  layer: number;
  index: number;
  x: number;
  y: number;
}

export interface DiagramLayout {
  nodes: PlacedNode[];
  edges: { from: string; to: string }[];
  width: number;
  height: number;
}

export const NODE_W = 120;
export const NODE_H = 48;
export const H_GAP = 60;
export const V_GAP = 28;

export function layoutDiagram(document: DiagramDocument): DiagramLayout {
  const layer = new Map<string, number>();
  const pending = new Map(document.nodes.map((n) => [n.name, n.predecessors.length]));
  const followers = new Map<string, string[]>(document.nodes.map((n) => [n.name, []]));
  for (const node of document.nodes) {
    for (const pred of node.predecessors) {
      followers.get(pred)?.push(node.name);
    }
  }

  const queue = document.nodes
    .filter((n) => n.predecessors.length === 0)
    .map((n) => n.name);
  queue.forEach((name) => layer.set(name, 0));
  while (queue.length) {
    const current = queue.shift() as string;
    const depth = layer.get(current) ?? 0;
    for (const next of followers.get(current) ?? []) {
      layer.set(next, Math.max(layer.get(next) ?? 0, depth + 1));
      pending.set(next, (pending.get(next) ?? 1) - 1);
      if (pending.get(next) === 0) queue.push(next);
    }
  }

  const byLayer = new Map<number, string[]>();
  for (const node of document.nodes) {
    const depth = layer.get(node.name) ?? 0;
    if (!byLayer.has(depth)) byLayer.set(depth, []);
    byLayer.get(depth)!.push(node.name);
  }
  for (const names of byLayer.values()) names.sort();

  const kinds = new Map(document.nodes.map((n) => [n.name, n.kind]));
  const placed: PlacedNode[] = [];
  let maxRow = 0;
  for (const [depth, names] of [...byLayer.entries()].sort((a, b) => a[0] - b[0])) {
    names.forEach((name, index) => {
      placed.push({
        name,
        kind: kinds.get(name) ?? "chance",
        layer: depth,
        index,
        x: depth * (NODE_W + H_GAP),
        y: index * (NODE_H + V_GAP),
      });
      maxRow = Math.max(maxRow, index);
    });
  }

  const edges = document.nodes.flatMap((node) =>
    node.predecessors.map((pred) => ({ from: pred, to: node.name })),
  );
  const layers = byLayer.size;
  return {
    nodes: placed,
    edges,
    width: layers * NODE_W + Math.max(0, layers - 1) * H_GAP,
    height: (maxRow + 1) * NODE_H + maxRow * V_GAP,
  };
}
