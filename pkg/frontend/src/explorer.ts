/** Explorer pane state: a pure fold over service responses.
 *
 * Nodes accumulate as answers and expansions mention them. Edges are
 * different: each expanded entity contributes exactly the edge list of its
 * most recent /graph/neighborhood response, so re-expanding replaces that
 * contribution instead of piling on top of it, and nothing the service
 * never returned can appear on the canvas.
 */

import type { EntityRef, EvidenceLine, GraphEdge, NeighborhoodResponse } from "./api.js";

export interface ExplorerState {
  /** Every entity seen so far, by id. */
  nodes: Record<string, EntityRef>;
  /** Edge lists keyed by the expansion seed that returned them. */
  contributions: Record<string, GraphEdge[]>;
  /** Seeds whose last expansion returned no edges at all. */
  exhausted: Record<string, boolean>;
  /** Per-entity inline error message from a failed expansion. */
  badges: Record<string, string>;
  /** Entities with an expansion currently in flight. */
  pending: Record<string, boolean>;
}

export function emptyExplorer(): ExplorerState {
  return { nodes: {}, contributions: {}, exhausted: {}, badges: {}, pending: {} };
}

/** Make the entities of an answer's evidence visible as expandable nodes.
 * Only nodes: evidence triples did not come from a neighborhood response,
 * so they contribute no edges. */
export function seedFromEvidence(state: ExplorerState, lines: EvidenceLine[]): ExplorerState {
  const nodes = { ...state.nodes };
  for (const line of lines) {
    nodes[line.subject.id] = line.subject;
    nodes[line.object.id] = line.object;
  }
  return { ...state, nodes };
}

export function expansionStarted(state: ExplorerState, entityId: string): ExplorerState {
  return { ...state, pending: { ...state.pending, [entityId]: true } };
}

/** Fold one neighborhood response into the canvas. Feeding the same
 * response twice lands in the same state. */
export function mergeExpansion(
  state: ExplorerState,
  response: NeighborhoodResponse,
): ExplorerState {
  const nodes = { ...state.nodes };
  for (const entity of response.entities) {
    nodes[entity.id] = entity;
  }
  const pending = { ...state.pending };
  delete pending[response.seed];
  const badges = { ...state.badges };
  delete badges[response.seed];
  return {
    nodes,
    contributions: { ...state.contributions, [response.seed]: response.triples },
    exhausted: { ...state.exhausted, [response.seed]: response.triples.length === 0 },
    badges,
    pending,
  };
}

export function expansionFailed(
  state: ExplorerState,
  entityId: string,
  message: string,
): ExplorerState {
  const pending = { ...state.pending };
  delete pending[entityId];
  return { ...state, pending, badges: { ...state.badges, [entityId]: message } };
}

/** All edges currently on display: the union of the latest contribution of
 * every expanded seed, deduplicated by edge id (two adjacent expansions
 * legitimately return their shared edge). */
export function visibleEdges(state: ExplorerState): GraphEdge[] {
  const seen = new Set<string>();
  const edges: GraphEdge[] = [];
  for (const seedId of Object.keys(state.contributions).sort()) {
    for (const edge of state.contributions[seedId] ?? []) {
      if (!seen.has(edge.id)) {
        seen.add(edge.id);
        edges.push(edge);
      }
    }
  }
  return edges;
}

/** Nodes sorted for stable rendering: category, then name. */
export function visibleNodes(state: ExplorerState): EntityRef[] {
  return Object.values(state.nodes).sort(
    (a, b) => a.category.localeCompare(b.category) || a.name.localeCompare(b.name),
  );
}
