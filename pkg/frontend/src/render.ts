/** DOM builders for the three panes and the toast.
 *
 * Pure functions from state to elements, taking the Document explicitly so
 * tests can drive them with jsdom. No pane reads anything but the state it
 * is handed; edge and relation labels come verbatim from service responses.
 */

import type { AnswerPayload, EntityRef } from "./api.js";
import { visibleEdges, visibleNodes, type ExplorerState } from "./explorer.js";

/** Index of the evidence line a citation chip targets: the first context
 * line citing the same chunk. Returns -1 when the answer carries a citation
 * with no matching line (the service contract makes that impossible, but a
 * chip must never point at a missing anchor). */
export function citationLineIndex(answer: AnswerPayload, chunkId: string): number {
  return answer.context.findIndex((line) => line.citation.chunk_id === chunkId);
}

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderAnswerPane(doc: Document, answer: AnswerPayload | null): HTMLElement {
  const pane = el(doc, "section", "answer-pane");
  if (!answer) {
    pane.appendChild(el(doc, "p", "placeholder", "Ask a question to begin."));
    return pane;
  }
  if (answer.degraded) {
    const banner = el(doc, "div", "degraded-banner", "No graph evidence was found for this question.");
    banner.setAttribute("role", "alert");
    pane.appendChild(banner);
  }
  const text = el(doc, "div", "answer-text");
  for (const paragraph of answer.text.split("\n")) {
    text.appendChild(el(doc, "p", undefined, paragraph));
  }
  pane.appendChild(text);

  const chips = el(doc, "div", "citation-chips");
  for (const citation of answer.citations) {
    const target = citationLineIndex(answer, citation.chunk_id);
    const chip = el(doc, "a", "citation-chip", `${citation.book} · ${citation.chapter}`);
    chip.dataset.chunkId = citation.chunk_id;
    if (target >= 0) chip.href = `#evidence-line-${target}`;
    chips.appendChild(chip);
  }
  pane.appendChild(chips);
  return pane;
}

export function renderEvidencePane(doc: Document, answer: AnswerPayload | null): HTMLElement {
  const pane = el(doc, "section", "evidence-pane");
  if (!answer || answer.context.length === 0) {
    pane.appendChild(el(doc, "p", "placeholder", "Retrieved evidence appears here."));
    return pane;
  }
  const list = el(doc, "ol", "evidence-lines");
  answer.context.forEach((line, index) => {
    const item = el(doc, "li", "evidence-line");
    item.id = `evidence-line-${index}`;
    item.appendChild(el(doc, "span", "evidence-text", line.text));
    item.appendChild(el(doc, "span", "evidence-score", line.score.toFixed(3)));
    list.appendChild(item);
  });
  pane.appendChild(list);
  return pane;
}

export interface ExplorerHandlers {
  onExpand: (entityId: string) => void;
}

function nodeButton(doc: Document, node: EntityRef, state: ExplorerState, handlers: ExplorerHandlers): HTMLElement {
  const wrap = el(doc, "div", "explorer-node");
  const button = el(doc, "button", "node-button", node.name);
  button.dataset.entityId = node.id;
  button.appendChild(el(doc, "span", "node-category", node.category));
  if (state.pending[node.id]) {
    button.disabled = true;
    button.classList.add("pending");
  }
  if (state.exhausted[node.id]) {
    button.classList.add("exhausted");
    button.appendChild(el(doc, "span", "node-exhausted", "no further links"));
  }
  button.addEventListener("click", () => handlers.onExpand(node.id));
  wrap.appendChild(button);
  const badge = state.badges[node.id];
  if (badge) {
    const badgeEl = el(doc, "span", "node-badge", badge);
    badgeEl.setAttribute("role", "alert");
    wrap.appendChild(badgeEl);
  }
  return wrap;
}

export function renderExplorerPane(
  doc: Document,
  state: ExplorerState,
  handlers: ExplorerHandlers,
): HTMLElement {
  const pane = el(doc, "section", "explorer-pane");
  const nodes = visibleNodes(state);
  if (nodes.length === 0) {
    pane.appendChild(el(doc, "p", "placeholder", "Entities from the evidence appear here; click one to expand it."));
    return pane;
  }
  const nodeList = el(doc, "div", "explorer-nodes");
  for (const node of nodes) {
    nodeList.appendChild(nodeButton(doc, node, state, handlers));
  }
  pane.appendChild(nodeList);

  const edges = visibleEdges(state);
  if (edges.length > 0) {
    const edgeList = el(doc, "ul", "explorer-edges");
    for (const edge of edges) {
      const item = el(doc, "li", "explorer-edge");
      item.dataset.edgeId = edge.id;
      const subjectName = state.nodes[edge.subject]?.name ?? edge.subject;
      const objectName = state.nodes[edge.object]?.name ?? edge.object;
      item.appendChild(el(doc, "span", "edge-subject", subjectName));
      item.appendChild(el(doc, "span", "edge-relation", edge.relation));
      item.appendChild(el(doc, "span", "edge-object", objectName));
      edgeList.appendChild(item);
    }
    pane.appendChild(edgeList);
  }
  return pane;
}

export function renderToast(doc: Document, message: string, onDismiss: () => void): HTMLElement {
  const toast = el(doc, "div", "toast", message);
  toast.setAttribute("role", "alert");
  const dismiss = el(doc, "button", "toast-dismiss", "dismiss");
  dismiss.addEventListener("click", onDismiss);
  toast.appendChild(dismiss);
  return toast;
}
