/** Entry point: wires the API client, the state transitions and the DOM.
 * All rendering goes through one redraw of the three panes; handlers only
 * dispatch state transitions and re-render. */

import { ApiClient, ApiError, CONTENT_RELATIONS, type QueryMode } from "./api.js";
import { expansionFailed, expansionStarted, mergeExpansion } from "./explorer.js";
import {
  answerReceived,
  explorerUpdated,
  initialState,
  modeChanged,
  queryFailed,
  querySubmitted,
  questionEdited,
  toastDismissed,
  type ViewState,
} from "./state.js";
import {
  renderAnswerPane,
  renderEvidencePane,
  renderExplorerPane,
  renderToast,
} from "./render.js";

const api = new ApiClient();
let state: ViewState = initialState();

function mustFind<T extends Element>(selector: string): T {
  const node = document.querySelector<T>(selector);
  if (!node) throw new Error(`missing element ${selector}`);
  return node;
}

const form = mustFind<HTMLFormElement>("#query-form");
const questionInput = mustFind<HTMLInputElement>("#question");
const modeSelect = mustFind<HTMLSelectElement>("#mode");
const submitButton = mustFind<HTMLButtonElement>("#submit");
const answerMount = mustFind<HTMLElement>("#answer");
const evidenceMount = mustFind<HTMLElement>("#evidence");
const explorerMount = mustFind<HTMLElement>("#explorer");
const toastMount = mustFind<HTMLElement>("#toast");

function setState(next: ViewState): void {
  state = next;
  redraw();
}

function errorMessage(err: unknown): string {
  if (err instanceof ApiError) {
    return err.status === 0 ? `service unreachable: ${err.detail}` : err.detail;
  }
  return err instanceof Error ? err.message : String(err);
}

async function expandEntity(entityId: string): Promise<void> {
  setState(explorerUpdated(state, expansionStarted(state.explorer, entityId)));
  try {
    const response = await api.neighborhood(entityId, {
      depth: 1,
      relations: CONTENT_RELATIONS,
    });
    setState(explorerUpdated(state, mergeExpansion(state.explorer, response)));
  } catch (err) {
    setState(explorerUpdated(state, expansionFailed(state.explorer, entityId, errorMessage(err))));
  }
}

async function submitQuery(): Promise<void> {
  const question = state.question.trim();
  if (!question || state.queryPending) return;
  setState(querySubmitted(state));
  try {
    const answer =
      state.mode === "ingredient_lookup"
        ? await api.searchIngredient(question)
        : await api.qa(question, state.mode);
    setState(answerReceived(state, answer));
  } catch (err) {
    setState(queryFailed(state, errorMessage(err)));
  }
}

function redraw(): void {
  questionInput.value = state.question;
  modeSelect.value = state.mode;
  questionInput.disabled = state.queryPending;
  submitButton.disabled = state.queryPending;
  submitButton.textContent = state.queryPending ? "asking..." : "ask";

  answerMount.replaceChildren(renderAnswerPane(document, state.answer));
  evidenceMount.replaceChildren(renderEvidencePane(document, state.answer));
  explorerMount.replaceChildren(
    renderExplorerPane(document, state.explorer, { onExpand: (id) => void expandEntity(id) }),
  );
  toastMount.replaceChildren();
  if (state.toast) {
    toastMount.appendChild(
      renderToast(document, state.toast, () => setState(toastDismissed(state))),
    );
  }
}

form.addEventListener("submit", (event) => {
  event.preventDefault();
  void submitQuery();
});
questionInput.addEventListener("input", () => {
  state = questionEdited(state, questionInput.value);
});
modeSelect.addEventListener("change", () => {
  state = modeChanged(state, modeSelect.value as QueryMode);
});

redraw();
