/** Console view state and its transition functions.
 *
 * Every transition is a pure function old state -> new state, so the whole
 * UI is reconstructable by replaying the service responses in order. A
 * failed request only ever touches `status` and `toast`: the previous
 * answer, evidence and explorer canvas stay on screen.
 */

import type { AnswerPayload, QueryMode } from "./api.js";
import {
  emptyExplorer,
  seedFromEvidence,
  type ExplorerState,
} from "./explorer.js";

export interface ViewState {
  question: string;
  mode: QueryMode;
  /** One in-flight query at a time; the form is disabled while pending. */
  queryPending: boolean;
  answer: AnswerPayload | null;
  toast: string | null;
  explorer: ExplorerState;
}

export function initialState(): ViewState {
  return {
    question: "",
    mode: "diagnostic_qa",
    queryPending: false,
    answer: null,
    toast: null,
    explorer: emptyExplorer(),
  };
}

export function questionEdited(state: ViewState, question: string): ViewState {
  return { ...state, question };
}

export function modeChanged(state: ViewState, mode: QueryMode): ViewState {
  return { ...state, mode };
}

export function querySubmitted(state: ViewState): ViewState {
  return { ...state, queryPending: true, toast: null };
}

/** A successful answer replaces the answer/evidence panes and makes the
 * evidence entities available in the explorer. */
export function answerReceived(state: ViewState, answer: AnswerPayload): ViewState {
  return {
    ...state,
    queryPending: false,
    answer,
    toast: null,
    explorer: seedFromEvidence(state.explorer, answer.context),
  };
}

/** Query failure: surface a toast, keep everything else as it was. */
export function queryFailed(state: ViewState, message: string): ViewState {
  return { ...state, queryPending: false, toast: message };
}

export function toastDismissed(state: ViewState): ViewState {
  return { ...state, toast: null };
}

export function explorerUpdated(state: ViewState, explorer: ExplorerState): ViewState {
  return { ...state, explorer };
}
