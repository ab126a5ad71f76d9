/** View state for one chat session.
 *
 * All triage state lives in the service session; this module only tracks what
 * has been rendered. The transcript is append-only and every reducer returns a
 * fresh state object, so re-rendering from state is a pure function.
 */

import type { DetailView, MatchView, RankedView, SuggestionView } from "./api.js";

export type Answer = "yes" | "no";

export type ChatEvent =
  | { kind: "user_text"; text: string }
  | { kind: "match_feedback"; match: MatchView }
  | { kind: "suggestion_prompt"; suggestions: SuggestionView[] }
  | { kind: "answer"; symptomId: string; representative: string; answer: Answer }
  | { kind: "info"; text: string }
  | { kind: "ranking"; ranking: RankedView[] }
  | { kind: "detail"; detail: DetailView }
  | { kind: "error"; message: string; retryable: boolean };

export type Phase = "collecting" | "predicted";

export interface PendingSuggestion {
  suggestion: SuggestionView;
  answer: Answer | null;
}

export interface UiSessionState {
  sessionId: string | null;
  transcript: readonly ChatEvent[];
  pending: readonly PendingSuggestion[];
  phase: Phase;
  confirmedCount: number;
  busy: boolean;
}

export function initialState(): UiSessionState {
  return {
    sessionId: null,
    transcript: [],
    pending: [],
    phase: "collecting",
    confirmedCount: 0,
    busy: false,
  };
}

export function pushEvent(state: UiSessionState, event: ChatEvent): UiSessionState {
  return { ...state, transcript: [...state.transcript, event] };
}

export function withSession(state: UiSessionState, sessionId: string): UiSessionState {
  return { ...state, sessionId };
}

export function withBusy(state: UiSessionState, busy: boolean): UiSessionState {
  return { ...state, busy };
}

export function applyMatch(state: UiSessionState, match: MatchView): UiSessionState {
  return {
    ...pushEvent(state, { kind: "match_feedback", match }),
    confirmedCount: match.confirmed,
  };
}

export function applySuggestions(
  state: UiSessionState,
  suggestions: SuggestionView[],
): UiSessionState {
  if (suggestions.length === 0) {
    return pushEvent(state, {
      kind: "info",
      text: "No more suggestions. Press “I’m done” for the prediction.",
    });
  }
  return {
    ...pushEvent(state, { kind: "suggestion_prompt", suggestions }),
    pending: suggestions.map((suggestion) => ({ suggestion, answer: null })),
  };
}

export function isAnswered(state: UiSessionState, symptomId: string): boolean {
  const entry = state.pending.find((p) => p.suggestion.symptom_id === symptomId);
  return entry !== undefined && entry.answer !== null;
}

/** Record a chip answer; a second answer for the same chip is ignored. */
export function answerSuggestion(
  state: UiSessionState,
  symptomId: string,
  answer: Answer,
  confirmedCount?: number,
): UiSessionState {
  const entry = state.pending.find((p) => p.suggestion.symptom_id === symptomId);
  if (entry === undefined || entry.answer !== null) {
    return state;
  }
  const next = pushEvent(state, {
    kind: "answer",
    symptomId,
    representative: entry.suggestion.representative,
    answer,
  });
  return {
    ...next,
    pending: state.pending.map((p) =>
      p.suggestion.symptom_id === symptomId ? { ...p, answer } : p,
    ),
    confirmedCount: confirmedCount ?? state.confirmedCount,
  };
}

export function pendingDrained(state: UiSessionState): boolean {
  return state.pending.every((p) => p.answer !== null);
}

export function applyRanking(state: UiSessionState, ranking: RankedView[]): UiSessionState {
  // unanswered chips stay unanswered; rendering disables them once predicted
  return {
    ...pushEvent(state, { kind: "ranking", ranking }),
    phase: "predicted",
  };
}

export function applyDetail(state: UiSessionState, detail: DetailView): UiSessionState {
  return pushEvent(state, { kind: "detail", detail });
}

export function applyError(
  state: UiSessionState,
  message: string,
  retryable: boolean,
): UiSessionState {
  return pushEvent(state, { kind: "error", message, retryable });
}
