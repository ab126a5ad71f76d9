/** Drives one chat session: API calls in, state transitions out.
 *
 * At most one mutating request is in flight (state.busy); duplicate chip
 * answers are dropped before they reach the network; a new suggestion batch is
 * requested only once the current one is drained.
 */

import { ApiError, TriageApi } from "./api.js";
import type { Answer, UiSessionState } from "./state.js";
import {
  answerSuggestion,
  applyDetail,
  applyError,
  applyMatch,
  applyRanking,
  applySuggestions,
  initialState,
  isAnswered,
  pendingDrained,
  pushEvent,
  withBusy,
  withSession,
} from "./state.js";

export interface ControllerOptions {
  suggestionBatch?: number;
  topK?: number;
}

export class ChatController {
  state: UiSessionState = initialState();
  onChange?: (state: UiSessionState) => void;
  private lastAction: (() => Promise<void>) | null = null;

  constructor(
    private readonly api: TriageApi,
    private readonly options: ControllerOptions = {},
  ) {}

  private update(state: UiSessionState): void {
    this.state = state;
    this.onChange?.(state);
  }

  private fail(error: unknown): void {
    if (error instanceof ApiError) {
      // 4xx contract violations are chat messages, never silent
      this.update(applyError(this.state, error.message, false));
    } else {
      const message = error instanceof Error ? error.message : String(error);
      this.update(applyError(this.state, `network error: ${message}`, true));
    }
  }

  private async guarded(action: () => Promise<void>, remember = true): Promise<void> {
    if (this.state.busy) {
      return;
    }
    if (remember) {
      this.lastAction = action;
    }
    this.update(withBusy(this.state, true));
    try {
      await action();
    } catch (error) {
      this.fail(error);
    } finally {
      this.update(withBusy(this.state, false));
    }
  }

  async start(): Promise<void> {
    await this.guarded(async () => {
      const created = await this.api.createSession();
      this.update(withSession(this.state, created.session_id));
    });
  }

  private requireSession(): string {
    if (this.state.sessionId === null) {
      throw new Error("no session");
    }
    return this.state.sessionId;
  }

  private async fetchNextBatchIfDrained(): Promise<void> {
    if (this.state.phase !== "collecting" || !pendingDrained(this.state)) {
      return;
    }
    if (this.state.confirmedCount === 0) {
      return;
    }
    const suggestions = await this.api.suggestions(
      this.requireSession(),
      this.options.suggestionBatch ?? 5,
    );
    this.update(applySuggestions(this.state, suggestions));
  }

  /** Match one comma-separated free-text entry, then pull a suggestion batch. */
  async submitText(text: string): Promise<void> {
    const parts = text
      .split(",")
      .map((part) => part.trim())
      .filter((part) => part.length > 0);
    if (parts.length === 0 || this.state.phase !== "collecting") {
      return;
    }
    await this.guarded(async () => {
      const sessionId = this.requireSession();
      this.update(pushEvent(this.state, { kind: "user_text", text }));
      for (const part of parts) {
        const match = await this.api.submitSymptom(sessionId, part);
        this.update(applyMatch(this.state, match));
      }
      await this.fetchNextBatchIfDrained();
    });
  }

  /** Answer a suggestion chip; the second click on the same chip is a no-op. */
  async answerChip(symptomId: string, answer: Answer): Promise<void> {
    if (this.state.phase !== "collecting" || isAnswered(this.state, symptomId)) {
      return;
    }
    await this.guarded(async () => {
      const counts = await this.api.respond(this.requireSession(), symptomId, answer);
      this.update(answerSuggestion(this.state, symptomId, answer, counts.confirmed));
      await this.fetchNextBatchIfDrained();
    });
  }

  /** "I'm done": predict and render the ranking table. */
  async done(): Promise<void> {
    if (this.state.confirmedCount === 0) {
      return;
    }
    await this.guarded(async () => {
      const ranking = await this.api.predict(this.requireSession(), this.options.topK ?? 10);
      this.update(applyRanking(this.state, ranking));
    });
  }

  async openDetail(rank: number): Promise<void> {
    await this.guarded(async () => {
      const detail = await this.api.detail(this.requireSession(), rank);
      this.update(applyDetail(this.state, detail));
    });
  }

  /** Re-run the step that hit a network error. */
  async retry(): Promise<void> {
    const action = this.lastAction;
    if (action !== null) {
      await this.guarded(action, false);
    }
  }
}
