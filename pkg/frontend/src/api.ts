/** Typed client for the triage service (/api/v1). */

export interface SessionCreated {
  session_id: string;
}

export interface AlternativeView {
  symptom_id: string;
  representative: string;
  similarity: number;
}

export interface MatchView {
  text: string;
  matched: string | null;
  matched_representative: string | null;
  similarity: number;
  alternatives: AlternativeView[];
  confirmed: number;
}

export interface SuggestionView {
  symptom_id: string;
  representative: string;
  count: number;
}

export interface ResponseCounts {
  confirmed: number;
  declined: number;
}

export interface RankedView {
  rank: number;
  disease_id: string;
  name: string;
  score: number;
  zero_score: boolean;
}

export interface DetailView {
  name: string;
  symptoms: string[];
  description: string;
  treatment: string;
}

export interface HealthView {
  status: string;
  corpus: { diseases: number; symptoms: number };
}

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

function describeFailure(status: number, body: unknown): string {
  if (body && typeof body === "object") {
    const record = body as Record<string, unknown>;
    if (typeof record.error === "string") {
      return record.error;
    }
    if (Array.isArray(record.violations)) {
      const parts = record.violations.map((v) => {
        const item = v as Record<string, unknown>;
        return `${item.field}: ${item.message}`;
      });
      return `invalid request: ${parts.join("; ")}`;
    }
  }
  return `request failed with status ${status}`;
}

export class TriageApi {
  private readonly fetchFn: typeof fetch;

  constructor(
    private readonly baseUrl: string = "",
    fetchFn?: typeof fetch,
  ) {
    this.fetchFn = fetchFn ?? globalThis.fetch.bind(globalThis);
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}/api/v1${path}`, init);
    let body: unknown = null;
    try {
      body = await response.json();
    } catch {
      body = null;
    }
    if (!response.ok) {
      throw new ApiError(response.status, describeFailure(response.status, body));
    }
    return body as T;
  }

  private post<T>(path: string, payload?: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: payload === undefined ? undefined : JSON.stringify(payload),
    });
  }

  createSession(): Promise<SessionCreated> {
    return this.post<SessionCreated>("/sessions");
  }

  submitSymptom(sessionId: string, text: string): Promise<MatchView> {
    return this.post<MatchView>(`/sessions/${sessionId}/symptoms`, { text });
  }

  suggestions(sessionId: string, batch = 5): Promise<SuggestionView[]> {
    return this.request<SuggestionView[]>(`/sessions/${sessionId}/suggestions?batch=${batch}`);
  }

  respond(sessionId: string, symptomId: string, answer: "yes" | "no"): Promise<ResponseCounts> {
    return this.post<ResponseCounts>(`/sessions/${sessionId}/responses`, {
      symptom_id: symptomId,
      answer,
    });
  }

  predict(sessionId: string, k = 10): Promise<RankedView[]> {
    return this.post<RankedView[]>(`/sessions/${sessionId}/predict?k=${k}`);
  }

  detail(sessionId: string, rank: number): Promise<DetailView> {
    return this.request<DetailView>(`/sessions/${sessionId}/diseases/${rank}`);
  }

  health(): Promise<HealthView> {
    return this.request<HealthView>("/healthz");
  }
}
