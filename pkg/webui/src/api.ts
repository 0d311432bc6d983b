import type { CorpusEntry, IntakeForm, NextMove, ReplyPayload, TranscriptEntry } from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

async function asApiError(response: Response): Promise<ApiError> {
  let code = "http-error";
  let message = response.statusText;
  try {
    const body = await response.json();
    if (body && typeof body.error === "string") {
      code = body.error;
      message = body.message ?? message;
    }
  } catch {
    // non-JSON error body; keep the status text
  }
  return new ApiError(response.status, code, message);
}

export class ApiClient {
  constructor(private readonly baseUrl: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(`${this.baseUrl}/api/v1${path}`, {
      headers: { "Content-Type": "application/json" },
      ...init,
    });
    if (!response.ok) throw await asApiError(response);
    return response.json() as Promise<T>;
  }

  corpus(): Promise<{ entries: CorpusEntry[] }> {
    return this.request("/corpus");
  }

  async createSession(entry: string, intake: IntakeForm, config?: Record<string, number>): Promise<string> {
    const body = await this.request<{ session_id: string }>("/sessions", {
      method: "POST",
      body: JSON.stringify(config ? { entry, intake, config } : { entry, intake }),
    });
    return body.session_id;
  }

  /** Next system move, or null when the session is already closed (410). */
  async next(sessionId: string): Promise<NextMove | null> {
    try {
      return await this.request<NextMove>(`/sessions/${sessionId}/next`);
    } catch (err) {
      if (err instanceof ApiError && err.status === 410) return null;
      throw err;
    }
  }

  reply(
    sessionId: string,
    step: number,
    payload: ReplyPayload,
  ): Promise<{ terminal: boolean; outcome?: string }> {
    return this.request(`/sessions/${sessionId}/reply`, {
      method: "POST",
      body: JSON.stringify({ step, payload }),
    });
  }

  async transcript(sessionId: string): Promise<TranscriptEntry[]> {
    const body = await this.request<{ moves: TranscriptEntry[] }>(
      `/sessions/${sessionId}/transcript`,
    );
    return body.moves;
  }
}
