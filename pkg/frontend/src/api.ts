import type { AskPayload, ErrorPayload, SessionPayload, TablesPayload } from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Error carrying the HTTP status so callers can react to 404/410. */
export class ApiError extends Error {
  readonly status: number;

  constructor(status: number, message: string) {
    super(message);
    this.name = "ApiError";
    this.status = status;
  }
}

async function readJson<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let message = `HTTP ${response.status}`;
    try {
      const body = (await response.json()) as ErrorPayload;
      if (body && typeof body.error === "string") message = body.error;
    } catch {
      // Non-JSON error body; keep the status message.
    }
    throw new ApiError(response.status, message);
  }
  return (await response.json()) as T;
}

/** Thin typed client over the session API; fetch is injectable for tests. */
export class ApiClient {
  private readonly baseUrl: string;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl = "", fetchImpl: FetchLike = (input, init) => fetch(input, init)) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
    this.fetchImpl = fetchImpl;
  }

  listTables(): Promise<TablesPayload> {
    return this.fetchImpl(`${this.baseUrl}/api/tables`).then((r) => readJson<TablesPayload>(r));
  }

  createSession(tableId: string): Promise<SessionPayload> {
    return this.fetchImpl(`${this.baseUrl}/api/session`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ tableId }),
    }).then((r) => readJson<SessionPayload>(r));
  }

  ask(sessionId: string, question: string): Promise<AskPayload> {
    return this.fetchImpl(`${this.baseUrl}/api/ask`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ sessionId, question }),
    }).then((r) => readJson<AskPayload>(r));
  }

  deleteSession(sessionId: string): Promise<void> {
    return this.fetchImpl(`${this.baseUrl}/api/session/${sessionId}`, {
      method: "DELETE",
    }).then((r) => readJson<unknown>(r)) as Promise<void>;
  }
}
