// Typed client for the session service. The fetch function is injected so
// tests can fake the network; nothing here caches or interprets results.

import { GraphPayload, SessionView, TracePayload } from "./types.js";

export interface Api {
  createSession(design: string, annotations: string, modular: boolean): Promise<SessionView>;
  getSession(id: string): Promise<SessionView>;
  respond(id: string, answer: "accept" | "reject"): Promise<SessionView>;
  getGraph(id: string): Promise<GraphPayload>;
  getTrace(id: string): Promise<TracePayload>;
}

type Fetch = (url: string, init?: RequestInit) => Promise<Response>;

export function httpApi(base: string, fetchFn: Fetch): Api {
  async function request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetchFn(`${base}${path}`, init);
    if (!response.ok) {
      throw new Error(`service error ${response.status} on ${path}`);
    }
    return (await response.json()) as T;
  }
  const post = (body: unknown): RequestInit => ({
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
  });
  return {
    createSession: (design, annotations, modular) =>
      request("/sessions", post({ design, annotations, modular })),
    getSession: (id) => request(`/sessions/${id}`),
    respond: (id, answer) => request(`/sessions/${id}/response`, post({ answer })),
    getGraph: (id) => request(`/sessions/${id}/graph`),
    getTrace: (id) => request(`/sessions/${id}/trace`),
  };
}
