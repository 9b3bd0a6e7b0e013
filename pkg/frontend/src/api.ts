/** Typed client for the consultation service. Every number shown in the UI
 * comes straight out of these responses; the client never computes expected
 * utilities of its own. */

import type {
  DiagramDocument,
  ParamRef,
  Report,
  SchemaLibrary,
  SessionSummary,
  SweepResult,
  WhatIfResult,
} from "./types.js";

export class ApiError extends Error {
  readonly code: string;
  readonly status: number;

  constructor(status: number, code: string, message: string) {
    super(message);
    this.code = code;
    this.status = status;
  }
}

async function request<T>(base: string, method: string, path: string, body?: unknown): Promise<T> {
  let response: Response;
  try {
    response = await fetch(base + path, {
      method,
      headers: body === undefined ? {} : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
  } catch (err) {
    throw new ApiError(0, "UNREACHABLE", `cannot reach the service: ${String(err)}`);
  }
  let payload: unknown;
  try {
    payload = await response.json();
  } catch {
    throw new ApiError(response.status, "BAD_PAYLOAD", "the service returned a non-JSON body");
  }
  if (!response.ok) {
    const error = (payload as { error?: { code?: string; message?: string } }).error;
    throw new ApiError(
      response.status,
      error?.code ?? "UNKNOWN",
      error?.message ?? `request failed with status ${response.status}`,
    );
  }
  return payload as T;
}

export class WorkbenchClient {
  constructor(readonly base: string) {}

  schemas(): Promise<SchemaLibrary> {
    return request(this.base, "GET", "/schemas");
  }

  createSession(features: Record<string, boolean>): Promise<SessionSummary> {
    return request(this.base, "POST", "/sessions", { features });
  }

  session(id: string): Promise<SessionSummary> {
    return request(this.base, "GET", `/sessions/${id}`);
  }

  provideBindings(
    id: string,
    bindings: Record<string, unknown>,
  ): Promise<{ session: SessionSummary; report: Report }> {
    return request(this.base, "POST", `/sessions/${id}/bindings`, { bindings });
  }

  report(id: string): Promise<Report> {
    return request(this.base, "GET", `/sessions/${id}/report`);
  }

  whatif(id: string, param: ParamRef, value: number): Promise<WhatIfResult> {
    return request(this.base, "POST", `/sessions/${id}/whatif`, { param, value });
  }

  commit(
    id: string,
    param: ParamRef,
    value: number,
  ): Promise<{ session: SessionSummary; report: Report }> {
    return request(this.base, "POST", `/sessions/${id}/commit`, { param, value });
  }

  sweep(id: string, param: ParamRef, grid: number[]): Promise<SweepResult> {
    return request(this.base, "POST", `/sessions/${id}/sweep`, { param, grid });
  }

  evpi(id: string, chance: string, decision: string): Promise<{ evpi: number }> {
    return request(this.base, "POST", `/sessions/${id}/evpi`, { chance, decision });
  }

  diagram(id: string): Promise<DiagramDocument> {
    return request(this.base, "GET", `/diagrams/${id}`);
  }
}
