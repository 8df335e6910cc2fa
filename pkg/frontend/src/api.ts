// Thin fetch wrappers over the annotation backend.

import type {
  AgreementResponse,
  NextTaskResponse,
  PositionalLabel,
  ProgressResponse,
} from "./types.js";

// Same-origin by default (the backend serves this page); tests point it at
// a spawned server.
let apiBase = "";

export function setApiBase(base: string): void {
  apiBase = base.replace(/\/$/, "");
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
  }
}

async function getJson<T>(path: string): Promise<T> {
  const res = await fetch(`${apiBase}${path}`);
  if (!res.ok) {
    throw new ApiError(res.status, await res.text());
  }
  return res.json() as Promise<T>;
}

export function fetchNextTask(annotator: string): Promise<NextTaskResponse> {
  return getJson(`/api/tasks/next?annotator=${encodeURIComponent(annotator)}`);
}

export function fetchAgreement(): Promise<AgreementResponse> {
  return getJson("/api/agreement");
}

export function fetchProgress(): Promise<ProgressResponse> {
  return getJson("/api/progress");
}

// Resolves with the HTTP status. 409 (already labeled) is a normal outcome
// the caller handles, not an error; network failures and 4xx/5xx throw.
export async function submitLabel(
  taskId: string,
  annotator: string,
  label: PositionalLabel,
): Promise<number> {
  const res = await fetch(`${apiBase}/api/labels`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify({ task_id: taskId, annotator, outcome: label }),
  });
  if (!res.ok && res.status !== 409) {
    throw new ApiError(res.status, await res.text());
  }
  return res.status;
}
