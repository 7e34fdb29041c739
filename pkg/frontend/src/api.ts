// Thin fetch wrappers over the verification service. fetchFn is injectable
// so tests can stub the network.

import type { RunRecord, UploadReply } from "./types.js";
import type { VerifyRequestBody } from "./state.js";

export class ApiError extends Error {
  constructor(
    message: string,
    public status: number,
    public fields: { field: string; message: string }[] = [],
  ) {
    super(message);
  }
}

async function reject(resp: Response): Promise<never> {
  let detail: unknown = null;
  try {
    detail = (await resp.json()).detail;
  } catch {
    // non-JSON error body: fall through with the status alone
  }
  if (Array.isArray(detail)) {
    throw new ApiError(`request invalid (${resp.status})`, resp.status, detail);
  }
  throw new ApiError(String(detail ?? `request failed (${resp.status})`), resp.status);
}

export async function postVerify(
  base: string,
  body: VerifyRequestBody,
  fetchFn: typeof fetch = fetch,
): Promise<RunRecord> {
  const resp = await fetchFn(`${base}/verify`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
  });
  if (!resp.ok) await reject(resp);
  return (await resp.json()) as RunRecord;
}

export async function uploadFile(
  base: string,
  file: File,
  fetchFn: typeof fetch = fetch,
): Promise<UploadReply> {
  const form = new FormData();
  form.append("file", file);
  const resp = await fetchFn(`${base}/upload`, { method: "POST", body: form });
  if (!resp.ok) await reject(resp);
  return (await resp.json()) as UploadReply;
}

export async function getRun(
  base: string,
  runId: string,
  fetchFn: typeof fetch = fetch,
): Promise<RunRecord> {
  const resp = await fetchFn(`${base}/runs/${runId}`);
  if (!resp.ok) await reject(resp);
  return (await resp.json()) as RunRecord;
}

/** Poll a persisted run until it is readable (long runs land eventually). */
export async function pollRun(
  base: string,
  runId: string,
  fetchFn: typeof fetch = fetch,
  attempts = 10,
  intervalMs = 500,
): Promise<RunRecord> {
  let lastError: unknown = null;
  for (let i = 0; i < attempts; i++) {
    try {
      return await getRun(base, runId, fetchFn);
    } catch (err) {
      lastError = err;
      if (err instanceof ApiError && err.status !== 404) throw err;
      await new Promise((resolve) => setTimeout(resolve, intervalMs));
    }
  }
  throw lastError instanceof Error ? lastError : new Error("run never appeared");
}
