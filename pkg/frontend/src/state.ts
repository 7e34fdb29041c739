// Form state: every control maps to exactly one /verify request field and
// back, so serialize/deserialize round-trips the whole form.

export const COUNT_MAX = 50; // server-side schema cap for n, m, k, j, l

export interface VerifyFormState {
  query: string;
  answer: string;
  web: boolean;
  kb: boolean;
  kg: boolean;
  n: number;
  m: number;
  k: number;
  j: number;
  l: number;
  tau: number;
  delta: number;
  fuseMode: "Concatenation" | "Summarization";
  detectionMode: "FusedDirect" | "Ensemble";
  uploads: string[]; // uploaded file names; non-empty implies the UF source
}

export function defaultFormState(): VerifyFormState {
  return {
    query: "",
    answer: "",
    web: true,
    kb: true,
    kg: true,
    n: 5,
    m: 5,
    k: 5,
    j: 5,
    l: 5,
    tau: 1.0,
    delta: 0.5,
    fuseMode: "Concatenation",
    detectionMode: "FusedDirect",
    uploads: [],
  };
}

export const SAMPLE_QUERIES: ReadonlyArray<{ query: string; answer: string }> = [
  {
    query: "Who is the head of the Commonwealth?",
    answer: "Queen Elizabeth II is the head of the Commonwealth realm.",
  },
  {
    query:
      "What year did the German composer whose compositions are in The Individualism of Gil Evans die?",
    answer: "Kurt Weill passed away in 1955.",
  },
];

/** Submit is allowed only with both text boxes filled and >= 1 source. */
export function canSubmit(state: VerifyFormState): boolean {
  return (
    state.query.trim().length > 0 &&
    state.answer.trim().length > 0 &&
    sources(state).length > 0
  );
}

export function sources(state: VerifyFormState): string[] {
  const chosen: string[] = [];
  if (state.web) chosen.push("web");
  if (state.kb) chosen.push("kb");
  if (state.kg) chosen.push("kg");
  if (state.uploads.length > 0) chosen.push("uf");
  return chosen;
}

export interface VerifyRequestBody {
  query: string;
  answer: string;
  n: number;
  m: number;
  k: number;
  j: number;
  l: number;
  tau: number;
  delta: number;
  fuse_mode: string;
  detection_mode: string;
  sources: string[];
}

export function toRequestBody(state: VerifyFormState): VerifyRequestBody {
  return {
    query: state.query,
    answer: state.answer,
    n: state.n,
    m: state.m,
    k: state.k,
    j: state.j,
    l: state.l,
    tau: state.tau,
    delta: state.delta,
    fuse_mode: state.fuseMode,
    detection_mode: state.detectionMode,
    sources: sources(state),
  };
}

/** Inverse of toRequestBody for the fields the request carries. */
export function fromRequestBody(
  body: VerifyRequestBody,
  uploads: string[] = [],
): VerifyFormState {
  return {
    query: body.query,
    answer: body.answer,
    web: body.sources.includes("web"),
    kb: body.sources.includes("kb"),
    kg: body.sources.includes("kg"),
    n: body.n,
    m: body.m,
    k: body.k,
    j: body.j,
    l: body.l,
    tau: body.tau,
    delta: body.delta,
    fuseMode: body.fuse_mode as VerifyFormState["fuseMode"],
    detectionMode: body.detection_mode as VerifyFormState["detectionMode"],
    uploads,
  };
}

export function clampCount(value: number): number {
  if (!Number.isFinite(value)) return 1;
  return Math.min(COUNT_MAX, Math.max(1, Math.round(value)));
}

export function clampDelta(value: number): number {
  if (!Number.isFinite(value)) return 0.5;
  return Math.min(1, Math.max(0, value));
}
