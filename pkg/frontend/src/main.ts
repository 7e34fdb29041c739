// DOM wiring for the verification UI. Everything stateful lives here; the
// rendering and form logic are pure modules.

import { ApiError, postVerify, uploadFile } from "./api.js";
import {
  COUNT_MAX,
  SAMPLE_QUERIES,
  VerifyFormState,
  canSubmit,
  clampCount,
  clampDelta,
  defaultFormState,
  toRequestBody,
} from "./state.js";
import { renderResult } from "./render.js";
import { checkUploadName } from "./upload.js";

const state: VerifyFormState = defaultFormState();
let inFlight = false;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

function apiBase(): string {
  const fromQuery = new URLSearchParams(window.location.search).get("api");
  return (fromQuery ?? (el<HTMLInputElement>("api-base").value || "http://127.0.0.1:8000")).replace(
    /\/$/,
    "",
  );
}

function banner(message: string, kind: "error" | "info" = "error"): void {
  const node = el<HTMLDivElement>("banner");
  node.textContent = message;
  node.className = message ? `banner ${kind}` : "banner hidden";
}

function syncStateFromControls(): void {
  state.query = el<HTMLTextAreaElement>("query").value;
  state.answer = el<HTMLTextAreaElement>("answer").value;
  state.web = el<HTMLInputElement>("src-web").checked;
  state.kb = el<HTMLInputElement>("src-kb").checked;
  state.kg = el<HTMLInputElement>("src-kg").checked;
  for (const name of ["n", "m", "k", "j", "l"] as const) {
    state[name] = clampCount(Number(el<HTMLInputElement>(`knob-${name}`).value));
  }
  state.tau = Math.max(0.01, Number(el<HTMLInputElement>("knob-tau").value) || 1);
  state.delta = clampDelta(Number(el<HTMLInputElement>("knob-delta").value));
  state.fuseMode = el<HTMLSelectElement>("fuse-mode").value as VerifyFormState["fuseMode"];
  state.detectionMode = el<HTMLSelectElement>("detection-mode")
    .value as VerifyFormState["detectionMode"];
}

function refreshControls(): void {
  el<HTMLTextAreaElement>("query").value = state.query;
  el<HTMLTextAreaElement>("answer").value = state.answer;
  el<HTMLButtonElement>("submit").disabled = inFlight || !canSubmit(state);
  const chips = state.uploads
    .map((name) => `<span class="chip">${name} <button data-remove="${name}">×</button></span>`)
    .join("");
  el<HTMLDivElement>("upload-chips").innerHTML = chips;
  for (const button of el<HTMLDivElement>("upload-chips").querySelectorAll("button")) {
    button.addEventListener("click", () => {
      state.uploads = state.uploads.filter((n) => n !== button.dataset.remove);
      refreshControls();
    });
  }
}

async function submit(): Promise<void> {
  syncStateFromControls();
  if (!canSubmit(state) || inFlight) return;
  inFlight = true;
  refreshControls();
  banner("verifying…", "info");
  try {
    const record = await postVerify(apiBase(), toRequestBody(state));
    el<HTMLDivElement>("result").innerHTML = renderResult(record);
    banner("");
  } catch (err) {
    // form state stays untouched so the user can retry
    if (err instanceof ApiError && err.fields.length > 0) {
      banner(err.fields.map((f) => `${f.field}: ${f.message}`).join("; "));
    } else {
      banner(err instanceof Error ? err.message : String(err));
    }
  } finally {
    inFlight = false;
    refreshControls();
  }
}

async function handleUpload(files: FileList | null): Promise<void> {
  if (!files) return;
  for (const file of files) {
    const check = checkUploadName(file.name);
    if (!check.ok) {
      banner(check.reason ?? "unsupported file");
      continue;
    }
    try {
      const reply = await uploadFile(apiBase(), file);
      state.uploads.push(reply.name);
      banner("");
    } catch (err) {
      banner(err instanceof Error ? err.message : String(err));
    }
  }
  refreshControls();
}

function init(): void {
  const samples = el<HTMLDivElement>("samples");
  samples.innerHTML = SAMPLE_QUERIES.map(
    (s, i) => `<button class="sample" data-sample="${i}">${s.query}</button>`,
  ).join("");
  for (const button of samples.querySelectorAll<HTMLButtonElement>("button")) {
    button.addEventListener("click", () => {
      const sample = SAMPLE_QUERIES[Number(button.dataset.sample)];
      state.query = sample.query;
      state.answer = sample.answer;
      refreshControls();
    });
  }

  for (const name of ["n", "m", "k", "j", "l"] as const) {
    const knob = el<HTMLInputElement>(`knob-${name}`);
    knob.max = String(COUNT_MAX);
    knob.addEventListener("input", () => {
      el<HTMLSpanElement>(`knob-${name}-value`).textContent = knob.value;
    });
  }

  el<HTMLButtonElement>("submit").addEventListener("click", () => void submit());
  el<HTMLInputElement>("upload").addEventListener("change", (event) => {
    void handleUpload((event.target as HTMLInputElement).files);
    (event.target as HTMLInputElement).value = "";
  });
  for (const id of ["query", "answer", "src-web", "src-kb", "src-kg"]) {
    el(id).addEventListener("input", () => {
      syncStateFromControls();
      refreshControls();
    });
  }
  refreshControls();
}

init();
