// Pure rendering: RunRecord in, HTML strings out. No DOM access here, so
// every panel is snapshot-testable as plain text.

import type { CorrectionSession, EvidenceItem, RunRecord, SourceTag, Verdict } from "./types.js";

export const APPROVE_SYMBOL = "✔"; // ✔
export const DISAPPROVE_SYMBOL = "✘"; // ✘

export const SOURCE_LABELS: Record<SourceTag, string> = {
  S: "Web search",
  B: "Knowledge base",
  G: "Knowledge graph",
  U: "Uploaded files",
};

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

function provenanceNote(item: EvidenceItem): string {
  const p = item.provenance;
  if (item.source === "S") return String(p.url ?? "");
  if (item.source === "B") return `page ${p.page ?? "?"} · chunk ${p.chunk ?? "?"}`;
  if (item.source === "G") return `triple ${p.triple_id ?? "?"}`;
  return `${p.file ?? "?"} · chunk ${p.chunk ?? "?"}`;
}

function evidenceList(items: EvidenceItem[]): string {
  if (items.length === 0) {
    return `<p class="empty">no evidence retrieved</p>`;
  }
  const rows = items
    .map((item) => {
      const score = item.score === null ? "" : ` <span class="score">${item.score.toFixed(3)}</span>`;
      return `<li>${escapeHtml(item.text)}${score}<br><span class="prov">${escapeHtml(
        provenanceNote(item),
      )}</span></li>`;
    })
    .join("");
  return `<ol class="evidence">${rows}</ol>`;
}

/** One panel per retrieval source, always all four. */
export function renderSourcePanels(record: RunRecord): string {
  return (Object.keys(SOURCE_LABELS) as SourceTag[])
    .map((tag) => {
      const items = record.sources[tag] ?? [];
      return `<section class="panel evidence-panel" data-source="${tag}">
<h3>${SOURCE_LABELS[tag]} (${items.length})</h3>
${evidenceList(items)}
</section>`;
    })
    .join("\n");
}

export function renderFusedPanel(record: RunRecord): string {
  if (!record.fused) {
    return `<section class="panel fused-panel"><h3>Fused evidence</h3><p class="empty">none</p></section>`;
  }
  const lines = record.fused.text
    .split("\n")
    .map((line) => `<div class="fused-line">${escapeHtml(line)}</div>`)
    .join("");
  return `<section class="panel fused-panel">
<h3>Fused evidence <span class="mode">${escapeHtml(record.fused.mode)}</span></h3>
${lines}
</section>`;
}

export function verdictSymbol(verdict: Verdict | null): string {
  if (!verdict) return "";
  return verdict.label
    ? `<span class="symbol approve" title="approved">${APPROVE_SYMBOL}</span>`
    : `<span class="symbol disapprove" title="disapproved">${DISAPPROVE_SYMBOL}</span>`;
}

export function renderVerdictPanel(record: RunRecord): string {
  if (!record.verdict) {
    return `<section class="panel verdict-panel"><h3>Detection</h3><p class="empty">no verdict</p></section>`;
  }
  const v = record.verdict;
  return `<section class="panel verdict-panel">
<h3>Detection ${verdictSymbol(v)}</h3>
<p class="verdict-label">${v.label ? "consistent with the evidence" : "factual conflict detected"}
<span class="mode">${escapeHtml(v.source_mode)}</span></p>
<div class="rationale"><h4>Rationale</h4><p>${escapeHtml(v.rationale)}</p></div>
</section>`;
}

function roundRow(session: CorrectionSession, index: number): string {
  const round = session.rounds[index];
  const detection = round.verdict.label
    ? `<span class="symbol approve">${APPROVE_SYMBOL}</span>`
    : `<span class="symbol disapprove">${DISAPPROVE_SYMBOL}</span>`;
  const preserved = round.preservation >= session.delta
    ? `<span class="symbol approve">${APPROVE_SYMBOL}</span>`
    : `<span class="symbol disapprove">${DISAPPROVE_SYMBOL}</span>`;
  return `<li class="round${round.accepted ? " accepted" : ""}">
<span class="round-no">round ${round.index}</span>
<span class="candidate">${escapeHtml(round.candidate)}</span>
<span class="flags">detection ${detection} · preservation ${preserved} (${round.preservation.toFixed(3)})</span>
</li>`;
}

export function renderCorrectionPanel(record: RunRecord): string {
  if (!record.correction) {
    const note = record.verdict?.label
      ? "answer approved as-is; no correction needed"
      : "no correction session";
    return `<section class="panel correction-panel"><h3>Correction</h3><p class="empty">${note}</p></section>`;
  }
  const session = record.correction;
  const rows = session.rounds.map((_, i) => roundRow(session, i)).join("");
  return `<section class="panel correction-panel">
<h3>Correction <span class="mode">${escapeHtml(session.outcome)}</span></h3>
<ul class="timeline">${rows}</ul>
<div class="final"><h4>Corrected answer</h4><p>${escapeHtml(record.final_answer)}</p></div>
</section>`;
}

export function renderWarnings(record: RunRecord): string {
  const notes = [...record.warnings];
  if (record.error) notes.push(`run aborted: ${record.error}`);
  if (notes.length === 0) return "";
  return `<div class="warnings">${notes
    .map((w) => `<p>${escapeHtml(w)}</p>`)
    .join("")}</div>`;
}

/** The whole result view for one run record. */
export function renderResult(record: RunRecord): string {
  return [
    renderWarnings(record),
    `<div class="columns">${renderSourcePanels(record)}</div>`,
    renderFusedPanel(record),
    renderVerdictPanel(record),
    renderCorrectionPanel(record),
  ].join("\n");
}
