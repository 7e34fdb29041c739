// Shapes of the JSON the verification API serves. Mirrors the documented
// /verify response body; only the fields the UI reads are typed.

export type SourceTag = "S" | "B" | "G" | "U";

export interface EvidenceItem {
  text: string;
  source: SourceTag;
  provenance: Record<string, unknown>;
  score: number | null;
}

export interface Verdict {
  label: boolean;
  rationale: string;
  source_mode: "FusedDirect" | "Ensemble";
}

export interface CorrectionRound {
  index: number;
  candidate: string;
  verdict: Verdict;
  preservation: number;
  accepted: boolean;
}

export interface CorrectionSession {
  original: string;
  rationale: string;
  delta: number;
  rounds: CorrectionRound[];
  final: string;
  outcome: "Approved" | "RoundLimit";
}

export interface RunRecord {
  run_id: string;
  created_at: string;
  query: { id: string; text: string };
  answer: string;
  config: Record<string, unknown>;
  sources: Record<SourceTag, EvidenceItem[]>;
  warnings: string[];
  reranked: EvidenceItem[];
  fused: { text: string; mode: string; provenance: EvidenceItem[] } | null;
  likelihoods: { entries: Record<string, number>; mask: string[]; y_hat: number } | null;
  verdict: Verdict | null;
  correction: CorrectionSession | null;
  final_answer: string;
  timings: Record<string, number>;
  error: string | null;
}

export interface UploadReply {
  file_id: string;
  name: string;
  format: string;
  chars: number;
}

export interface FieldError {
  field: string;
  message: string;
}
