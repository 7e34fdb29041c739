// Client-side gate for uploads: the server accepts TXT, DOCX, PDF and
// MARKDOWN, so anything else is rejected before a byte leaves the browser.

const ALLOWED_EXTENSIONS = [".txt", ".docx", ".pdf", ".md", ".markdown"];

export interface UploadCheck {
  ok: boolean;
  reason?: string;
}

export function checkUploadName(name: string): UploadCheck {
  const dot = name.lastIndexOf(".");
  const ext = dot >= 0 ? name.slice(dot).toLowerCase() : "";
  if (ALLOWED_EXTENSIONS.includes(ext)) {
    return { ok: true };
  }
  return {
    ok: false,
    reason: `"${name}" is not a supported file type (TXT, DOCX, PDF, MARKDOWN)`,
  };
}
