import { describe, expect, it } from "vitest";

import { checkUploadName } from "../src/upload.js";

describe("client-side upload gate", () => {
  it.each(["notes.txt", "report.DOCX", "paper.pdf", "readme.md", "doc.markdown"])(
    "accepts %s",
    (name) => {
      expect(checkUploadName(name).ok).toBe(true);
    },
  );

  it("rejects executables with a message", () => {
    const check = checkUploadName("tool.exe");
    expect(check.ok).toBe(false);
    expect(check.reason).toContain("tool.exe");
    expect(check.reason).toContain("not a supported file type");
  });

  it.each(["archive.zip", "image.png", "no_extension"])("rejects %s", (name) => {
    expect(checkUploadName(name).ok).toBe(false);
  });
});
