import { spawnSync } from "node:child_process";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { beforeAll, describe, expect, it } from "vitest";

import { main } from "../src/cli.js";
import { validateLine } from "../src/validate.js";

const TOY_QUESTIONS = [
  {
    question_id: "t1",
    question_text: "what color is the sky?",
    references: ["blue"],
    responses: ["the sky is blue", "blue", "it is green actually"],
  },
  {
    question_id: "t2",
    question_text: "largest planet?",
    references: ["jupiter"],
    responses: ["jupiter", "jupiter is the largest", "saturn"],
  },
  {
    question_id: "t3",
    question_text: "2 + 2?",
    references: ["4"],
    responses: ["4", "four", "22"],
  },
];

function writeToyInput(dir: string): string {
  const path = join(dir, "questions.jsonl");
  writeFileSync(path, TOY_QUESTIONS.map((q) => JSON.stringify(q)).join("\n") + "\n");
  return path;
}

async function runExtract(dir: string, out = "bundle.jsonl", extra: string[] = []) {
  const input = writeToyInput(dir);
  const outputPath = join(dir, out);
  const code = await main([
    "extract",
    "--in", input,
    "--encoder", "openai/clip-vit-base-patch32",
    "--nli", "microsoft/deberta-large-mnli",
    "--out", outputPath,
    ...extra,
  ]);
  expect(code).toBe(0);
  return outputPath;
}

describe("toy extraction run", () => {
  let dir: string;
  let bundlePath: string;
  let lines: any[];

  beforeAll(async () => {
    dir = mkdtempSync(join(tmpdir(), "extract-"));
    bundlePath = await runExtract(dir);
    lines = readFileSync(bundlePath, "utf-8")
      .trim()
      .split("\n")
      .map((l) => JSON.parse(l));
  });

  it("emits one valid bundle line per question, zero violations", () => {
    expect(lines).toHaveLength(3);
    for (const line of lines) {
      expect(validateLine(line)).toEqual([]);
    }
  });

  it("records the paper-checkpoint width of 512 in the metadata", () => {
    const meta = JSON.parse(readFileSync(join(dir, "bundle.meta.json"), "utf-8"));
    expect(meta.embedding_dim).toBe(512);
    expect(meta.encoder_id).toContain("openai/clip-vit-base-patch32");
    for (const line of lines) {
      for (const row of line.embeddings) expect(row).toHaveLength(512);
    }
  });

  it("self-pair NLI argmax is entailment for every response", () => {
    const ENT = 0;
    for (const line of lines) {
      const m = line.responses.length;
      for (let i = 0; i < m; i++) {
        for (const dir of [0, 1]) {
          const logits = line.nli_logits[i][i][dir];
          expect(logits.indexOf(Math.max(...logits))).toBe(ENT);
        }
      }
    }
  });

  it("keeps the tensor shape m x m x 2 x 3 and finite", () => {
    for (const line of lines) {
      const m = line.responses.length;
      expect(line.nli_logits).toHaveLength(m);
      for (const row of line.nli_logits) {
        expect(row).toHaveLength(m);
        for (const pair of row) {
          expect(pair).toHaveLength(2);
          for (const logits of pair) {
            expect(logits).toHaveLength(3);
            expect(logits.every(Number.isFinite)).toBe(true);
          }
        }
      }
    }
  });

  it("omits seq_logprobs when no generator output is supplied", () => {
    for (const line of lines) {
      expect(line).not.toHaveProperty("seq_logprobs");
      expect(line).not.toHaveProperty("token_counts");
    }
  });

  it("reruns byte-identically", async () => {
    const second = await runExtract(dir, "bundle2.jsonl");
    expect(readFileSync(second)).toEqual(readFileSync(bundlePath));
  });
});

describe("m = 5 tensor", () => {
  it("has shape 5 x 5 x 2 x 3", async () => {
    const dir = mkdtempSync(join(tmpdir(), "extract-m5-"));
    const input = join(dir, "q.jsonl");
    writeFileSync(
      input,
      JSON.stringify({
        question_id: "m5",
        question_text: "q",
        references: ["r"],
        responses: ["a", "b", "c", "d", "e"],
      }) + "\n",
    );
    const out = join(dir, "m5.jsonl");
    const code = await main([
      "extract", "--in", input,
      "--encoder", "openai/clip-vit-base-patch32",
      "--nli", "any/nli", "--out", out,
    ]);
    expect(code).toBe(0);
    const line = JSON.parse(readFileSync(out, "utf-8").trim());
    expect(line.nli_logits).toHaveLength(5);
    expect(line.nli_logits[4]).toHaveLength(5);
    expect(line.nli_logits[4][4]).toHaveLength(2);
    expect(line.nli_logits[4][4][1]).toHaveLength(3);
  });
});

describe("failure handling", () => {
  it("aborts without an output file on malformed input", async () => {
    const dir = mkdtempSync(join(tmpdir(), "extract-bad-"));
    const input = join(dir, "bad.jsonl");
    writeFileSync(
      input,
      JSON.stringify({ question_id: "x", question_text: "q", references: ["r"], responses: ["only one"] }) + "\n",
    );
    const out = join(dir, "never.jsonl");
    const code = await main([
      "extract", "--in", input,
      "--encoder", "openai/clip-vit-base-patch32",
      "--nli", "any/nli", "--out", out,
    ]);
    expect(code).toBe(1);
    expect(() => readFileSync(out)).toThrow();
  });

  it("passes generator logprobs through when provided", async () => {
    const dir = mkdtempSync(join(tmpdir(), "extract-lp-"));
    const input = join(dir, "q.jsonl");
    writeFileSync(
      input,
      JSON.stringify({
        question_id: "lp",
        question_text: "q",
        references: ["r"],
        responses: ["a b", "c d"],
        seq_logprobs: [-1.5, -2.5],
        token_counts: [2, 2],
      }) + "\n",
    );
    const out = join(dir, "lp.jsonl");
    expect(
      await main([
        "extract", "--in", input,
        "--encoder", "openai/clip-vit-base-patch32",
        "--nli", "any/nli", "--out", out,
      ]),
    ).toBe(0);
    const line = JSON.parse(readFileSync(out, "utf-8").trim());
    expect(line.seq_logprobs).toEqual([-1.5, -2.5]);
    expect(validateLine(line)).toEqual([]);
  });
});

describe("end-to-end against the scoring CLI (when installed)", () => {
  const probe = spawnSync("python3", ["-c", "import spectral_uq"], { encoding: "utf-8" });
  const available = probe.status === 0;

  it.skipIf(!available)("the emitted bundle loads, and `se` correctly refuses", async () => {
    const dir = mkdtempSync(join(tmpdir(), "extract-e2e-"));
    const bundlePath = await runExtract(dir);
    // scoring methods that need only what the extractor emits succeed
    const ok = spawnSync(
      "python3",
      ["-m", "spectral_uq.cli", "score", "--in", bundlePath,
       "--methods", "lexisim,numsem,css-deg", "--pca-dim", "8",
       "--out-dir", join(dir, "out")],
      { encoding: "utf-8" },
    );
    expect(ok.status, ok.stderr).toBe(0);
    // semantic entropy must refuse: no generator logprobs were captured
    const refused = spawnSync(
      "python3",
      ["-m", "spectral_uq.cli", "score", "--in", bundlePath,
       "--methods", "se", "--out-dir", join(dir, "out2")],
      { encoding: "utf-8" },
    );
    expect(refused.status).not.toBe(0);
    expect(refused.stderr).toContain("seq_logprobs");
  });
});
