/** Orchestration: questions JSONL in, validated bundle JSONL out.
 *
 * The bundle file format is the only contract with downstream consumers;
 * this package never imports them.  Output is written atomically (temp
 * file + rename) after every line validates, so failures leave nothing
 * behind.  Reruns with identical inputs are byte-identical: serialization
 * order is fixed and no timestamps enter the payload.
 */

import { mkdirSync, readFileSync, renameSync, rmSync, writeFileSync } from "node:fs";
import { dirname } from "node:path";

import { loadEncoder } from "./encoders.js";
import { loadNli } from "./nli.js";
import type { BundleLine, ExtractionJob, NliBackend, QuestionRow } from "./types.js";
import { validateLine } from "./validate.js";

export function readQuestions(path: string): QuestionRow[] {
  const rows: QuestionRow[] = [];
  const lines = readFileSync(path, "utf-8").split("\n");
  lines.forEach((line, idx) => {
    if (!line.trim()) return;
    let obj: any;
    try {
      obj = JSON.parse(line);
    } catch (err) {
      throw new Error(`${path}:${idx + 1}: JSON parse failure: ${err}`);
    }
    for (const key of ["question_id", "question_text", "references", "responses"]) {
      if (!(key in obj)) throw new Error(`${path}:${idx + 1}: missing key ${key}`);
    }
    if (!Array.isArray(obj.responses) || obj.responses.length < 2) {
      throw new Error(`${path}:${idx + 1}: need at least 2 responses`);
    }
    rows.push(obj as QuestionRow);
  });
  if (rows.length === 0) throw new Error(`${path}: no question rows found`);
  return rows;
}

/** Both premise/hypothesis orderings for every ordered pair (i, j):
 * direction 0 has response i as premise, direction 1 the reverse. */
export async function nliPairLogits(
  nli: NliBackend,
  responses: string[],
): Promise<number[][][][]> {
  const m = responses.length;
  const out: number[][][][] = [];
  for (let i = 0; i < m; i++) {
    const row: number[][][] = [];
    for (let j = 0; j < m; j++) {
      const forward = await nli.classify(responses[i], responses[j]);
      const reverse = await nli.classify(responses[j], responses[i]);
      row.push([forward, reverse]);
    }
    out.push(row);
  }
  return out;
}

function toBundleLine(
  row: QuestionRow,
  embeddings: number[][],
  logits: number[][][][],
): BundleLine {
  const line: BundleLine = {
    question_id: row.question_id,
    question_text: row.question_text,
    references: row.references,
    responses: row.responses,
    embeddings,
    nli_logits: logits,
  };
  if (row.seq_logprobs !== undefined && row.token_counts !== undefined) {
    line.seq_logprobs = row.seq_logprobs;
    line.token_counts = row.token_counts;
  }
  if (row.external_scores !== undefined) {
    line.external_scores = row.external_scores;
  }
  return line;
}

export async function buildBundle(job: ExtractionJob): Promise<void> {
  const questions = readQuestions(job.inputPath);
  const encoder = await loadEncoder(job);
  const nli = await loadNli(job);

  const lines: string[] = [];
  for (const row of questions) {
    const embeddings = await encoder.embed(row.responses);
    const logits = await nliPairLogits(nli, row.responses);
    const line = toBundleLine(row, embeddings, logits);
    const errors = validateLine(line);
    if (errors.length) {
      throw new Error(
        `bundle for ${row.question_id} failed self-validation:\n  ${errors.join("\n  ")}`,
      );
    }
    lines.push(JSON.stringify(line));
  }

  const meta = {
    encoder_id: encoder.id,
    nli_model_id: nli.id,
    created: null,
    format_version: 1,
    embedding_dim: encoder.dim,
  };

  mkdirSync(dirname(job.outputPath) || ".", { recursive: true });
  const tmp = job.outputPath + ".tmp";
  try {
    writeFileSync(tmp, lines.join("\n") + "\n");
    renameSync(tmp, job.outputPath);
  } catch (err) {
    rmSync(tmp, { force: true });
    throw err;
  }
  const metaPath = job.outputPath.replace(/\.jsonl$/, "") + ".meta.json";
  writeFileSync(metaPath, JSON.stringify(meta) + "\n");
  console.error(
    `info: wrote ${questions.length} bundles to ${job.outputPath} ` +
      `(encoder ${encoder.id}, d=${encoder.dim}; nli ${nli.id})`,
  );
}
