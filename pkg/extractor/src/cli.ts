#!/usr/bin/env node
/** extract --in questions.jsonl --encoder <id> --nli <id> --out bundle.jsonl */

import { parseArgs } from "node:util";

import { buildBundle } from "./extract.js";
import type { ExtractionJob } from "./types.js";

const USAGE = `usage: bundle-extract extract --in questions.jsonl --encoder <id> --nli <id> --out bundle.jsonl
                      [--backend deterministic|transformers] [--batch-size N]
                      [--device auto|cpu|gpu] [--dim N]

Reads a questions JSONL (question_id, question_text, references, responses,
optional seq_logprobs/token_counts/external_scores pass-through) and writes a
response-bundle JSONL with per-response embeddings and pairwise NLI logits.

The default "deterministic" backend runs fully offline and is reproducible
byte-for-byte; "transformers" loads the named checkpoints via the optional
@huggingface/transformers dependency.`;

export function parseJob(argv: string[]): ExtractionJob {
  if (argv[0] !== "extract") {
    throw new Error(USAGE);
  }
  const { values } = parseArgs({
    args: argv.slice(1),
    options: {
      in: { type: "string" },
      encoder: { type: "string" },
      nli: { type: "string" },
      out: { type: "string" },
      backend: { type: "string", default: "deterministic" },
      "batch-size": { type: "string", default: "16" },
      device: { type: "string", default: "auto" },
      dim: { type: "string" },
    },
  });
  for (const key of ["in", "encoder", "nli", "out"] as const) {
    if (!values[key]) throw new Error(`missing --${key}\n\n${USAGE}`);
  }
  if (values.backend !== "deterministic" && values.backend !== "transformers") {
    throw new Error(`unknown backend ${values.backend}`);
  }
  const batchSize = Number(values["batch-size"]);
  if (!Number.isInteger(batchSize) || batchSize < 1) {
    throw new Error(`batch size must be a positive integer, got ${values["batch-size"]}`);
  }
  return {
    inputPath: values.in!,
    encoderId: values.encoder!,
    nliId: values.nli!,
    outputPath: values.out!,
    backend: values.backend,
    batchSize,
    device: values.device!,
    dim: values.dim === undefined ? undefined : Number(values.dim),
  };
}

export async function main(argv: string[]): Promise<number> {
  try {
    await buildBundle(parseJob(argv));
    return 0;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
}

import { pathToFileURL } from "node:url";

if (process.argv[1] && import.meta.url === pathToFileURL(process.argv[1]).href) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
