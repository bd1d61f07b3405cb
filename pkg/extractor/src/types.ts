/** Shared shapes for the extraction pipeline. */

export interface QuestionRow {
  question_id: string;
  question_text: string;
  references: string[];
  responses: string[];
  /** Optional pass-through from an upstream generator run. */
  seq_logprobs?: number[];
  token_counts?: number[];
  external_scores?: Record<string, number[]>;
}

export interface ExtractionJob {
  inputPath: string;
  encoderId: string;
  nliId: string;
  outputPath: string;
  batchSize: number;
  device: string;
  /** "deterministic" works offline; "transformers" loads real checkpoints. */
  backend: "deterministic" | "transformers";
  /** Overrides the registry width for unknown encoder ids (deterministic backend). */
  dim?: number;
}

export interface BundleLine {
  question_id: string;
  question_text: string;
  references: string[];
  responses: string[];
  embeddings: number[][];
  nli_logits: number[][][][];
  seq_logprobs?: number[];
  token_counts?: number[];
  external_scores?: Record<string, number[]>;
}

/** Canonical class order everywhere in the bundle format. */
export const CLASS_ORDER = ["entailment", "neutral", "contradiction"] as const;

export interface EncoderBackend {
  readonly id: string;
  readonly dim: number;
  embed(texts: string[]): Promise<number[][]>;
}

export interface NliBackend {
  readonly id: string;
  /** Logits in canonical (entailment, neutral, contradiction) order. */
  classify(premise: string, hypothesis: string): Promise<[number, number, number]>;
}
