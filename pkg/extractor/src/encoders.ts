import { DeterministicEncoder } from "./deterministic.js";
import type { EncoderBackend, ExtractionJob } from "./types.js";

/** Published hidden widths for known text-encoder checkpoints. */
export const ENCODER_WIDTHS: Record<string, number> = {
  "openai/clip-vit-base-patch32": 512,
  "Xenova/clip-vit-base-patch32": 512,
  "openai/clip-vit-base-patch16": 512,
  "openai/clip-vit-large-patch14": 768,
  "sentence-transformers/all-MiniLM-L6-v2": 384,
  "Xenova/all-MiniLM-L6-v2": 384,
};

export function encoderWidth(encoderId: string, override?: number): number {
  if (override !== undefined) {
    if (!Number.isInteger(override) || override < 1) {
      throw new Error(`invalid embedding width override: ${override}`);
    }
    return override;
  }
  const width = ENCODER_WIDTHS[encoderId];
  if (width === undefined) {
    throw new Error(
      `unknown encoder checkpoint ${JSON.stringify(encoderId)}; ` +
        `pass --dim to set a width explicitly`,
    );
  }
  return width;
}

/** Real-checkpoint backend via transformers.js; loaded lazily so offline
 * use never touches it. */
class TransformersEncoder implements EncoderBackend {
  readonly id: string;
  readonly dim: number;
  private extractor: any;
  private batchSize: number;

  private constructor(id: string, dim: number, extractor: any, batchSize: number) {
    this.id = id;
    this.dim = dim;
    this.extractor = extractor;
    this.batchSize = batchSize;
  }

  static async load(job: ExtractionJob): Promise<TransformersEncoder> {
    let pipeline;
    try {
      ({ pipeline } = await import("@huggingface/transformers"));
    } catch {
      throw new Error(
        "the transformers backend needs the optional dependency " +
          "@huggingface/transformers (npm install @huggingface/transformers)",
      );
    }
    const extractor = await pipeline("feature-extraction", job.encoderId, {
      device: job.device === "auto" ? undefined : job.device,
    });
    const probe = await extractor(["probe"], { pooling: "mean" });
    const dim = probe.dims[probe.dims.length - 1];
    return new TransformersEncoder(job.encoderId, dim, extractor, job.batchSize);
  }

  async embed(texts: string[]): Promise<number[][]> {
    const out: number[][] = [];
    for (let start = 0; start < texts.length; start += this.batchSize) {
      const batch = texts.slice(start, start + this.batchSize);
      const tensor = await this.extractor(batch, { pooling: "mean" });
      const data: number[] = Array.from(tensor.data as Iterable<number>);
      for (let i = 0; i < batch.length; i++) {
        out.push(data.slice(i * this.dim, (i + 1) * this.dim));
      }
    }
    return out;
  }
}

export async function loadEncoder(job: ExtractionJob): Promise<EncoderBackend> {
  if (job.backend === "transformers") {
    return TransformersEncoder.load(job);
  }
  return new DeterministicEncoder(job.encoderId, encoderWidth(job.encoderId, job.dim));
}
