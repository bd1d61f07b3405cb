import { DeterministicNli } from "./deterministic.js";
import { CLASS_ORDER, type ExtractionJob, type NliBackend } from "./types.js";

/** Map a checkpoint's id2label table onto the canonical
 * (entailment, neutral, contradiction) order.  Returns, for each canonical
 * class, the model output index that carries it.  Unrecognizable labels are
 * a hard error; silently reordering classes would corrupt every consumer.
 */
export function canonicalClassIndices(id2label: Record<string, string>): [number, number, number] {
  const found: Partial<Record<(typeof CLASS_ORDER)[number], number>> = {};
  for (const [idx, raw] of Object.entries(id2label)) {
    const label = raw.toLowerCase().trim();
    const hit = CLASS_ORDER.find((c) => label === c || label.startsWith(c.slice(0, 6)));
    if (hit === undefined) {
      throw new Error(
        `NLI checkpoint label ${JSON.stringify(raw)} is not recognizable as ` +
          `entailment/neutral/contradiction`,
      );
    }
    if (found[hit] !== undefined) {
      throw new Error(`NLI checkpoint maps two outputs to ${JSON.stringify(hit)}`);
    }
    found[hit] = Number(idx);
  }
  const missing = CLASS_ORDER.filter((c) => found[c] === undefined);
  if (missing.length) {
    throw new Error(`NLI checkpoint is missing classes: ${missing.join(", ")}`);
  }
  return [found.entailment!, found.neutral!, found.contradiction!];
}

class TransformersNli implements NliBackend {
  readonly id: string;
  private model: any;
  private tokenizer: any;
  private indices: [number, number, number];

  private constructor(id: string, model: any, tokenizer: any, indices: [number, number, number]) {
    this.id = id;
    this.model = model;
    this.tokenizer = tokenizer;
    this.indices = indices;
  }

  static async load(job: ExtractionJob): Promise<TransformersNli> {
    let mod;
    try {
      mod = await import("@huggingface/transformers");
    } catch {
      throw new Error(
        "the transformers backend needs the optional dependency " +
          "@huggingface/transformers (npm install @huggingface/transformers)",
      );
    }
    const tokenizer = await mod.AutoTokenizer.from_pretrained(job.nliId);
    const model = await mod.AutoModelForSequenceClassification.from_pretrained(job.nliId);
    const id2label = model.config.id2label as Record<string, string>;
    const indices = canonicalClassIndices(id2label);
    console.error(
      `info: NLI label order ${JSON.stringify(id2label)} canonicalized to ` +
        `(entailment, neutral, contradiction) via indices ${JSON.stringify(indices)}`,
    );
    return new TransformersNli(job.nliId, model, tokenizer, indices);
  }

  async classify(premise: string, hypothesis: string): Promise<[number, number, number]> {
    const inputs = await this.tokenizer(premise, { text_pair: hypothesis });
    const { logits } = await this.model(inputs);
    const raw: number[] = Array.from(logits.data as Iterable<number>);
    const [e, n, c] = this.indices;
    return [raw[e], raw[n], raw[c]];
  }
}

export async function loadNli(job: ExtractionJob): Promise<NliBackend> {
  if (job.backend === "transformers") {
    return TransformersNli.load(job);
  }
  return new DeterministicNli(job.nliId);
}
