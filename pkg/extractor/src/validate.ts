/** Contract checks for emitted bundle lines.
 *
 * Two layers: the vendored JSON-schema fixture (shape of one line) and the
 * numeric invariants a schema cannot express (cross-field sizes,
 * finiteness, sign constraints).  build_bundle refuses to write anything
 * that fails either layer.
 */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

const SCHEMA_PATH = join(
  dirname(fileURLToPath(import.meta.url)),
  "..",
  "schema",
  "bundle.schema.json",
);

export function loadSchema(): any {
  return JSON.parse(readFileSync(SCHEMA_PATH, "utf-8"));
}

/** Minimal checker for the JSON-schema subset the fixture uses. */
export function schemaErrors(value: unknown, schema: any, path = "$"): string[] {
  const errs: string[] = [];
  if (schema.oneOf) {
    const branches: string[][] = schema.oneOf.map((s: any) => schemaErrors(value, s, path));
    if (!branches.some((b) => b.length === 0)) {
      errs.push(`${path}: matches no oneOf branch`);
    }
    return errs;
  }
  switch (schema.type) {
    case "object": {
      if (typeof value !== "object" || value === null || Array.isArray(value)) {
        return [`${path}: expected object`];
      }
      const obj = value as Record<string, unknown>;
      for (const key of schema.required ?? []) {
        if (!(key in obj)) errs.push(`${path}: missing required key ${key}`);
      }
      for (const [key, sub] of Object.entries(obj)) {
        const propSchema = schema.properties?.[key];
        if (propSchema) {
          errs.push(...schemaErrors(sub, propSchema, `${path}.${key}`));
        } else if (schema.additionalProperties === false) {
          errs.push(`${path}: unexpected key ${key}`);
        } else if (typeof schema.additionalProperties === "object") {
          errs.push(...schemaErrors(sub, schema.additionalProperties, `${path}.${key}`));
        }
      }
      return errs;
    }
    case "array": {
      if (!Array.isArray(value)) return [`${path}: expected array`];
      if (schema.minItems !== undefined && value.length < schema.minItems) {
        errs.push(`${path}: needs at least ${schema.minItems} items`);
      }
      if (schema.maxItems !== undefined && value.length > schema.maxItems) {
        errs.push(`${path}: allows at most ${schema.maxItems} items`);
      }
      if (schema.items) {
        value.forEach((item, i) =>
          errs.push(...schemaErrors(item, schema.items, `${path}[${i}]`)),
        );
      }
      return errs;
    }
    case "string": {
      if (typeof value !== "string") return [`${path}: expected string`];
      if (schema.minLength !== undefined && value.length < schema.minLength) {
        errs.push(`${path}: shorter than minLength ${schema.minLength}`);
      }
      return errs;
    }
    case "number": {
      if (typeof value !== "number") return [`${path}: expected number`];
      if (schema.maximum !== undefined && value > schema.maximum) {
        errs.push(`${path}: above maximum ${schema.maximum}`);
      }
      if (schema.minimum !== undefined && value < schema.minimum) {
        errs.push(`${path}: below minimum ${schema.minimum}`);
      }
      return errs;
    }
    case "integer": {
      if (typeof value !== "number" || !Number.isInteger(value)) {
        return [`${path}: expected integer`];
      }
      if (schema.maximum !== undefined && value > schema.maximum) {
        errs.push(`${path}: above maximum ${schema.maximum}`);
      }
      if (schema.minimum !== undefined && value < schema.minimum) {
        errs.push(`${path}: below minimum ${schema.minimum}`);
      }
      return errs;
    }
    default:
      return [`${path}: unsupported schema node`];
  }
}

const allFinite = (xs: number[]) => xs.every(Number.isFinite);

/** Invariants beyond the schema: size agreement, finiteness, signs. */
export function invariantErrors(line: any): string[] {
  const errs: string[] = [];
  const m = line.responses?.length ?? 0;
  if (line.embeddings && Array.isArray(line.embeddings)) {
    if (line.embeddings.length !== m) errs.push(`embeddings: ${line.embeddings.length} rows != m=${m}`);
    const d = line.embeddings[0]?.length ?? 0;
    for (const [i, row] of line.embeddings.entries()) {
      if (row.length !== d) errs.push(`embeddings[${i}]: width ${row.length} != d=${d}`);
      if (!allFinite(row)) errs.push(`embeddings[${i}]: non-finite entry`);
    }
  }
  if (line.nli_logits) {
    const L = line.nli_logits;
    if (L.length !== m) errs.push(`nli_logits: ${L.length} rows != m=${m}`);
    for (const [i, row] of L.entries()) {
      if (row.length !== m) errs.push(`nli_logits[${i}]: ${row.length} cols != m=${m}`);
      for (const [j, pair] of row.entries()) {
        for (const [dir, logits] of pair.entries()) {
          if (!allFinite(logits)) errs.push(`nli_logits[${i}][${j}][${dir}]: non-finite`);
        }
      }
    }
  }
  if ((line.seq_logprobs === undefined) !== (line.token_counts === undefined)) {
    errs.push("seq_logprobs and token_counts must travel together");
  }
  if (line.seq_logprobs) {
    if (line.seq_logprobs.length !== m) errs.push(`seq_logprobs: length != m=${m}`);
    if (!allFinite(line.seq_logprobs)) errs.push("seq_logprobs: non-finite entry");
  }
  if (line.token_counts && line.token_counts.length !== m) {
    errs.push(`token_counts: length != m=${m}`);
  }
  if (line.external_scores) {
    for (const [name, vals] of Object.entries(line.external_scores) as [string, number[]][]) {
      if (vals.length !== m) errs.push(`external_scores[${name}]: length != m=${m}`);
      if (!allFinite(vals)) errs.push(`external_scores[${name}]: non-finite entry`);
    }
  }
  return errs;
}

export function validateLine(line: unknown): string[] {
  return [...schemaErrors(line, loadSchema()), ...invariantErrors(line)];
}
