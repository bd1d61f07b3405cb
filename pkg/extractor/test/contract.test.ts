import { describe, expect, it } from "vitest";

import { invariantErrors, loadSchema, schemaErrors, validateLine } from "../src/validate.js";

const GOOD_LINE = {
  question_id: "q1",
  question_text: "q",
  references: ["r"],
  responses: ["a", "b"],
  embeddings: [
    [0.1, 0.2],
    [0.3, 0.4],
  ],
  nli_logits: [
    [
      [[1, 0, -1], [1, 0, -1]],
      [[0, 0, 0], [0, 0, 0]],
    ],
    [
      [[0, 0, 0], [0, 0, 0]],
      [[1, 0, -1], [1, 0, -1]],
    ],
  ],
};

describe("vendored schema fixture", () => {
  it("accepts a well-formed line", () => {
    expect(validateLine(GOOD_LINE)).toEqual([]);
  });

  it("rejects missing required keys", () => {
    const { responses, ...rest } = GOOD_LINE;
    expect(schemaErrors(rest, loadSchema()).join("; ")).toContain("responses");
  });

  it("rejects unknown keys", () => {
    expect(
      schemaErrors({ ...GOOD_LINE, surprise: 1 }, loadSchema()).join("; "),
    ).toContain("surprise");
  });

  it("rejects a single-response bundle", () => {
    const bad = { ...GOOD_LINE, responses: ["only"], embeddings: [[0.1, 0.2]] };
    expect(schemaErrors(bad, loadSchema()).join("; ")).toContain("at least 2");
  });

  it("rejects positive logprobs via the schema maximum", () => {
    const bad = { ...GOOD_LINE, seq_logprobs: [0.5, -1], token_counts: [1, 1] };
    expect(schemaErrors(bad, loadSchema()).join("; ")).toContain("maximum");
  });

  it("accepts the sidecar-offset form of embeddings", () => {
    const side = { ...GOOD_LINE, embeddings: { sidecar_offset: 6 } };
    expect(schemaErrors(side, loadSchema())).toEqual([]);
  });
});

describe("numeric invariants beyond the schema", () => {
  it("catches row-count disagreement", () => {
    const bad = { ...GOOD_LINE, embeddings: [[0.1, 0.2]] };
    expect(invariantErrors(bad).join("; ")).toContain("rows != m=2");
  });

  it("catches ragged embedding widths", () => {
    const bad = { ...GOOD_LINE, embeddings: [[0.1, 0.2], [0.3]] };
    expect(invariantErrors(bad).join("; ")).toContain("width");
  });

  it("catches non-finite values", () => {
    const bad = {
      ...GOOD_LINE,
      embeddings: [
        [0.1, Number.NaN],
        [0.3, 0.4],
      ],
    };
    expect(invariantErrors(bad).join("; ")).toContain("non-finite");
  });

  it("catches logprobs without token counts", () => {
    const bad = { ...GOOD_LINE, seq_logprobs: [-1, -2] };
    expect(invariantErrors(bad).join("; ")).toContain("travel together");
  });

  it("catches wrong nli tensor row counts", () => {
    const bad = { ...GOOD_LINE, nli_logits: [GOOD_LINE.nli_logits[0]] };
    expect(invariantErrors(bad).join("; ")).toContain("rows != m=2");
  });
});
