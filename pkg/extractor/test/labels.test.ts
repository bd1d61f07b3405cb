import { describe, expect, it } from "vitest";

import { canonicalClassIndices } from "../src/nli.js";
import { encoderWidth } from "../src/encoders.js";

describe("canonicalClassIndices", () => {
  it("maps MNLI-style (contradiction, neutral, entailment) checkpoints", () => {
    expect(
      canonicalClassIndices({ "0": "CONTRADICTION", "1": "NEUTRAL", "2": "ENTAILMENT" }),
    ).toEqual([2, 1, 0]);
  });

  it("maps cross-encoder-style (contradiction, entailment, neutral) checkpoints", () => {
    expect(
      canonicalClassIndices({ "0": "contradiction", "1": "entailment", "2": "neutral" }),
    ).toEqual([1, 2, 0]);
  });

  it("passes canonical order through unchanged", () => {
    expect(
      canonicalClassIndices({ "0": "entailment", "1": "neutral", "2": "contradiction" }),
    ).toEqual([0, 1, 2]);
  });

  it("hard-errors on unrecognizable labels", () => {
    expect(() =>
      canonicalClassIndices({ "0": "LABEL_0", "1": "LABEL_1", "2": "LABEL_2" }),
    ).toThrow(/not recognizable/);
  });

  it("hard-errors on missing classes", () => {
    expect(() =>
      canonicalClassIndices({ "0": "entailment", "1": "neutral" }),
    ).toThrow(/missing classes/);
  });
});

describe("encoderWidth", () => {
  it("records 512 for the clip-vit-base-patch32 text encoder", () => {
    expect(encoderWidth("openai/clip-vit-base-patch32")).toBe(512);
  });

  it("errors on unknown checkpoints without an override", () => {
    expect(() => encoderWidth("somebody/unknown-encoder")).toThrow(/--dim/);
  });

  it("accepts an explicit override", () => {
    expect(encoderWidth("somebody/unknown-encoder", 128)).toBe(128);
  });
});
