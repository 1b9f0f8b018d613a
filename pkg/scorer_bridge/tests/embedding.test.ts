import { describe, expect, it } from "vitest";

import {
  ModelLoadError,
  dot,
  embedText,
  loadModel,
  tokenVector,
  tokenize,
} from "../src/embedding.js";

const model = loadModel("hash-64");

describe("loadModel", () => {
  it("returns the requested dimensionality", () => {
    expect(loadModel("hash-64").dim).toBe(64);
    expect(loadModel("hash-128").dim).toBe(128);
  });

  it("rejects unknown checkpoints", () => {
    expect(() => loadModel("bert-base")).toThrow(ModelLoadError);
  });
});

describe("tokenize", () => {
  it("lowercases and splits on non-word characters", () => {
    expect(tokenize("The Fox, quick!")).toEqual(["the", "fox", "quick"]);
  });

  it("keeps apostrophes inside tokens", () => {
    expect(tokenize("don't stop")).toEqual(["don't", "stop"]);
  });
});

describe("tokenVector", () => {
  it("is deterministic", () => {
    expect(tokenVector(model, "fox")).toEqual(tokenVector(model, "fox"));
  });

  it("is unit length", () => {
    const v = tokenVector(model, "fox");
    expect(dot(v, v)).toBeCloseTo(1.0, 9);
  });

  it("differs across tokens and models", () => {
    expect(tokenVector(model, "fox")).not.toEqual(tokenVector(model, "dog"));
    expect(tokenVector(loadModel("hash-128"), "fox").length).toBe(128);
  });
});

describe("embedText", () => {
  it("is order-insensitive for bags of identical tokens", () => {
    const forward = embedText(model, "a b c");
    const backward = embedText(model, "c b a");
    for (let i = 0; i < forward.length; i++) {
      expect(forward[i]).toBeCloseTo(backward[i], 12);
    }
  });

  it("returns the zero vector for empty text", () => {
    const v = embedText(model, "!!!");
    expect(Array.from(v).every((x) => x === 0)).toBe(true);
  });

  it("scores overlapping texts above disjoint ones", () => {
    const q = embedText(model, "quick brown fox");
    const near = embedText(model, "the quick brown fox jumps");
    const far = embedText(model, "parliamentary procedure minutes");
    expect(dot(q, near)).toBeGreaterThan(dot(q, far));
  });
});
