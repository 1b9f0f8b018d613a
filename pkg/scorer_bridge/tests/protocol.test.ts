import { PassThrough } from "node:stream";

import { describe, expect, it } from "vitest";

import { PROTOCOL_VERSION, bridgeName, serve } from "../src/protocol.js";
import { BridgeConfig } from "../src/scorers.js";

function config(overrides: Partial<BridgeConfig> = {}): BridgeConfig {
  return {
    modelId: "hash-64",
    scorerKind: "bi-encoder-dot",
    device: "cpu",
    maxBatch: 64,
    ...overrides,
  };
}

/** Feed messages through an in-process serve loop, collect the replies. */
async function roundtrip(cfg: BridgeConfig, messages: object[]) {
  const input = new PassThrough();
  const output = new PassThrough();
  const done = serve(cfg, input, output);
  for (const msg of messages) input.write(JSON.stringify(msg) + "\n");
  input.end();
  const exitCode = await done;
  const raw = output.read()?.toString() ?? "";
  const replies = raw
    .split("\n")
    .filter((l: string) => l.trim() !== "")
    .map((l: string) => JSON.parse(l));
  return { exitCode, replies };
}

const SCORE_BATCH = [
  { qid: "q1", did: "d1", query: "quick fox", doc: "a quick brown fox" },
  { qid: "q1", did: "d2", query: "quick fox", doc: "budget meeting minutes" },
  { qid: "q2", did: "d1", query: "slow dog", doc: "a quick brown fox" },
];

describe("handshake", () => {
  it("answers hello with the protocol version and scorer name", async () => {
    const { exitCode, replies } = await roundtrip(config(), [
      { op: "hello", protocol: 1 },
      { op: "bye" },
    ]);
    expect(exitCode).toBe(0);
    expect(replies).toEqual([
      { op: "hello", protocol: PROTOCOL_VERSION, name: "bi-encoder-dot:hash-64" },
    ]);
  });

  it("rejects unsupported protocol versions", async () => {
    const { exitCode, replies } = await roundtrip(config(), [
      { op: "hello", protocol: 99 },
    ]);
    expect(exitCode).toBe(1);
    expect(replies[0].op).toBe("error");
  });

  it("reports model load failure as an error reply and nonzero exit", async () => {
    const { exitCode, replies } = await roundtrip(config({ modelId: "missing" }), [
      { op: "hello", protocol: 1 },
    ]);
    expect(exitCode).toBe(1);
    expect(replies[0].op).toBe("error");
  });
});

describe("scoring", () => {
  it("round-trips ids with finite float scores", async () => {
    const { exitCode, replies } = await roundtrip(config(), [
      { op: "hello", protocol: 1 },
      { op: "score", batch: SCORE_BATCH },
      { op: "bye" },
    ]);
    expect(exitCode).toBe(0);
    const scores = replies[1];
    expect(scores.op).toBe("scores");
    expect(scores.batch.map((r: any) => [r.qid, r.did])).toEqual(
      SCORE_BATCH.map((r) => [r.qid, r.did])
    );
    for (const row of scores.batch) {
      expect(Number.isFinite(row.score)).toBe(true);
    }
  });

  it("gives duplicate pairs identical scores regardless of batch splits", async () => {
    const doubled = [...SCORE_BATCH, ...SCORE_BATCH];
    const { replies } = await roundtrip(config({ maxBatch: 2 }), [
      { op: "score", batch: doubled },
      { op: "bye" },
    ]);
    const scores = replies[0].batch;
    expect(scores.length).toBe(6);
    for (let i = 0; i < 3; i++) {
      expect(scores[i].score).toBe(scores[i + 3].score);
    }
  });

  it("handles an empty batch", async () => {
    const { replies } = await roundtrip(config(), [
      { op: "score", batch: [] },
      { op: "bye" },
    ]);
    expect(replies[0]).toEqual({ op: "scores", batch: [] });
  });

  it("rejects malformed batch rows", async () => {
    const { exitCode, replies } = await roundtrip(config(), [
      { op: "score", batch: [{ qid: "q", did: "d", query: 3, doc: "x" }] },
    ]);
    expect(exitCode).toBe(1);
    expect(replies[0].op).toBe("error");
  });
});

describe("error handling", () => {
  it("rejects invalid JSON lines", async () => {
    const input = new PassThrough();
    const output = new PassThrough();
    const done = serve(config(), input, output);
    input.write("{not json\n");
    input.end();
    expect(await done).toBe(1);
    expect(JSON.parse(output.read().toString()).op).toBe("error");
  });

  it("rejects unknown ops", async () => {
    const { exitCode, replies } = await roundtrip(config(), [{ op: "train" }]);
    expect(exitCode).toBe(1);
    expect(replies[0].op).toBe("error");
  });
});

describe("bridgeName", () => {
  it("combines kind and model id", () => {
    expect(bridgeName(config({ scorerKind: "late-interaction" }))).toBe(
      "late-interaction:hash-64"
    );
  });
});
