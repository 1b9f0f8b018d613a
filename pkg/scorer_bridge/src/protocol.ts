/**
 * Line-delimited JSON scoring protocol over a stream pair.
 *
 * Handshake: {"op":"hello","protocol":1} -> {"op":"hello","protocol":1,"name":...}
 * Scoring:   {"op":"score","batch":[{qid,did,query,doc}...]}
 *            -> {"op":"scores","batch":[{qid,did,score}...]}
 * Shutdown:  {"op":"bye"} ends the loop.
 *
 * Any malformed line, wrong protocol version or unknown op gets an
 * {"op":"error","message":...} reply and terminates the loop with a
 * nonzero exit code.
 */
import { createInterface } from "node:readline";
import type { Readable, Writable } from "node:stream";

import { EmbeddingModel, loadModel, ModelLoadError } from "./embedding.js";
import { BridgeConfig, scorePair, validateConfig } from "./scorers.js";

export const PROTOCOL_VERSION = 1;

interface ScoreRequestRow {
  qid: string;
  did: string;
  query: string;
  doc: string;
}

function parseBatch(raw: unknown): ScoreRequestRow[] {
  if (!Array.isArray(raw)) {
    throw new Error("score batch must be an array");
  }
  return raw.map((row, i) => {
    if (typeof row !== "object" || row === null) {
      throw new Error(`batch row ${i} is not an object`);
    }
    const { qid, did, query, doc } = row as Record<string, unknown>;
    for (const [name, value] of Object.entries({ qid, did, query, doc })) {
      if (typeof value !== "string") {
        throw new Error(`batch row ${i} field ${name} must be a string`);
      }
    }
    return { qid, did, query, doc } as ScoreRequestRow;
  });
}

export function bridgeName(config: BridgeConfig): string {
  return `${config.scorerKind}:${config.modelId}`;
}

/** Run the protocol loop; resolves with the process exit code. */
export function serve(
  config: BridgeConfig,
  input: Readable,
  output: Writable
): Promise<number> {
  validateConfig(config);
  let model: EmbeddingModel;
  try {
    model = loadModel(config.modelId);
  } catch (err) {
    if (err instanceof ModelLoadError) {
      output.write(JSON.stringify({ op: "error", message: err.message }) + "\n");
      return Promise.resolve(1);
    }
    throw err;
  }

  const reply = (msg: object) => output.write(JSON.stringify(msg) + "\n");

  return new Promise((resolve) => {
    const lines = createInterface({ input, crlfDelay: Infinity });
    let exitCode = 0;

    const fail = (message: string) => {
      reply({ op: "error", message });
      exitCode = 1;
      lines.close();
    };

    lines.on("line", (line) => {
      if (line.trim() === "") return;
      let msg: Record<string, unknown>;
      try {
        msg = JSON.parse(line);
      } catch {
        fail(`invalid JSON: ${line.slice(0, 200)}`);
        return;
      }
      switch (msg.op) {
        case "hello":
          if (msg.protocol !== PROTOCOL_VERSION) {
            fail(`unsupported protocol ${msg.protocol}, expected ${PROTOCOL_VERSION}`);
            return;
          }
          reply({ op: "hello", protocol: PROTOCOL_VERSION, name: bridgeName(config) });
          return;
        case "score": {
          let batch: ScoreRequestRow[];
          try {
            batch = parseBatch(msg.batch);
          } catch (err) {
            fail((err as Error).message);
            return;
          }
          const scored: { qid: string; did: string; score: number }[] = [];
          for (let start = 0; start < batch.length; start += config.maxBatch) {
            for (const row of batch.slice(start, start + config.maxBatch)) {
              scored.push({
                qid: row.qid,
                did: row.did,
                score: scorePair(config, model, row.query, row.doc),
              });
            }
          }
          reply({ op: "scores", batch: scored });
          return;
        }
        case "bye":
          lines.close();
          return;
        default:
          fail(`unknown op ${JSON.stringify(msg.op)}`);
      }
    });

    lines.on("close", () => resolve(exitCode));
  });
}
