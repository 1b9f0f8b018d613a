#!/usr/bin/env node
import { parseArgs } from "node:util";

import { serve } from "./protocol.js";
import { BridgeConfig, ConfigError, ScorerKind } from "./scorers.js";

export function configFromArgs(argv: string[]): BridgeConfig {
  const { values } = parseArgs({
    args: argv,
    options: {
      model: { type: "string", default: "hash-64" },
      kind: { type: "string", default: "bi-encoder-dot" },
      device: { type: "string", default: "cpu" },
      "max-batch": { type: "string", default: "64" },
    },
  });
  const maxBatch = Number(values["max-batch"]);
  return {
    modelId: values.model as string,
    scorerKind: values.kind as ScorerKind,
    device: values.device as string,
    maxBatch,
  };
}

async function main() {
  let config: BridgeConfig;
  try {
    config = configFromArgs(process.argv.slice(2));
    process.exitCode = await serve(config, process.stdin, process.stdout);
  } catch (err) {
    if (err instanceof ConfigError || err instanceof TypeError) {
      process.stderr.write(`${(err as Error).message}\n`);
      process.exitCode = 2;
      return;
    }
    throw err;
  }
}

main();
