import {
  EmbeddingModel,
  dot,
  embedText,
  tokenVector,
  tokenize,
} from "./embedding.js";

export type ScorerKind = "bi-encoder-dot" | "cross-encoder" | "late-interaction";

export const SCORER_KINDS: ScorerKind[] = [
  "bi-encoder-dot",
  "cross-encoder",
  "late-interaction",
];

export interface BridgeConfig {
  modelId: string;
  scorerKind: ScorerKind;
  device: string;
  maxBatch: number;
}

export class ConfigError extends Error {}

export function validateConfig(config: BridgeConfig): BridgeConfig {
  if (!SCORER_KINDS.includes(config.scorerKind)) {
    throw new ConfigError(
      `unknown scorer kind ${JSON.stringify(config.scorerKind)}; expected one of ${SCORER_KINDS.join(", ")}`
    );
  }
  if (!Number.isInteger(config.maxBatch) || config.maxBatch < 1) {
    throw new ConfigError(`max batch must be an integer >= 1, got ${config.maxBatch}`);
  }
  return config;
}

function biEncoderDot(model: EmbeddingModel, query: string, doc: string): number {
  return dot(embedText(model, query), embedText(model, doc));
}

/**
 * Relevance logit from two interaction features: embedding cosine and the
 * fraction of query tokens present in the document. A fixed affine combine
 * keeps the score a finite logit-like value with more weight on exact
 * lexical interaction than the bi-encoder gives it.
 */
function crossEncoder(model: EmbeddingModel, query: string, doc: string): number {
  const cosine = biEncoderDot(model, query, doc);
  const queryTokens = tokenize(query);
  const docTokens = new Set(tokenize(doc));
  const overlap =
    queryTokens.length === 0
      ? 0
      : queryTokens.filter((t) => docTokens.has(t)).length / queryTokens.length;
  return 4.0 * overlap + 2.0 * cosine - 1.0;
}

/** Sum over query tokens of the max similarity to any document token. */
function lateInteraction(model: EmbeddingModel, query: string, doc: string): number {
  const docVectors = tokenize(doc).map((t) => tokenVector(model, t));
  if (docVectors.length === 0) return 0;
  let total = 0;
  for (const queryToken of tokenize(query)) {
    const qv = tokenVector(model, queryToken);
    let best = -Infinity;
    for (const dv of docVectors) {
      const sim = dot(qv, dv);
      if (sim > best) best = sim;
    }
    total += best;
  }
  return total;
}

export function scorePair(
  config: BridgeConfig,
  model: EmbeddingModel,
  query: string,
  doc: string
): number {
  switch (config.scorerKind) {
    case "bi-encoder-dot":
      return biEncoderDot(model, query, doc);
    case "cross-encoder":
      return crossEncoder(model, query, doc);
    case "late-interaction":
      return lateInteraction(model, query, doc);
  }
}
