/**
 * Deterministic token embeddings.
 *
 * Each token maps to a fixed pseudo-random unit vector seeded by a hash of
 * the token text, so embeddings are reproducible across processes with no
 * model files. Distinct tokens get near-orthogonal vectors; shared tokens
 * between two texts therefore dominate their similarity.
 */

export interface EmbeddingModel {
  id: string;
  dim: number;
}

const MODELS: Record<string, EmbeddingModel> = {
  "hash-64": { id: "hash-64", dim: 64 },
  "hash-128": { id: "hash-128", dim: 128 },
};

export class ModelLoadError extends Error {}

export function loadModel(modelId: string): EmbeddingModel {
  const model = MODELS[modelId];
  if (!model) {
    throw new ModelLoadError(
      `unknown model ${JSON.stringify(modelId)}; available: ${Object.keys(MODELS).join(", ")}`
    );
  }
  return model;
}

export function tokenize(text: string): string[] {
  return text
    .toLowerCase()
    .split(/[^a-z0-9']+/)
    .filter((t) => t.length > 0);
}

function fnv1a(text: string): number {
  let hash = 0x811c9dc5;
  for (let i = 0; i < text.length; i++) {
    hash ^= text.charCodeAt(i);
    hash = Math.imul(hash, 0x01000193);
  }
  return hash >>> 0;
}

function mulberry32(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

function normalize(vec: Float64Array): Float64Array {
  let norm = 0;
  for (const x of vec) norm += x * x;
  norm = Math.sqrt(norm);
  if (norm > 0) {
    for (let i = 0; i < vec.length; i++) vec[i] /= norm;
  }
  return vec;
}

export function tokenVector(model: EmbeddingModel, token: string): Float64Array {
  const rand = mulberry32(fnv1a(`${model.id}:${token}`));
  const vec = new Float64Array(model.dim);
  for (let i = 0; i < model.dim; i++) vec[i] = rand() * 2 - 1;
  return normalize(vec);
}

/** Mean of token vectors, L2-normalized; zero vector for empty text. */
export function embedText(model: EmbeddingModel, text: string): Float64Array {
  const vec = new Float64Array(model.dim);
  const tokens = tokenize(text);
  for (const token of tokens) {
    const tv = tokenVector(model, token);
    for (let i = 0; i < model.dim; i++) vec[i] += tv[i];
  }
  return normalize(vec);
}

export function dot(a: Float64Array, b: Float64Array): number {
  let sum = 0;
  for (let i = 0; i < a.length; i++) sum += a[i] * b[i];
  return sum;
}
