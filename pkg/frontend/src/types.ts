/** Wire types matching the service's JSON schemas. */

export interface DatasetMeta {
  id: string;
  m: number;
  n_features: number;
}

export interface DatasetPayload extends DatasetMeta {
  points: number[];
  shape: [number, number];
  labels?: number[] | null;
}

export type JobState = "queued" | "running" | "done" | "failed";

export interface EmbedParams {
  k: number;
  sigma: number;
  alpha: number;
  n: number;
  seed?: number;
  /** Potential spec list serialized as a canonical JSON string. */
  potential?: string | null;
}

export interface JobRecord {
  job_id: string;
  state: JobState;
  request: { dataset_id: string; params: EmbedParams };
  error: string | null;
  result: string | null;
}

export interface EmbeddingPayload {
  version: number;
  shape: [number, number];
  coords: number[];
  eigenvalues: number[];
  params: Record<string, unknown>;
}

export type PotentialSpecItem =
  | { type: "diag"; indices: number[]; value: number | number[] }
  | { type: "pair"; indices: [number, number][]; value: number }
  | { type: "chain"; indices: number[]; value: number };

export interface VacModelSpec {
  seeds?: number[][];
  tightness?: number[];
  norm_threshold?: number;
  class_names?: string[];
  fit_groups?: Record<string, number[]>;
}

export interface ClassifyResponse {
  labels: number[];
  counts: Record<string, number>;
  class_names: string[];
  error_rate?: number;
}

/** Row accessor for a flat row-major coordinate buffer. */
export function row(coords: number[], n: number, i: number): number[] {
  const out = new Array<number>(n);
  for (let j = 0; j < n; j++) out[j] = coords[i * n + j] ?? NaN;
  return out;
}

export function rowDistance(coords: number[], n: number, a: number, b: number): number {
  let s = 0;
  for (let j = 0; j < n; j++) {
    const d = (coords[a * n + j] ?? 0) - (coords[b * n + j] ?? 0);
    s += d * d;
  }
  return Math.sqrt(s);
}
