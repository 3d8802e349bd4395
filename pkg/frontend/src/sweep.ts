/** Alpha sweep playback: submit one job per alpha (the service caches
 * repeats), then hand the frames to an animation callback. */

import type { Client } from "./api.js";
import type { EmbedParams, EmbeddingPayload } from "./types.js";
import { rowDistance } from "./types.js";

export const DEFAULT_SWEEP = [0.01, 0.05, 0.1, 1.0];

export interface SweepFrame {
  alpha: number;
  embedding: EmbeddingPayload;
}

export async function runSweep(client: Client, datasetId: string,
                               base: EmbedParams,
                               alphas: number[] = DEFAULT_SWEEP,
                               onFrame?: (f: SweepFrame) => void):
    Promise<SweepFrame[]> {
  const frames: SweepFrame[] = [];
  for (const alpha of alphas) {
    const sub = await client.postEmbed(datasetId, { ...base, alpha });
    const job = await client.waitForJob(sub.job_id);
    if (job.state === "failed") {
      throw new Error(`sweep failed at alpha=${alpha}: ${job.error}`);
    }
    const embedding = await client.getEmbedding(sub.job_id);
    const frame = { alpha, embedding };
    frames.push(frame);
    onFrame?.(frame);
  }
  return frames;
}

/** Distance between two embedded points per frame (the identification
 * readout for a pairwise barrier). */
export function endpointGaps(frames: SweepFrame[], a: number,
                             b: number): number[] {
  return frames.map((f) =>
    rowDistance(f.embedding.coords, f.embedding.shape[1], a, b));
}
