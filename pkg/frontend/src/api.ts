/** Typed client for the embedding service; all numerics live server-side. */

import type {
  ClassifyResponse,
  DatasetMeta,
  DatasetPayload,
  EmbedParams,
  EmbeddingPayload,
  JobRecord,
  VacModelSpec,
} from "./types.js";

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

async function call<T>(url: string, init?: RequestInit): Promise<T> {
  const resp = await fetch(url, init);
  const body = (await resp.json()) as T & { error?: string };
  if (!resp.ok) {
    throw new ApiError(resp.status, body?.error ?? `HTTP ${resp.status}`);
  }
  return body;
}

export class Client {
  constructor(readonly base: string) {}

  health(): Promise<{ status: string; version: string }> {
    return call(`${this.base}/health`);
  }

  postDataset(points: number[], shape: [number, number],
              labels?: number[]): Promise<DatasetMeta> {
    return call(`${this.base}/datasets`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ points, shape, labels }),
    });
  }

  getDataset(id: string): Promise<DatasetPayload> {
    return call(`${this.base}/datasets/${id}`);
  }

  postEmbed(datasetId: string, params: EmbedParams):
      Promise<{ job_id: string; state: string }> {
    return call(`${this.base}/embed`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ dataset_id: datasetId, params }),
    });
  }

  getJob(jobId: string): Promise<JobRecord> {
    return call(`${this.base}/jobs/${jobId}`);
  }

  getEmbedding(jobId: string): Promise<EmbeddingPayload> {
    return call(`${this.base}/embeddings/${jobId}`);
  }

  classify(jobId: string, model: VacModelSpec, truth?: number[],
           zeroClassTo?: number): Promise<ClassifyResponse> {
    return call(`${this.base}/classify`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({
        job_id: jobId,
        model,
        truth,
        zero_class_to: zeroClassTo,
      }),
    });
  }

  /** Poll a job until it settles; backoff grows toward `maxDelayMs`. */
  async waitForJob(jobId: string, timeoutMs = 120_000,
                   maxDelayMs = 1000): Promise<JobRecord> {
    const t0 = Date.now();
    let delay = 50;
    for (;;) {
      const job = await this.getJob(jobId);
      if (job.state === "done" || job.state === "failed") return job;
      if (Date.now() - t0 > timeoutMs) {
        throw new ApiError(408, `job ${jobId} still ${job.state}`);
      }
      await new Promise((r) => setTimeout(r, delay));
      delay = Math.min(maxDelayMs, delay * 1.6);
    }
  }
}
