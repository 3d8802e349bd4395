/** Session state: one dataset, one in-flight embed job, slider values,
 * selections, and the potential draft.  Pure state transitions live here
 * so they are testable without a DOM. */

import type { Client } from "./api.js";
import type { EmbedParams, EmbeddingPayload, JobRecord } from "./types.js";
import type { PotentialDraft } from "./potential.js";
import { emptyDraft, serializeDraft, validateDraft } from "./potential.js";
import type { Selection } from "./selection.js";

export interface SessionState {
  datasetId: string | null;
  m: number;
  currentJob: string | null;
  jobState: "idle" | "queued" | "running" | "done" | "failed";
  embedding: EmbeddingPayload | null;
  selections: Selection[];
  draft: PotentialDraft;
  alpha: number;
  delta: number;
  k: number;
  sigma: number;
  n: number;
  lastError: string | null;
}

export function initialState(): SessionState {
  return {
    datasetId: null,
    m: 0,
    currentJob: null,
    jobState: "idle",
    embedding: null,
    selections: [],
    draft: emptyDraft(),
    alpha: 0.0,
    delta: 0.0,
    k: 10,
    sigma: 1.0,
    n: 2,
    lastError: null,
  };
}

export function embedParams(state: SessionState): EmbedParams {
  return {
    k: state.k,
    sigma: state.sigma,
    alpha: state.alpha,
    n: state.n,
    potential: serializeDraft(state.draft),
  };
}

export function canSubmit(state: SessionState): boolean {
  return state.datasetId !== null &&
    state.jobState !== "queued" && state.jobState !== "running" &&
    validateDraft(state.draft, state.m).length === 0;
}

/** Submit an embedding job and poll it to completion (one in flight). */
export async function submitAndWait(client: Client, state: SessionState):
    Promise<SessionState> {
  if (!state.datasetId) throw new Error("no dataset loaded");
  const problems = validateDraft(state.draft, state.m);
  if (problems.length > 0) {
    return { ...state, lastError: problems.join("; ") };
  }
  let next: SessionState = { ...state, jobState: "queued", lastError: null };
  try {
    const sub = await client.postEmbed(state.datasetId, embedParams(state));
    next = { ...next, currentJob: sub.job_id };
    const job: JobRecord = await client.waitForJob(sub.job_id);
    if (job.state === "failed") {
      return { ...next, jobState: "failed", lastError: job.error };
    }
    const embedding = await client.getEmbedding(sub.job_id);
    return { ...next, jobState: "done", embedding };
  } catch (err) {
    return {
      ...next,
      jobState: "failed",
      lastError: err instanceof Error ? err.message : String(err),
    };
  }
}

/** The echoed potential must equal the draft byte-for-byte. */
export function potentialRoundTripOk(state: SessionState,
                                     job: JobRecord): boolean {
  const sent = serializeDraft(state.draft);
  const echoed = job.request.params.potential ?? null;
  return sent === echoed;
}
