/** Potential drafting: named selections become diagonal barriers, pairs
 * of selections become pairwise links.  The draft serializes to the
 * exact spec-list format the service consumes, and the canonical string
 * is what travels on the wire, so an echo comparison is byte-exact. */

import type { PotentialSpecItem } from "./types.js";

export interface PotentialDraft {
  /** Indices pushed toward zero, with the barrier weight. */
  diag: { indices: number[]; value: number }[];
  /** Point pairs identified with each other. */
  pairs: [number, number][];
  /** Index chains identified sequentially. */
  chains: number[][];
}

export function emptyDraft(): PotentialDraft {
  return { diag: [], pairs: [], chains: [] };
}

export function draftIsEmpty(draft: PotentialDraft): boolean {
  return draft.diag.length === 0 && draft.pairs.length === 0 &&
    draft.chains.length === 0;
}

/** Spec-list form, entries ordered deterministically (diag, pair, chain). */
export function toSpecList(draft: PotentialDraft): PotentialSpecItem[] {
  const items: PotentialSpecItem[] = [];
  for (const d of draft.diag) {
    if (d.indices.length > 0) {
      items.push({
        type: "diag",
        indices: [...d.indices].sort((a, b) => a - b),
        value: d.value,
      });
    }
  }
  if (draft.pairs.length > 0) {
    items.push({
      type: "pair",
      indices: draft.pairs.map(([a, b]) => (a <= b ? [a, b] : [b, a])),
      value: 1.0,
    });
  }
  for (const chain of draft.chains) {
    if (chain.length >= 2) {
      items.push({ type: "chain", indices: [...chain], value: 1.0 });
    }
  }
  return items;
}

/** Canonical wire form: compact JSON, no whitespace. */
export function serializeDraft(draft: PotentialDraft): string | null {
  const items = toSpecList(draft);
  return items.length === 0 ? null : JSON.stringify(items);
}

/** Parse a wire string back into a draft (inverse of serializeDraft for
 * drafts produced by this module). */
export function parseSpec(text: string): PotentialDraft {
  const items = JSON.parse(text) as PotentialSpecItem[];
  if (!Array.isArray(items)) throw new Error("potential spec must be a list");
  const draft = emptyDraft();
  for (const item of items) {
    if (item.type === "diag") {
      const value = Array.isArray(item.value) ? (item.value[0] ?? 1) : item.value;
      draft.diag.push({ indices: [...item.indices], value });
    } else if (item.type === "pair") {
      for (const [a, b] of item.indices) draft.pairs.push([a, b]);
    } else if (item.type === "chain") {
      draft.chains.push([...item.indices]);
    } else {
      throw new Error(`unknown potential item: ${JSON.stringify(item)}`);
    }
  }
  return draft;
}

/** Validate every referenced index against the dataset size. */
export function validateDraft(draft: PotentialDraft, m: number): string[] {
  const problems: string[] = [];
  const check = (i: number, what: string) => {
    if (!Number.isInteger(i) || i < 0 || i >= m) {
      problems.push(`${what} index ${i} out of range [0, ${m})`);
    }
  };
  for (const d of draft.diag) {
    d.indices.forEach((i) => check(i, "diagonal"));
    if (d.value < 0) problems.push("diagonal barrier weight must be >= 0");
  }
  for (const [a, b] of draft.pairs) {
    check(a, "pair");
    check(b, "pair");
    if (a === b) problems.push(`pair (${a}, ${b}) must join distinct points`);
  }
  for (const chain of draft.chains) {
    chain.forEach((i) => check(i, "chain"));
    if (new Set(chain).size !== chain.length) {
      problems.push("chain indices must be distinct");
    }
  }
  return problems;
}
