/** Named point selections with lasso/click membership tests and URL
 * fragment persistence, so an expert labeling is shareable as a link. */

export interface Selection {
  name: string;
  color: string;
  indices: number[];
}

export type Point2 = [number, number];

/** Ray-casting point-in-polygon; the polygon closes itself. */
export function pointInPolygon(p: Point2, poly: Point2[]): boolean {
  if (poly.length < 3) return false;
  let inside = false;
  const [x, y] = p;
  for (let i = 0, j = poly.length - 1; i < poly.length; j = i++) {
    const [xi, yi] = poly[i]!;
    const [xj, yj] = poly[j]!;
    const crosses = yi > y !== yj > y &&
      x < ((xj - xi) * (y - yi)) / (yj - yi) + xi;
    if (crosses) inside = !inside;
  }
  return inside;
}

/** Indices of the 2-D points caught by a lasso polygon. */
export function lassoSelect(coords2d: Point2[], lasso: Point2[]): number[] {
  const out: number[] = [];
  coords2d.forEach((p, i) => {
    if (pointInPolygon(p, lasso)) out.push(i);
  });
  return out;
}

export function toggleIndex(sel: Selection, index: number): Selection {
  const has = sel.indices.includes(index);
  const indices = has
    ? sel.indices.filter((i) => i !== index)
    : [...sel.indices, index].sort((a, b) => a - b);
  return { ...sel, indices };
}

export function addIndices(sel: Selection, extra: number[]): Selection {
  const merged = new Set(sel.indices);
  extra.forEach((i) => merged.add(i));
  return { ...sel, indices: [...merged].sort((a, b) => a - b) };
}

/** Compact run-length index encoding for the URL fragment. */
export function encodeIndices(indices: number[]): string {
  const sorted = [...indices].sort((a, b) => a - b);
  const parts: string[] = [];
  let i = 0;
  while (i < sorted.length) {
    let j = i;
    while (j + 1 < sorted.length && sorted[j + 1]! === sorted[j]! + 1) j++;
    parts.push(j > i ? `${sorted[i]}-${sorted[j]}` : `${sorted[i]}`);
    i = j + 1;
  }
  return parts.join(",");
}

export function decodeIndices(text: string): number[] {
  if (!text) return [];
  const out: number[] = [];
  for (const part of text.split(",")) {
    const m = part.match(/^(\d+)-(\d+)$/);
    if (m) {
      for (let v = Number(m[1]); v <= Number(m[2]); v++) out.push(v);
    } else if (/^\d+$/.test(part)) {
      out.push(Number(part));
    } else {
      throw new Error(`bad index run: ${part}`);
    }
  }
  return out;
}

/** Selections -> URL fragment (after "#"). */
export function selectionsToFragment(selections: Selection[]): string {
  return selections
    .filter((s) => s.indices.length > 0)
    .map((s) =>
      `sel=${encodeURIComponent(s.name)}:${s.color.replace("#", "")}:` +
      encodeIndices(s.indices))
    .join("&");
}

export function selectionsFromFragment(fragment: string): Selection[] {
  const out: Selection[] = [];
  for (const piece of fragment.split("&")) {
    if (!piece.startsWith("sel=")) continue;
    const body = decodeURIComponent(piece.slice(4));
    const halves = body.split(":");
    if (halves.length !== 3) throw new Error(`bad selection piece: ${piece}`);
    out.push({
      name: halves[0]!,
      color: "#" + halves[1]!,
      indices: decodeIndices(halves[2]!),
    });
  }
  return out;
}
