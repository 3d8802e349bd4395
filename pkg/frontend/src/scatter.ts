/** Canvas scatter renderer: 2-D embedding view with an optional third
 * coordinate as color, selection overlays, and a lasso trail. */

import type { Point2 } from "./selection.js";

export interface ViewTransform {
  scale: number;
  offsetX: number;
  offsetY: number;
}

export function fitView(points: Point2[], width: number, height: number,
                        pad = 24): ViewTransform {
  if (points.length === 0) return { scale: 1, offsetX: 0, offsetY: 0 };
  let xmin = Infinity, xmax = -Infinity, ymin = Infinity, ymax = -Infinity;
  for (const [x, y] of points) {
    xmin = Math.min(xmin, x); xmax = Math.max(xmax, x);
    ymin = Math.min(ymin, y); ymax = Math.max(ymax, y);
  }
  const spanX = xmax - xmin || 1;
  const spanY = ymax - ymin || 1;
  const scale = Math.min((width - 2 * pad) / spanX, (height - 2 * pad) / spanY);
  return {
    scale,
    offsetX: pad - xmin * scale + (width - 2 * pad - spanX * scale) / 2,
    offsetY: pad - ymin * scale + (height - 2 * pad - spanY * scale) / 2,
  };
}

export function toScreen(p: Point2, view: ViewTransform): Point2 {
  return [p[0] * view.scale + view.offsetX, p[1] * view.scale + view.offsetY];
}

export function fromScreen(p: Point2, view: ViewTransform): Point2 {
  return [(p[0] - view.offsetX) / view.scale, (p[1] - view.offsetY) / view.scale];
}

/** Map a scalar to a blue->red ramp for the third-coordinate coloring. */
export function colorRamp(v: number, lo: number, hi: number): string {
  const t = hi > lo ? Math.min(1, Math.max(0, (v - lo) / (hi - lo))) : 0.5;
  const r = Math.round(40 + 200 * t);
  const b = Math.round(240 - 200 * t);
  return `rgb(${r},90,${b})`;
}

export interface ScatterStyle {
  pointColor: (index: number) => string;
  pointRadius: number;
  background: string;
}

export function drawScatter(ctx: CanvasRenderingContext2D,
                            points: Point2[], view: ViewTransform,
                            style: ScatterStyle, lasso: Point2[] = []): void {
  const { width, height } = ctx.canvas;
  ctx.fillStyle = style.background;
  ctx.fillRect(0, 0, width, height);
  points.forEach((p, i) => {
    const [sx, sy] = toScreen(p, view);
    ctx.beginPath();
    ctx.fillStyle = style.pointColor(i);
    ctx.arc(sx, sy, style.pointRadius, 0, 2 * Math.PI);
    ctx.fill();
  });
  if (lasso.length > 1) {
    ctx.beginPath();
    ctx.strokeStyle = "#f0a020";
    ctx.lineWidth = 1.5;
    const [x0, y0] = lasso[0]!;
    ctx.moveTo(x0, y0);
    for (const [x, y] of lasso.slice(1)) ctx.lineTo(x, y);
    ctx.closePath();
    ctx.stroke();
  }
}
