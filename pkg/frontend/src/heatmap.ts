/** Cost-surface heatmap. Color is linear in cost between the grid's
 * finite min and max; infeasible cells are hatched. The color mapping
 * and geometry are pure functions so rendering is reproducible. */

import type { SurfacePayload } from "./types.js";
import type { Cell } from "./view.js";

/** Low-cost (cool) to high-cost (warm) three-stop gradient. */
const STOPS: [number, number, number][] = [
  [38, 70, 160],   // low cost
  [240, 230, 100], // middle
  [180, 40, 35],   // high cost
];

export function costScale(payload: SurfacePayload): { min: number; max: number } {
  let min = Infinity;
  let max = -Infinity;
  for (const row of payload.cost) {
    for (const v of row) {
      if (v === null) continue;
      if (v < min) min = v;
      if (v > max) max = v;
    }
  }
  return { min, max };
}

function lerp(a: number, b: number, t: number): number {
  return a + (b - a) * t;
}

/** Normalized cost (0 = cheapest, 1 = dearest) to CSS color. */
export function colorFor(t: number): string {
  const clamped = Math.min(Math.max(t, 0), 1);
  const [from, to, local] = clamped <= 0.5
    ? [STOPS[0], STOPS[1], clamped * 2]
    : [STOPS[1], STOPS[2], (clamped - 0.5) * 2];
  const rgb = [0, 1, 2].map((k) => Math.round(lerp(from[k], to[k], local)));
  return `rgb(${rgb[0]},${rgb[1]},${rgb[2]})`;
}

export function cellColor(payload: SurfacePayload, i: number, j: number): string | null {
  const value = payload.cost[i][j];
  if (value === null) return null; // infeasible: hatched, not colored
  const { min, max } = costScale(payload);
  const t = max > min ? (value - min) / (max - min) : 0;
  return colorFor(t);
}

export interface HeatmapLayout {
  cellW: number;
  cellH: number;
  width: number;
  height: number;
}

export function layoutFor(payload: SurfacePayload, maxW = 820, maxH = 560): HeatmapLayout {
  const cols = payload.tor_values.length;
  const rows = payload.th_values.length;
  const cellW = Math.max(4, Math.floor(maxW / cols));
  const cellH = Math.max(4, Math.floor(maxH / rows));
  return { cellW, cellH, width: cellW * cols, height: cellH * rows };
}

/** Draw the full surface; x = torque, y = thrust (top row = lowest thrust). */
export function drawHeatmap(
  ctx: CanvasRenderingContext2D,
  payload: SurfacePayload,
  selected: Cell,
  baseline: Cell | null,
  layout: HeatmapLayout,
): void {
  const { cellW, cellH } = layout;
  ctx.clearRect(0, 0, layout.width, layout.height);
  for (let i = 0; i < payload.th_values.length; i++) {
    for (let j = 0; j < payload.tor_values.length; j++) {
      const x = j * cellW;
      const y = i * cellH;
      const color = cellColor(payload, i, j);
      if (color === null) {
        ctx.fillStyle = "#ddd";
        ctx.fillRect(x, y, cellW, cellH);
        ctx.strokeStyle = "#999";
        ctx.beginPath();
        ctx.moveTo(x, y + cellH);
        ctx.lineTo(x + cellW, y);
        ctx.stroke();
      } else {
        ctx.fillStyle = color;
        ctx.fillRect(x, y, cellW, cellH);
      }
    }
  }
  const ring = (cell: Cell, style: string, inset: number) => {
    ctx.strokeStyle = style;
    ctx.lineWidth = 2;
    ctx.strokeRect(cell.j * cellW + inset, cell.i * cellH + inset,
                   cellW - 2 * inset, cellH - 2 * inset);
  };
  const [oi, oj] = payload.optimum;
  ring({ i: oi, j: oj }, "#ff2222", 1);       // optimum: red ring
  ring(selected, "#ffffff", 2);               // keyboard/click selection
  if (baseline) ring(baseline, "#222222", 3); // operator baseline
}

export function cellAt(layout: HeatmapLayout, x: number, y: number): Cell {
  return { i: Math.floor(y / layout.cellH), j: Math.floor(x / layout.cellW) };
}
