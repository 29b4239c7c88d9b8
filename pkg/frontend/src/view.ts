/** Surface view-model: the service payload plus pure selection state.
 * Same payload + same selection always produce the same readouts. */

import type { SurfacePayload } from "./types.js";

export interface Cell {
  i: number; // thrust index
  j: number; // torque index
}

export interface CellReadout {
  th: number;
  tor: number;
  cost: number | null;
  pr: number | null;
  ef: number | null;
  feasible: boolean;
  isOptimum: boolean;
  /** cost minus optimum cost; null when the cell is infeasible */
  deltaCost: number | null;
}

export class SurfaceView {
  readonly rows: number;
  readonly cols: number;
  selected: Cell;
  baseline: Cell | null = null;

  constructor(readonly payload: SurfacePayload) {
    this.rows = payload.th_values.length;
    this.cols = payload.tor_values.length;
    this.selected = { i: payload.optimum[0], j: payload.optimum[1] };
  }

  get optimum(): Cell {
    return { i: this.payload.optimum[0], j: this.payload.optimum[1] };
  }

  clamp(cell: Cell): Cell {
    return {
      i: Math.min(Math.max(cell.i, 0), this.rows - 1),
      j: Math.min(Math.max(cell.j, 0), this.cols - 1),
    };
  }

  select(cell: Cell): Cell {
    this.selected = this.clamp(cell);
    return this.selected;
  }

  /** Arrow-key navigation: one cell per keypress, clamped at the edges. */
  moveSelection(key: string): Cell {
    const { i, j } = this.selected;
    switch (key) {
      case "ArrowUp": return this.select({ i: i - 1, j });
      case "ArrowDown": return this.select({ i: i + 1, j });
      case "ArrowLeft": return this.select({ i, j: j - 1 });
      case "ArrowRight": return this.select({ i, j: j + 1 });
      default: return this.selected;
    }
  }

  readout(cell: Cell): CellReadout {
    const { i, j } = this.clamp(cell);
    const cost = this.payload.cost[i][j];
    const [oi, oj] = this.payload.optimum;
    const optimumCost = this.payload.cost[oi][oj];
    return {
      th: this.payload.th_values[i],
      tor: this.payload.tor_values[j],
      cost,
      pr: this.payload.pr[i][j],
      ef: this.payload.ef[i][j],
      feasible: cost !== null,
      isOptimum: i === oi && j === oj,
      deltaCost: cost === null || optimumCost === null ? null : cost - optimumCost,
    };
  }

  /** Nearest cell for an off-grid setting; null when outside the axis hull. */
  cellFor(th: number, tor: number): Cell | null {
    const ths = this.payload.th_values;
    const tors = this.payload.tor_values;
    if (th < ths[0] || th > ths[ths.length - 1]) return null;
    if (tor < tors[0] || tor > tors[tors.length - 1]) return null;
    const nearest = (values: number[], target: number) => {
      let best = 0;
      for (let k = 1; k < values.length; k++) {
        if (Math.abs(values[k] - target) < Math.abs(values[best] - target)) best = k;
      }
      return best;
    };
    return { i: nearest(ths, th), j: nearest(tors, tor) };
  }
}
