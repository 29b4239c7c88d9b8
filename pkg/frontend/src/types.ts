/** JSON contracts of the decision service (/api/v1/*). */

export interface RockState {
  src: number;
  ucs: number;
  rqd: number;
  cai: number;
  q: number;
  ci: number;
  m: number;
  mgt: number;
}

export interface CostOverrides {
  c1?: number;
  c2?: number;
  d_tbm?: number;
  w_max?: number;
  t_daily?: number;
  l?: number;
}

export interface GridOverrides {
  th_min?: number;
  th_max?: number;
  th_step?: number;
  tor_min?: number;
  tor_max?: number;
  tor_step?: number;
}

export interface CostBreakdown {
  total: number;
  cutter: number;
  period: number;
}

export interface PredictResponse {
  th: number;
  tor: number;
  pr: number;
  ef: number;
  cost: CostBreakdown | null;
}

export interface Recommendation {
  th: number;
  tor: number;
  pr: number;
  ef: number;
  cost: number;
  cutter_cost: number;
  period_cost: number;
  feasible_fraction: number;
}

export interface BaselineEvaluation extends PredictResponse {
  on_grid: boolean;
}

export interface RecommendResponse {
  recommendation: Recommendation;
  baseline: BaselineEvaluation | null;
  params: { cost: Record<string, number>; grid: Record<string, number> };
}

export interface SurfacePayload {
  th_values: number[];
  tor_values: number[];
  cost: (number | null)[][];
  pr: (number | null)[][];
  ef: (number | null)[][];
  optimum: [number, number];
}

export interface FieldError {
  field: string;
  message: string;
}

export interface ErrorBody {
  code: string;
  errors?: FieldError[];
  feasible_fraction?: number;
}
