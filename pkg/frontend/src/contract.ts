/**
 * Column and field contract for titrasim run artifacts.
 *
 * A run directory holds three files written by the simulator:
 *   days.csv      per-subject per-day trajectory, long format
 *   subjects.csv  one metrics row per subject
 *   summary.json  cohort aggregate, {metric: {mean, iqr}} plus run metadata
 *
 * This package reads those files and nothing else.
 */

export const DAY_COLUMNS = [
  "subject_id",
  "day",
  "dose_u",
  "fbg_true",
  "fbg_meas",
  "y_s",
  "x_s",
  "k_p_hat",
  "k_s_hat",
  "cost_total",
] as const;

export const METRIC_FIELDS = [
  "tir_pct",
  "tar1_pct",
  "tar2_pct",
  "tbr1_pct",
  "tbr2_pct",
  "ag_mmol_l",
  "gv_pct",
  "gmi_pct",
  "mean_dose_u",
  "phg_gt08_pct",
  "phg_lt05_pct",
  "phg_lt02_pct",
] as const;

export const SHARE_FIELDS = ["fbg_in_4_6_pct", "fbg_lt_4_pct", "fbg_lt_3_pct"] as const;

export const SUBJECT_COLUMNS = [
  "subject_id",
  "family",
  ...METRIC_FIELDS,
  ...SHARE_FIELDS,
  "failed_day",
] as const;

export type MetricField = (typeof METRIC_FIELDS)[number];

/** Short display name for a metric column, units included. */
export const METRIC_LABELS: Record<MetricField, string> = {
  tir_pct: "TIR %",
  tar1_pct: "TAR1 %",
  tar2_pct: "TAR2 %",
  tbr1_pct: "TBR1 %",
  tbr2_pct: "TBR2 %",
  ag_mmol_l: "AG mmol/L",
  gv_pct: "GV %",
  gmi_pct: "GMI %",
  mean_dose_u: "Dose U",
  phg_gt08_pct: "PHG>0.8 %",
  phg_lt05_pct: "PHG<0.5 %",
  phg_lt02_pct: "PHG<0.2 %",
};

/**
 * Consensus glucose management targets. A cohort mean on the wrong side
 * of its bound gets flagged in the rendered table. Dose and wellbeing
 * shares carry no target.
 */
export interface TargetRule {
  op: "<" | ">";
  bound: number;
}

export const GLUCOSE_TARGETS: Partial<Record<MetricField, TargetRule>> = {
  tir_pct: { op: ">", bound: 70 },
  tar1_pct: { op: "<", bound: 25 },
  tar2_pct: { op: "<", bound: 5 },
  tbr1_pct: { op: "<", bound: 4 },
  tbr2_pct: { op: "<", bound: 1 },
  ag_mmol_l: { op: "<", bound: 8.6 },
  gv_pct: { op: "<", bound: 36 },
  gmi_pct: { op: "<", bound: 7 },
};

export function targetLabel(rule: TargetRule): string {
  return `${rule.op}${rule.bound}`;
}

/** True when the value satisfies the rule (violations get flagged). */
export function meetsTarget(rule: TargetRule, value: number): boolean {
  if (Number.isNaN(value)) return false;
  return rule.op === "<" ? value < rule.bound : value > rule.bound;
}

export interface DayRow {
  subject_id: number;
  day: number;
  dose_u: number;
  fbg_true: number;
  fbg_meas: number;
  y_s: number;
  x_s: number;
  k_p_hat: number;
  k_s_hat: number;
  cost_total: number;
}

export interface SubjectRow {
  subject_id: number;
  family: string;
  metrics: Record<MetricField, number>;
  shares: Record<(typeof SHARE_FIELDS)[number], number>;
  failed_day: number | null;
}

export interface MetricStat {
  mean: number;
  iqr: number;
}

export interface RunSummary {
  scenario: string;
  strategy: string;
  model: string;
  n_subjects: number;
  n_days: number;
  seed: number;
  metrics: Record<MetricField, MetricStat>;
  [key: string]: unknown;
}
