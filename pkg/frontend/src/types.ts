/**
 * Typed mirrors of the model server's JSON payloads.
 * Field names match the wire format exactly; nothing is renamed.
 */

export interface Overview {
  headcount: number;
  class_counts: Record<string, number>;
  attrition_ratio: number;
  mean_compensation: number | null;
  flagged: number;
  predicted_attrition_ratio: number;
  model_checksum: string;
  scored_at: string;
}

export interface EmployeeSummary {
  id: string;
  attrition_probability: number;
  label: string;
  ttl: number;
  lead_time: number;
  lead_time_raw: number;
  overdue: boolean;
  top_reason: string;
  top_dimension: string;
  JobRole?: string;
  Department?: string;
  Age?: number;
}

export interface EmployeeList {
  employees: EmployeeSummary[];
}

export interface Tenure {
  ttl: number;
  current_tenure: number;
  lead_time_raw: number;
  lead_time: number;
  overdue: boolean;
}

export interface Contribution {
  feature: string;
  dimension: string;
  delta: number;
}

export interface Drivers {
  bias: number;
  contributions: Contribution[];
  prediction: number;
  top_reasons: string[];
}

export interface EmployeeDetail {
  id: string;
  attrition_probability: number;
  label: string;
  tenure: Tenure;
  drivers: Drivers;
  scored_at: string;
  record: Record<string, string | number>;
}

export interface WhatifDelta {
  probability: number;
  ttl: number;
  lead_time: number;
  lead_time_raw: number;
  label_changed: boolean;
}

export interface WhatifResult {
  before: Omit<EmployeeDetail, 'record'>;
  after: Omit<EmployeeDetail, 'record'>;
  delta: WhatifDelta;
}

export interface ScreenResult {
  candidate_id: string | null;
  attrition_probability: number;
  fitment_score: number;
  predicted_total_tenure: number;
  drivers: Drivers;
}

export interface SchemaColumn {
  name: string;
  kind: string;
  required: boolean;
  levels?: string[];
}

export interface DatasetSchema {
  columns: SchemaColumn[];
  target: string;
  id?: string;
  tenure: string;
  total_working_years: string;
  companies_worked: string;
  compensation?: string;
  job_role?: string;
}

export interface ModelInfo {
  format_version: number;
  created_at: string;
  checksum: string;
  seed: number;
  metrics: Record<string, unknown>;
  train_config: Record<string, unknown>;
  n_features: number;
  n_trees: number;
  schema: DatasetSchema;
}

export interface ApiErrorBody {
  error: { code: string; message: string };
}

export type RiskFilter = 'all' | 'high';
export type SortKey = 'probability' | 'lead_time' | 'id';
