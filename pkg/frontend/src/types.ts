/** Payload shapes of the consultation service API. */

export interface ParamRef {
  node: string;
  row: string;
  outcome?: string;
}

export interface SessionSummary {
  id: string;
  phase: "FORMULATE" | "ASSESS" | "REFINE";
  schema: string;
  features: Record<string, boolean>;
  expected_utility: number | null;
  recommended: string | null;
  events: number;
}

export interface TornadoEntry {
  param: ParamRef;
  low: number;
  high: number;
  eu_low: number;
  eu_high: number;
  swing: number;
}

export interface PolicyRow {
  state: string;
  choice: string;
}

export interface Report {
  alternatives: string[];
  recommended: string | null;
  alternative_eus: Record<string, number>;
  expected_utility: number;
  policy: Record<string, PolicyRow[]>;
  tornado: TornadoEntry[];
  trace: string[];
}

export interface ResultSummary {
  expected_utility: number;
  recommended: string | null;
}

export interface WhatIfResult {
  param: ParamRef;
  value: number;
  trial: ResultSummary;
  baseline: ResultSummary;
  changed_decision: boolean;
}

export interface SweepPoint {
  value: number;
  alternative_eus: Record<string, number>;
  optimal_eu: number;
  optimal_alternative: string | null;
}

export interface SweepResult {
  param: ParamRef;
  alternatives: string[];
  points: SweepPoint[];
}

export interface SlotSummary {
  id: string;
  kind: "cpt_row" | "cpt" | "utility_row" | "utility_table";
  node: string;
  prompt: string;
  row?: string;
  rows?: string[];
  outcomes?: string[];
}

export interface SchemaSummary {
  id: string;
  priority: number;
  applicability: Record<string, boolean>;
  description: string;
  slots: SlotSummary[];
}

export interface SchemaLibrary {
  features: string[];
  schemas: SchemaSummary[];
}

export interface DiagramNode {
  name: string;
  kind: "chance" | "decision" | "value";
  predecessors: string[];
  cpt?: Record<string, number[]>;
  utilities?: Record<string, number>;
}

export interface DiagramDocument {
  version: number;
  name: string;
  variables: { name: string; outcomes: string[] }[];
  nodes: DiagramNode[];
}

export interface ApiErrorBody {
  error: { code: string; message: string; [key: string]: unknown };
}
