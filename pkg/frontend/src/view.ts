/** Pure view-state builders.
 *
 * Everything displayed is lifted verbatim from API responses: numbers are
 * stringified as parsed, the highlighted alternative is the server's
 * `recommended` field, and the decision-change badge mirrors
 * `changed_decision`. The client performs no expected-utility arithmetic;
 * bar widths are presentation-only scaling.
 */

import { describeError, type ErrorBanner } from "./errors.js";
import type { ParamRef, Report, WhatIfResult } from "./types.js";

export interface BarView {
  label: string;
  euText: string;
  widthPct: number;
  recommended: boolean;
}

export interface TornadoRowView {
  paramText: string;
  rangeText: string;
  euLowText: string;
  euHighText: string;
  swingText: string;
}

export interface PolicyTableView {
  decision: string;
  rows: { state: string; choice: string }[];
}

export interface RecommendationView {
  kind: "recommendation";
  recommended: string | null;
  expectedUtilityText: string;
  bars: BarView[];
  singleAlternative: boolean;
  tornado: TornadoRowView[];
  tornadoEmptyMessage: string | null;
  policy: PolicyTableView[];
  trace: string[];
}

export interface ErrorView {
  kind: "error";
  banner: ErrorBanner;
}

export type RenderResult = RecommendationView | ErrorView;

export function paramText(param: ParamRef): string {
  const core = `${param.node}/${param.row}`;
  return param.outcome === undefined ? core : `${core}/${param.outcome}`;
}

function isFiniteNumber(value: unknown): value is number {
  return typeof value === "number" && Number.isFinite(value);
}

function malformed(detail: string): ErrorView {
  return { kind: "error", banner: describeError("MALFORMED_REPORT", detail) };
}

export const TORNADO_EMPTY_MESSAGE = "no sensitive parameters";

/** Build the recommendation panel state from a report payload. */
export function renderRecommendation(report: Report): RenderResult {
  if (!report || !Array.isArray(report.alternatives)) {
    return malformed("missing alternatives");
  }
  if (!isFiniteNumber(report.expected_utility)) {
    return malformed("missing expected utility");
  }
  const eus = report.alternative_eus ?? {};
  for (const label of report.alternatives) {
    if (!isFiniteNumber(eus[label])) {
      return malformed(`missing expected utility for '${label}'`);
    }
  }

  const magnitudes = report.alternatives.map((label) => Math.abs(eus[label]));
  const largest = Math.max(1e-12, ...magnitudes);
  const bars: BarView[] = report.alternatives.map((label) => ({
    label,
    euText: String(eus[label]),
    widthPct: Math.max(2, Math.round((Math.abs(eus[label]) / largest) * 100)),
    recommended: label === report.recommended,
  }));

  const tornado: TornadoRowView[] = (report.tornado ?? []).map((entry) => ({
    paramText: paramText(entry.param),
    rangeText: `${String(entry.low)} to ${String(entry.high)}`,
    euLowText: String(entry.eu_low),
    euHighText: String(entry.eu_high),
    swingText: String(entry.swing),
  }));

  const policy: PolicyTableView[] = Object.entries(report.policy ?? {}).map(
    ([decision, rows]) => ({
      decision,
      rows: rows.map((row) => ({ state: row.state || "-", choice: row.choice })),
    }),
  );

  return {
    kind: "recommendation",
    recommended: report.recommended,
    expectedUtilityText: String(report.expected_utility),
    bars,
    singleAlternative: report.alternatives.length === 1,
    tornado,
    tornadoEmptyMessage: tornado.length === 0 ? TORNADO_EMPTY_MESSAGE : null,
    policy,
    trace: report.trace ?? [],
  };
}

export interface WhatIfView {
  paramText: string;
  valueText: string;
  trialEuText: string;
  baselineEuText: string;
  trialRecommended: string | null;
  baselineRecommended: string | null;
  badgeVisible: boolean;
}

/** Side-by-side trial vs baseline state for the what-if panel. */
export function renderWhatIf(result: WhatIfResult): WhatIfView {
  return {
    paramText: paramText(result.param),
    valueText: String(result.value),
    trialEuText: String(result.trial.expected_utility),
    baselineEuText: String(result.baseline.expected_utility),
    trialRecommended: result.trial.recommended,
    baselineRecommended: result.baseline.recommended,
    badgeVisible: result.changed_decision === true,
  };
}

/** Banner state for a failed request. */
export function renderError(code: string, detail?: string): ErrorView {
  return { kind: "error", banner: describeError(code, detail) };
}
