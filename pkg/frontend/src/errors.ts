/** User-facing messages for the service's stable error codes. Unknown codes
 * fall back to a generic banner that keeps the raw code visible. */

const MESSAGES: Record<string, string> = {
  WRONG_PHASE: "That step is not available in the session's current phase.",
  PARAM_NOT_FOUND: "That parameter does not exist in the current model.",
  BAD_GRID: "Probability values must lie between 0 and 1.",
  INVALID_ROW: "Those probabilities do not add up to 1.",
  MISSING_SLOT: "Please answer every assessment question before submitting.",
  UNKNOWN_SLOT: "The form sent an answer the schema does not expect.",
  NO_APPLICABLE_SCHEMA: "No decision model in the library matches those features.",
  UNKNOWN_FEATURE: "One of the selected features is not part of the library.",
  UNKNOWN_SESSION: "That consultation no longer exists.",
  PARSE_ERROR: "The request was malformed.",
  WOULD_CYCLE: "That variable is downstream of the decision, so it cannot be observed first.",
  UNREACHABLE: "The service is not reachable.",
  TOO_LARGE: "The model is too large for exact analysis.",
};

export interface ErrorBanner {
  code: string;
  message: string;
  known: boolean;
}

export function describeError(code: string, detail?: string): ErrorBanner {
  const mapped = MESSAGES[code];
  if (mapped !== undefined) {
    return { code, message: mapped, known: true };
  }
  return {
    code,
    message: `Something went wrong (${code})${detail ? `: ${detail}` : "."}`,
    known: false,
  };
}
