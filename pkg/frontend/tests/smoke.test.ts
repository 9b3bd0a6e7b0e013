/** UI smoke against a live service: the client view state must carry the
 * API's numbers verbatim, surface the decision-change badge, and show
 * phase errors with their machine-readable code. */

import { beforeAll, describe, expect, inject, it } from "vitest";

import { ApiError, WorkbenchClient } from "../src/api.js";
import { renderError, renderRecommendation, renderWhatIf } from "../src/view.js";

const PROGNOSIS_BINDINGS = {
  prognosis_distribution: [0.5, 0.5],
  payoffs: { "good|treat": 100, "good|wait": 40, "bad|treat": 0, "bad|wait": 40 },
};

const GOOD = { node: "S", row: "", outcome: "good" };

describe("consultation smoke", () => {
  let client: WorkbenchClient;

  beforeAll(() => {
    client = new WorkbenchClient(inject("apiBase"));
  });

  it("surfaces WRONG_PHASE with its code before bindings are provided", async () => {
    const session = await client.createSession({ prognosis_uncertain: true });
    expect(session.phase).toBe("FORMULATE");
    let failure: ApiError | undefined;
    try {
      await client.whatif(session.id, GOOD, 0.3);
    } catch (err) {
      failure = err as ApiError;
    }
    expect(failure).toBeInstanceOf(ApiError);
    expect(failure!.status).toBe(409);
    expect(failure!.code).toBe("WRONG_PHASE");
    const banner = renderError(failure!.code, failure!.message).banner;
    expect(banner.code).toBe("WRONG_PHASE");
    expect(banner.known).toBe(true);
  });

  it("shows the report's expected utilities verbatim", async () => {
    const session = await client.createSession({ prognosis_uncertain: true });
    const { report } = await client.provideBindings(session.id, PROGNOSIS_BINDINGS);

    const view = renderRecommendation(report);
    expect(view.kind).toBe("recommendation");
    if (view.kind !== "recommendation") return;
    expect(view.recommended).toBe(report.recommended);
    for (const bar of view.bars) {
      expect(bar.euText).toBe(String(report.alternative_eus[bar.label]));
      expect(bar.recommended).toBe(bar.label === report.recommended);
    }
    expect(view.bars.map((b) => b.euText)).toEqual(["50", "40"]);
  });

  it("raises the decision-change badge for the 0.3 what-if", async () => {
    const session = await client.createSession({ prognosis_uncertain: true });
    await client.provideBindings(session.id, PROGNOSIS_BINDINGS);

    const atBaseline = renderWhatIf(await client.whatif(session.id, GOOD, 0.5));
    expect(atBaseline.badgeVisible).toBe(false);
    expect(atBaseline.trialEuText).toBe(atBaseline.baselineEuText);

    const shifted = renderWhatIf(await client.whatif(session.id, GOOD, 0.3));
    expect(shifted.badgeVisible).toBe(true);
    expect(shifted.trialEuText).toBe("40");
    expect(shifted.baselineEuText).toBe("50");
    expect(shifted.trialRecommended).toBe("wait");
  });

  it("commits a change and refreshes the recommendation", async () => {
    const session = await client.createSession({ prognosis_uncertain: true });
    await client.provideBindings(session.id, PROGNOSIS_BINDINGS);
    const { report } = await client.commit(session.id, GOOD, 0.3);
    const view = renderRecommendation(report);
    if (view.kind !== "recommendation") throw new Error("expected a recommendation view");
    expect(view.recommended).toBe("wait");
    expect(view.expectedUtilityText).toBe("40");
  });

  it("serves the diagram document the layout consumes", async () => {
    const session = await client.createSession({ prognosis_uncertain: true });
    await client.provideBindings(session.id, PROGNOSIS_BINDINGS);
    const doc = await client.diagram(session.id);
    expect(doc.nodes.map((n) => n.name)).toEqual(["S", "T", "V"]);
  });
});
