/** Page wiring: feature selection -> assessment forms -> refine loop.
 *
 * The assessment forms are generated from the schema slot prompts served by
 * GET /schemas, so new schemas need no client changes. All analysis numbers
 * come from the service; this file only moves payloads between the API
 * client and the DOM.
 */

import { ApiError, WorkbenchClient } from "./api.js";
import {
  diagramElement,
  el,
  errorBannerElement,
  recommendationElement,
  whatifElement,
} from "./dom.js";
import { layoutDiagram } from "./layout.js";
import type { ParamRef, Report, SchemaSummary, SlotSummary } from "./types.js";
import { renderError, renderRecommendation, renderWhatIf } from "./view.js";

const client = new WorkbenchClient(
  new URLSearchParams(window.location.search).get("api") ?? "http://127.0.0.1:8080",
);

const root = document.getElementById("app") as HTMLElement;
const bannerSlot = el("div", "banner-slot");

function showError(err: unknown): void {
  bannerSlot.replaceChildren(
    errorBannerElement(
      err instanceof ApiError
        ? renderError(err.code, err.message).banner
        : renderError("UNEXPECTED", String(err)).banner,
    ),
  );
}

function clearError(): void {
  bannerSlot.replaceChildren();
}

async function showStart(): Promise<void> {
  clearError();
  const library = await client.schemas();
  const panel = el("section", "panel");
  panel.append(el("h2", "", "Start a consultation"));
  panel.append(el("p", "muted", "Which features describe your decision?"));

  const form = el("form");
  const boxes = new Map<string, HTMLInputElement>();
  for (const feature of library.features) {
    const label = el("label", "feature");
    const box = el("input");
    box.type = "checkbox";
    boxes.set(feature, box);
    label.append(box, el("span", "", " " + feature.replaceAll("_", " ")));
    form.append(label);
  }
  const start = el("button", "", "Start");
  start.type = "submit";
  form.append(start);
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const features: Record<string, boolean> = {};
    for (const [name, box] of boxes) features[name] = box.checked;
    client
      .createSession(features)
      .then((session) => {
        const schema = library.schemas.find((s) => s.id === session.schema);
        if (!schema) throw new ApiError(0, "UNKNOWN", "schema missing from library listing");
        return showAssessment(session.id, schema);
      })
      .catch(showError);
  });
  panel.append(form);
  root.replaceChildren(bannerSlot, panel);
}

function slotInputs(slot: SlotSummary): { element: HTMLElement; read: () => unknown } {
  const box = el("fieldset", "slot");
  box.append(el("legend", "", slot.prompt || slot.id));

  const numberInput = (): HTMLInputElement => {
    const input = el("input");
    input.type = "number";
    input.step = "any";
    input.required = true;
    return input;
  };

  if (slot.kind === "cpt_row") {
    const inputs = (slot.outcomes ?? []).map((outcome) => {
      const wrap = el("label", "cell");
      const input = numberInput();
      wrap.append(el("span", "", outcome + " "), input);
      box.append(wrap);
      return input;
    });
    return { element: box, read: () => inputs.map((i) => Number(i.value)) };
  }
  if (slot.kind === "cpt") {
    const rows = new Map<string, HTMLInputElement[]>();
    for (const row of slot.rows ?? []) {
      const group = el("div", "row-group");
      group.append(el("span", "row-key", row || "-"));
      const inputs = (slot.outcomes ?? []).map((outcome) => {
        const wrap = el("label", "cell");
        const input = numberInput();
        wrap.append(el("span", "", outcome + " "), input);
        group.append(wrap);
        return input;
      });
      rows.set(row, inputs);
      box.append(group);
    }
    return {
      element: box,
      read: () =>
        Object.fromEntries(
          [...rows.entries()].map(([row, inputs]) => [row, inputs.map((i) => Number(i.value))]),
        ),
    };
  }
  if (slot.kind === "utility_row") {
    const input = numberInput();
    box.append(input);
    return { element: box, read: () => Number(input.value) };
  }
  const rows = new Map<string, HTMLInputElement>();
  for (const row of slot.rows ?? []) {
    const wrap = el("label", "cell");
    const input = numberInput();
    wrap.append(el("span", "", (row || "-") + " "), input);
    rows.set(row, input);
    box.append(wrap);
  }
  return {
    element: box,
    read: () => Object.fromEntries([...rows.entries()].map(([row, i]) => [row, Number(i.value)])),
  };
}

async function showAssessment(sessionId: string, schema: SchemaSummary): Promise<void> {
  clearError();
  const panel = el("section", "panel");
  panel.append(el("h2", "", `Assess: ${schema.id}`));
  if (schema.description) panel.append(el("p", "muted", schema.description));

  const form = el("form");
  const readers = new Map<string, () => unknown>();
  for (const slot of schema.slots) {
    const { element, read } = slotInputs(slot);
    readers.set(slot.id, read);
    form.append(element);
  }
  const submit = el("button", "", "Solve");
  submit.type = "submit";
  form.append(submit);
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const bindings: Record<string, unknown> = {};
    for (const [id, read] of readers) bindings[id] = read();
    client
      .provideBindings(sessionId, bindings)
      .then(({ report }) => showRefine(sessionId, report))
      .catch(showError);
  });
  panel.append(form);
  root.replaceChildren(bannerSlot, panel);
}

interface ParamOption {
  label: string;
  param: ParamRef;
  probability: boolean;
}

async function paramOptions(sessionId: string): Promise<ParamOption[]> {
  const doc = await client.diagram(sessionId);
  const options: ParamOption[] = [];
  for (const node of doc.nodes) {
    if (node.kind === "chance" && node.cpt) {
      const outcomes = doc.variables.find((v) => v.name === node.name)?.outcomes ?? [];
      for (const row of Object.keys(node.cpt)) {
        for (const outcome of outcomes) {
          options.push({
            label: `P(${node.name}=${outcome}${row ? ` | ${row}` : ""})`,
            param: { node: node.name, row, outcome },
            probability: true,
          });
        }
      }
    } else if (node.kind === "value" && node.utilities) {
      for (const row of Object.keys(node.utilities)) {
        options.push({
          label: `utility(${row || "-"})`,
          param: { node: node.name, row },
          probability: false,
        });
      }
    }
  }
  return options;
}

async function showRefine(sessionId: string, report: Report): Promise<void> {
  clearError();
  const options = await paramOptions(sessionId);
  const doc = await client.diagram(sessionId);

  const reportSlot = el("div");
  const renderReport = (payload: Report) => {
    const view = renderRecommendation(payload);
    reportSlot.replaceChildren(
      view.kind === "error" ? errorBannerElement(view.banner) : recommendationElement(view),
    );
  };
  renderReport(report);

  const diagramPanel = el("section", "panel");
  diagramPanel.append(el("h2", "", "Model"));
  diagramPanel.append(diagramElement(layoutDiagram(doc)));

  const whatifPanel = el("section", "panel");
  whatifPanel.append(el("h2", "", "What if?"));
  const select = el("select") as HTMLSelectElement;
  options.forEach((option, index) => {
    const entry = el("option", "", option.label) as HTMLOptionElement;
    entry.value = String(index);
    select.append(entry);
  });
  const value = el("input") as HTMLInputElement;
  value.type = "range";
  value.min = "0";
  value.max = "1";
  value.step = "0.01";
  const valueText = el("span", "value-text", value.value);
  const syncInput = () => {
    const option = options[Number(select.value)];
    if (option?.probability) {
      value.type = "range";
      value.min = "0";
      value.max = "1";
      value.step = "0.01";
    } else {
      value.type = "number";
      value.step = "any";
    }
  };
  select.addEventListener("change", syncInput);
  value.addEventListener("input", () => (valueText.textContent = value.value));
  syncInput();

  const resultSlot = el("div");
  const tryButton = el("button", "", "Try it");
  tryButton.addEventListener("click", () => {
    const option = options[Number(select.value)];
    clearError();
    client
      .whatif(sessionId, option.param, Number(value.value))
      .then((result) => resultSlot.replaceChildren(whatifElement(renderWhatIf(result))))
      .catch(showError);
  });
  const commitButton = el("button", "commit", "Commit change");
  commitButton.addEventListener("click", () => {
    const option = options[Number(select.value)];
    clearError();
    client
      .commit(sessionId, option.param, Number(value.value))
      .then(({ report: fresh }) => {
        resultSlot.replaceChildren();
        renderReport(fresh);
      })
      .catch(showError);
  });

  whatifPanel.append(select, value, valueText, tryButton, commitButton, resultSlot);
  root.replaceChildren(bannerSlot, reportSlot, whatifPanel, diagramPanel);
}

showStart().catch(showError);
