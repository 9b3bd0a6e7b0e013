/** Small DOM helpers: view state in, elements out. No business logic. */

import type { DiagramLayout } from "./layout.js";
import { NODE_H, NODE_W } from "./layout.js";
import type { ErrorBanner } from "./errors.js";
import type { RecommendationView, WhatIfView } from "./view.js";

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function errorBannerElement(banner: ErrorBanner): HTMLElement {
  const box = el("div", "banner error");
  box.append(el("strong", "", banner.code), el("span", "", " " + banner.message));
  return box;
}

export function recommendationElement(view: RecommendationView): HTMLElement {
  const panel = el("section", "panel recommendation");
  const headline = view.recommended === null
    ? "No decision to recommend"
    : `Recommended: ${view.recommended}`;
  panel.append(el("h2", "", headline));
  panel.append(el("p", "muted", `expected utility ${view.expectedUtilityText}`));

  const bars = el("div", "bars");
  for (const bar of view.bars) {
    const row = el("div", bar.recommended ? "bar-row recommended" : "bar-row");
    row.append(el("span", "bar-label", bar.label));
    const track = el("div", "bar-track");
    const fill = el("div", "bar-fill");
    fill.style.width = `${bar.widthPct}%`;
    track.append(fill);
    row.append(track);
    row.append(el("span", "bar-eu", bar.euText));
    bars.append(row);
  }
  panel.append(bars);
  if (!view.singleAlternative && view.recommended !== null) {
    panel.append(el("p", "muted", "bars compare each alternative, forced, with later choices optimal"));
  }

  const tornado = el("div", "tornado");
  tornado.append(el("h3", "", "Most sensitive parameters"));
  if (view.tornadoEmptyMessage !== null) {
    tornado.append(el("p", "muted", view.tornadoEmptyMessage));
  } else {
    const list = el("ol");
    for (const row of view.tornado) {
      list.append(
        el(
          "li",
          "",
          `${row.paramText} over ${row.rangeText}: utility ${row.euLowText} to ${row.euHighText} (swing ${row.swingText})`,
        ),
      );
    }
    tornado.append(list);
  }
  panel.append(tornado);

  const policy = el("div", "policy");
  policy.append(el("h3", "", "Policy"));
  for (const table of view.policy) {
    const caption = el("h4", "", table.decision);
    const grid = el("table");
    for (const row of table.rows) {
      const tr = el("tr");
      tr.append(el("td", "", row.state), el("td", "", row.choice));
      grid.append(tr);
    }
    policy.append(caption, grid);
  }
  panel.append(policy);

  const trace = el("details", "trace");
  trace.append(el("summary", "", "How this was computed"));
  const steps = el("ol");
  for (const line of view.trace) steps.append(el("li", "", line));
  trace.append(steps);
  panel.append(trace);
  return panel;
}

export function whatifElement(view: WhatIfView): HTMLElement {
  const box = el("div", "whatif-result");
  const badge = el("span", "badge", "decision changes");
  badge.hidden = !view.badgeVisible;
  box.append(
    el("p", "", `${view.paramText} = ${view.valueText}`),
    el(
      "p",
      "",
      `trial utility ${view.trialEuText} (${view.trialRecommended ?? "-"}) vs baseline ${view.baselineEuText} (${view.baselineRecommended ?? "-"})`,
    ),
    badge,
  );
  return box;
}

export function diagramElement(layout: DiagramLayout): SVGSVGElement {
  const svgNs = "http://www.w3.org/2000/svg";
  const svg = document.createElementNS(svgNs, "svg");
  const pad = 10;
  svg.setAttribute("viewBox", `${-pad} ${-pad} ${layout.width + 2 * pad} ${layout.height + 2 * pad}`);
  svg.setAttribute("class", "diagram");

  const byName = new Map(layout.nodes.map((n) => [n.name, n]));
  for (const edge of layout.edges) {
    const from = byName.get(edge.from);
    const to = byName.get(edge.to);
    if (!from || !to) continue;
    const line = document.createElementNS(svgNs, "line");
    line.setAttribute("x1", String(from.x + NODE_W));
    line.setAttribute("y1", String(from.y + NODE_H / 2));
    line.setAttribute("x2", String(to.x));
    line.setAttribute("y2", String(to.y + NODE_H / 2));
    line.setAttribute("class", "arc");
    svg.append(line);
  }
  for (const node of layout.nodes) {
    const group = document.createElementNS(svgNs, "g");
    const shape =
      node.kind === "chance"
        ? ellipse(svgNs, node.x, node.y)
        : rect(svgNs, node.x, node.y, node.kind === "value");
    shape.setAttribute("class", `node ${node.kind}`);
    const label = document.createElementNS(svgNs, "text");
    label.setAttribute("x", String(node.x + NODE_W / 2));
    label.setAttribute("y", String(node.y + NODE_H / 2 + 4));
    label.setAttribute("text-anchor", "middle");
    label.textContent = node.name;
    group.append(shape, label);
    svg.append(group);
  }
  return svg;
}

function ellipse(ns: string, x: number, y: number) {
  const shape = document.createElementNS(ns, "ellipse");
  shape.setAttribute("cx", String(x + NODE_W / 2));
  shape.setAttribute("cy", String(y + NODE_H / 2));
  shape.setAttribute("rx", String(NODE_W / 2));
  shape.setAttribute("ry", String(NODE_H / 2));
  return shape;
}

function rect(ns: string, x: number, y: number, rounded: boolean) {
  const shape = document.createElementNS(ns, "rect");
  shape.setAttribute("x", String(x));
  shape.setAttribute("y", String(y));
  shape.setAttribute("width", String(NODE_W));
  shape.setAttribute("height", String(NODE_H));
  if (rounded) {
    shape.setAttribute("rx", String(NODE_H / 2));
  }
  return shape;
}
