/** DOM renderers: schema-driven form, decision card, attribution
 * waterfall, counterfactual cards. All content comes from the view
 * models; this layer only lays it out.
 */

import type { CounterfactualCardView, DecisionCardView } from "./cards.js";
import { attributionNote } from "./cards.js";
import { clear, el, svg } from "./dom.js";
import {
  coerceInput,
  describeControl,
  groupBySection,
  localValidate,
  rangeHint,
} from "./form.js";
import { formatPercent } from "./format.js";
import { STRINGS } from "./strings.js";
import type {
  CaseValues,
  CounterfactualResponse,
  FeatureSpec,
  SchemaDoc,
  TargetDoc,
} from "./types.js";
import type { WaterfallView } from "./waterfall.js";

export type ChangeHandler = (feature: string, value: unknown) => void;

function controlFor(
  spec: FeatureSpec,
  value: unknown,
  handle: (value: unknown) => void,
): HTMLElement {
  const descriptor = describeControl(spec);
  if (descriptor.widget === "select") {
    const select = el("select", { "data-feature": spec.id });
    for (const option of descriptor.options ?? []) {
      const node = el("option", { value: option.value }, option.label);
      if (option.value === value) node.setAttribute("selected", "");
      select.append(node);
    }
    select.addEventListener("change", () =>
      handle(coerceInput(spec, select.value)),
    );
    return select;
  }
  if (descriptor.widget === "checkbox") {
    const input = el("input", { type: "checkbox", "data-feature": spec.id });
    if (value === true) input.setAttribute("checked", "");
    (input as HTMLInputElement).checked = value === true;
    input.addEventListener("change", () =>
      handle((input as HTMLInputElement).checked),
    );
    return input;
  }
  const attrs: Record<string, string> = {
    type: "number",
    "data-feature": spec.id,
    value: value === null || value === undefined ? "" : String(value),
  };
  if (descriptor.min !== undefined) attrs.min = String(descriptor.min);
  if (descriptor.max !== undefined) attrs.max = String(descriptor.max);
  if (descriptor.step !== undefined) attrs.step = String(descriptor.step);
  const input = el("input", attrs);
  input.addEventListener("change", () =>
    handle(coerceInput(spec, (input as HTMLInputElement).value)),
  );
  return input;
}

/** The whole case form: one fieldset per deed section, one labelled
 * control per feature, in schema order. Edits are validated locally on
 * the spot — presence, type, and the served bounds — and the message
 * appears beside the control before anything reaches the service. */
export function renderForm(
  schema: SchemaDoc,
  values: CaseValues,
  onChange: ChangeHandler,
): HTMLElement {
  const current: CaseValues = { ...values };
  const form = el("form", { class: "case-form", novalidate: "" });
  form.addEventListener("submit", (event) => event.preventDefault());
  for (const group of groupBySection(schema)) {
    const fieldset = el(
      "fieldset",
      { class: "form-section", "data-section": group.section },
      el("legend", {}, group.title),
    );
    for (const spec of group.features) {
      const descriptor = describeControl(spec);
      const row = el(
        "div",
        { class: "field-row", "data-field": spec.id },
        el("label", { for: `field-${spec.id}` }, spec.display_name),
      );
      const control = controlFor(spec, current[spec.id], (value) => {
        current[spec.id] = value;
        setFieldErrors(form, localValidate(schema, current));
        onChange(spec.id, value);
      });
      control.setAttribute("id", `field-${spec.id}`);
      row.append(control);
      const hint = rangeHint(schema, spec) || descriptor.hint;
      if (hint) {
        row.append(el("span", { class: "hint" }, hint));
      }
      row.append(el("span", { class: "field-error", role: "alert" }));
      fieldset.append(row);
    }
    form.append(fieldset);
  }
  return form;
}

/** Attach or clear per-field validation messages from the service. */
export function setFieldErrors(form: HTMLElement, messages: Map<string, string>): void {
  for (const row of form.querySelectorAll<HTMLElement>(".field-row")) {
    const feature = row.getAttribute("data-field") ?? "";
    const slot = row.querySelector<HTMLElement>(".field-error");
    if (!slot) continue;
    const message = messages.get(feature);
    slot.textContent = message ?? "";
    row.classList.toggle("has-error", message !== undefined);
  }
}

function signedPercent(phi: number): string {
  if (phi === 0) return "0%";
  return (phi > 0 ? "+" : "−") + formatPercent(Math.abs(phi));
}

const WF = {
  width: 680,
  labelWidth: 250,
  rowHeight: 22,
  headerHeight: 26,
  footerHeight: 26,
};

/** The waterfall drawing: one horizontal bar per feature, running from
 * the panel baseline down to the returned prediction. */
export function renderWaterfall(view: WaterfallView): HTMLElement {
  const container = el("div", { class: "waterfall" });
  const note = attributionNote(view);
  if (note) {
    container.append(
      el("p", { class: "flat-note" }, note),
      el("p", { class: "flat-detail" }, STRINGS.flatExplanation),
    );
    return container;
  }
  const [lo, hi] = view.domain;
  const span = hi - lo || 1;
  const plotWidth = WF.width - WF.labelWidth - 10;
  const x = (value: number) =>
    WF.labelWidth + ((value - lo) / span) * plotWidth;
  const height =
    WF.headerHeight + view.bars.length * WF.rowHeight + WF.footerHeight;
  const drawing = svg("svg", {
    viewBox: `0 0 ${WF.width} ${height}`,
    role: "img",
    "aria-label": "attribution waterfall",
  });
  drawing.append(
    svg("text", { x: "0", y: "16", class: "wf-edge" },
      STRINGS.baseline(formatPercent(view.baseValue))),
    svg("line", {
      x1: String(x(view.baseValue)),
      y1: String(WF.headerHeight - 6),
      x2: String(x(view.baseValue)),
      y2: String(height - WF.footerHeight + 6),
      class: "wf-guide",
    }),
  );
  view.bars.forEach((bar, index) => {
    const y = WF.headerHeight + index * WF.rowHeight;
    const x0 = x(Math.min(bar.start, bar.end));
    const width = Math.max(Math.abs(x(bar.end) - x(bar.start)), 1);
    const row = svg("g", { class: `wf-row ${bar.direction}`, "data-feature": bar.feature });
    row.append(
      svg("text", { x: "0", y: String(y + 14), class: "wf-label" }, bar.label),
      svg("rect", {
        x: String(x0),
        y: String(y + 4),
        width: String(width),
        height: String(WF.rowHeight - 8),
        class: `wf-bar ${bar.direction}`,
      }),
      svg("title", {}, `${bar.label}: ${signedPercent(bar.phi)}`),
    );
    drawing.append(row);
  });
  const endY = height - WF.footerHeight + 16;
  drawing.append(
    svg("line", {
      x1: String(x(view.prediction)),
      y1: String(WF.headerHeight - 6),
      x2: String(x(view.prediction)),
      y2: String(height - WF.footerHeight + 6),
      class: "wf-final",
    }),
    svg("text", { x: "0", y: String(endY), class: "wf-edge" },
      `prediction ${formatPercent(view.prediction)}`),
  );
  container.append(drawing);
  if (!view.consistent) {
    container.append(
      el("p", { class: "inconsistency" },
        `attribution endpoint differs from the prediction by ${view.gap}`),
    );
  }
  return container;
}

export function renderDecisionCard(
  card: DecisionCardView,
  stale: boolean,
): HTMLElement {
  const root = el(
    "section",
    { class: "decision-card", "data-orders": String(card.orders) },
    el("h2", {}, STRINGS.decisionTitle),
    el("p", { class: "award" }, card.awardText),
    el("p", { class: "headline" }, card.headline),
    el("p", { class: "baseline" }, card.baselineText),
  );
  if (stale) {
    root.append(el("p", { class: "stale" }, STRINGS.staleNote));
  }
  if (card.warnings.length > 0) {
    const list = el("ul", { class: "warnings" });
    for (const warning of card.warnings) {
      list.append(el("li", {}, warning));
    }
    root.append(el("h3", {}, STRINGS.warningsTitle), list);
  }
  root.append(el("p", { class: "digest" }, card.digest));
  return root;
}

export function renderCounterfactualCards(
  cards: CounterfactualCardView[],
): HTMLElement {
  const root = el(
    "section",
    { class: "counterfactuals" },
    el("h2", {}, STRINGS.counterfactualTitle),
  );
  for (const card of cards) {
    const node = el(
      "article",
      { class: `cf-card ${card.kind}`, "data-feature": card.feature, "data-kind": card.kind },
      el("h3", {}, card.label),
      el("p", { class: "cf-text" }, card.text),
    );
    if (card.detail) {
      node.append(el("p", { class: "cf-detail" }, card.detail));
    }
    root.append(node);
  }
  return root;
}

/** Compact comparison of the session's earlier what-if rounds. */
export function renderWhatIfHistory(
  history: readonly CounterfactualResponse[],
  describe: (target: TargetDoc) => string,
): HTMLElement | null {
  if (history.length <= 1) return null;
  const list = el("ol", { class: "history" });
  history.slice(0, -1).forEach((round, index) => {
    const found = round.results.filter((r) => r.status === "found").length;
    list.append(
      el(
        "li",
        {},
        STRINGS.historyLine(
          index + 1,
          describe(round.target),
          found,
          round.results.length,
        ),
      ),
    );
  });
  return el(
    "section",
    { class: "what-if-history" },
    el("h3", {}, STRINGS.historyTitle),
    list,
  );
}

export function renderErrorBanner(message: string): HTMLElement {
  return el(
    "div",
    { class: "error-banner", role: "alert" },
    el("strong", {}, STRINGS.errorTitle),
    el("span", {}, ` ${message}`),
  );
}

export { clear };
