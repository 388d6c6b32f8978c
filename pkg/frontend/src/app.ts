/** Application entry point: wires the API client, the session, and the
 * renderers together. Kept deliberately thin — every behavior worth
 * testing lives in the imported modules — but the wiring itself is
 * exercised end-to-end by the app tests with a stubbed service.
 */

import { ApiClient, ApiError } from "./api.js";
import type { ServiceApi } from "./api.js";
import { counterfactualCards, decisionCard, describeTarget } from "./cards.js";
import { clear, el } from "./dom.js";
import { defaultValues, localValidate } from "./form.js";
import { formatPercent } from "./format.js";
import {
  renderCounterfactualCards,
  renderDecisionCard,
  renderErrorBanner,
  renderForm,
  renderWaterfall,
  renderWhatIfHistory,
  setFieldErrors,
} from "./render.js";
import { Session } from "./session.js";
import { STRINGS } from "./strings.js";
import type { SchemaDoc, TargetDoc } from "./types.js";
import { buildWaterfall } from "./waterfall.js";

export async function startApp(
  root: HTMLElement,
  api: ServiceApi = new ApiClient(),
): Promise<void> {
  clear(root);
  const header = el(
    "header",
    {},
    el("h1", {}, STRINGS.appTitle),
    el("p", { class: "subtitle" }, STRINGS.appSubtitle),
  );
  const banner = el("div", { class: "banner-slot" });
  const formSlot = el("div", { class: "form-slot" });
  const actions = el("div", { class: "actions" });
  const targetPanel = el("div", { class: "target-panel" });
  const results = el("div", { class: "results-slot" });
  const footer = el("footer", { class: "model-line" });
  root.append(
    header,
    banner,
    el(
      "main",
      {},
      el("div", { class: "left" }, formSlot, actions, targetPanel),
      el("div", { class: "right" }, results),
    ),
    footer,
  );

  let schema: SchemaDoc;
  try {
    const [schemaResp, modelResp] = await Promise.all([
      api.getSchema(),
      api.getModel(),
    ]);
    schema = schemaResp.schema;
    footer.textContent = STRINGS.modelLine(modelResp.model_kind, modelResp.digest);
  } catch {
    // Blocking panel: nothing below works without the schema.
    const retry = el("button", { type: "button", class: "retry" }, STRINGS.retry);
    retry.addEventListener("click", () => void startApp(root, api));
    const panel = renderErrorBanner(STRINGS.connectionError);
    panel.append(retry);
    banner.append(panel);
    return;
  }

  const session = new Session();
  session.setCase(defaultValues(schema));
  const labelFor = (feature: string) =>
    schema.features.find((f) => f.id === feature)?.display_name ?? feature;

  const target: TargetDoc = { kind: "change", delta: 0.1, direction: "any" };

  const assessButton = el(
    "button",
    { type: "button", class: "primary" },
    STRINGS.assess,
  );
  const refreshSubmitGate = () => {
    const invalid = localValidate(schema, session.caseValues());
    (assessButton as HTMLButtonElement).disabled = invalid.size > 0;
  };

  let form: HTMLElement;
  const redrawForm = () => {
    clear(formSlot);
    form = renderForm(schema, session.caseValues(), (feature, value) => {
      session.setValue(feature, value);
      refreshSubmitGate();
      redrawResults();
    });
    formSlot.append(form);
    refreshSubmitGate();
  };

  const redrawResults = () => {
    clear(results);
    const assessment = session.currentAssessment();
    if (!assessment) return;
    const view = buildWaterfall(assessment.explain.waterfall, labelFor);
    results.append(
      renderDecisionCard(decisionCard(assessment.predict, view), session.isStale()),
      renderWaterfall(view),
    );
    const cf = session.currentCounterfactual();
    if (cf) {
      results.append(renderCounterfactualCards(counterfactualCards(cf, schema)));
    }
    const history = renderWhatIfHistory(session.whatIfHistory(), describeTarget);
    if (history) results.append(history);
  };

  const guard = (run: () => Promise<void>) => async () => {
    clear(banner);
    const note = el("p", { class: "busy" }, STRINGS.working);
    banner.append(note);
    try {
      await run();
    } catch (error) {
      if (error instanceof ApiError) {
        session.applyFieldErrors(error.fieldMessages());
        setFieldErrors(form, error.fieldMessages());
        banner.append(renderErrorBanner(error.message));
      } else {
        banner.append(renderErrorBanner(STRINGS.connectionError));
      }
    } finally {
      note.remove();
    }
  };

  const runAssess = guard(async () => {
    const seq = session.beginRequest();
    const values = session.caseValues();
    const [predict, explain] = await Promise.all([
      api.predict(values),
      api.explain(values),
    ]);
    if (!session.applyAssessment(predict, explain, seq)) return;
    setFieldErrors(form, new Map());
    redrawResults();
  });

  const runWhatIf = guard(async () => {
    const seq = session.beginRequest();
    const response = await api.counterfactual(session.caseValues(), {
      target: { ...target },
    });
    if (!session.applyCounterfactual(response, seq)) return;
    redrawResults();
  });

  const sampleButton = el("button", { type: "button" }, STRINGS.loadSample);
  sampleButton.addEventListener(
    "click",
    guard(async () => {
      const seed = Math.floor(Math.random() * 100000);
      const sample = await api.sampleCases(1, seed);
      const first = sample.cases[0];
      if (first) {
        session.setCase(first.values);
        redrawForm();
        redrawResults();
      }
    }),
  );

  assessButton.addEventListener("click", runAssess);

  const whatIfButton = el("button", { type: "button" }, STRINGS.whatIf);
  whatIfButton.addEventListener("click", runWhatIf);

  // What-if target: a delta slider and a direction switch; moving
  // either re-issues the counterfactual request with the new target.
  const deltaLabel = el(
    "label",
    { for: "target-delta" },
    STRINGS.targetDelta(formatPercent(target.delta ?? 0.1)),
  );
  const deltaSlider = el("input", {
    id: "target-delta",
    type: "range",
    min: "0.01",
    max: "0.5",
    step: "0.01",
    value: String(target.delta),
    "data-control": "target-delta",
  });
  deltaSlider.addEventListener("change", () => {
    target.delta = Number((deltaSlider as HTMLInputElement).value);
    deltaLabel.textContent = STRINGS.targetDelta(formatPercent(target.delta));
    void runWhatIf();
  });
  const directionSelect = el(
    "select",
    { "data-control": "target-direction", "aria-label": STRINGS.targetDirection },
    el("option", { value: "any" }, "either direction"),
    el("option", { value: "up" }, "raise it"),
    el("option", { value: "down" }, "lower it"),
  );
  directionSelect.addEventListener("change", () => {
    target.direction = (directionSelect as HTMLSelectElement)
      .value as TargetDoc["direction"];
    void runWhatIf();
  });
  targetPanel.append(
    el("h3", {}, STRINGS.targetTitle),
    deltaLabel,
    deltaSlider,
    directionSelect,
  );

  actions.append(sampleButton, assessButton, whatIfButton);
  redrawForm();
}

declare global {
  interface Window {
    __equarentStarted?: boolean;
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  const root = document.getElementById("app") as HTMLElement;
  if (!window.__equarentStarted) {
    window.__equarentStarted = true;
    void startApp(root);
  }
}
