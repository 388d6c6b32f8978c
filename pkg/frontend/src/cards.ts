/** View models for the decision card and the counterfactual cards.
 *
 * Pure functions from wire payloads to display strings; every figure
 * is lifted from the payload, none is computed here.
 */

import { formatPercent, formatValue } from "./format.js";
import { STRINGS } from "./strings.js";
import type {
  CounterfactualResponse,
  FeatureSpec,
  PredictResponse,
  SchemaDoc,
  TargetDoc,
} from "./types.js";
import type { WaterfallView } from "./waterfall.js";

/** Awards below this are the "does not order a reduction" outcome on
 * the label grid the panel used. */
const ORDER_FLOOR = 0.05;

export interface DecisionCardView {
  awardText: string;
  headline: string;
  orders: boolean;
  baselineText: string;
  warnings: string[];
  digest: string;
}

export function decisionCard(
  predict: PredictResponse,
  waterfall: WaterfallView,
): DecisionCardView {
  const orders = predict.display >= ORDER_FLOOR;
  const awardText = formatPercent(predict.display);
  return {
    awardText,
    orders,
    headline: orders
      ? STRINGS.ordersReduction(awardText)
      : STRINGS.noReduction,
    baselineText: STRINGS.baseline(formatPercent(waterfall.baseValue)),
    warnings: predict.warnings.map((w) => `${w.field}: ${w.message}`),
    digest: predict.digest,
  };
}

/** The one-line summary under the waterfall; the mandated copy for a
 * model whose attributions are all flat. */
export function attributionNote(view: WaterfallView): string | null {
  return view.flat ? STRINGS.noInfluentialFeatures : null;
}

/** A target condition in words, for the what-if panel and history. */
export function describeTarget(target: TargetDoc): string {
  if (target.kind === "reach") {
    const value = formatPercent(target.value ?? 0);
    const tol = target.tol ? ` ± ${formatPercent(target.tol)}` : "";
    return `reach ${value}${tol}`;
  }
  const delta = formatPercent(target.delta ?? 0.1);
  const direction = target.direction ?? "any";
  const arrow =
    direction === "up" ? "upward" : direction === "down" ? "downward" : "either way";
  return `move the award by at least ${delta}, ${arrow}`;
}

export type CounterfactualCardKind = "found" | "not_found" | "locked";

export interface CounterfactualCardView {
  kind: CounterfactualCardKind;
  feature: string;
  label: string;
  text: string;
  /** Server-side detail for locked features, shown as fine print. */
  detail?: string;
}

function specFor(schema: SchemaDoc, feature: string): FeatureSpec | undefined {
  return schema.features.find((f) => f.id === feature);
}

/** One card per entry the service returned — found, not found, or
 * locked by the case's constraints. */
export function counterfactualCards(
  response: CounterfactualResponse,
  schema: SchemaDoc,
): CounterfactualCardView[] {
  return response.results.map((entry) => {
    const spec = specFor(schema, entry.feature);
    const label = spec?.display_name ?? entry.feature;
    if (entry.status === "found" && entry.result) {
      const r = entry.result;
      return {
        kind: "found" as const,
        feature: entry.feature,
        label,
        text: STRINGS.counterfactualFound(
          label,
          formatValue(spec, r.original_value),
          formatValue(spec, r.counterfactual_value),
          formatPercent(r.original_prediction),
          formatPercent(r.counterfactual_prediction),
        ),
      };
    }
    if (entry.status === "error") {
      return {
        kind: "locked" as const,
        feature: entry.feature,
        label,
        text: STRINGS.featureLocked(label),
        ...(entry.message ? { detail: entry.message } : {}),
      };
    }
    return {
      kind: "not_found" as const,
      feature: entry.feature,
      label,
      text: STRINGS.noSingleChange(label),
    };
  });
}
