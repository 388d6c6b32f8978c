/** Attribution waterfall view model.
 *
 * The service's explanation payload already carries the running totals
 * (each entry's start and end); this module only shapes them for
 * drawing and re-checks the arithmetic it was handed: the final
 * cumulative endpoint must equal the returned prediction. The client
 * never recomputes attributions.
 */

import type { WaterfallPayload } from "./types.js";

/** Cumulative endpoint vs prediction tolerance; a larger gap means the
 * payload is internally inconsistent and the card says so. */
export const CONSISTENCY_TOLERANCE = 1e-6;

/** Attributions at or below this magnitude count as "no influence";
 * a constant model returns exact zeros. */
export const FLAT_TOLERANCE = 1e-12;

export type BarDirection = "up" | "down" | "flat";

export interface WaterfallBar {
  feature: string;
  label: string;
  phi: number;
  start: number;
  end: number;
  direction: BarDirection;
}

export interface WaterfallView {
  baseValue: number;
  prediction: number;
  /** Where the running total lands after the last bar. */
  endValue: number;
  /** |endValue - prediction|, the client-side arithmetic re-check. */
  gap: number;
  consistent: boolean;
  bars: WaterfallBar[];
  /** True when no feature moves the figure (constant model). */
  flat: boolean;
  /** Value range covered by the bars, for scaling the drawing. */
  domain: [number, number];
}

export function buildWaterfall(
  payload: WaterfallPayload,
  labelFor: (feature: string) => string = (f) => f,
): WaterfallView {
  const bars: WaterfallBar[] = payload.entries.map((e) => ({
    feature: e.feature,
    label: labelFor(e.feature),
    phi: e.phi,
    start: e.start,
    end: e.end,
    direction: e.phi > 0 ? "up" : e.phi < 0 ? "down" : "flat",
  }));
  const last = bars[bars.length - 1];
  const endValue = last ? last.end : payload.base_value;
  const gap = Math.abs(endValue - payload.prediction);
  let lo = Math.min(payload.base_value, payload.prediction);
  let hi = Math.max(payload.base_value, payload.prediction);
  for (const bar of bars) {
    lo = Math.min(lo, bar.start, bar.end);
    hi = Math.max(hi, bar.start, bar.end);
  }
  return {
    baseValue: payload.base_value,
    prediction: payload.prediction,
    endValue,
    gap,
    consistent: gap <= CONSISTENCY_TOLERANCE,
    bars,
    flat: bars.every((b) => Math.abs(b.phi) <= FLAT_TOLERANCE),
    domain: [lo, hi],
  };
}
