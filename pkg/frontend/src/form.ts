/** Schema-driven form model.
 *
 * The form is derived entirely from the schema document the service
 * serves: one control per feature, grouped by the deed section the
 * feature appears in. Local validation mirrors the served per-field
 * constraints (presence, type, bounds) so the form can hint inline and
 * gate submission; cross-field rules stay with the service, which
 * answers constraint-bending hypotheticals with warnings instead.
 */

import { formatNumber } from "./format.js";
import { STRINGS } from "./strings.js";
import type { CaseValues, FeatureKind, FeatureSpec, SchemaDoc } from "./types.js";

/** Deed sections in reading order, with judge-facing headings. */
export const SECTION_TITLES: Record<string, string> = {
  parties: "The parties",
  contract: "The contract",
  impact: "Economic impact",
  request: "The request",
};

export interface FormGroup {
  section: string;
  title: string;
  features: FeatureSpec[];
}

/** Group features by section, preserving the schema's declared order
 * both across groups (first appearance) and within each group. */
export function groupBySection(schema: SchemaDoc): FormGroup[] {
  const groups: FormGroup[] = [];
  const bySection = new Map<string, FormGroup>();
  for (const spec of schema.features) {
    let group = bySection.get(spec.section);
    if (!group) {
      group = {
        section: spec.section,
        title: SECTION_TITLES[spec.section] ?? spec.section,
        features: [],
      };
      bySection.set(spec.section, group);
      groups.push(group);
    }
    group.features.push(spec);
  }
  return groups;
}

export type Widget = "select" | "checkbox" | "number";

export interface ControlDescriptor {
  feature: string;
  label: string;
  widget: Widget;
  /** select: category value/label pairs in declared order */
  options?: { value: string; label: string }[];
  /** number: bounds and step from the schema */
  min?: number;
  max?: number;
  step?: number | "any";
  /** short hint shown beside the control */
  hint?: string;
}

const KIND_HINTS: Partial<Record<FeatureKind, string>> = {
  percent: "share of 1",
  numeric: "",
  integer: "",
};

/** Describe the control a feature needs; the DOM layer renders this
 * verbatim. */
export function describeControl(spec: FeatureSpec): ControlDescriptor {
  const base = { feature: spec.id, label: spec.display_name };
  switch (spec.kind) {
    case "categorical":
      return {
        ...base,
        widget: "select",
        options: (spec.categories ?? []).map((c) => ({
          value: c,
          label: spec.render?.[c] ?? c,
        })),
      };
    case "boolean":
      return { ...base, widget: "checkbox" };
    case "integer": {
      const [min, max] = spec.range ?? [undefined, undefined];
      return { ...base, widget: "number", min, max, step: 1 };
    }
    case "numeric":
    case "percent": {
      const [min, max] = spec.range ?? [undefined, undefined];
      const hint =
        spec.kind === "percent" ? KIND_HINTS.percent : spec.unit ?? "";
      return {
        ...base,
        widget: "number",
        min,
        max,
        step: spec.step ?? "any",
        ...(hint ? { hint } : {}),
      };
    }
  }
}

/** Turn a control's raw input into the wire value for its feature.
 *
 * Unparseable numeric input is passed through as the raw string: the
 * service rejects it with a field-level type violation, which is
 * exactly the message the form then shows. The client never decides
 * validity on its own.
 */
export function coerceInput(spec: FeatureSpec, raw: string | boolean): unknown {
  if (spec.kind === "boolean") {
    return typeof raw === "boolean" ? raw : raw === "true";
  }
  if (typeof raw === "boolean") return raw;
  if (spec.kind === "categorical") return raw;
  const trimmed = raw.trim();
  if (trimmed === "") return null;
  const parsed = Number(trimmed);
  if (!Number.isFinite(parsed)) return raw;
  return parsed;
}

export interface RangeBound {
  gt?: number;
  ge?: number;
  lt?: number;
  le?: number;
}

function isRangeBound(c: unknown): c is RangeBound & { kind: string; feature: string } {
  return (
    typeof c === "object" &&
    c !== null &&
    (c as { kind?: unknown }).kind === "range_bound" &&
    typeof (c as { feature?: unknown }).feature === "string"
  );
}

/** The effective per-field bounds: an explicit range_bound constraint
 * where the schema declares one (possibly exclusive), otherwise the
 * feature's own sampling range, inclusive. */
export function boundsFor(schema: SchemaDoc, spec: FeatureSpec): RangeBound {
  for (const constraint of schema.constraints) {
    if (isRangeBound(constraint) && constraint.feature === spec.id) {
      const { gt, ge, lt, le } = constraint;
      return {
        ...(gt !== undefined ? { gt } : {}),
        ...(ge !== undefined ? { ge } : {}),
        ...(lt !== undefined ? { lt } : {}),
        ...(le !== undefined ? { le } : {}),
      };
    }
  }
  if (spec.range) return { ge: spec.range[0], le: spec.range[1] };
  return {};
}

function formatBound(spec: FeatureSpec, bound: number): string {
  if (spec.unit === "EUR") {
    return `€ ${formatNumber(bound, Number.isInteger(bound) ? 0 : 2)}`;
  }
  // Plain digits with a dot decimal, matching what the number input
  // itself accepts (percent fields take the raw share).
  return String(bound);
}

/** One field's local validation: presence, type, bounds. Returns the
 * inline message, or null when the value is acceptable. */
export function validateValue(
  schema: SchemaDoc,
  spec: FeatureSpec,
  value: unknown,
): string | null {
  if (value === null || value === undefined || value === "") {
    return STRINGS.required;
  }
  switch (spec.kind) {
    case "boolean":
      return typeof value === "boolean" ? null : STRINGS.mustBeNumber;
    case "categorical":
      return spec.categories?.includes(String(value)) ? null : STRINGS.required;
    case "integer":
    case "numeric":
    case "percent": {
      if (typeof value !== "number" || !Number.isFinite(value)) {
        return STRINGS.mustBeNumber;
      }
      if (spec.kind === "integer" && !Number.isInteger(value)) {
        return STRINGS.mustBeWhole;
      }
      const bounds = boundsFor(schema, spec);
      const fmt = (b: number) => formatBound(spec, b);
      if (bounds.gt !== undefined && !(value > bounds.gt)) {
        return STRINGS.mustExceed(fmt(bounds.gt));
      }
      if (bounds.lt !== undefined && !(value < bounds.lt)) {
        return STRINGS.mustBeBelow(fmt(bounds.lt));
      }
      const lo = bounds.ge;
      const hi = bounds.le;
      if (lo !== undefined && hi !== undefined && (value < lo || value > hi)) {
        return STRINGS.mustBeBetween(fmt(lo), fmt(hi));
      }
      if (lo !== undefined && value < lo) return STRINGS.mustBeAtLeast(fmt(lo));
      if (hi !== undefined && value > hi) return STRINGS.mustBeAtMost(fmt(hi));
      return null;
    }
  }
}

/** Validate the whole case locally; the submit action stays disabled
 * until this comes back empty. Cross-field rules are left to the
 * service on purpose — it answers them with warnings, not rejections. */
export function localValidate(
  schema: SchemaDoc,
  values: CaseValues,
): Map<string, string> {
  const messages = new Map<string, string>();
  for (const spec of schema.features) {
    const message = validateValue(schema, spec, values[spec.id]);
    if (message !== null) messages.set(spec.id, message);
  }
  return messages;
}

/** Inline hint describing a numeric field's admissible values. */
export function rangeHint(schema: SchemaDoc, spec: FeatureSpec): string {
  if (spec.kind === "boolean" || spec.kind === "categorical") return "";
  const bounds = boundsFor(schema, spec);
  const lo = bounds.gt ?? bounds.ge;
  const hi = bounds.lt ?? bounds.le;
  if (lo === undefined || hi === undefined) return "";
  const open = bounds.gt !== undefined || bounds.lt !== undefined;
  return `${formatBound(spec, lo)} – ${formatBound(spec, hi)}${open ? " (exclusive)" : ""}`;
}

/** Neutral but locally valid starting values so the form is usable
 * before a sample or a real case is loaded: first category, false,
 * first tabulated value, or an in-bounds round figure. */
export function defaultValues(schema: SchemaDoc): CaseValues {
  const values: CaseValues = {};
  for (const spec of schema.features) {
    switch (spec.kind) {
      case "categorical":
        values[spec.id] = spec.categories?.[0] ?? "";
        break;
      case "boolean":
        values[spec.id] = false;
        break;
      case "numeric":
        values[spec.id] =
          spec.values?.[0] ??
          (spec.range ? (spec.range[0] + spec.range[1]) / 2 : 0);
        break;
      default:
        values[spec.id] = spec.range ? spec.range[0] : 0;
    }
  }
  return values;
}
