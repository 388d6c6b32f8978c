/** Display formatting, following the conventions used in the deeds:
 * thousands separated by dots, decimal comma, amounts as "5.600,00
 * euros", shares as "34%" / "12,5%".
 */

import type { FeatureSpec } from "./types.js";

export function formatNumber(value: number, decimals: number): string {
  const negative = value < 0;
  const fixed = Math.abs(value).toFixed(decimals);
  const [intPart = "0", decPart] = fixed.split(".");
  const grouped = intPart.replace(/\B(?=(\d{3})+(?!\d))/g, ".");
  const body = decPart ? `${grouped},${decPart}` : grouped;
  return negative ? `-${body}` : body;
}

export function formatEuros(value: number): string {
  return `${formatNumber(value, 2)} euros`;
}

/** A share in [0, 1] as a percentage, trimming trailing zeros. */
export function formatPercent(share: number, maxDecimals = 1): string {
  let body = (share * 100).toFixed(maxDecimals);
  if (body.includes(".")) {
    body = body.replace(/0+$/, "").replace(/\.$/, "");
  }
  return `${body.replace(".", ",")}%`;
}

/** A raw case value rendered for reading, using the schema's own
 * phrasing where it provides one. */
export function formatValue(spec: FeatureSpec | undefined, value: unknown): string {
  if (spec === undefined || value === null || value === undefined) {
    return String(value);
  }
  switch (spec.kind) {
    case "boolean": {
      const key = value ? "true" : "false";
      return spec.render?.[key] ?? (value ? "yes" : "no");
    }
    case "categorical":
      return spec.render?.[String(value)] ?? String(value);
    case "percent":
      return typeof value === "number" ? formatPercent(value) : String(value);
    case "numeric":
      if (typeof value !== "number") return String(value);
      return spec.unit === "EUR" ? formatEuros(value) : formatNumber(value, 2);
    case "integer":
      return String(value);
    default:
      return String(value);
  }
}
