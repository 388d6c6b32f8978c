/** Wire types for the decision-support service API.
 *
 * These mirror the JSON the service emits verbatim; the client performs
 * no inference of its own, so every number shown on screen originates
 * in one of these payloads.
 */

export type FeatureKind =
  | "numeric"
  | "percent"
  | "integer"
  | "boolean"
  | "categorical";

export interface FeatureSpec {
  id: string;
  display_name: string;
  kind: FeatureKind;
  section: string;
  range?: [number, number];
  step?: number;
  unit?: string;
  values?: number[];
  weights?: number[];
  categories?: string[];
  p_true?: number;
  render?: Record<string, string>;
}

export interface SchemaDoc {
  version: number;
  features: FeatureSpec[];
  constraints: unknown[];
  document_template?: string;
}

export interface SchemaResponse {
  schema: SchemaDoc;
  digest: string;
}

export interface ImportanceEntry {
  feature: string;
  mean_abs_phi: number;
  share: number;
}

export interface ModelResponse {
  digest: string;
  package_version: string;
  model_kind: string;
  metadata: Record<string, unknown>;
  importance: { entries: ImportanceEntry[] } | null;
}

/** A case on the wire: feature id to raw value. */
export type CaseValues = Record<string, unknown>;

export interface FieldMessage {
  field: string;
  message: string;
}

export interface PredictResponse {
  raw: number;
  display: number;
  digest: string;
  consistency: {
    base_value: number;
    phi_sum: number;
    prediction: number;
  };
  warnings: FieldMessage[];
}

export interface ContributionEntry {
  feature: string;
  phi: number;
}

export interface WaterfallEntry {
  feature: string;
  phi: number;
  start: number;
  end: number;
}

export interface WaterfallPayload {
  kind: string;
  base_value: number;
  prediction: number;
  entries: WaterfallEntry[];
}

export interface ExplainResponse {
  prediction: number;
  base_value: number;
  phi_sum: number;
  contributions: ContributionEntry[];
  waterfall: WaterfallPayload;
  digest: string;
  warnings: FieldMessage[];
}

export interface TargetDoc {
  kind: "change" | "reach";
  delta?: number;
  direction?: "up" | "down" | "any";
  value?: number | null;
  tol?: number;
}

export interface CounterfactualResultDoc {
  feature: string;
  original_value: unknown;
  counterfactual_value: unknown;
  original_prediction: number;
  counterfactual_prediction: number;
  distance: number;
}

export type EntryStatus = "found" | "not_found" | "error";

export interface TopKEntryDoc {
  feature: string;
  status: EntryStatus;
  result: CounterfactualResultDoc | null;
  message: string | null;
}

export interface CounterfactualResponse {
  original_prediction: number;
  target: TargetDoc;
  results: TopKEntryDoc[];
  digest: string;
  warnings: FieldMessage[];
}

export interface SampledCase {
  case_id: string;
  values: CaseValues;
}

export interface SampleResponse {
  cases: SampledCase[];
}

export interface ApiErrorBody {
  code: string;
  message: string;
  details: FieldMessage[];
}
