/** Load wire fixtures captured from the real service.
 *
 * Regenerate with: python3 scripts/capture_fixtures.py
 */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type {
  ApiErrorBody,
  CounterfactualResponse,
  ExplainResponse,
  ModelResponse,
  PredictResponse,
  SampleResponse,
  SchemaResponse,
} from "../src/types.js";

const here = dirname(fileURLToPath(import.meta.url));

export function loadFixture<T>(name: string): T {
  return JSON.parse(readFileSync(join(here, "fixtures", name), "utf8")) as T;
}

export const fixtures = {
  schema: () => loadFixture<SchemaResponse>("schema.json"),
  model: () => loadFixture<ModelResponse>("model.json"),
  sample: () => loadFixture<SampleResponse>("sample.json"),
  predict: () => loadFixture<PredictResponse>("predict.json"),
  predictWarning: () => loadFixture<PredictResponse>("predict_warning.json"),
  explain: () => loadFixture<ExplainResponse>("explain.json"),
  constantExplain: () => loadFixture<ExplainResponse>("constant_explain.json"),
  counterfactual: () => loadFixture<CounterfactualResponse>("counterfactual.json"),
  counterfactualUnreachable: () =>
    loadFixture<CounterfactualResponse>("counterfactual_unreachable.json"),
  invalidCase: () => loadFixture<ApiErrorBody>("error_invalid_case.json"),
};
