/** Client-side session state.
 *
 * Holds the case being edited and the latest service responses. The
 * invariant the tests pin down: editing the case never changes any
 * displayed figure — results only change when a new response is
 * applied. The client has no model, so it cannot update a prediction
 * locally; it can only mark the shown one as stale.
 *
 * Responses carry sequence numbers from beginRequest(); a response
 * older than one already applied to the same panel is discarded, so
 * out-of-order arrivals cannot roll the screen back. Each applied
 * what-if round is kept in a session history for comparison.
 */

import type {
  CaseValues,
  CounterfactualResponse,
  ExplainResponse,
  PredictResponse,
} from "./types.js";

export interface Assessment {
  predict: PredictResponse;
  explain: ExplainResponse;
}

const HISTORY_LIMIT = 20;

export class Session {
  private values: CaseValues = {};
  private assessment: Assessment | null = null;
  private counterfactual: CounterfactualResponse | null = null;
  private history: CounterfactualResponse[] = [];
  private stale = false;
  private fieldErrors = new Map<string, string>();
  private issued = 0;
  private appliedAssessment = 0;
  private appliedCounterfactual = 0;

  caseValues(): CaseValues {
    return { ...this.values };
  }

  setCase(values: CaseValues): void {
    this.values = { ...values };
    this.stale = this.assessment !== null;
    this.fieldErrors = new Map();
  }

  setValue(feature: string, value: unknown): void {
    this.values[feature] = value;
    this.stale = this.assessment !== null;
    this.fieldErrors.delete(feature);
  }

  /** The latest assessment, untouched by any edit since it arrived. */
  currentAssessment(): Assessment | null {
    return this.assessment;
  }

  currentCounterfactual(): CounterfactualResponse | null {
    return this.counterfactual;
  }

  /** Applied what-if rounds, oldest first, for scenario comparison. */
  whatIfHistory(): readonly CounterfactualResponse[] {
    return [...this.history];
  }

  /** True when the case changed after the shown results were fetched. */
  isStale(): boolean {
    return this.stale;
  }

  /** Take a sequence number before issuing a request. */
  beginRequest(): number {
    return ++this.issued;
  }

  /** Apply an assessment response; returns false when a newer one was
   * already applied and this arrival is discarded. */
  applyAssessment(
    predict: PredictResponse,
    explain: ExplainResponse,
    seq?: number,
  ): boolean {
    const s = seq ?? this.beginRequest();
    if (s < this.appliedAssessment) return false;
    this.appliedAssessment = s;
    this.assessment = { predict, explain };
    this.counterfactual = null;
    this.stale = false;
    this.fieldErrors = new Map();
    return true;
  }

  /** Apply a what-if response and record it in the session history;
   * returns false for a stale arrival. */
  applyCounterfactual(response: CounterfactualResponse, seq?: number): boolean {
    const s = seq ?? this.beginRequest();
    if (s < this.appliedCounterfactual) return false;
    this.appliedCounterfactual = s;
    this.counterfactual = response;
    this.history.push(response);
    if (this.history.length > HISTORY_LIMIT) {
      this.history = this.history.slice(-HISTORY_LIMIT);
    }
    return true;
  }

  applyFieldErrors(messages: Map<string, string>): void {
    this.fieldErrors = new Map(messages);
  }

  errorFor(feature: string): string | undefined {
    return this.fieldErrors.get(feature);
  }

  errorFields(): string[] {
    return [...this.fieldErrors.keys()];
  }
}
