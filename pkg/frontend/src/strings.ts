/** Every user-facing sentence in one place.
 *
 * Keeping copy out of the render layer makes the wording testable and
 * keeps the phrasing consistent between the cards and their tests.
 */

export const STRINGS = {
  appTitle: "Rent reduction decision support",
  appSubtitle:
    "Predicts an equitable rent reduction for a commercial lease dispute, " +
    "shows which facts drive the figure, and answers single-change " +
    "what-if questions. All figures come from the connected service.",

  assess: "Assess the case",
  loadSample: "Load a sample case",
  whatIf: "What single change would alter it?",
  working: "asking the service…",

  decisionTitle: "Decision",
  ordersReduction: (pct: string) =>
    `An equitable reduction of ${pct} of the rent is supported.`,
  noReduction:
    "The facts do not support ordering a reduction.",
  baseline: (pct: string) => `panel baseline ${pct}`,
  staleNote: "case edited — assess again to refresh",

  attributionTitle: "What drives this figure",
  noInfluentialFeatures: "no influential features",
  flatExplanation:
    "The connected model returns the same figure for every case, so the " +
    "attribution is flat.",

  counterfactualTitle: "Single changes that would alter the outcome",
  noSingleChange: (feature: string) =>
    `no single change to ${feature} alters the outcome`,
  featureLocked: (feature: string) =>
    `${feature} cannot be changed on its own — the case's other facts pin it`,
  counterfactualFound: (
    feature: string,
    from: string,
    to: string,
    before: string,
    after: string,
  ) =>
    `changing ${feature} from ${from} to ${to} moves the award ` +
    `from ${before} to ${after}`,

  warningsTitle: "Constraint warnings",
  errorTitle: "The service rejected the request",
  connectionError:
    "The service is unreachable. Start it with `equarent serve` and reload.",
  retry: "Retry",
  modelLine: (kind: string, digest: string) =>
    `${kind} — bundle ${digest.slice(0, 12)}`,

  targetTitle: "What-if target",
  targetDelta: (pct: string) => `change the award by at least ${pct}`,
  targetDirection: "direction",
  historyTitle: "Earlier what-if rounds",
  historyLine: (round: number, target: string, found: number, total: number) =>
    `round ${round} — ${target}: ${found} of ${total} features answered`,

  required: "required",
  mustBeNumber: "must be a number",
  mustBeWhole: "must be a whole number",
  mustExceed: (bound: string) => `must exceed ${bound}`,
  mustBeBelow: (bound: string) => `must be below ${bound}`,
  mustBeAtLeast: (bound: string) => `must be at least ${bound}`,
  mustBeAtMost: (bound: string) => `must be at most ${bound}`,
  mustBeBetween: (lo: string, hi: string) => `must be between ${lo} and ${hi}`,
} as const;

/** Italian catalog, deliberately partial: untranslated entries fall
 * back to English. Kept out of the live UI for now. */
export const STRINGS_IT: Partial<Record<keyof typeof STRINGS, unknown>> = {
  appTitle: "Supporto alla decisione sulla riduzione del canone",
  assess: "Valuta il caso",
  loadSample: "Carica un caso di esempio",
  whatIf: "Quale singola modifica cambierebbe l'esito?",
  decisionTitle: "Decisione",
  attributionTitle: "Cosa determina questa cifra",
  counterfactualTitle: "Singole modifiche che cambierebbero l'esito",
  warningsTitle: "Avvisi sui vincoli",
  required: "obbligatorio",
  mustBeNumber: "deve essere un numero",
};

export type StringCatalog = typeof STRINGS;

/** Resolve a catalog by locale; unknown locales and missing entries
 * fall back to English so mandated copy never disappears. */
export function catalog(locale: string): StringCatalog {
  if (locale.toLowerCase().startsWith("it")) {
    return { ...STRINGS, ...STRINGS_IT } as StringCatalog;
  }
  return STRINGS;
}
