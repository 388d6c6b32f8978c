import { describe, expect, it } from "vitest";

import {
  attributionNote,
  counterfactualCards,
  decisionCard,
  describeTarget,
} from "../src/cards.js";
import { formatPercent } from "../src/format.js";
import { renderCounterfactualCards, renderDecisionCard } from "../src/render.js";
import { STRINGS } from "../src/strings.js";
import { buildWaterfall } from "../src/waterfall.js";
import { fixtures } from "./fixtures.js";

const schema = fixtures.schema().schema;
const predict = fixtures.predict();
const explain = fixtures.explain();
const view = buildWaterfall(explain.waterfall);

function labelOf(feature: string): string {
  return schema.features.find((f) => f.id === feature)!.display_name;
}

describe("decisionCard", () => {
  it("shows exactly the figures the service returned", () => {
    const card = decisionCard(predict, view);
    expect(card.awardText).toBe(formatPercent(predict.display));
    expect(card.orders).toBe(true);
    expect(card.headline).toBe(STRINGS.ordersReduction(card.awardText));
    expect(card.baselineText).toBe(
      STRINGS.baseline(formatPercent(explain.base_value)),
    );
    expect(card.digest).toBe(predict.digest);
    expect(card.warnings).toEqual([]);
  });

  it("words an award below the order floor as no reduction", () => {
    const low = { ...predict, display: 0.03 };
    const card = decisionCard(low, view);
    expect(card.orders).toBe(false);
    expect(card.headline).toBe(STRINGS.noReduction);
  });

  it("surfaces constraint warnings verbatim", () => {
    const warned = fixtures.predictWarning();
    const card = decisionCard(warned, view);
    expect(card.warnings).toHaveLength(warned.warnings.length);
    expect(card.warnings[0]).toBe(
      `${warned.warnings[0]!.field}: ${warned.warnings[0]!.message}`,
    );
  });
});

describe("attributionNote", () => {
  it("is silent for a model with influential features", () => {
    expect(attributionNote(view)).toBeNull();
  });

  it("says 'no influential features' for a constant model", () => {
    const flat = buildWaterfall(fixtures.constantExplain().waterfall);
    expect(attributionNote(flat)).toBe(STRINGS.noInfluentialFeatures);
    expect(attributionNote(flat)).toBe("no influential features");
  });
});

describe("counterfactualCards", () => {
  const response = fixtures.counterfactual();

  it("renders one card per returned entry, in order", () => {
    const cards = counterfactualCards(response, schema);
    expect(cards).toHaveLength(response.results.length);
    expect(cards.map((c) => c.feature)).toEqual(
      response.results.map((r) => r.feature),
    );
  });

  it("describes a found change with both values and both awards", () => {
    const cards = counterfactualCards(response, schema);
    const found = cards.find((c) => c.kind === "found")!;
    const entry = response.results.find((r) => r.status === "found")!;
    const result = entry.result!;
    expect(found.text).toBe(
      STRINGS.counterfactualFound(
        labelOf(entry.feature),
        formatPercent(result.original_value as number),
        formatPercent(result.counterfactual_value as number),
        formatPercent(result.original_prediction),
        formatPercent(result.counterfactual_prediction),
      ),
    );
    expect(found.text).toContain("moves the award");
  });

  it("uses the mandated wording when no single change works", () => {
    const cards = counterfactualCards(response, schema);
    const miss = cards.find((c) => c.kind === "not_found")!;
    expect(miss.text).toBe(STRINGS.noSingleChange(miss.label));
    expect(miss.text).toContain("no single change to");
    expect(miss.text).toContain("alters the outcome");
  });

  it("marks constraint-locked features and keeps the service detail", () => {
    const cards = counterfactualCards(response, schema);
    const locked = cards.find((c) => c.kind === "locked")!;
    const entry = response.results.find((r) => r.status === "error")!;
    expect(locked.feature).toBe("monthly_rent");
    expect(locked.text).toBe(STRINGS.featureLocked(labelOf("monthly_rent")));
    expect(locked.detail).toBe(entry.message);
  });

  it("words every entry of an unreachable target as a miss or a lock", () => {
    const cards = counterfactualCards(fixtures.counterfactualUnreachable(), schema);
    expect(cards.map((c) => c.kind).sort()).toEqual([
      "locked",
      "not_found",
      "not_found",
    ]);
    for (const card of cards.filter((c) => c.kind === "not_found")) {
      expect(card.text).toBe(STRINGS.noSingleChange(card.label));
    }
  });
});

describe("describeTarget", () => {
  it("words change targets with size and direction", () => {
    expect(describeTarget({ kind: "change", delta: 0.1, direction: "any" })).toBe(
      "move the award by at least 10%, either way",
    );
    expect(describeTarget({ kind: "change", delta: 0.05, direction: "up" })).toBe(
      "move the award by at least 5%, upward",
    );
    expect(
      describeTarget({ kind: "change", delta: 0.2, direction: "down" }),
    ).toBe("move the award by at least 20%, downward");
  });

  it("words reach targets with the value and tolerance", () => {
    expect(describeTarget({ kind: "reach", value: 0.4, tol: 0.05 })).toBe(
      "reach 40% ± 5%",
    );
  });

  it("reads the wire target of a captured response", () => {
    const wire = fixtures.counterfactual().target;
    expect(describeTarget(wire)).toBe("move the award by at least 10%, either way");
  });
});

describe("card rendering", () => {
  it("renders the decision card with award, headline, and digest", () => {
    const node = renderDecisionCard(decisionCard(predict, view), false);
    expect(node.querySelector(".award")?.textContent).toBe(
      formatPercent(predict.display),
    );
    expect(node.querySelector(".headline")?.textContent).toContain(
      "equitable reduction",
    );
    expect(node.querySelector(".digest")?.textContent).toBe(predict.digest);
    expect(node.querySelector(".stale")).toBeNull();
  });

  it("flags a stale assessment after the case was edited", () => {
    const node = renderDecisionCard(decisionCard(predict, view), true);
    expect(node.querySelector(".stale")?.textContent).toBe(STRINGS.staleNote);
  });

  it("renders one article per counterfactual card with its kind", () => {
    const cards = counterfactualCards(fixtures.counterfactual(), schema);
    const node = renderCounterfactualCards(cards);
    const articles = node.querySelectorAll("article.cf-card");
    expect(articles).toHaveLength(cards.length);
    expect([...articles].map((a) => a.getAttribute("data-kind"))).toEqual(
      cards.map((c) => c.kind),
    );
  });
});
