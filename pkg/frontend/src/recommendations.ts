// Recommendation cards: treatment, class, and an expandable view of the
// supporting partial answer set, grouped into established literals and
// "not ..." literals, sorted for readability rather than solver order.

import { prettyAtom } from "./atoms";
import { RecommendationDoc } from "./types";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function literalList(title: string, literals: string[], naf: boolean): HTMLElement {
  const box = el("div", naf ? "support-nafs" : "support-positive");
  box.append(el("h4", undefined, title));
  const list = el("ul");
  for (const literal of [...literals].sort()) {
    const item = el("li", "literal", naf ? `not ${literal}` : literal);
    item.title = prettyAtom(literal);
    list.append(item);
  }
  box.append(list);
  return box;
}

export function renderRecommendations(
  container: HTMLElement,
  recommendations: RecommendationDoc[],
): void {
  container.textContent = "";
  if (!recommendations.length) {
    container.append(
      el("p", "empty-state", "No treatment rules apply to this record."),
    );
    return;
  }
  for (const rec of recommendations) {
    const card = el("section", "recommendation-card");
    card.dataset.treatment = rec.treatment;
    card.dataset.class = rec.class;
    const heading = el(
      "h3",
      undefined,
      `${rec.treatment.replace(/_/g, " ")} (${rec.class.replace("class_", "class ")})`,
    );
    const details = el("details", "support");
    details.append(el("summary", undefined, "why"));
    details.append(literalList("established", rec.support.positive, false));
    details.append(literalList("relies on the absence of", rec.support.nafs, true));
    card.append(heading, details);
    container.append(card);
  }
}
