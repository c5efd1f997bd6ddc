// What-if explorer: pick a treatment and class from the vocabulary, show
// which missing preconditions the engine abduces, and let the physician
// apply a positive assumption to the record with one click.

import { prettyAtom } from "./atoms";
import { applyAssumption } from "./applyAssumption";
import { PatientDoc, Vocabulary, WhatifResult } from "./types";

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

export interface WhatifPanel {
  element: HTMLElement;
  run(): Promise<void>;
  selectTreatment(treatment: string, cls: string): void;
  renderResults(results: WhatifResult[]): void;
}

export interface WhatifHooks {
  query(treatment: string, cls: string): Promise<WhatifResult[]>;
  currentRecord(): PatientDoc;
  applyEdit(doc: PatientDoc): Promise<void>;
  onError(error: unknown): void;
}

export function buildWhatifPanel(vocab: Vocabulary, hooks: WhatifHooks): WhatifPanel {
  const root = el("section", "whatif");
  root.append(el("h2", undefined, "What-if explorer"));

  const treatment = el("select", "whatif-treatment");
  for (const name of vocab.treatments) {
    const option = el("option", undefined, name.replace(/_/g, " "));
    option.value = name;
    treatment.append(option);
  }
  const cls = el("select", "whatif-class");
  for (const name of vocab.class_labels) {
    const option = el("option", undefined, name);
    option.value = name;
    cls.append(option);
  }
  const run = el("button", "whatif-run", "explore");
  run.type = "button";
  const results = el("div", "whatif-results");
  root.append(treatment, cls, run, results);

  const panel: WhatifPanel = {
    element: root,
    selectTreatment(t, c) {
      treatment.value = t;
      cls.value = c;
    },
    async run() {
      results.textContent = "";
      try {
        const found = await hooks.query(treatment.value, cls.value);
        panel.renderResults(found);
      } catch (error) {
        hooks.onError(error);
      }
    },
    renderResults(found) {
      results.textContent = "";
      if (!found.length) {
        results.append(
          el(
            "p",
            "empty-state",
            "No way to satisfy the preconditions for this treatment.",
          ),
        );
        return;
      }
      found.forEach((result, index) => {
        const card = el("article", "whatif-result");
        card.append(el("h3", undefined, `option ${index + 1}`));
        if (!result.assumptions.positive.length && !result.assumptions.negative.length) {
          card.append(
            el("p", "already-met", "All preconditions are already met."),
          );
        }
        for (const atomText of result.assumptions.positive) {
          const row = el("p", "assumption-positive", `would require: ${prettyAtom(atomText)}`);
          const edited = applyAssumption(
            hooks.currentRecord(),
            atomText,
            vocab.patient_fields,
          );
          if (edited) {
            const apply = el("button", "apply-assumption", "apply to record");
            apply.type = "button";
            apply.dataset.atom = atomText;
            apply.addEventListener("click", async () => {
              try {
                await hooks.applyEdit(edited);
              } catch (error) {
                hooks.onError(error);
              }
            });
            row.append(" ", apply);
          }
          card.append(row);
        }
        for (const atomText of result.assumptions.negative) {
          card.append(
            el(
              "p",
              "assumption-negative",
              `would require absence of: ${prettyAtom(atomText)}`,
            ),
          );
        }
        results.append(card);
      });
    },
  };
  run.addEventListener("click", () => void panel.run());
  return panel;
}
