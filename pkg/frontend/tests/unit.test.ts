import { describe, expect, it } from "vitest";

import { applyAssumption } from "../src/applyAssumption";
import { parseAtom, prettyAtom } from "../src/atoms";
import { buildPatientForm } from "../src/form";
import { FieldSpec } from "../src/types";

const FIELDS: FieldSpec[] = [
  { name: "stage", group: "Measurements", kind: "enum", options: ["a", "b", "c", "d"] },
  { name: "nyha_class", group: "Measurements", kind: "enum", options: [1, 2, 3, 4] },
  { name: "lvef", group: "Measurements", kind: "number", units: "fraction of 1" },
  { name: "age", group: "Demographics", kind: "number", units: "years" },
  { name: "hf_with_reduced_ef", group: "Miscellany", kind: "boolean" },
  { name: "pregnancy", group: "Miscellany", kind: "boolean" },
  {
    name: "diagnoses",
    group: "Diseases and Symptoms",
    kind: "multi",
    options: ["diabetes", "hypertension"],
  },
  {
    name: "histories",
    group: "Diseases and Symptoms",
    kind: "history",
    options: ["mi", "standard_neurohormonal_antagonist_therapy"],
    recencies: ["recent", "remote", "unspecified"],
  },
];

describe("atom wire form", () => {
  it("parses zero-arity and nested atoms", () => {
    expect(parseAtom("pregnancy")).toEqual({ predicate: "pregnancy", args: [] });
    expect(parseAtom("history(mi, recent)")).toEqual({
      predicate: "history",
      args: ["mi", "recent"],
    });
    expect(parseAtom("recommendation(ace_inhibitors, class_1)")).toEqual({
      predicate: "recommendation",
      args: ["ace_inhibitors", "class_1"],
    });
  });

  it("renders a readable phrase", () => {
    expect(prettyAtom("history(standard_neurohormonal_antagonist_therapy)")).toBe(
      "history of standard neurohormonal antagonist therapy",
    );
    expect(prettyAtom("hf_with_reduced_ef")).toBe("hf with reduced ef");
  });
});

describe("applyAssumption", () => {
  it("maps history atoms onto the histories list", () => {
    const doc = applyAssumption(
      {},
      "history(standard_neurohormonal_antagonist_therapy)",
      FIELDS,
    );
    expect(doc).toEqual({
      histories: [["standard_neurohormonal_antagonist_therapy", "unspecified"]],
    });
  });

  it("keeps existing entries and deduplicates", () => {
    const base = { histories: [["mi", "recent"]] };
    const once = applyAssumption(base, "history(mi, recent)", FIELDS)!;
    expect(once.histories).toEqual([["mi", "recent"]]);
    const twice = applyAssumption(once, "history(mi, remote)", FIELDS)!;
    expect(twice.histories).toEqual([
      ["mi", "recent"],
      ["mi", "remote"],
    ]);
  });

  it("maps scalar and flag atoms", () => {
    expect(applyAssumption({}, "accf_stage(c)", FIELDS)).toEqual({ stage: "c" });
    expect(applyAssumption({}, "nyha_class(3)", FIELDS)).toEqual({ nyha_class: 3 });
    expect(applyAssumption({}, "measurement(lvef, 0.35)", FIELDS)).toEqual({
      lvef: 0.35,
    });
    expect(applyAssumption({}, "hf_with_reduced_ef", FIELDS)).toEqual({
      hf_with_reduced_ef: true,
    });
    expect(applyAssumption({}, "diagnosis(diabetes)", FIELDS)).toEqual({
      diagnoses: ["diabetes"],
    });
  });

  it("refuses what it cannot map", () => {
    expect(applyAssumption({}, "contraindication(digoxin)", FIELDS)).toBeNull();
    expect(applyAssumption({}, "reduced_ef(0.35)", FIELDS)).toBeNull();
  });
});

describe("patient form", () => {
  it("builds every field from the schema and nothing else", () => {
    const form = buildPatientForm(FIELDS);
    const rendered = [...form.element.querySelectorAll<HTMLElement>(".field")].map(
      (node) => node.dataset.field,
    );
    expect(rendered).toEqual(FIELDS.map((f) => f.name));
  });

  it("omits untouched fields and keeps tri-state booleans", () => {
    const form = buildPatientForm(FIELDS);
    expect(form.getValues()).toEqual({});
    form.setValues({ hf_with_reduced_ef: true, pregnancy: false, stage: "c" });
    expect(form.getValues()).toEqual({
      hf_with_reduced_ef: true,
      pregnancy: false,
      stage: "c",
    });
  });

  it("round-trips a full document through the widgets", () => {
    const form = buildPatientForm(FIELDS);
    const doc = {
      stage: "c",
      nyha_class: 3,
      lvef: 0.35,
      age: 78,
      hf_with_reduced_ef: true,
      diagnoses: ["diabetes"],
      histories: [["mi", "recent"]],
    };
    form.setValues(doc);
    expect(form.getValues()).toEqual(doc);
  });

  it("flags an out-of-range ejection fraction before submit", () => {
    const form = buildPatientForm(FIELDS);
    form.setValues({ lvef: 1.5 });
    const issues = form.validate();
    expect(issues).toEqual([{ field: "lvef", message: "must be within [0, 1]" }]);
    const error = form.element.querySelector<HTMLElement>(
      '[data-field="lvef"] .field-error',
    )!;
    expect(error.textContent).toContain("within [0, 1]");
    expect(error.style.display).not.toBe("none");
  });
});
