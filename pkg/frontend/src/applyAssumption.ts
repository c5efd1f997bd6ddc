// Turns a positive abduced assumption (an atom in wire form) back into a
// patient-document edit, the inverse of the service's fact emission. Only
// vocabulary-known fields are produced; anything else is unmappable and
// the explorer offers no apply action for it.

import { parseAtom } from "./atoms";
import { FieldSpec, PatientDoc } from "./types";

const MEASUREMENT_FIELDS = new Set([
  "weight",
  "creatinine",
  "potassium",
  "lvef",
  "qrs_duration",
  "lbbb",
]);

function fieldByName(fields: FieldSpec[], name: string): FieldSpec | undefined {
  return fields.find((f) => f.name === name);
}

function pushUnique(list: unknown, value: unknown): unknown[] {
  const array = Array.isArray(list) ? [...list] : [];
  const key = JSON.stringify(value);
  if (!array.some((v) => JSON.stringify(v) === key)) array.push(value);
  return array;
}

export function applyAssumption(
  doc: PatientDoc,
  atomText: string,
  fields: FieldSpec[],
): PatientDoc | null {
  const atom = parseAtom(atomText);
  if (!atom || atom.predicate.startsWith("-")) return null;
  const next: PatientDoc = { ...doc };
  const { predicate, args } = atom;

  if (predicate === "accf_stage" && args.length === 1) {
    next.stage = args[0];
    return next;
  }
  if (predicate === "nyha_class" && args.length === 1) {
    next.nyha_class = Number(args[0]);
    return next;
  }
  if ((predicate === "gender" || predicate === "race") && args.length === 1) {
    next[predicate] = args[0];
    return next;
  }
  if (predicate === "age" && args.length === 1) {
    next.age = Number(args[0]);
    return next;
  }
  if (predicate === "expectation_of_survival" && args.length === 1) {
    next.expectation_of_survival = Number(args[0]);
    return next;
  }
  if (predicate === "post_mi" && args.length === 1) {
    next.post_mi_days = Number(args[0]);
    return next;
  }
  if (predicate === "measurement" && args.length === 1 && args[0] === "sinus_rhythm") {
    next.sinus_rhythm = true;
    return next;
  }
  if (predicate === "measurement" && args.length === 2) {
    const name = args[0]!;
    if (MEASUREMENT_FIELDS.has(name) && fieldByName(fields, name)) {
      next[name] = Number(args[1]);
      return next;
    }
    return null;
  }
  if (predicate === "diagnosis" && args.length === 1) {
    next.diagnoses = pushUnique(doc.diagnoses, args[0]);
    return next;
  }
  if (predicate === "evidence" && args.length === 1) {
    next.evidences = pushUnique(doc.evidences, args[0]);
    return next;
  }
  if (predicate === "history" && args.length >= 1) {
    const entry = [args[0], args[1] ?? "unspecified"];
    next.histories = pushUnique(doc.histories, entry);
    return next;
  }
  const flag = fieldByName(fields, predicate);
  if (flag && flag.kind === "boolean" && args.length === 0) {
    next[predicate] = true;
    return next;
  }
  return null;
}
