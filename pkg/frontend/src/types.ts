// Wire types for the advisory service. The form never hardcodes fields:
// everything renderable comes from GET /kb/vocabulary.

export type FieldKind = "enum" | "number" | "boolean" | "multi" | "history";

export interface FieldSpec {
  name: string;
  group: string;
  kind: FieldKind;
  options?: (string | number)[];
  recencies?: string[];
  units?: string;
}

export interface Vocabulary {
  treatments: string[];
  class_labels: string[];
  fact_predicates: [string, number][];
  derived_predicates: [string, number][];
  patient_fields: FieldSpec[];
}

export type PatientDoc = Record<string, unknown>;

export interface StoredPatient {
  id: string;
  record: PatientDoc;
  created_at: string;
  updated_at: string;
}

export interface Support {
  positive: string[];
  nafs: string[];
}

export interface RecommendationDoc {
  treatment: string;
  class: string;
  support: Support;
}

export interface WhatifResult {
  treatment: string;
  class: string;
  assumptions: { positive: string[]; negative: string[] };
  support: Support;
}

export interface ValidationIssue {
  field: string;
  message: string;
}
