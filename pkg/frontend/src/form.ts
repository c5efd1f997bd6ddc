// Schema-driven patient form. Every widget comes from the vocabulary's
// patient_fields; all fields are optional (an absent value means unknown),
// and boolean fields are tri-state because an explicit "no" is evidence of
// absence, not silence.

import { FieldSpec, PatientDoc, ValidationIssue } from "./types";

interface FieldWidget {
  spec: FieldSpec;
  element: HTMLElement;
  getValue(): unknown;
  setValue(value: unknown): void;
  setError(message: string | null): void;
}

export interface PatientForm {
  element: HTMLElement;
  getValues(): PatientDoc;
  setValues(doc: PatientDoc): void;
  validate(): ValidationIssue[];
  showServiceIssues(issues: ValidationIssue[]): void;
  clearErrors(): void;
}

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

function label(spec: FieldSpec): HTMLElement {
  const text = spec.name.replace(/_/g, " ") + (spec.units ? ` (${spec.units})` : "");
  return el("label", "field-label", text);
}

function wrap(spec: FieldSpec, input: HTMLElement): { root: HTMLElement; error: HTMLElement } {
  const root = el("div", "field");
  root.dataset.field = spec.name;
  const error = el("span", "field-error");
  error.style.display = "none";
  root.append(label(spec), input, error);
  return { root, error };
}

function enumWidget(spec: FieldSpec): FieldWidget {
  const select = el("select");
  select.name = spec.name;
  select.append(el("option", undefined, ""));
  for (const option of spec.options ?? []) {
    const node = el("option", undefined, String(option));
    node.value = String(option);
    select.append(node);
  }
  const numeric = (spec.options ?? []).every((o) => typeof o === "number");
  const { root, error } = wrap(spec, select);
  return {
    spec,
    element: root,
    getValue: () =>
      select.value === "" ? undefined : numeric ? Number(select.value) : select.value,
    setValue: (value) => {
      select.value = value === undefined || value === null ? "" : String(value);
    },
    setError: (message) => showError(error, message),
  };
}

function numberWidget(spec: FieldSpec): FieldWidget {
  const input = el("input");
  input.name = spec.name;
  input.type = "number";
  input.step = "any";
  const { root, error } = wrap(spec, input);
  return {
    spec,
    element: root,
    getValue: () => (input.value.trim() === "" ? undefined : Number(input.value)),
    setValue: (value) => {
      input.value = value === undefined || value === null ? "" : String(value);
    },
    setError: (message) => showError(error, message),
  };
}

function booleanWidget(spec: FieldSpec): FieldWidget {
  const select = el("select");
  select.name = spec.name;
  for (const [value, text] of [["", "unknown"], ["yes", "yes"], ["no", "no"]]) {
    const node = el("option", undefined, text);
    node.value = value ?? "";
    select.append(node);
  }
  const { root, error } = wrap(spec, select);
  return {
    spec,
    element: root,
    getValue: () => (select.value === "" ? undefined : select.value === "yes"),
    setValue: (value) => {
      select.value = value === undefined || value === null ? "" : value ? "yes" : "no";
    },
    setError: (message) => showError(error, message),
  };
}

function multiWidget(spec: FieldSpec): FieldWidget {
  const box = el("div", "multi");
  const checkboxes = new Map<string, HTMLInputElement>();
  for (const option of spec.options ?? []) {
    const name = String(option);
    const item = el("label", "multi-item");
    const checkbox = el("input");
    checkbox.type = "checkbox";
    checkbox.value = name;
    item.append(checkbox, document.createTextNode(" " + name.replace(/_/g, " ")));
    checkboxes.set(name, checkbox);
    box.append(item);
  }
  const { root, error } = wrap(spec, box);
  return {
    spec,
    element: root,
    getValue: () => {
      const picked = [...checkboxes.entries()]
        .filter(([, cb]) => cb.checked)
        .map(([name]) => name);
      return picked.length ? picked : undefined;
    },
    setValue: (value) => {
      const picked = new Set((Array.isArray(value) ? value : []).map(String));
      for (const [name, cb] of checkboxes) cb.checked = picked.has(name);
    },
    setError: (message) => showError(error, message),
  };
}

function historyWidget(spec: FieldSpec): FieldWidget {
  let entries: [string, string][] = [];
  const box = el("div", "history");
  const condition = el("select");
  condition.append(el("option", undefined, ""));
  for (const option of spec.options ?? []) {
    const node = el("option", undefined, String(option).replace(/_/g, " "));
    node.value = String(option);
    condition.append(node);
  }
  const recency = el("select");
  for (const r of spec.recencies ?? []) {
    const node = el("option", undefined, r);
    node.value = r;
    recency.append(node);
  }
  recency.value = "unspecified";
  const add = el("button", "add-history", "add");
  add.type = "button";
  const list = el("ul", "history-list");

  const redraw = () => {
    list.textContent = "";
    entries.forEach(([c, r], index) => {
      const item = el("li", undefined, `${c.replace(/_/g, " ")} (${r}) `);
      const remove = el("button", "remove-history", "remove");
      remove.type = "button";
      remove.addEventListener("click", () => {
        entries.splice(index, 1);
        redraw();
      });
      item.append(remove);
      list.append(item);
    });
  };
  add.addEventListener("click", () => {
    if (condition.value === "") return;
    entries.push([condition.value, recency.value || "unspecified"]);
    condition.value = "";
    redraw();
  });
  box.append(condition, recency, add, list);
  const { root, error } = wrap(spec, box);
  return {
    spec,
    element: root,
    getValue: () => (entries.length ? entries.map((e) => [...e]) : undefined),
    setValue: (value) => {
      entries = [];
      for (const entry of Array.isArray(value) ? value : []) {
        if (typeof entry === "string") entries.push([entry, "unspecified"]);
        else if (Array.isArray(entry) && entry.length >= 1)
          entries.push([String(entry[0]), String(entry[1] ?? "unspecified")]);
      }
      redraw();
    },
    setError: (message) => showError(error, message),
  };
}

function showError(node: HTMLElement, message: string | null): void {
  node.textContent = message ?? "";
  node.style.display = message ? "inline" : "none";
}

function buildWidget(spec: FieldSpec): FieldWidget {
  switch (spec.kind) {
    case "enum":
      return enumWidget(spec);
    case "number":
      return numberWidget(spec);
    case "boolean":
      return booleanWidget(spec);
    case "multi":
      return multiWidget(spec);
    case "history":
      return historyWidget(spec);
  }
}

// Client-side mirror of the service's record validation; the service stays
// authoritative and its 422 details land on the same fields.
function localIssues(doc: PatientDoc): ValidationIssue[] {
  const issues: ValidationIssue[] = [];
  const lvef = doc.lvef;
  if (typeof lvef === "number" && (lvef < 0 || lvef > 1)) {
    issues.push({ field: "lvef", message: "must be within [0, 1]" });
  }
  for (const name of [
    "age",
    "weight",
    "creatinine",
    "potassium",
    "qrs_duration",
    "lbbb",
    "expectation_of_survival",
    "post_mi_days",
  ]) {
    const value = doc[name];
    if (typeof value === "number" && value < 0) {
      issues.push({ field: name, message: "must be >= 0" });
    }
  }
  return issues;
}

export function buildPatientForm(fields: FieldSpec[]): PatientForm {
  const root = el("form", "patient-form");
  root.addEventListener("submit", (event) => event.preventDefault());
  const widgets: FieldWidget[] = [];
  const groups = new Map<string, HTMLElement>();
  for (const spec of fields) {
    let section = groups.get(spec.group);
    if (!section) {
      section = el("fieldset", "group");
      section.append(el("legend", undefined, spec.group));
      groups.set(spec.group, section);
      root.append(section);
    }
    const widget = buildWidget(spec);
    widgets.push(widget);
    section.append(widget.element);
  }

  const byName = new Map(widgets.map((w) => [w.spec.name, w]));
  const form: PatientForm = {
    element: root,
    getValues: () => {
      const doc: PatientDoc = {};
      for (const widget of widgets) {
        const value = widget.getValue();
        if (value !== undefined) doc[widget.spec.name] = value;
      }
      return doc;
    },
    setValues: (doc) => {
      for (const widget of widgets) widget.setValue(doc[widget.spec.name]);
    },
    validate: () => {
      form.clearErrors();
      const issues = localIssues(form.getValues());
      form.showServiceIssues(issues);
      return issues;
    },
    showServiceIssues: (issues) => {
      for (const issue of issues) {
        byName.get(issue.field)?.setError(issue.message);
      }
    },
    clearErrors: () => {
      for (const widget of widgets) widget.setError(null);
    },
  };
  return form;
}
