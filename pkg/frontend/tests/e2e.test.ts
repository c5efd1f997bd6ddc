// End-to-end: the console against the live advisory service. The reference
// for the recommendation list is the CLI run on the same patient document.

import { spawnSync } from "node:child_process";
import { readFileSync } from "node:fs";
import { join } from "node:path";
import { beforeEach, describe, expect, inject, it } from "vitest";

import { ApiClient } from "../src/api";
import { mountConsole, Console } from "../src/app";
import { PatientDoc } from "../src/types";

const API_BASE = inject("apiBase");
const REPO_ROOT = inject("repoRoot");

interface Call {
  method: string;
  path: string;
}

function trackingClient(): { api: ApiClient; calls: Call[] } {
  const calls: Call[] = [];
  const api = new ApiClient(API_BASE, (input, init) => {
    const url = typeof input === "string" ? input : (input as Request).url;
    calls.push({
      method: init?.method ?? "GET",
      path: url.replace(API_BASE, "").split("?")[0]!,
    });
    return fetch(input as RequestInfo, init);
  });
  return { api, calls };
}

function caseStudyDoc(): PatientDoc {
  return JSON.parse(
    readFileSync(join(REPO_ROOT, "data", "case_study_patient.json"), "utf-8"),
  );
}

function cliRecommendations(): [string, string][] {
  const proc = spawnSync(
    "python3",
    [
      "-m",
      "hfadvisor.cli",
      "recommend",
      "--patient",
      join(REPO_ROOT, "data", "case_study_patient.json"),
      "--format",
      "json-lines",
    ],
    { cwd: REPO_ROOT, encoding: "utf-8" },
  );
  expect(proc.status).toBe(0);
  return proc.stdout
    .trim()
    .split("\n")
    .map((line) => JSON.parse(line))
    .map((rec) => [rec.treatment, rec.class]);
}

async function mount(): Promise<{ ui: Console; calls: Call[] }> {
  document.body.innerHTML = "";
  const host = document.createElement("div");
  document.body.append(host);
  const { api, calls } = trackingClient();
  const ui = await mountConsole(host, api);
  return { ui, calls };
}

function cardKeys(ui: Console): [string, string][] {
  return [...ui.recommendationsPanel.querySelectorAll<HTMLElement>(
    ".recommendation-card",
  )].map((card) => [card.dataset.treatment!, card.dataset.class!]);
}

describe("console against the live service", () => {
  beforeEach(() => {
    document.body.innerHTML = "";
  });

  it("renders the form entirely from the service vocabulary", async () => {
    const { ui } = await mount();
    const vocabulary = await new ApiClient(API_BASE).vocabulary();
    const rendered = [...ui.form.element.querySelectorAll<HTMLElement>(".field")].map(
      (node) => node.dataset.field,
    );
    expect(rendered).toEqual(vocabulary.patient_fields.map((f) => f.name));
    const groups = [...ui.form.element.querySelectorAll("legend")].map(
      (node) => node.textContent,
    );
    expect(groups).toEqual([
      "Demographics",
      "Measurements",
      "Diseases and Symptoms",
      "Miscellany",
    ]);
  });

  it("case-study patient entered through the form matches the CLI", async () => {
    const { ui } = await mount();
    ui.form.setValues(caseStudyDoc());
    const id = await ui.savePatient();
    expect(id).not.toBeNull();
    await ui.refreshRecommendations();

    const fromCli = cliRecommendations();
    expect(cardKeys(ui)).toEqual(fromCli);
    expect(fromCli.map(([t]) => t)).toContain("sodium_restriction");
    expect(fromCli.map(([t]) => t)).toContain("ace_inhibitors");

    const ace = ui.recommendationsPanel.querySelector<HTMLElement>(
      '[data-treatment="ace_inhibitors"]',
    )!;
    const supportText = ace.querySelector(".support")!.textContent!;
    expect(supportText).toContain("recommendation(beta_blockers, class_1)");
    expect(supportText).toContain("not pregnancy");
  });

  it("stored record round-trips through the form", async () => {
    const { ui } = await mount();
    ui.form.setValues(caseStudyDoc());
    const entered = ui.form.getValues();
    const id = await ui.savePatient();
    const stored = await new ApiClient(API_BASE).getPatient(id!);
    ui.form.setValues(stored.record);
    const reloaded = ui.form.getValues();
    // numbers come back as exact-decimal strings; compare value-wise
    const normalize = (doc: PatientDoc) =>
      JSON.parse(
        JSON.stringify(doc, (_key, value) =>
          typeof value === "string" && /^-?\d+(\.\d+)?$/.test(value)
            ? Number(value)
            : value,
        ),
      );
    expect(normalize(reloaded)).toEqual(normalize(entered));
  });

  it("empty submissions are accepted and show the empty state", async () => {
    const { ui } = await mount();
    const id = await ui.savePatient();
    expect(id).not.toBeNull();
    await ui.refreshRecommendations();
    expect(ui.recommendationsPanel.textContent).toContain(
      "No treatment rules apply",
    );
  });

  it("inline validation blocks submission before any network call", async () => {
    const { ui, calls } = await mount();
    const baseline = calls.length;
    ui.form.setValues({ lvef: 1.5 });
    const id = await ui.savePatient();
    expect(id).toBeNull();
    expect(calls.length).toBe(baseline);
    const error = ui.form.element.querySelector<HTMLElement>(
      '[data-field="lvef"] .field-error',
    )!;
    expect(error.textContent).toContain("within [0, 1]");
  });

  it("what-if explorer abduces the missing history and applying it surfaces the treatment", async () => {
    const { ui, calls } = await mount();
    ui.form.setValues({
      stage: "c",
      hf_with_reduced_ef: true,
      nyha_class: 3,
      race: "african_american",
    });
    await ui.savePatient();

    ui.whatif.selectTreatment("hydralazine_and_isosorbide_dinitrate", "class_1");
    await ui.whatif.run();
    const panelText = ui.whatif.element.textContent!;
    expect(panelText).toContain(
      "would require: history of standard neurohormonal antagonist therapy",
    );
    expect(panelText).toContain(
      "would require absence of: contraindication of hydralazine and isosorbide dinitrate",
    );

    const apply = ui.whatif.element.querySelector<HTMLButtonElement>(
      '.apply-assumption[data-atom="history(standard_neurohormonal_antagonist_therapy)"]',
    )!;
    expect(apply).toBeTruthy();

    const before = calls.length;
    apply.click();
    await new Promise((resolve) => setTimeout(resolve, 1500));
    const during = calls.slice(before);
    expect(during.filter((c) => c.method === "PUT").length).toBe(1);
    expect(
      during.filter((c) => c.method === "GET" && c.path.endsWith("/recommendations"))
        .length,
    ).toBe(1);

    expect(
      ui.recommendationsPanel.querySelector(
        '[data-treatment="hydralazine_and_isosorbide_dinitrate"]',
      ),
    ).toBeTruthy();
    // and the applied assumption is now a real record entry in the form
    expect(JSON.stringify(ui.form.getValues().histories)).toContain(
      "standard_neurohormonal_antagonist_therapy",
    );
  });

  it("treatment without satisfiable preconditions shows the empty state", async () => {
    const { ui } = await mount();
    // stage d blocks every stage-c rule and no facts support blood pressure
    // control; nothing can be abduced for an impossible stage combination
    ui.form.setValues({ stage: "d" });
    await ui.savePatient();
    ui.whatif.selectTreatment("statin", "class_1");
    await ui.whatif.run();
    expect(ui.whatif.element.textContent).toContain(
      "No way to satisfy the preconditions",
    );
  });

  it("service failures surface as a banner, not a crash", async () => {
    document.body.innerHTML = "";
    const host = document.createElement("div");
    document.body.append(host);
    let vocabularyDone = false;
    const flaky = new ApiClient(API_BASE, (input, init) => {
      if (!vocabularyDone) {
        vocabularyDone = true;
        return fetch(input as RequestInfo, init);
      }
      return Promise.reject(new Error("connection refused"));
    });
    const ui = await mountConsole(host, flaky);
    ui.form.setValues({ stage: "c" });
    const id = await ui.savePatient();
    expect(id).toBeNull();
    expect(ui.banner.style.display).toBe("block");
    expect(ui.banner.textContent).toContain("Service error");
  });
});
