// Console wiring: one patient at a time. Save the form (POST first, PUT
// afterwards, last write wins with a warning when someone else bumped
// updated_at), show recommendations, explore what-ifs. Applying an
// assumption performs exactly one PUT and one recommendations refetch.

import { ApiClient, ApiError } from "./api";
import { buildPatientForm, PatientForm } from "./form";
import { renderRecommendations } from "./recommendations";
import { buildWhatifPanel, WhatifPanel } from "./whatif";
import { PatientDoc } from "./types";

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

export interface Console {
  root: HTMLElement;
  form: PatientForm;
  whatif: WhatifPanel;
  patientId: string | null;
  savePatient(): Promise<string | null>;
  refreshRecommendations(): Promise<void>;
  recommendationsPanel: HTMLElement;
  banner: HTMLElement;
}

export async function mountConsole(
  container: HTMLElement,
  api: ApiClient,
): Promise<Console> {
  const banner = el("div", "banner");
  banner.style.display = "none";
  const showBanner = (message: string, kind: "error" | "warning") => {
    banner.textContent = message;
    banner.className = `banner banner-${kind}`;
    banner.style.display = "block";
  };
  const clearBanner = () => {
    banner.style.display = "none";
  };

  const vocab = await api.vocabulary();
  const form = buildPatientForm(vocab.patient_fields);
  const save = el("button", "save-patient", "save patient");
  save.type = "button";
  const recommendationsPanel = el("div", "recommendations");
  let lastSeenUpdatedAt: string | null = null;

  const state: Console = {
    root: container,
    form,
    whatif: undefined as unknown as WhatifPanel,
    patientId: null,
    recommendationsPanel,
    banner,
    async savePatient() {
      clearBanner();
      form.clearErrors();
      const issues = form.validate();
      if (issues.length) return null;
      const doc = form.getValues();
      try {
        if (state.patientId === null) {
          const { id } = await api.createPatient(doc);
          state.patientId = id;
          lastSeenUpdatedAt = (await api.getPatient(id)).updated_at;
        } else {
          const current = await api.getPatient(state.patientId);
          if (lastSeenUpdatedAt !== null && current.updated_at !== lastSeenUpdatedAt) {
            showBanner(
              "Record changed elsewhere; your version overwrote it.",
              "warning",
            );
          }
          const stored = await api.putPatient(state.patientId, doc);
          lastSeenUpdatedAt = stored.updated_at;
        }
        return state.patientId;
      } catch (error) {
        if (error instanceof ApiError && error.issues.length) {
          form.showServiceIssues(error.issues);
        } else {
          showBanner(`Service error: ${(error as Error).message}`, "error");
        }
        return null;
      }
    },
    async refreshRecommendations() {
      if (state.patientId === null) return;
      try {
        const recommendations = await api.recommendations(state.patientId);
        renderRecommendations(recommendationsPanel, recommendations);
      } catch (error) {
        showBanner(`Service error: ${(error as Error).message}`, "error");
      }
    },
  };

  const whatif = buildWhatifPanel(vocab, {
    query: (treatment, cls) => {
      if (state.patientId === null) {
        return Promise.reject(new Error("save the patient first"));
      }
      return api.whatif(state.patientId, treatment, cls);
    },
    currentRecord: () => form.getValues(),
    // The feedback loop: one PUT, one recommendations refetch.
    applyEdit: async (doc: PatientDoc) => {
      if (state.patientId === null) throw new Error("save the patient first");
      const stored = await api.putPatient(state.patientId, doc);
      lastSeenUpdatedAt = stored.updated_at;
      form.setValues(stored.record);
      const recommendations = await api.recommendations(state.patientId);
      renderRecommendations(recommendationsPanel, recommendations);
    },
    onError: (error) =>
      showBanner(`Service error: ${(error as Error).message}`, "error"),
  });
  state.whatif = whatif;

  save.addEventListener("click", async () => {
    const id = await state.savePatient();
    if (id !== null) await state.refreshRecommendations();
  });

  const left = el("div", "pane pane-form");
  left.append(el("h2", undefined, "Patient"), form.element, save);
  const right = el("div", "pane pane-results");
  right.append(el("h2", undefined, "Recommendations"), recommendationsPanel, whatif.element);
  container.append(banner, left, right);
  return state;
}
