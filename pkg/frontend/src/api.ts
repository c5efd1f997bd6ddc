import {
  PatientDoc,
  RecommendationDoc,
  StoredPatient,
  ValidationIssue,
  Vocabulary,
  WhatifResult,
} from "./types";

export class ApiError extends Error {
  constructor(
    public status: number,
    public issues: ValidationIssue[],
    message: string,
  ) {
    super(message);
  }
}

type FetchLike = typeof fetch;

export class ApiClient {
  constructor(
    private base: string = "/api",
    private fetchImpl: FetchLike = (...args) => fetch(...args),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchImpl(this.base + path, {
      method,
      headers: body === undefined ? {} : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      let issues: ValidationIssue[] = [];
      let message = `${method} ${path} failed with ${response.status}`;
      try {
        const payload = await response.json();
        if (Array.isArray(payload.detail)) {
          issues = payload.detail;
          message = issues.map((i) => `${i.field}: ${i.message}`).join("; ");
        } else if (typeof payload.detail === "string") {
          message = payload.detail;
        }
      } catch {
        // keep the generic message
      }
      throw new ApiError(response.status, issues, message);
    }
    return (await response.json()) as T;
  }

  vocabulary(): Promise<Vocabulary> {
    return this.request("GET", "/kb/vocabulary");
  }

  createPatient(doc: PatientDoc): Promise<{ id: string }> {
    return this.request("POST", "/patients", doc);
  }

  getPatient(id: string): Promise<StoredPatient> {
    return this.request("GET", `/patients/${id}`);
  }

  putPatient(id: string, doc: PatientDoc): Promise<StoredPatient> {
    return this.request("PUT", `/patients/${id}`, doc);
  }

  recommendations(id: string, limit = 10): Promise<RecommendationDoc[]> {
    return this.request("GET", `/patients/${id}/recommendations?limit=${limit}`);
  }

  whatif(id: string, treatment: string, cls: string): Promise<WhatifResult[]> {
    return this.request("POST", `/patients/${id}/whatif`, {
      treatment,
      class: cls,
    });
  }
}
