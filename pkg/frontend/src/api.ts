/**
 * Thin typed client for the texture service. Errors carry the server's
 * {code, message} payload so the UI can surface them verbatim.
 */

import type {
  ApiSelectionEntry,
  DatasetListing,
  DerivedColumnWire,
  DocumentPageWire,
  ProjectionPoint,
  SchemaResponse,
  Summary,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export interface SummariesBody {
  selection: ApiSelectionEntry[];
  attributes: string[];
  k?: number;
  bin_count?: number;
}

export interface DocumentsBody {
  selection: ApiSelectionEntry[];
  sort?: [string, string] | null;
  offset?: number;
  limit?: number;
}

export class ApiClient {
  constructor(private readonly baseUrl: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let resp: Response;
    try {
      resp = await fetch(this.baseUrl + path, init);
    } catch (err) {
      throw new ApiError(0, "network_error", String(err));
    }
    if (!resp.ok) {
      let code = "error";
      let message = `${resp.status} ${resp.statusText}`;
      try {
        const body = (await resp.json()) as { code?: string; message?: string };
        if (body.code) code = body.code;
        if (body.message) message = body.message;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(resp.status, code, message);
    }
    return (await resp.json()) as T;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  datasets(): Promise<DatasetListing[]> {
    return this.request("/datasets");
  }

  schema(dataset: string): Promise<SchemaResponse> {
    return this.request(`/datasets/${encodeURIComponent(dataset)}/schema`);
  }

  summaries(dataset: string, body: SummariesBody): Promise<Record<string, Summary>> {
    return this.post(`/datasets/${encodeURIComponent(dataset)}/summaries`, body);
  }

  documents(dataset: string, body: DocumentsBody): Promise<DocumentPageWire> {
    return this.post(`/datasets/${encodeURIComponent(dataset)}/documents`, body);
  }

  document(dataset: string, docId: number): Promise<{ doc_id: number; record: Record<string, unknown> }> {
    return this.request(`/datasets/${encodeURIComponent(dataset)}/documents/${docId}`);
  }

  similarity(
    dataset: string,
    body: { mode: "instance"; doc_id: number } | { mode: "query"; text: string },
  ): Promise<DerivedColumnWire> {
    return this.post(`/datasets/${encodeURIComponent(dataset)}/similarity`, body);
  }

  projection(
    dataset: string,
    body: { selection: ApiSelectionEntry[]; color_attribute?: string | null },
  ): Promise<ProjectionPoint[]> {
    return this.post(`/datasets/${encodeURIComponent(dataset)}/projection`, body);
  }
}
