/**
 * Wire types for the texture HTTP API.
 *
 * These mirror the server's JSON shapes exactly; the UI never invents
 * fields the server does not send.
 */

export type AttributeKind = "text" | "single_value" | "list" | "span_list" | "embedding";
export type DataType = "quantitative" | "categorical" | "temporal";

export interface AttributeInfo {
  name: string;
  kind: AttributeKind;
  data_type?: DataType;
  span_source?: string;
  dimension?: number;
  has_projection?: boolean;
  null_count?: number;
}

export interface DatasetListing {
  name: string;
  n_docs: number;
  n_attributes: number;
}

export interface SchemaResponse {
  dataset: { dataset_name?: string; attributes: AttributeInfo[] };
  n_docs: number;
  has_projection: boolean;
  derived_columns: Array<{ handle: string; label: string }>;
}

/** One entry of the selection list sent with every query. */
export interface ApiSelectionEntry {
  attribute?: string;
  op?: "in" | "range" | "contains" | "null";
  args?: Record<string, unknown>;
  derived_handle?: string;
  range?: [number, number];
}

export interface BarsSummary {
  type: "bars";
  attribute: string;
  rows: Array<[string | number, number]>;
  total_distinct: number;
}

export interface BinsSummary {
  type: "bins";
  attribute: string;
  edges: number[];
  counts: number[];
}

export interface SeriesSummary {
  type: "series";
  attribute: string;
  timestamps: Array<number | string>;
  counts: number[];
}

export type Summary = BarsSummary | BinsSummary | SeriesSummary;

export interface HighlightWire {
  attribute: string;
  range: [number, number];
}

export interface DocumentRowWire {
  doc_id: number;
  previews: Record<string, string>;
  values: Record<string, unknown>;
  highlights: HighlightWire[];
}

export interface DocumentPageWire {
  total_matching: number;
  offset: number;
  limit: number;
  sort: [string, string] | null;
  rows: DocumentRowWire[];
}

export interface ProjectionPoint {
  doc_id: number;
  x: number;
  y: number;
  selected: boolean;
  color_value?: unknown;
}

export interface DerivedColumnWire {
  handle: string;
  label: string;
}
