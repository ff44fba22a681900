/**
 * Client-side selection state: at most one active predicate per attribute
 * (the derived-column brush keyed by its handle, the projection region by
 * the "doc_id" pseudo-attribute). Serializes to the API's selection list.
 */

import type { ApiSelectionEntry } from "./types.js";

export const DOC_ID_ATTRIBUTE = "doc_id";

export type Predicate =
  | { kind: "values"; attribute: string; values: Array<string | number> }
  | {
      kind: "range";
      attribute: string;
      lo: number | string | null;
      hi: number | string | null;
    }
  | { kind: "contains"; attribute: string; query: string }
  | { kind: "derived"; attribute: string; lo: number; hi: number };

export interface Pill {
  attribute: string;
  label: string;
}

export class SelectionStore {
  private predicates = new Map<string, Predicate>();

  /** Bar clicks accumulate into a value set; re-clicking a selected value
   * removes it, and an emptied set clears the predicate entirely. */
  toggleValue(attribute: string, value: string | number): void {
    const existing = this.predicates.get(attribute);
    let values: Array<string | number> =
      existing?.kind === "values" ? existing.values.slice() : [];
    const at = values.indexOf(value);
    if (at >= 0) {
      values.splice(at, 1);
    } else {
      values.push(value);
    }
    if (values.length === 0) {
      this.predicates.delete(attribute);
    } else {
      this.predicates.set(attribute, { kind: "values", attribute, values });
    }
  }

  /** A brush replaces any prior range on the attribute. */
  setRange(attribute: string, lo: number | string | null, hi: number | string | null): void {
    if (lo === null && hi === null) {
      this.predicates.delete(attribute);
      return;
    }
    this.predicates.set(attribute, { kind: "range", attribute, lo, hi });
  }

  setContains(attribute: string, query: string): void {
    if (query === "") {
      this.predicates.delete(attribute);
      return;
    }
    this.predicates.set(attribute, { kind: "contains", attribute, query });
  }

  /** Projection region selection as an explicit document-id set. */
  setDocIds(docIds: number[] | null): void {
    if (docIds === null || docIds.length === 0) {
      this.predicates.delete(DOC_ID_ATTRIBUTE);
      return;
    }
    this.predicates.set(DOC_ID_ATTRIBUTE, {
      kind: "values",
      attribute: DOC_ID_ATTRIBUTE,
      values: docIds.slice().sort((a, b) => a - b),
    });
  }

  setDerivedRange(handle: string, lo: number, hi: number): void {
    this.predicates.set(handle, { kind: "derived", attribute: handle, lo, hi });
  }

  clear(attribute: string): void {
    this.predicates.delete(attribute);
  }

  clearAll(): void {
    this.predicates.clear();
  }

  get(attribute: string): Predicate | undefined {
    return this.predicates.get(attribute);
  }

  isValueSelected(attribute: string, value: string | number): boolean {
    const pred = this.predicates.get(attribute);
    return pred?.kind === "values" && pred.values.includes(value);
  }

  get size(): number {
    return this.predicates.size;
  }

  /** Snapshot/restore support so a failed request can leave state intact. */
  snapshot(): Map<string, Predicate> {
    return new Map(this.predicates);
  }

  restore(snapshot: Map<string, Predicate>): void {
    this.predicates = new Map(snapshot);
  }

  toApi(): ApiSelectionEntry[] {
    const entries: ApiSelectionEntry[] = [];
    for (const pred of this.predicates.values()) {
      switch (pred.kind) {
        case "values":
          entries.push({ attribute: pred.attribute, op: "in", args: { values: pred.values } });
          break;
        case "range":
          entries.push({
            attribute: pred.attribute,
            op: "range",
            args: { lo: pred.lo, hi: pred.hi },
          });
          break;
        case "contains":
          entries.push({
            attribute: pred.attribute,
            op: "contains",
            args: { query: pred.query },
          });
          break;
        case "derived":
          entries.push({ derived_handle: pred.attribute, range: [pred.lo, pred.hi] });
          break;
      }
    }
    return entries;
  }

  /** One pill per active predicate, in insertion order. */
  pills(): Pill[] {
    const pills: Pill[] = [];
    for (const pred of this.predicates.values()) {
      pills.push({ attribute: pred.attribute, label: describePredicate(pred) });
    }
    return pills;
  }
}

export function describePredicate(pred: Predicate): string {
  switch (pred.kind) {
    case "values":
      if (pred.attribute === DOC_ID_ATTRIBUTE) {
        return `projection: ${pred.values.length} docs`;
      }
      return `${pred.attribute}: ${pred.values.join(", ")}`;
    case "range":
      return `${pred.attribute}: ${pred.lo ?? "…"} – ${pred.hi ?? "…"}`;
    case "contains":
      return `${pred.attribute} contains "${pred.query}"`;
    case "derived":
      return `${pred.attribute}: ${formatNumber(pred.lo)} – ${formatNumber(pred.hi)}`;
  }
}

export function formatNumber(v: number): string {
  if (Number.isInteger(v)) return String(v);
  return v.toPrecision(3);
}
