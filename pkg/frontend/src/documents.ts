/**
 * Central document table: previews with span highlights, expand/collapse,
 * sort controls on single-value and derived columns, show-similar buttons,
 * and an empty state that still lists the active filter pills.
 */

import type { AttributeInfo, DocumentPageWire, DocumentRowWire, HighlightWire } from "./types.js";
import type { Pill } from "./state.js";
import { el } from "./util.js";

export interface DocumentTableOptions {
  /** Attribute metadata, used to map highlight attributes to the text
   * attribute their offsets index into (span_source). */
  attributes: AttributeInfo[];
  derivedHandles: Array<{ handle: string; label: string }>;
  sort: [string, string] | null;
  expanded: Map<number, Record<string, unknown>>;
  pills: Pill[];
  onSort(attribute: string): void;
  onExpand(docId: number): void;
  onCollapse(docId: number): void;
  onShowSimilar(docId: number): void;
}

/** start/end pairs, merged and clamped to the rendered text's length.
 * Out-of-range offsets are clamped (never crash rendering) and logged. */
export function clampAndMerge(
  ranges: Array<[number, number]>,
  textLength: number,
): Array<[number, number]> {
  const clamped: Array<[number, number]> = [];
  for (const [start, end] of ranges) {
    if (start >= textLength) {
      console.warn(`highlight [${start}, ${end}) outside text of length ${textLength}`);
      continue;
    }
    const s = Math.max(0, start);
    const e = Math.min(end, textLength);
    if (e > s) clamped.push([s, e]);
    if (end > textLength || start < 0) {
      console.warn(`highlight [${start}, ${end}) clamped to [${s}, ${e})`);
    }
  }
  clamped.sort((a, b) => a[0] - b[0] || a[1] - b[1]);
  const merged: Array<[number, number]> = [];
  for (const r of clamped) {
    const last = merged[merged.length - 1];
    if (last && r[0] <= last[1]) {
      last[1] = Math.max(last[1], r[1]);
    } else {
      merged.push([r[0], r[1]]);
    }
  }
  return merged;
}

/** Text with <mark> elements over the given ranges. */
export function renderHighlightedText(text: string, ranges: Array<[number, number]>): HTMLElement {
  const container = el("span", "doc-text");
  const merged = clampAndMerge(ranges, text.length);
  let cursor = 0;
  for (const [start, end] of merged) {
    if (start > cursor) {
      container.appendChild(document.createTextNode(text.slice(cursor, start)));
    }
    const mark = document.createElement("mark");
    mark.textContent = text.slice(start, end);
    container.appendChild(mark);
    cursor = end;
  }
  if (cursor < text.length) {
    container.appendChild(document.createTextNode(text.slice(cursor)));
  }
  return container;
}

/** Highlight offsets index into the span-list's source text attribute (or
 * the text attribute itself for substring matches). */
function highlightTarget(attribute: string, attributes: AttributeInfo[]): string {
  const info = attributes.find((a) => a.name === attribute);
  return info?.span_source ?? attribute;
}

function rangesFor(
  textAttr: string,
  highlights: HighlightWire[],
  attributes: AttributeInfo[],
): Array<[number, number]> {
  return highlights
    .filter((h) => highlightTarget(h.attribute, attributes) === textAttr)
    .map((h) => h.range);
}

function formatValue(v: unknown): string {
  if (v === null || v === undefined) return "∅";
  if (typeof v === "number" && !Number.isInteger(v)) return v.toPrecision(3);
  return String(v);
}

export function renderDocumentTable(
  page: DocumentPageWire,
  opts: DocumentTableOptions,
): HTMLElement {
  const root = el("div", "documents");
  const header = el("div", "documents-header");
  header.appendChild(el("span", "documents-total", `${page.total_matching} matching documents`));
  root.appendChild(header);

  if (page.rows.length === 0) {
    const empty = el("div", "documents-empty");
    empty.appendChild(el("p", undefined, "No documents match the current filters."));
    const pillList = el("div", "empty-pills");
    for (const pill of opts.pills) {
      pillList.appendChild(el("span", "pill", pill.label));
    }
    empty.appendChild(pillList);
    root.appendChild(empty);
    return root;
  }

  const table = el("table", "doc-table");
  const thead = el("thead");
  const headRow = el("tr");
  headRow.appendChild(el("th", undefined, "doc"));
  headRow.appendChild(el("th", undefined, "text"));
  const singleValue = opts.attributes.filter((a) => a.kind === "single_value");
  const sortable: Array<{ name: string; label: string }> = [
    ...singleValue.map((a) => ({ name: a.name, label: a.name })),
    ...opts.derivedHandles.map((d) => ({ name: d.handle, label: d.label })),
  ];
  for (const col of sortable) {
    const th = el("th", "sortable", col.label);
    th.dataset.attr = col.name;
    if (opts.sort && opts.sort[0] === col.name) {
      th.classList.add("sorted");
      th.textContent = `${col.label} ${opts.sort[1] === "asc" ? "↑" : "↓"}`;
    }
    th.addEventListener("click", () => opts.onSort(col.name));
    headRow.appendChild(th);
  }
  headRow.appendChild(el("th"));
  thead.appendChild(headRow);
  table.appendChild(thead);

  const tbody = el("tbody");
  const textAttrs = opts.attributes.filter((a) => a.kind === "text").map((a) => a.name);
  for (const row of page.rows) {
    tbody.appendChild(renderRow(row, textAttrs, sortable, opts));
  }
  table.appendChild(tbody);
  root.appendChild(table);
  return root;
}

function renderRow(
  row: DocumentRowWire,
  textAttrs: string[],
  sortable: Array<{ name: string; label: string }>,
  opts: DocumentTableOptions,
): HTMLElement {
  const tr = el("tr", "doc-row");
  tr.dataset.docId = String(row.doc_id);
  tr.appendChild(el("td", "doc-id", String(row.doc_id)));

  const textCell = el("td", "doc-preview");
  const expandedRecord = opts.expanded.get(row.doc_id);
  for (const attr of textAttrs) {
    const block = el("div", "doc-text-block");
    block.dataset.attr = attr;
    if (expandedRecord !== undefined) {
      const full = String(expandedRecord[attr] ?? "");
      block.appendChild(renderHighlightedText(full, rangesFor(attr, row.highlights, opts.attributes)));
    } else {
      const preview = row.previews[attr] ?? "";
      block.appendChild(
        renderHighlightedText(preview, rangesFor(attr, row.highlights, opts.attributes)),
      );
    }
    textCell.appendChild(block);
  }
  tr.appendChild(textCell);

  for (const col of sortable) {
    tr.appendChild(el("td", "doc-value", formatValue(row.values[col.name])));
  }

  const actions = el("td", "doc-actions");
  const expandBtn = el("button", "expand-btn", expandedRecord !== undefined ? "collapse" : "expand");
  expandBtn.addEventListener("click", () =>
    expandedRecord !== undefined ? opts.onCollapse(row.doc_id) : opts.onExpand(row.doc_id),
  );
  actions.appendChild(expandBtn);
  const similarBtn = el("button", "similar-btn", "show similar");
  similarBtn.addEventListener("click", () => opts.onShowSimilar(row.doc_id));
  actions.appendChild(similarBtn);
  tr.appendChild(actions);
  return tr;
}
