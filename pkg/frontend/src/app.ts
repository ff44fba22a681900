/**
 * Orchestrator tying the views to the selection state.
 *
 * No optimistic updates: every interaction mutates the SelectionStore, then
 * issues one batched refresh (summaries + documents + projection) and all
 * views re-render from the responses, so they always reflect the same
 * selection. Stale responses (superseded selections) are discarded by
 * sequence number; a failed refresh restores the previous selection and
 * surfaces a toast.
 */

import { ApiClient } from "./api.js";
import { renderBarChart, renderHistogram, renderSeries } from "./charts.js";
import { renderDocumentTable } from "./documents.js";
import { renderProjection } from "./projection.js";
import { SelectionStore } from "./state.js";
import type {
  AttributeInfo,
  DerivedColumnWire,
  DocumentPageWire,
  ProjectionPoint,
  SchemaResponse,
  Summary,
} from "./types.js";
import { el } from "./util.js";

const PAGE_LIMIT = 50;
const TOAST_MS = 4000;

export class App {
  readonly selection = new SelectionStore();
  /** Resolves when the most recent interaction's refresh has settled. */
  settled: Promise<void> = Promise.resolve();

  private seq = 0;
  private schemaInfo: SchemaResponse | null = null;
  private attributes: AttributeInfo[] = [];
  private chartAttrs: string[] = [];
  private derived: DerivedColumnWire[] = [];
  private sort: [string, string] | null = null;
  private colorAttribute: string | null = null;
  private expanded = new Map<number, Record<string, unknown>>();

  private lastSummaries: Record<string, Summary> = {};
  private lastPage: DocumentPageWire | null = null;
  private lastPoints: ProjectionPoint[] | null = null;

  private sidebar: HTMLElement;
  private documentsPane: HTMLElement;
  private projectionPane: HTMLElement;
  private pillBar: HTMLElement;
  private toasts: HTMLElement;

  constructor(
    root: HTMLElement,
    private readonly api: ApiClient,
    private readonly dataset: string,
  ) {
    root.textContent = "";
    const topbar = el("div", "topbar");
    topbar.appendChild(this.buildSearchForm());
    this.pillBar = el("div", "pill-bar");
    topbar.appendChild(this.pillBar);
    root.appendChild(topbar);

    const main = el("div", "main");
    this.sidebar = el("aside", "sidebar");
    this.documentsPane = el("section", "documents-pane");
    this.projectionPane = el("aside", "projection-pane");
    main.appendChild(this.sidebar);
    main.appendChild(this.documentsPane);
    main.appendChild(this.projectionPane);
    root.appendChild(main);

    this.toasts = el("div", "toasts");
    root.appendChild(this.toasts);
  }

  async init(): Promise<void> {
    this.schemaInfo = await this.api.schema(this.dataset);
    this.attributes = this.schemaInfo.dataset.attributes;
    this.chartAttrs = this.attributes
      .filter((a) => a.kind !== "text" && a.kind !== "embedding")
      .map((a) => a.name);
    this.derived = this.schemaInfo.derived_columns.slice();
    await this.refresh();
  }

  /** Mutate the selection (or sort) and refresh; on failure the previous
   * state is restored and the views keep their prior contents. */
  update(mutate: () => void): Promise<void> {
    const snapshot = this.selection.snapshot();
    const prevSort = this.sort;
    mutate();
    this.settled = this.refresh().catch((err) => {
      this.selection.restore(snapshot);
      this.sort = prevSort;
      this.toast(err instanceof Error ? err.message : String(err));
    });
    return this.settled;
  }

  async refresh(): Promise<void> {
    const seq = ++this.seq;
    const selection = this.selection.toApi();
    const attrs = [...this.chartAttrs, ...this.derived.map((d) => d.handle)];
    const requests: [
      Promise<Record<string, Summary>>,
      Promise<DocumentPageWire>,
      Promise<ProjectionPoint[] | null>,
    ] = [
      this.api.summaries(this.dataset, { selection, attributes: attrs }),
      this.api.documents(this.dataset, { selection, sort: this.sort, offset: 0, limit: PAGE_LIMIT }),
      this.schemaInfo?.has_projection
        ? this.api.projection(this.dataset, { selection, color_attribute: this.colorAttribute })
        : Promise.resolve(null),
    ];
    const [summaries, page, points] = await Promise.all(requests);
    if (seq !== this.seq) return; // superseded by a newer interaction
    this.lastSummaries = summaries;
    this.lastPage = page;
    this.lastPoints = points;
    this.renderAll();
  }

  // -- rendering ------------------------------------------------------------

  private renderAll(): void {
    this.renderSidebar();
    this.renderPills();
    this.renderDocuments();
    this.renderProjectionPane();
  }

  private renderSidebar(): void {
    this.sidebar.textContent = "";
    const ordered = [...this.chartAttrs, ...this.derived.map((d) => d.handle)];
    for (const attr of ordered) {
      const summary = this.lastSummaries[attr];
      if (!summary) continue;
      const block = el("div", "chart-block");
      const derived = this.derived.find((d) => d.handle === attr);
      block.appendChild(el("h3", "chart-title", derived ? derived.label : attr));
      block.appendChild(this.renderChart(attr, summary));
      this.sidebar.appendChild(block);
    }
  }

  private renderChart(attr: string, summary: Summary): HTMLElement {
    if (summary.type === "bars") {
      return renderBarChart(summary, {
        isSelected: (v) => this.selection.isValueSelected(attr, v),
        onToggle: (v) => void this.update(() => this.selection.toggleValue(attr, v)),
      });
    }
    const derived = this.derived.some((d) => d.handle === attr);
    if (summary.type === "bins") {
      const pred = this.selection.get(attr);
      const brush: [number, number] | null =
        pred && (pred.kind === "range" || pred.kind === "derived")
          ? [Number(pred.lo), Number(pred.hi)]
          : null;
      return renderHistogram(summary, {
        brush,
        onBrush: (lo, hi) =>
          void this.update(() => {
            if (lo === null || hi === null) this.selection.clear(attr);
            else if (derived) this.selection.setDerivedRange(attr, lo, hi);
            else this.selection.setRange(attr, lo, hi);
          }),
      });
    }
    const pred = this.selection.get(attr);
    const brush: [number | string, number | string] | null =
      pred && pred.kind === "range" && pred.lo !== null && pred.hi !== null
        ? [pred.lo, pred.hi]
        : null;
    return renderSeries(summary, {
      brush,
      onBrush: (lo, hi) =>
        void this.update(() => {
          if (lo === null || hi === null) this.selection.clear(attr);
          else this.selection.setRange(attr, lo, hi);
        }),
    });
  }

  private renderPills(): void {
    this.pillBar.textContent = "";
    for (const pill of this.selection.pills()) {
      const node = el("span", "pill");
      node.dataset.attr = pill.attribute;
      node.appendChild(el("span", "pill-label", pill.label));
      const remove = el("button", "pill-remove", "×");
      remove.addEventListener("click", () =>
        void this.update(() => this.selection.clear(pill.attribute)),
      );
      node.appendChild(remove);
      this.pillBar.appendChild(node);
    }
  }

  private renderDocuments(): void {
    if (!this.lastPage) return;
    this.documentsPane.textContent = "";
    this.documentsPane.appendChild(
      renderDocumentTable(this.lastPage, {
        attributes: this.attributes,
        derivedHandles: this.derived,
        sort: this.sort,
        expanded: this.expanded,
        pills: this.selection.pills(),
        onSort: (attr) => void this.update(() => this.toggleSort(attr)),
        onExpand: (docId) => void this.expandRow(docId),
        onCollapse: (docId) => {
          this.expanded.delete(docId);
          this.renderDocuments();
        },
        onShowSimilar: (docId) => void this.showSimilar(docId),
      }),
    );
  }

  private renderProjectionPane(): void {
    this.projectionPane.textContent = "";
    if (!this.schemaInfo?.has_projection || this.lastPoints === null) {
      this.projectionPane.appendChild(
        el("p", "projection-note", "No embedding in this dataset; projection unavailable."),
      );
      return;
    }
    this.projectionPane.appendChild(
      renderProjection(this.lastPoints, {
        colorAttribute: this.colorAttribute,
        colorChoices: this.attributes.filter((a) => a.kind === "single_value"),
        onColorChange: (attr) => {
          this.colorAttribute = attr;
          this.settled = this.refresh().catch((err) => this.toast(String(err)));
        },
        onRegionSelect: (ids) => void this.update(() => this.selection.setDocIds(ids)),
      }),
    );
  }

  // -- interactions ---------------------------------------------------------

  private buildSearchForm(): HTMLElement {
    const form = el("form", "search-form");
    const input = el("input", "search-input") as HTMLInputElement;
    input.setAttribute("placeholder", "search text…");
    form.appendChild(input);
    form.appendChild(el("button", "search-submit", "search"));
    form.addEventListener("submit", (ev) => {
      ev.preventDefault();
      const query = input.value.trim();
      if (query === "") return; // empty submit is a no-op
      const textAttr = this.attributes.find((a) => a.kind === "text")?.name;
      if (!textAttr) return;
      void this.update(() => this.selection.setContains(textAttr, query));
    });
    return form;
  }

  private toggleSort(attr: string): void {
    if (this.sort && this.sort[0] === attr) {
      this.sort = [attr, this.sort[1] === "asc" ? "desc" : "asc"];
    } else {
      this.sort = [attr, "asc"];
    }
  }

  private async expandRow(docId: number): Promise<void> {
    try {
      const body = await this.api.document(this.dataset, docId);
      this.expanded.set(docId, body.record);
      this.renderDocuments();
    } catch (err) {
      this.toast(err instanceof Error ? err.message : String(err));
    }
  }

  /** Register a similarity column, then sort by it ascending so the anchor
   * document (distance 0) rises to the top; its histogram joins the sidebar. */
  private showSimilar(docId: number): Promise<void> {
    this.settled = (async () => {
      try {
        const col = await this.api.similarity(this.dataset, { mode: "instance", doc_id: docId });
        if (!this.derived.some((d) => d.handle === col.handle)) {
          this.derived.push(col);
        }
        this.sort = [col.handle, "asc"];
        await this.refresh();
      } catch (err) {
        this.toast(err instanceof Error ? err.message : String(err));
      }
    })();
    return this.settled;
  }

  private toast(message: string): void {
    const node = el("div", "toast", message);
    this.toasts.appendChild(node);
    setTimeout(() => node.remove(), TOAST_MS);
  }
}
