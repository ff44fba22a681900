"""Read-only query engine over a NormalizedStore.

Selections are conjunctions of per-attribute predicates. Predicates on main
table columns filter documents directly; predicates on list-like attributes
become semi-join clauses: a document qualifies iff at least one of its child
rows matches (EXISTS semantics), so document-level results are never
row-multiplied.

Chart summaries exclude the predicate on their own attribute (the linked
brushing convention); the document page and the projection apply all
predicates.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any, Iterable, Optional, Union

import numpy as np

from .errors import (
    AllNull,
    BadSelection,
    EmptyQuery,
    InvalidColorAttribute,
    NoEmbedding,
    UnknownAttribute,
    UnknownDocument,
    UnsortableAttribute,
    WrongDataType,
)
from .schema import AttributeKind, DataType, parse_number, parse_temporal, _is_bare_year
from .store import ChildTable, DerivedColumn, NormalizedStore

# ---------------------------------------------------------------------------
# predicates and selections


@dataclass(frozen=True)
class ValueSet:
    attribute: str
    values: frozenset

    def __post_init__(self):
        object.__setattr__(self, "values", frozenset(self.values))
        if not self.values:
            raise BadSelection(f"empty value set on '{self.attribute}'")


@dataclass(frozen=True)
class Range:
    attribute: str
    lo: Any
    hi: Any
    lo_inclusive: bool = True
    hi_inclusive: bool = True

    def __post_init__(self):
        try:
            if self.lo is not None and self.hi is not None and self.lo > self.hi:
                raise BadSelection(f"range lo > hi on '{self.attribute}'")
        except TypeError as exc:
            raise BadSelection(f"incomparable range bounds on '{self.attribute}'") from exc


@dataclass(frozen=True)
class Substring:
    attribute: str
    query: str
    case_sensitive: bool = False

    def __post_init__(self):
        if not self.query:
            raise EmptyQuery(f"empty substring query on '{self.attribute}'")


@dataclass(frozen=True)
class NullTest:
    attribute: str


Predicate = Union[ValueSet, Range, Substring, NullTest]


@dataclass(frozen=True)
class SelectionState:
    predicates: tuple[Predicate, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "predicates", tuple(self.predicates))
        seen = set()
        for p in self.predicates:
            if p.attribute in seen:
                raise BadSelection(f"more than one predicate on '{p.attribute}'")
            seen.add(p.attribute)

    def without(self, attribute: str | None) -> "SelectionState":
        if attribute is None:
            return self
        return SelectionState(tuple(p for p in self.predicates if p.attribute != attribute))

    def with_predicate(self, pred: Predicate) -> "SelectionState":
        return SelectionState(self.without(pred.attribute).predicates + (pred,))


def search_predicate(query: str, attribute: str) -> Substring:
    """Case-insensitive substring predicate for text or categorical columns."""
    if not query:
        raise EmptyQuery("search query must be non-empty")
    return Substring(attribute=attribute, query=query, case_sensitive=False)


# ---------------------------------------------------------------------------
# filter plans


@dataclass(frozen=True)
class DocumentFilterPlan:
    main_clauses: tuple[Predicate, ...] = ()
    semi_joins: tuple[tuple[str, Predicate], ...] = ()  # (child attribute, element predicate)


def _resolve(store: NormalizedStore, name: str):
    """Resolve an attribute name to its descriptor or a derived column."""
    desc = store.schema.attribute(name)
    if desc is not None:
        return desc
    col = store.derived.get(name)
    if col is not None:
        return col
    raise UnknownAttribute(f"unknown attribute '{name}'")


def _is_doc_id_pseudo(store: NormalizedStore, name: str) -> bool:
    """'doc_id' acts as a pseudo-attribute (explicit document-set filters,
    e.g. projection region selections) unless the schema shadows the name."""
    return (
        name == "doc_id"
        and store.schema.attribute(name) is None
        and store.derived.get(name) is None
    )


def _doc_id_mask(store: NormalizedStore, pred: Predicate) -> np.ndarray:
    if not isinstance(pred, ValueSet):
        raise WrongDataType("doc_id supports value-set filters only")
    mask = np.zeros(store.n_docs, dtype=bool)
    for v in pred.values:
        i = parse_number(v)
        if i is not None and float(i).is_integer() and 0 <= int(i) < store.n_docs:
            mask[int(i)] = True
    return mask


def compile_filter(
    store: NormalizedStore,
    selection: SelectionState,
    exclude_attribute: str | None = None,
) -> DocumentFilterPlan:
    """Split a selection into main-table clauses and semi-join clauses.

    The predicate on exclude_attribute, if any, is dropped (own-chart
    exclusion for cross-filtered summaries).
    """
    main: list[Predicate] = []
    joins: list[tuple[str, Predicate]] = []
    for pred in selection.predicates:
        if pred.attribute == exclude_attribute:
            continue
        if _is_doc_id_pseudo(store, pred.attribute):
            main.append(pred)
            continue
        target = _resolve(store, pred.attribute)
        if isinstance(target, DerivedColumn):
            main.append(pred)
        elif target.kind in (AttributeKind.LIST, AttributeKind.SPAN_LIST):
            joins.append((pred.attribute, pred))
        elif target.kind is AttributeKind.EMBEDDING:
            raise WrongDataType(f"cannot filter on embedding attribute '{pred.attribute}'")
        else:
            main.append(pred)
    return DocumentFilterPlan(tuple(main), tuple(joins))


# -- predicate evaluation ---------------------------------------------------


def _range_mask(arr: np.ndarray, pred: Range, parse) -> np.ndarray:
    mask = ~np.isnan(arr)
    if pred.lo is not None:
        lo = parse(pred.lo)
        if lo is None:
            raise BadSelection(f"unparseable range bound {pred.lo!r} on '{pred.attribute}'")
        mask &= (arr >= lo) if pred.lo_inclusive else (arr > lo)
    if pred.hi is not None:
        hi = parse(pred.hi)
        if hi is None:
            raise BadSelection(f"unparseable range bound {pred.hi!r} on '{pred.attribute}'")
        mask &= (arr <= hi) if pred.hi_inclusive else (arr < hi)
    return mask


def _main_doc_mask(store: NormalizedStore, pred: Predicate) -> np.ndarray:
    if _is_doc_id_pseudo(store, pred.attribute):
        return _doc_id_mask(store, pred)
    target = _resolve(store, pred.attribute)
    n = store.n_docs

    if isinstance(target, DerivedColumn):
        if isinstance(pred, Range):
            return _range_mask(target.values, pred, parse_number)
        if isinstance(pred, ValueSet):
            return np.isin(target.values, [parse_number(v) for v in pred.values])
        raise WrongDataType(f"derived column '{pred.attribute}' supports range filters only")

    kind, dtype = target.kind, target.data_type
    raw = store.main[pred.attribute]

    if isinstance(pred, NullTest):
        if kind is not AttributeKind.SINGLE_VALUE:
            raise WrongDataType(f"null test requires a single-value attribute, got '{pred.attribute}'")
        return np.fromiter((v is None for v in raw), dtype=bool, count=n)

    if kind is AttributeKind.TEXT:
        if not isinstance(pred, Substring):
            raise WrongDataType(f"text attribute '{pred.attribute}' supports substring filters only")
        if pred.case_sensitive:
            q = pred.query
            return np.fromiter((q in (v or "") for v in raw), dtype=bool, count=n)
        q = pred.query.casefold()
        return np.fromiter((q in (v or "").casefold() for v in raw), dtype=bool, count=n)

    if dtype is DataType.QUANTITATIVE:
        arr = store.numeric(pred.attribute)
        if isinstance(pred, Range):
            return _range_mask(arr, pred, parse_number)
        if isinstance(pred, ValueSet):
            targets = [t for v in pred.values if (t := parse_number(v)) is not None]
            return np.isin(arr, targets)
        raise WrongDataType(f"substring filter not valid on quantitative '{pred.attribute}'")

    if dtype is DataType.TEMPORAL:
        arr = store.epochs(pred.attribute)
        if isinstance(pred, Range):
            return _range_mask(arr, pred, parse_temporal)
        if isinstance(pred, ValueSet):
            targets = [t for v in pred.values if (t := parse_temporal(v)) is not None]
            return np.isin(arr, targets)
        raise WrongDataType(f"substring filter not valid on temporal '{pred.attribute}'")

    # categorical
    if isinstance(pred, ValueSet):
        vset = pred.values
        return np.fromiter((v is not None and v in vset for v in raw), dtype=bool, count=n)
    if isinstance(pred, Substring):
        if pred.case_sensitive:
            q = pred.query
            return np.fromiter(
                (v is not None and q in str(v) for v in raw), dtype=bool, count=n
            )
        q = pred.query.casefold()
        return np.fromiter(
            (v is not None and q in str(v).casefold() for v in raw), dtype=bool, count=n
        )
    raise WrongDataType(f"range filter not valid on categorical '{pred.attribute}'")


def _child_row_mask(
    child: ChildTable, dtype: DataType | None, pred: Predicate, rows: slice | None = None
) -> np.ndarray:
    """Element-level mask for a child-table predicate, optionally restricted
    to a contiguous row slice (used for per-document highlight lookups)."""
    rows = rows if rows is not None else slice(None)
    if isinstance(pred, NullTest):
        raise WrongDataType(f"null test not valid on list attribute '{pred.attribute}'")
    if dtype is DataType.QUANTITATIVE and isinstance(pred, (Range, ValueSet)):
        arr = child.numeric[rows]
        if isinstance(pred, Range):
            return _range_mask(arr, pred, parse_number)
        targets = [t for v in pred.values if (t := parse_number(v)) is not None]
        return np.isin(arr, targets)
    if dtype is DataType.TEMPORAL and isinstance(pred, (Range, ValueSet)):
        arr = child.epochs[rows]
        if isinstance(pred, Range):
            return _range_mask(arr, pred, parse_temporal)
        targets = [t for v in pred.values if (t := parse_temporal(v)) is not None]
        return np.isin(arr, targets)
    # categorical element predicates resolve against the (small) vocabulary
    if isinstance(pred, ValueSet):
        index = child.code_index
        qcodes = [index[v] for v in pred.values if v in index]
    elif isinstance(pred, Substring):
        if pred.case_sensitive:
            qcodes = [i for i, u in enumerate(child.uniques) if pred.query in str(u)]
        else:
            q = pred.query.casefold()
            qcodes = [i for i, u in enumerate(child.uniques) if q in str(u).casefold()]
    else:
        raise WrongDataType(f"filter not valid on '{pred.attribute}'")
    codes = child.codes[rows]
    if not qcodes:
        return np.zeros(len(codes), dtype=bool)
    # lookup-table gather beats np.isin by an order of magnitude here
    table = np.zeros(len(child.uniques), dtype=bool)
    table[qcodes] = True
    return table[codes]


def _predicate_doc_mask(store: NormalizedStore, pred: Predicate) -> np.ndarray:
    """Doc-level boolean mask for one predicate, cached per store."""
    cache = getattr(store, "_pred_mask_cache", None)
    if cache is None:
        cache = {}
        store._pred_mask_cache = cache  # type: ignore[attr-defined]
    try:
        hit = cache.get(pred)
    except TypeError:
        hit = None
    if hit is not None:
        return hit

    if _is_doc_id_pseudo(store, pred.attribute):
        target = None
    else:
        target = _resolve(store, pred.attribute)
    if target is None or isinstance(target, DerivedColumn) or target.kind not in (
        AttributeKind.LIST,
        AttributeKind.SPAN_LIST,
    ):
        mask = _main_doc_mask(store, pred)
    else:
        child = store.children[pred.attribute]
        row_mask = _child_row_mask(child, target.data_type, pred)
        mask = np.zeros(store.n_docs, dtype=bool)
        mask[child.doc_ids[row_mask]] = True

    if len(cache) > 256:
        cache.clear()
    try:
        cache[pred] = mask
    except TypeError:
        pass
    return mask


def _plan_mask(store: NormalizedStore, plan: DocumentFilterPlan) -> np.ndarray:
    mask = np.ones(store.n_docs, dtype=bool)
    for pred in plan.main_clauses:
        mask &= _predicate_doc_mask(store, pred)
    for _, pred in plan.semi_joins:
        mask &= _predicate_doc_mask(store, pred)
    return mask


def _selection_mask(
    store: NormalizedStore, selection: SelectionState, exclude: str | None = None
) -> np.ndarray:
    return _plan_mask(store, compile_filter(store, selection, exclude))


def matching_documents(store: NormalizedStore, plan: DocumentFilterPlan) -> set[int]:
    """Exactly the documents satisfying all clauses of the plan."""
    return set(int(i) for i in np.nonzero(_plan_mask(store, plan))[0])


# ---------------------------------------------------------------------------
# summaries


@dataclass(frozen=True)
class Bars:
    attribute: str
    rows: tuple[tuple[Any, int], ...]
    total_distinct: int


@dataclass(frozen=True)
class Bins:
    attribute: str
    edges: tuple[float, ...]
    counts: tuple[int, ...]


@dataclass(frozen=True)
class Series:
    attribute: str
    timestamps: tuple
    counts: tuple[int, ...]


SummaryResult = Union[Bars, Bins, Series]


def _value_sort_key(value: Any):
    # numeric values order numerically, everything else lexicographically
    n = parse_number(value) if not isinstance(value, str) else None
    if n is not None:
        return (0, n, "")
    return (1, 0.0, str(value))


def _require(store: NormalizedStore, attribute: str, dtype: DataType):
    desc = store.schema.attribute(attribute)
    if desc is None:
        raise UnknownAttribute(f"unknown attribute '{attribute}'")
    if desc.data_type is not dtype:
        raise WrongDataType(f"'{attribute}' is not {dtype.value}")
    return desc


def summarize_categorical(
    store: NormalizedStore,
    attribute: str,
    selection: SelectionState,
    k: int = 10,
    offset: int = 0,
) -> Bars:
    """Top-k value counts under the selection, own-attribute clause excluded.

    Single-value attributes count matching documents per value; list-like
    attributes count element occurrences whose parent document passes the
    other clauses.
    """
    desc = _require(store, attribute, DataType.CATEGORICAL)
    mask = _selection_mask(store, selection, exclude=attribute)

    if desc.kind is AttributeKind.SINGLE_VALUE:
        codes, uniques = store.codes(attribute)
        sel = codes[mask]
        counts = np.bincount(sel[sel >= 0], minlength=len(uniques))
    else:
        child = store.children[attribute]
        row_mask = mask[child.doc_ids]
        uniques = child.uniques
        counts = np.bincount(child.codes[row_mask], minlength=len(uniques))

    pairs = [(uniques[i], int(counts[i])) for i in range(len(uniques)) if counts[i] > 0]
    pairs.sort(key=lambda p: (-p[1], _value_sort_key(p[0])))
    return Bars(attribute, tuple(pairs[offset : offset + k]), total_distinct=len(pairs))


def _quant_values(store: NormalizedStore, attribute: str):
    """(all_values, doc_level, child) for a quantitative target; supports
    derived columns."""
    desc = store.schema.attribute(attribute)
    if desc is None:
        col = store.derived.get(attribute)
        if col is None:
            raise UnknownAttribute(f"unknown attribute '{attribute}'")
        return col.values, True, None
    if desc.data_type is not DataType.QUANTITATIVE:
        raise WrongDataType(f"'{attribute}' is not quantitative")
    if desc.kind is AttributeKind.SINGLE_VALUE:
        return store.numeric(attribute), True, None
    child = store.children[attribute]
    return child.numeric, False, child


def summarize_quantitative(
    store: NormalizedStore,
    attribute: str,
    selection: SelectionState,
    bin_count: int = 20,
) -> Bins:
    """Equal-width histogram over the unfiltered extent (stable axes), with
    counts computed under the selection, own clause excluded.

    Bins are half-open [lo, hi) with the last bin closed; a zero-extent
    column collapses to a single degenerate bin [v, v].
    """
    values, doc_level, child = _quant_values(store, attribute)
    finite = values[np.isfinite(values)]
    if finite.size == 0:
        raise AllNull(f"'{attribute}' has no non-null values")
    lo, hi = float(finite.min()), float(finite.max())

    mask = _selection_mask(store, selection, exclude=attribute)
    if doc_level:
        selected = values[mask]
    else:
        selected = values[mask[child.doc_ids]]
    selected = selected[np.isfinite(selected)]

    if lo == hi:
        return Bins(attribute, (lo, hi), (int(selected.size),))
    edges = np.linspace(lo, hi, bin_count + 1)
    counts, _ = np.histogram(selected, bins=edges)
    return Bins(attribute, tuple(float(e) for e in edges), tuple(int(c) for c in counts))


_YEAR_SECONDS = 365.25 * 86400.0


def summarize_temporal(store: NormalizedStore, attribute: str, selection: SelectionState) -> Series:
    """Counts grouped by calendar period over the unfiltered extent, zero
    periods included, own clause excluded.

    Granularity: year when the column holds bare years or spans more than 3
    years; month over 3 months; day otherwise. Year labels are integers,
    month/day labels ISO strings.
    """
    desc = _require(store, attribute, DataType.TEMPORAL)
    if desc.kind is AttributeKind.SINGLE_VALUE:
        epochs = store.epochs(attribute)
        raw = store.main[attribute]
        doc_level, child = True, None
    else:
        child = store.children[attribute]
        epochs = child.epochs
        raw = list(child.values)
        doc_level = False

    valid = np.isfinite(epochs)
    if not valid.any():
        return Series(attribute, (), ())
    span = float(epochs[valid].max() - epochs[valid].min())

    all_years = all(_is_bare_year(v) is not None for v, ok in zip(raw, valid) if ok)
    if all_years or span > 3 * _YEAR_SECONDS:
        unit = "Y"
    elif span > 92 * 86400.0:
        unit = "M"
    else:
        unit = "D"

    buckets = epochs[valid].astype("datetime64[s]").astype(f"datetime64[{unit}]")
    b_min, b_max = buckets.min(), buckets.max()
    all_buckets = np.arange(b_min, b_max + 1)

    mask = _selection_mask(store, selection, exclude=attribute)
    row_mask = (mask if doc_level else mask[child.doc_ids]) & valid
    sel_buckets = epochs[row_mask].astype("datetime64[s]").astype(f"datetime64[{unit}]")
    idx = (sel_buckets - b_min).astype(np.int64)
    counts = np.bincount(idx, minlength=len(all_buckets))

    if unit == "Y":
        labels = tuple(int(str(b)) for b in all_buckets)
    else:
        labels = tuple(str(b) for b in all_buckets)
    return Series(attribute, labels, tuple(int(c) for c in counts))


def summarize_attribute(
    store: NormalizedStore,
    attribute: str,
    selection: SelectionState,
    k: int = 10,
    bin_count: int = 20,
) -> SummaryResult:
    """Dispatch to the summary matching the attribute's data type."""
    desc = store.schema.attribute(attribute)
    if desc is None:
        if store.derived.get(attribute) is not None:
            return summarize_quantitative(store, attribute, selection, bin_count)
        raise UnknownAttribute(f"unknown attribute '{attribute}'")
    if desc.data_type is DataType.CATEGORICAL:
        return summarize_categorical(store, attribute, selection, k)
    if desc.data_type is DataType.QUANTITATIVE:
        return summarize_quantitative(store, attribute, selection, bin_count)
    if desc.data_type is DataType.TEMPORAL:
        return summarize_temporal(store, attribute, selection)
    raise WrongDataType(f"'{attribute}' has no chartable data type")


# ---------------------------------------------------------------------------
# document pages


@dataclass(frozen=True)
class DocumentRow:
    doc_id: int
    previews: dict[str, str]
    values: dict[str, Any]
    highlights: tuple


@dataclass(frozen=True)
class DocumentPage:
    total_matching: int
    rows: tuple[DocumentRow, ...]
    sort: tuple[str, str] | None
    offset: int
    limit: int


PREVIEW_LINES = 5
PREVIEW_CHARS = 500


def _preview(text: str) -> str:
    head = "\n".join(text.split("\n")[:PREVIEW_LINES])
    return head[:PREVIEW_CHARS]


def _sort_ids(
    store: NormalizedStore, ids: np.ndarray, sort: tuple[str, str]
) -> np.ndarray:
    attribute, direction = sort
    if direction not in ("asc", "desc"):
        raise BadSelection(f"sort direction must be asc or desc, got {direction!r}")
    desc_target = store.schema.attribute(attribute)
    if desc_target is None:
        col = store.derived.get(attribute)
        if col is None:
            raise UnknownAttribute(f"unknown sort attribute '{attribute}'")
        keys = [col.values[i] for i in ids]
        nulls = [not np.isfinite(k) for k in keys]
    elif desc_target.kind is not AttributeKind.SINGLE_VALUE:
        raise UnsortableAttribute(f"cannot sort by {desc_target.kind.value} attribute '{attribute}'")
    elif desc_target.data_type is DataType.QUANTITATIVE:
        arr = store.numeric(attribute)
        keys = [arr[i] for i in ids]
        nulls = [not np.isfinite(k) for k in keys]
    elif desc_target.data_type is DataType.TEMPORAL:
        arr = store.epochs(attribute)
        keys = [arr[i] for i in ids]
        nulls = [not np.isfinite(k) for k in keys]
    else:
        raw = store.main[attribute]
        keys = [None if raw[i] is None else _value_sort_key(raw[i]) for i in ids]
        nulls = [k is None for k in keys]

    non_null = [(k, int(i)) for k, i, is_null in zip(keys, ids, nulls) if not is_null]
    null_ids = [int(i) for i, is_null in zip(ids, nulls) if is_null]
    # stable sort on the key preserves doc_id ascending for ties
    non_null.sort(key=lambda t: t[1])
    non_null.sort(key=lambda t: t[0], reverse=(direction == "desc"))
    return np.array([i for _, i in non_null] + null_ids, dtype=np.int64)


def document_page(
    store: NormalizedStore,
    selection: SelectionState,
    sort: tuple[str, str] | None = None,
    offset: int = 0,
    limit: int = 50,
) -> DocumentPage:
    """Matching documents with previews, single-value columns, and highlight
    ranges for the selection's span predicates. All predicates apply."""
    from .highlight import compute_highlights

    mask = _selection_mask(store, selection)
    ids = np.nonzero(mask)[0]
    total = int(ids.size)
    if sort is not None:
        ids = _sort_ids(store, ids, sort)
    page_ids = ids[offset : offset + limit] if limit > 0 else ids[:0]

    text_attrs = [a.name for a in store.schema.by_kind(AttributeKind.TEXT)]
    single_attrs = [a.name for a in store.schema.by_kind(AttributeKind.SINGLE_VALUE)]
    derived_handles = store.derived.handles()

    rows = []
    for i in page_ids:
        i = int(i)
        values: dict[str, Any] = {a: store.main[a][i] for a in single_attrs}
        for h in derived_handles:
            col = store.derived.get(h)
            if col is not None:
                values[h] = float(col.values[i])
        rows.append(
            DocumentRow(
                doc_id=i,
                previews={a: _preview(store.main[a][i]) for a in text_attrs},
                values=values,
                highlights=tuple(compute_highlights(store, i, selection)),
            )
        )
    return DocumentPage(total, tuple(rows), sort, offset, limit)


# ---------------------------------------------------------------------------
# projection


def projection_points(
    store: NormalizedStore,
    selection: SelectionState,
    color_attribute: str | None = None,
) -> list[dict[str, Any]]:
    """All documents' 2D projection coordinates with a selected flag; the UI
    dims non-matching points rather than dropping them."""
    proj = store.projection
    if proj is None:
        raise NoEmbedding("store has no embedding")
    if color_attribute is not None:
        desc = store.schema.attribute(color_attribute)
        if desc is None or desc.kind is not AttributeKind.SINGLE_VALUE:
            raise InvalidColorAttribute(
                f"color attribute must be single-value, got '{color_attribute}'"
            )
    mask = _selection_mask(store, selection)
    points = []
    for i in range(store.n_docs):
        point: dict[str, Any] = {
            "doc_id": i,
            "x": float(proj[i, 0]),
            "y": float(proj[i, 1]),
            "selected": bool(mask[i]),
        }
        if color_attribute is not None:
            point["color_value"] = store.main[color_attribute][i]
        points.append(point)
    return points
