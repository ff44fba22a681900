"""Normalized columnar store: one main table plus child tables for list-like
attributes, with an optional embedding matrix.

The in-memory layout is column oriented (numpy arrays) so that selection
evaluation and aggregation stay vectorized even for corpora with millions of
child rows. The on-disk format is one Parquet file per table plus a JSON
manifest copy and a small metadata sidecar; see README for the layout.
"""

from __future__ import annotations

import json
import threading
import time
from collections import OrderedDict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import polars as pl

from .errors import StoreLoadError, UnknownAttribute
from .schema import (
    AttributeKind,
    DataType,
    ValidatedSchema,
    parse_number,
    parse_temporal,
    schema_from_manifest,
)


def _factorize(values: np.ndarray) -> tuple[np.ndarray, list]:
    """Map values to dense integer codes; None becomes code -1.

    Uniques are ordered by first appearance; callers sort for display.
    """
    codes = np.empty(len(values), dtype=np.int64)
    uniques: list = []
    index: dict = {}
    for i, v in enumerate(values):
        if v is None:
            codes[i] = -1
            continue
        c = index.get(v)
        if c is None:
            c = len(uniques)
            index[v] = c
            uniques.append(v)
        codes[i] = c
    return codes, uniques


class ChildTable:
    """Rows of one list / span-list attribute, keyed by document id.

    Rows are kept sorted by (doc_id, array_index) so per-document slices are
    contiguous and addressable with searchsorted offsets.
    """

    def __init__(
        self,
        attribute: str,
        doc_ids: np.ndarray,
        values: np.ndarray,
        array_index: np.ndarray,
        span_start: np.ndarray | None = None,
        span_end: np.ndarray | None = None,
        codes: np.ndarray | None = None,
        uniques: list | None = None,
    ):
        self.attribute = attribute
        self.doc_ids = np.asarray(doc_ids, dtype=np.int64)
        self.values = np.asarray(values, dtype=object)
        self.array_index = np.asarray(array_index, dtype=np.int64)
        self.span_start = None if span_start is None else np.asarray(span_start, dtype=np.int64)
        self.span_end = None if span_end is None else np.asarray(span_end, dtype=np.int64)
        self._codes = None if codes is None else np.asarray(codes, dtype=np.int64)
        self._uniques = uniques
        self._code_index: dict | None = None
        self._numeric: np.ndarray | None = None
        self._epochs: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.doc_ids)

    @property
    def codes(self) -> np.ndarray:
        if self._codes is None:
            self._codes, self._uniques = _factorize(self.values)
        return self._codes

    @property
    def uniques(self) -> list:
        if self._uniques is None:
            self.codes
        return self._uniques  # type: ignore[return-value]

    @property
    def code_index(self) -> dict:
        if self._code_index is None:
            self._code_index = {v: i for i, v in enumerate(self.uniques)}
        return self._code_index

    @property
    def numeric(self) -> np.ndarray:
        if self._numeric is None:
            self._numeric = np.array(
                [n if (n := parse_number(v)) is not None else np.nan for v in self.values],
                dtype=np.float64,
            )
        return self._numeric

    @property
    def epochs(self) -> np.ndarray:
        if self._epochs is None:
            self._epochs = np.array(
                [t if (t := parse_temporal(v)) is not None else np.nan for v in self.values],
                dtype=np.float64,
            )
        return self._epochs

    def doc_slice(self, doc_id: int, n_docs: int) -> slice:
        lo = int(np.searchsorted(self.doc_ids, doc_id, side="left"))
        hi = int(np.searchsorted(self.doc_ids, doc_id, side="right"))
        return slice(lo, hi)


@dataclass
class EmbeddingMatrix:
    vectors: np.ndarray  # (n_docs, dim) float64
    projection: np.ndarray | None = None  # (n_docs, 2) float64

    @property
    def n_docs(self) -> int:
        return self.vectors.shape[0]

    @property
    def dimension(self) -> int:
        return self.vectors.shape[1]


@dataclass
class DerivedColumn:
    """A transient per-document numeric column (similarity scores)."""

    handle: str
    label: str
    values: np.ndarray
    created_at: float = field(default_factory=time.time)


class DerivedRegistry:
    """Session-scoped registry of derived columns with LRU eviction."""

    def __init__(self, capacity: int = 32):
        self.capacity = capacity
        self._columns: OrderedDict[str, DerivedColumn] = OrderedDict()
        self._lock = threading.Lock()
        self._counter = 0

    def register(self, label: str, values: np.ndarray) -> DerivedColumn:
        with self._lock:
            self._counter += 1
            handle = f"derived_{self._counter}"
            col = DerivedColumn(handle=handle, label=label, values=np.asarray(values, dtype=np.float64))
            self._columns[handle] = col
            while len(self._columns) > self.capacity:
                self._columns.popitem(last=False)
            return col

    def get(self, handle: str) -> DerivedColumn | None:
        with self._lock:
            col = self._columns.get(handle)
            if col is not None:
                self._columns.move_to_end(handle)
            return col

    def handles(self) -> list[str]:
        with self._lock:
            return list(self._columns)


class NormalizedStore:
    """Immutable multi-table store for one dataset.

    ``main`` maps each text / single-value attribute to its raw column (length
    n_docs, None for nulls); ``children`` maps list-like attributes to their
    ChildTable. Derived columns live in a session registry and never touch
    disk.
    """

    def __init__(
        self,
        schema: ValidatedSchema,
        main: dict[str, list],
        children: dict[str, ChildTable],
        embeddings: EmbeddingMatrix | None = None,
    ):
        self.schema = schema
        self.main = main
        self.children = children
        self.embeddings = embeddings
        text_cols = [a.name for a in schema.attributes if a.kind is AttributeKind.TEXT]
        self.n_docs = len(main[text_cols[0]]) if text_cols else 0
        self.derived = DerivedRegistry()
        self._codes: dict[str, tuple[np.ndarray, list]] = {}
        self._numeric: dict[str, np.ndarray] = {}
        self._epochs: dict[str, np.ndarray] = {}
        self._proj_fallback: np.ndarray | None = None

    # -- typed views over main columns -------------------------------------

    def _column(self, attribute: str) -> list:
        if attribute not in self.main:
            raise UnknownAttribute(f"no main-table column '{attribute}'")
        return self.main[attribute]

    def codes(self, attribute: str) -> tuple[np.ndarray, list]:
        if attribute not in self._codes:
            arr = np.array(self._column(attribute), dtype=object)
            self._codes[attribute] = _factorize(arr)
        return self._codes[attribute]

    def numeric(self, attribute: str) -> np.ndarray:
        if attribute not in self._numeric:
            col = self._column(attribute)
            self._numeric[attribute] = np.array(
                [n if v is not None and (n := parse_number(v)) is not None else np.nan for v in col],
                dtype=np.float64,
            )
        return self._numeric[attribute]

    def epochs(self, attribute: str) -> np.ndarray:
        if attribute not in self._epochs:
            col = self._column(attribute)
            self._epochs[attribute] = np.array(
                [t if v is not None and (t := parse_temporal(v)) is not None else np.nan for v in col],
                dtype=np.float64,
            )
        return self._epochs[attribute]

    def null_count(self, attribute: str) -> int:
        desc = self.schema.attribute(attribute)
        if desc is None:
            raise UnknownAttribute(attribute)
        if desc.kind in (AttributeKind.TEXT, AttributeKind.SINGLE_VALUE):
            return sum(1 for v in self.main[attribute] if v is None)
        return 0

    @property
    def projection(self) -> np.ndarray | None:
        """The 2D projection: ingested if present, otherwise a PCA fallback
        computed once on first access."""
        if self.embeddings is None:
            return None
        if self.embeddings.projection is not None:
            return self.embeddings.projection
        if self._proj_fallback is None:
            from .embeddings import pca_projection

            self._proj_fallback = pca_projection(self.embeddings)
        return self._proj_fallback

    # -- persistence -------------------------------------------------------

    def save(self, out_dir: str | Path) -> None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        encodings: dict[str, str] = {}

        main_cols: dict[str, pl.Series] = {"doc_id": pl.Series("doc_id", np.arange(self.n_docs))}
        for name, col in self.main.items():
            series, tag = _encode_column(name, col)
            main_cols[name] = series
            encodings[f"main.{name}"] = tag
        pl.DataFrame(main_cols).write_parquet(out / "main.parquet")

        for name, child in self.children.items():
            cols = {
                "doc_id": pl.Series("doc_id", child.doc_ids),
                "array_index": pl.Series("array_index", child.array_index),
            }
            series, tag = _encode_column("value", list(child.values))
            cols["value"] = series
            encodings[f"child_{name}.value"] = tag
            if child.span_start is not None:
                cols["span_start"] = pl.Series("span_start", child.span_start)
                cols["span_end"] = pl.Series("span_end", child.span_end)
            pl.DataFrame(cols).write_parquet(out / f"child_{name}.parquet")

        if self.embeddings is not None:
            arrays: dict[str, np.ndarray] = {"vectors": self.embeddings.vectors}
            if self.embeddings.projection is not None:
                arrays["projection"] = self.embeddings.projection
            np.savez(out / "embeddings.npz", **arrays)

        with open(out / "manifest", "w", encoding="utf-8") as f:
            json.dump(self.schema.to_manifest(), f, indent=2, ensure_ascii=False)
        with open(out / "meta.json", "w", encoding="utf-8") as f:
            json.dump({"n_docs": self.n_docs, "encodings": encodings}, f, indent=2)

    @classmethod
    def load(cls, store_dir: str | Path) -> "NormalizedStore":
        d = Path(store_dir)
        if not (d / "manifest").exists():
            raise StoreLoadError(f"no manifest in {d}")
        try:
            with open(d / "manifest", encoding="utf-8") as f:
                schema = schema_from_manifest(json.load(f))
            with open(d / "meta.json", encoding="utf-8") as f:
                meta = json.load(f)
            encodings = meta["encodings"]

            main_df = pl.read_parquet(d / "main.parquet")
            main: dict[str, list] = {}
            for a in schema.attributes:
                if a.kind in (AttributeKind.TEXT, AttributeKind.SINGLE_VALUE):
                    main[a.name] = _decode_column(main_df[a.name], encodings[f"main.{a.name}"])

            children: dict[str, ChildTable] = {}
            for a in schema.attributes:
                if a.kind in (AttributeKind.LIST, AttributeKind.SPAN_LIST):
                    df = pl.read_parquet(d / f"child_{a.name}.parquet")
                    tag = encodings[f"child_{a.name}.value"]
                    values = np.array(_decode_column(df["value"], tag), dtype=object)
                    codes = uniques = None
                    if tag == "str" and df["value"].null_count() == 0:
                        # large string columns: factorize via the categorical
                        # dtype rather than a Python loop
                        cat = df["value"].cast(pl.Categorical)
                        codes = cat.to_physical().to_numpy().astype(np.int64)
                        uniques = cat.cat.get_categories().to_list()
                    children[a.name] = ChildTable(
                        attribute=a.name,
                        doc_ids=df["doc_id"].to_numpy(),
                        values=values,
                        array_index=df["array_index"].to_numpy(),
                        span_start=df["span_start"].to_numpy() if "span_start" in df.columns else None,
                        span_end=df["span_end"].to_numpy() if "span_end" in df.columns else None,
                        codes=codes,
                        uniques=uniques,
                    )

            embeddings = None
            if (d / "embeddings.npz").exists():
                npz = np.load(d / "embeddings.npz")
                embeddings = EmbeddingMatrix(
                    vectors=npz["vectors"],
                    projection=npz["projection"] if "projection" in npz else None,
                )
        except StoreLoadError:
            raise
        except Exception as exc:  # noqa: BLE001 - wrap any corruption as a load error
            raise StoreLoadError(f"failed to load store at {d}: {exc}") from exc
        return cls(schema, main, children, embeddings)


def _encode_column(name: str, values: list) -> tuple[pl.Series, str]:
    """Encode a raw column for Parquet, preserving scalar types.

    Homogeneous str / int / float / bool columns use native dtypes; anything
    mixed falls back to per-cell JSON strings so round-trips stay lossless.
    """
    non_null = [v for v in values if v is not None]
    tags = {
        str: "str",
        bool: "bool",
        int: "int",
        float: "float",
    }
    kinds = {type(v) for v in non_null}
    if not non_null:
        return pl.Series(name, values, dtype=pl.Utf8), "str"
    if len(kinds) == 1:
        t = next(iter(kinds))
        if t in tags:
            dtype = {str: pl.Utf8, bool: pl.Boolean, int: pl.Int64, float: pl.Float64}[t]
            return pl.Series(name, values, dtype=dtype), tags[t]
    encoded = [None if v is None else json.dumps(v, ensure_ascii=False) for v in values]
    return pl.Series(name, encoded, dtype=pl.Utf8), "json"


def _decode_column(series: pl.Series, tag: str) -> list:
    values = series.to_list()
    if tag == "json":
        return [None if v is None else json.loads(v) for v in values]
    return values
