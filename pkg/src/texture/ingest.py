"""Normalization of raw records into the multi-table store.

Each list-like attribute is split into its own child table keyed by document
id; span-list rows keep the [start, end) character offsets into their source
text so highlights can be computed from stored offsets rather than by
re-searching. Offsets count Unicode scalar values, end-exclusive.
"""

from __future__ import annotations

import re
from typing import Any, Iterable, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    IngestError,
    MissingRequiredField,
    NameCollision,
    SpanOutOfBounds,
    SpanValueMismatch,
    UnknownAttribute,
    UnknownDocument,
)
from .schema import (
    AttributeDescriptor,
    AttributeKind,
    DataType,
    ValidatedSchema,
    with_attribute,
)
from .store import ChildTable, EmbeddingMatrix, NormalizedStore

_TOKEN_RE = re.compile(r"(?:[^\W_]|['’])+")


def tokenize_words(text: str) -> list[tuple[str, int, int]]:
    """Split text into lowercased word tokens with original-text offsets.

    Tokens are maximal runs of Unicode letters, digits, and apostrophes;
    spans are strictly increasing and non-overlapping.
    """
    return [(m.group(0).lower(), m.start(), m.end()) for m in _TOKEN_RE.finditer(text)]


def _span_entry(value: Any, text: str, cursor: int, record_index: int, attribute: str):
    """Normalize one span-list entry to (value, start, end, new_cursor).

    Entries may carry explicit offsets (dict or 3-sequence) or be bare
    scalars, resolved by left-to-right non-overlapping case-insensitive
    search starting at the cursor.
    """
    if isinstance(value, dict):
        try:
            v, start, end = value["value"], int(value["start"]), int(value["end"])
        except KeyError as exc:
            raise IngestError(f"span entry missing key {exc}", record_index, attribute) from exc
    elif isinstance(value, (list, tuple)) and len(value) == 3:
        v, start, end = value[0], int(value[1]), int(value[2])
    else:
        # bare scalar: search forward in the source text
        needle = str(value).lower()
        pos = text.lower().find(needle, cursor)
        if pos < 0:
            raise SpanValueMismatch(
                f"could not locate value {value!r} in source text", record_index, attribute
            )
        v, start, end = value, pos, pos + len(needle)
    if not (0 <= start < end <= len(text)):
        raise SpanOutOfBounds(
            f"span [{start},{end}) out of bounds for text of length {len(text)}",
            record_index,
            attribute,
        )
    if isinstance(v, str) and text[start:end].lower() != v.lower():
        raise SpanValueMismatch(
            f"text slice {text[start:end]!r} does not match value {v!r} at [{start},{end})",
            record_index,
            attribute,
        )
    return v, start, end, end


def normalize_dataset(
    records: Sequence[dict[str, Any]] | Iterable[dict[str, Any]],
    schema: ValidatedSchema,
) -> NormalizedStore:
    """Normalize raw records into a NormalizedStore.

    doc_id is assigned densely in input order. When the schema declares an
    id_field, its values must be unique and are kept as a regular
    single-value column; doc_id remains the dense internal key.

    Ingest is strict single-pass: the first error aborts with the record
    index and attribute name.
    """
    if not isinstance(schema, ValidatedSchema):
        raise IngestError("schema must be validated before ingest")

    main_attrs = [
        a for a in schema.attributes if a.kind in (AttributeKind.TEXT, AttributeKind.SINGLE_VALUE)
    ]
    child_attrs = schema.by_kind(AttributeKind.LIST, AttributeKind.SPAN_LIST)
    emb_attrs = schema.by_kind(AttributeKind.EMBEDDING)
    emb_attr = emb_attrs[0] if emb_attrs else None

    main: dict[str, list] = {a.name: [] for a in main_attrs}
    child_rows: dict[str, dict[str, list]] = {
        a.name: {"doc_id": [], "value": [], "array_index": [], "span_start": [], "span_end": []}
        for a in child_attrs
    }
    vectors: list[list[float]] = []
    projections: list[list[float]] = []
    seen_ids: set = set()

    for i, record in enumerate(records):
        for a in main_attrs:
            value = record.get(a.name)
            if a.kind is AttributeKind.TEXT:
                if value is None:
                    raise MissingRequiredField("text attribute missing", i, a.name)
                if not isinstance(value, str):
                    raise IngestError(f"text value must be a string, got {type(value).__name__}", i, a.name)
            main[a.name].append(value)
            if schema.id_field == a.name:
                if value is None:
                    raise MissingRequiredField("id_field value missing", i, a.name)
                if value in seen_ids:
                    raise IngestError(f"duplicate id_field value {value!r}", i, a.name)
                seen_ids.add(value)

        for a in child_attrs:
            items = record.get(a.name)
            if items is None:
                items = []
            if not isinstance(items, (list, tuple)):
                raise IngestError(f"expected a list, got {type(items).__name__}", i, a.name)
            rows = child_rows[a.name]
            if a.kind is AttributeKind.SPAN_LIST:
                text = record.get(a.span_source)
                if text is None:
                    raise MissingRequiredField("span source text missing", i, a.span_source or "")
                cursor = 0
                for idx, item in enumerate(items):
                    v, start, end, cursor = _span_entry(item, text, cursor, i, a.name)
                    rows["doc_id"].append(i)
                    rows["value"].append(v)
                    rows["array_index"].append(idx)
                    rows["span_start"].append(start)
                    rows["span_end"].append(end)
            else:
                for idx, item in enumerate(items):
                    rows["doc_id"].append(i)
                    rows["value"].append(item)
                    rows["array_index"].append(idx)

        if emb_attr is not None:
            value = record.get(emb_attr.name)
            if value is None:
                raise MissingRequiredField("embedding missing", i, emb_attr.name)
            proj = None
            if isinstance(value, dict):
                proj = value.get("projection")
                value = value.get("vector")
            if not isinstance(value, (list, tuple)):
                raise IngestError("embedding must be an array of numbers", i, emb_attr.name)
            if len(value) != emb_attr.dimension:
                raise DimensionMismatch(
                    f"embedding length {len(value)} != declared dimension {emb_attr.dimension}",
                    i,
                    emb_attr.name,
                )
            vec = [float(x) for x in value]
            if not all(np.isfinite(vec)):
                raise IngestError("embedding contains non-finite values", i, emb_attr.name)
            if all(x == 0.0 for x in vec):
                raise IngestError("zero embedding vector rejected", i, emb_attr.name)
            vectors.append(vec)
            if emb_attr.has_projection:
                if proj is None or len(proj) != 2:
                    raise MissingRequiredField("declared 2D projection missing", i, emb_attr.name)
                projections.append([float(proj[0]), float(proj[1])])

    children: dict[str, ChildTable] = {}
    for a in child_attrs:
        rows = child_rows[a.name]
        is_span = a.kind is AttributeKind.SPAN_LIST
        children[a.name] = ChildTable(
            attribute=a.name,
            doc_ids=np.array(rows["doc_id"], dtype=np.int64),
            values=np.array(rows["value"], dtype=object),
            array_index=np.array(rows["array_index"], dtype=np.int64),
            span_start=np.array(rows["span_start"], dtype=np.int64) if is_span else None,
            span_end=np.array(rows["span_end"], dtype=np.int64) if is_span else None,
        )

    embeddings = None
    if emb_attr is not None:
        embeddings = EmbeddingMatrix(
            vectors=np.array(vectors, dtype=np.float64).reshape(len(vectors), emb_attr.dimension or 0),
            projection=np.array(projections, dtype=np.float64) if projections else None,
        )

    return NormalizedStore(schema, main, children, embeddings)


def reassemble_document(store: NormalizedStore, doc_id: int) -> dict[str, Any]:
    """Reconstruct the original record for one document.

    Lists are ordered by array_index; span entries come back as
    {value, start, end} dicts. Inverse of normalize_dataset up to field order
    and the dict-vs-bare representation of span entries.
    """
    if not isinstance(doc_id, (int, np.integer)) or not (0 <= doc_id < store.n_docs):
        raise UnknownDocument(f"doc_id {doc_id} out of range [0, {store.n_docs})")
    record: dict[str, Any] = {}
    for a in store.schema.attributes:
        if a.kind in (AttributeKind.TEXT, AttributeKind.SINGLE_VALUE):
            record[a.name] = store.main[a.name][doc_id]
        elif a.kind is AttributeKind.LIST:
            child = store.children[a.name]
            s = child.doc_slice(doc_id, store.n_docs)
            order = np.argsort(child.array_index[s], kind="stable")
            record[a.name] = [child.values[s][j] for j in order]
        elif a.kind is AttributeKind.SPAN_LIST:
            child = store.children[a.name]
            s = child.doc_slice(doc_id, store.n_docs)
            order = np.argsort(child.array_index[s], kind="stable")
            record[a.name] = [
                {
                    "value": child.values[s][j],
                    "start": int(child.span_start[s][j]),
                    "end": int(child.span_end[s][j]),
                }
                for j in order
            ]
        elif a.kind is AttributeKind.EMBEDDING and store.embeddings is not None:
            vec = store.embeddings.vectors[doc_id].tolist()
            if store.embeddings.projection is not None:
                record[a.name] = {
                    "vector": vec,
                    "projection": store.embeddings.projection[doc_id].tolist(),
                }
            else:
                record[a.name] = vec
    return record


def add_token_attribute(
    store: NormalizedStore, text_attribute: str, new_name: str
) -> NormalizedStore:
    """Derive a word span-list attribute from a text attribute.

    Returns a new store whose schema gains one span-list descriptor and whose
    children gain the token table; original texts are untouched.
    """
    desc = store.schema.attribute(text_attribute)
    if desc is None or desc.kind is not AttributeKind.TEXT:
        raise UnknownAttribute(f"'{text_attribute}' is not a text attribute")
    if store.schema.attribute(new_name) is not None:
        raise NameCollision(f"attribute '{new_name}' already exists")

    doc_ids: list[int] = []
    values: list[str] = []
    array_index: list[int] = []
    starts: list[int] = []
    ends: list[int] = []
    for doc_id, text in enumerate(store.main[text_attribute]):
        for idx, (value, start, end) in enumerate(tokenize_words(text or "")):
            doc_ids.append(doc_id)
            values.append(value)
            array_index.append(idx)
            starts.append(start)
            ends.append(end)

    new_schema = with_attribute(
        store.schema,
        AttributeDescriptor(
            name=new_name,
            kind=AttributeKind.SPAN_LIST,
            data_type=DataType.CATEGORICAL,
            span_source=text_attribute,
        ),
    )
    children = dict(store.children)
    children[new_name] = ChildTable(
        attribute=new_name,
        doc_ids=np.array(doc_ids, dtype=np.int64),
        values=np.array(values, dtype=object),
        array_index=np.array(array_index, dtype=np.int64),
        span_start=np.array(starts, dtype=np.int64),
        span_end=np.array(ends, dtype=np.int64),
    )
    return NormalizedStore(new_schema, store.main, children, store.embeddings)
