"""Character ranges to highlight in a document for the active selection.

Span-list highlights come straight from the stored offsets, never from
re-searching the text, so "won" in "we won the wonderful match" highlights
[3, 6) and not the "won" prefix of "wonderful". Substring predicates on text
attributes also highlight, via a case-insensitive scan at render time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UnknownDocument
from .query import SelectionState, Substring, _child_row_mask
from .schema import AttributeKind
from .store import NormalizedStore


@dataclass(frozen=True)
class HighlightRange:
    start: int
    end: int
    attribute: str


def compute_highlights(
    store: NormalizedStore, doc_id: int, selection: SelectionState
) -> list[HighlightRange]:
    """One range per stored span of the document whose value matches the
    selection's predicate on that span-list attribute, sorted by start."""
    if not (0 <= doc_id < store.n_docs):
        raise UnknownDocument(f"doc_id {doc_id} out of range [0, {store.n_docs})")

    ranges: list[HighlightRange] = []
    for pred in selection.predicates:
        desc = store.schema.attribute(pred.attribute)
        if desc is None:
            continue
        if desc.kind is AttributeKind.SPAN_LIST:
            child = store.children[pred.attribute]
            s = child.doc_slice(doc_id, store.n_docs)
            if s.start == s.stop:
                continue
            row_mask = _child_row_mask(child, desc.data_type, pred, rows=s)
            starts = child.span_start[s][row_mask]
            ends = child.span_end[s][row_mask]
            ranges.extend(
                HighlightRange(int(a), int(b), pred.attribute) for a, b in zip(starts, ends)
            )
        elif desc.kind is AttributeKind.TEXT and isinstance(pred, Substring):
            text = store.main[pred.attribute][doc_id]
            haystack = text if pred.case_sensitive else text.casefold()
            needle = pred.query if pred.case_sensitive else pred.query.casefold()
            pos = haystack.find(needle)
            while pos >= 0:
                ranges.append(HighlightRange(pos, pos + len(needle), pred.attribute))
                pos = haystack.find(needle, pos + 1)
    ranges.sort(key=lambda r: (r.start, r.end, r.attribute))
    return ranges


def merge_ranges(ranges: list[HighlightRange]) -> list[HighlightRange]:
    """Coalesce overlapping or touching ranges within each attribute;
    ranges from different attributes are never merged. Idempotent and
    order-insensitive."""
    by_attr: dict[str, list[HighlightRange]] = {}
    for r in ranges:
        by_attr.setdefault(r.attribute, []).append(r)

    merged: list[HighlightRange] = []
    for attr, group in by_attr.items():
        group.sort(key=lambda r: (r.start, r.end))
        current: HighlightRange | None = None
        for r in group:
            if current is not None and r.start <= current.end:
                if r.end > current.end:
                    current = HighlightRange(current.start, r.end, attr)
            else:
                if current is not None:
                    merged.append(current)
                current = r
        if current is not None:
            merged.append(current)
    merged.sort(key=lambda r: (r.start, r.end, r.attribute))
    return merged
