"""Stateless HTTP facade over the query engine.

Selection state lives client-side and is sent with every request; the only
server-side mutable state is the per-dataset registry of derived similarity
columns. All bodies are JSON (UTF-8).
"""

from __future__ import annotations

import asyncio
from pathlib import Path
from typing import Any, Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import embeddings as emb
from . import query as q
from .errors import BadSelection, NoEmbedding, TextureError, UnknownDataset
from .highlight import HighlightRange
from .ingest import reassemble_document
from .schema import AttributeKind
from .store import NormalizedStore

_STATUS_BY_CODE = {
    "unknown_document": 404,
    "unknown_dataset": 404,
    "no_embedding": 409,
    "embedder_failure": 502,
}

DEFAULT_REQUEST_TIMEOUT = 30.0


class SelectionEntry(BaseModel):
    attribute: Optional[str] = None
    op: Optional[str] = None
    args: dict[str, Any] = Field(default_factory=dict)
    derived_handle: Optional[str] = None
    range: Optional[list[Any]] = None


class SummariesRequest(BaseModel):
    selection: list[SelectionEntry] = Field(default_factory=list)
    attributes: list[str] = Field(default_factory=list)
    k: int = 10
    bin_count: int = 20


class DocumentsRequest(BaseModel):
    selection: list[SelectionEntry] = Field(default_factory=list)
    sort: Optional[list[str]] = None  # [attribute, "asc"|"desc"]
    offset: int = 0
    limit: int = 50


class SimilarityRequest(BaseModel):
    mode: str  # "instance" | "query"
    doc_id: Optional[int] = None
    text: Optional[str] = None


class ProjectionRequest(BaseModel):
    selection: list[SelectionEntry] = Field(default_factory=list)
    color_attribute: Optional[str] = None


def parse_selection(entries: list[SelectionEntry]) -> q.SelectionState:
    preds: list[q.Predicate] = []
    for i, e in enumerate(entries):
        try:
            if e.derived_handle is not None:
                if e.range is None or len(e.range) != 2:
                    raise BadSelection("derived predicate needs a [lo, hi] range")
                preds.append(q.Range(e.derived_handle, e.range[0], e.range[1]))
                continue
            if e.attribute is None or e.op is None:
                raise BadSelection("selection entry needs attribute and op")
            if e.op == "in":
                preds.append(q.ValueSet(e.attribute, frozenset(e.args.get("values", []))))
            elif e.op == "range":
                preds.append(
                    q.Range(
                        e.attribute,
                        e.args.get("lo"),
                        e.args.get("hi"),
                        bool(e.args.get("lo_inclusive", True)),
                        bool(e.args.get("hi_inclusive", True)),
                    )
                )
            elif e.op == "contains":
                preds.append(
                    q.Substring(
                        e.attribute,
                        e.args.get("query", ""),
                        bool(e.args.get("case_sensitive", False)),
                    )
                )
            elif e.op == "null":
                preds.append(q.NullTest(e.attribute))
            else:
                raise BadSelection(f"unknown op {e.op!r}")
        except TextureError as exc:
            raise BadSelection(f"selection entry {i}: {exc}") from exc
    return q.SelectionState(tuple(preds))


def _summary_wire(result: q.SummaryResult) -> dict[str, Any]:
    if isinstance(result, q.Bars):
        return {
            "type": "bars",
            "attribute": result.attribute,
            "rows": [[v, c] for v, c in result.rows],
            "total_distinct": result.total_distinct,
        }
    if isinstance(result, q.Bins):
        return {
            "type": "bins",
            "attribute": result.attribute,
            "edges": list(result.edges),
            "counts": list(result.counts),
        }
    return {
        "type": "series",
        "attribute": result.attribute,
        "timestamps": list(result.timestamps),
        "counts": list(result.counts),
    }


def _highlight_wire(h: HighlightRange) -> dict[str, Any]:
    return {"attribute": h.attribute, "range": [h.start, h.end]}


def _page_wire(page: q.DocumentPage) -> dict[str, Any]:
    return {
        "total_matching": page.total_matching,
        "offset": page.offset,
        "limit": page.limit,
        "sort": list(page.sort) if page.sort else None,
        "rows": [
            {
                "doc_id": r.doc_id,
                "previews": r.previews,
                "values": r.values,
                "highlights": [_highlight_wire(h) for h in r.highlights],
            }
            for r in page.rows
        ],
    }


def create_app(
    stores: dict[str, NormalizedStore],
    ui_dir: str | Path | None = None,
    cors_origins: list[str] | None = None,
    embedder_factory=None,
    request_timeout: float = DEFAULT_REQUEST_TIMEOUT,
) -> FastAPI:
    """Build the service over already-loaded stores (load order preserved)."""
    app = FastAPI(title="texture", version="0.1.0")

    if cors_origins:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware, allow_origins=cors_origins, allow_methods=["*"], allow_headers=["*"]
        )

    @app.middleware("http")
    async def timeout_middleware(request: Request, call_next):
        try:
            return await asyncio.wait_for(call_next(request), timeout=request_timeout)
        except asyncio.TimeoutError:
            return JSONResponse(
                status_code=503, content={"code": "overloaded", "message": "request timed out"}
            )

    @app.exception_handler(TextureError)
    async def texture_error_handler(_request: Request, exc: TextureError):
        status = _STATUS_BY_CODE.get(exc.code, 400)
        return JSONResponse(status_code=status, content={"code": exc.code, "message": str(exc)})

    def get_store(name: str) -> NormalizedStore:
        store = stores.get(name)
        if store is None:
            raise UnknownDataset(f"no dataset named '{name}'")
        return store

    @app.get("/datasets")
    def list_datasets():
        return [
            {
                "name": name,
                "n_docs": store.n_docs,
                "n_attributes": len(store.schema.attributes),
            }
            for name, store in stores.items()
        ]

    @app.get("/datasets/{name}/schema")
    def dataset_schema(name: str):
        store = get_store(name)
        manifest = store.schema.to_manifest()
        for attr in manifest["attributes"]:
            desc = store.schema.attribute(attr["name"])
            if desc.kind in (AttributeKind.TEXT, AttributeKind.SINGLE_VALUE):
                attr["null_count"] = store.null_count(attr["name"])
        return {
            "dataset": manifest,
            "n_docs": store.n_docs,
            "has_projection": store.embeddings is not None,
            "derived_columns": [
                {"handle": h, "label": store.derived.get(h).label} for h in store.derived.handles()
            ],
        }

    @app.post("/datasets/{name}/summaries")
    def summaries(name: str, body: SummariesRequest):
        store = get_store(name)
        selection = parse_selection(body.selection)
        return {
            attr: _summary_wire(
                q.summarize_attribute(store, attr, selection, k=body.k, bin_count=body.bin_count)
            )
            for attr in body.attributes
        }

    @app.post("/datasets/{name}/documents")
    def documents(name: str, body: DocumentsRequest):
        store = get_store(name)
        selection = parse_selection(body.selection)
        sort = None
        if body.sort is not None:
            if len(body.sort) != 2:
                raise BadSelection("sort must be [attribute, direction]")
            sort = (body.sort[0], body.sort[1])
        page = q.document_page(store, selection, sort=sort, offset=body.offset, limit=body.limit)
        return _page_wire(page)

    @app.get("/datasets/{name}/documents/{doc_id}")
    def document(name: str, doc_id: int):
        store = get_store(name)
        return {"doc_id": doc_id, "record": reassemble_document(store, doc_id)}

    @app.post("/datasets/{name}/similarity")
    def similarity(name: str, body: SimilarityRequest):
        store = get_store(name)
        if store.embeddings is None:
            raise NoEmbedding("dataset has no embedding")
        if body.mode == "instance":
            if body.doc_id is None:
                raise BadSelection("instance mode needs doc_id")
            col = emb.similar_to_document(store, body.doc_id)
        elif body.mode == "query":
            if not body.text:
                raise BadSelection("query mode needs text")
            if embedder_factory is not None:
                embedder = embedder_factory(store)
            else:
                import os

                if os.environ.get("TEXTURE_EMBEDDER_URL"):
                    embedder = emb.HttpEmbedder()
                else:
                    embedder = emb.HashedBagOfWordsEmbedder(store.embeddings.dimension)
            col = emb.similar_to_query(store, body.text, embedder)
        else:
            raise BadSelection(f"unknown similarity mode {body.mode!r}")
        return {"handle": col.handle, "label": col.label}

    @app.post("/datasets/{name}/projection")
    def projection(name: str, body: ProjectionRequest):
        store = get_store(name)
        selection = parse_selection(body.selection)
        return q.projection_points(store, selection, color_attribute=body.color_attribute)

    if ui_dir is not None and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
