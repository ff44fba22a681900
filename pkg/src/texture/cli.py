"""Operator command line: ingest, tokenize, serve, profile.

Logs go to stderr; data output (profile) goes to stdout so it pipes cleanly.
Exit codes: 0 success, 1 config/load error, 2 data error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import query as q
from .errors import IngestError, SchemaValidationError, TextureError
from .ingest import add_token_attribute, normalize_dataset
from .schema import AttributeKind, DataType, load_manifest
from .store import NormalizedStore

EXIT_CONFIG = 1
EXIT_DATA = 2


def _log(message: str) -> None:
    click.echo(message, err=True)


@click.group()
def main():
    """Explore text corpora: ingest, derive word spans, serve, profile."""


@main.command()
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True))
@click.option("--records", "records_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
def ingest(manifest_path, records_path, out_dir):
    """Normalize a manifest + NDJSON record file into a store directory."""
    try:
        schema = load_manifest(manifest_path)
    except SchemaValidationError as exc:
        for v in exc.violations:
            _log(f"schema error: {v}")
        sys.exit(EXIT_CONFIG)

    records = []
    with open(records_path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError as exc:
                _log(f"data error: line {lineno}: malformed record: {exc}")
                sys.exit(EXIT_DATA)
    if not records:
        _log("warning: records file is empty; writing an empty store")

    try:
        store = normalize_dataset(records, schema)
    except IngestError as exc:
        _log(f"data error: {exc}")
        sys.exit(EXIT_DATA)

    store.save(out_dir)
    _log(f"main: {store.n_docs} rows")
    for name, child in store.children.items():
        _log(f"child_{name}: {len(child)} rows")
    if store.embeddings is not None:
        _log(f"embeddings: {store.embeddings.n_docs} x {store.embeddings.dimension}")


@main.command()
@click.option("--store", "store_dir", required=True, type=click.Path(path_type=str))
@click.option("--text-attr", "text_attr", required=True)
@click.option("--as", "new_name", required=True)
def tokenize(store_dir, text_attr, new_name):
    """Derive a word span-list attribute from a text attribute."""
    try:
        store = NormalizedStore.load(store_dir)
    except TextureError as exc:
        _log(f"load error: {exc}")
        sys.exit(EXIT_CONFIG)
    try:
        updated = add_token_attribute(store, text_attr, new_name)
    except TextureError as exc:
        _log(f"error: {exc}")
        sys.exit(EXIT_DATA)
    updated.save(store_dir)
    _log(f"child_{new_name}: {len(updated.children[new_name])} rows")


@main.command()
@click.option("--store", "store_dirs", required=True, multiple=True, type=click.Path())
@click.option("--port", default=8080, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--ui-dir", default=None, type=click.Path(), help="Static frontend assets to host.")
def serve(store_dirs, port, host, ui_dir):
    """Serve the API (and UI assets, if built) over the given stores."""
    stores = {}
    for d in store_dirs:
        try:
            store = NormalizedStore.load(d)
        except TextureError as exc:
            _log(f"load error: {d}: {exc}")
            sys.exit(EXIT_CONFIG)
        stores[store.schema.dataset_name or Path(d).name] = store

    from .api import create_app

    if ui_dir is None:
        bundled = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        if bundled.is_dir():
            ui_dir = str(bundled)
    app = create_app(stores, ui_dir=ui_dir, cors_origins=["*"])

    import uvicorn

    _log(f"ready: serving {len(stores)} dataset(s) at http://{host}:{port}")
    try:
        uvicorn.run(app, host=host, port=port, log_level="warning")
    except SystemExit:
        raise
    except OSError as exc:
        _log(f"bind error: {exc}")
        sys.exit(EXIT_CONFIG)


@main.command()
@click.option("--store", "store_dir", required=True, type=click.Path(path_type=str))
@click.option("--format", "fmt", default="json", type=click.Choice(["json"]), show_default=True)
def profile(store_dir, fmt):
    """Print every attribute's empty-selection summary as JSON on stdout."""
    try:
        store = NormalizedStore.load(store_dir)
    except TextureError as exc:
        _log(f"load error: {exc}")
        sys.exit(EXIT_CONFIG)

    from .api import _summary_wire

    empty = q.SelectionState()
    attributes = []
    for a in store.schema.attributes:
        entry: dict = {"name": a.name, "kind": a.kind.value}
        if a.data_type is not None:
            entry["data_type"] = a.data_type.value
        if a.kind in (AttributeKind.TEXT, AttributeKind.SINGLE_VALUE):
            entry["null_count"] = store.null_count(a.name)
        if a.data_type is not None and store.n_docs > 0:
            try:
                entry["summary"] = _summary_wire(q.summarize_attribute(store, a.name, empty))
            except TextureError as exc:
                entry["summary_error"] = exc.code
        attributes.append(entry)

    doc = {
        "dataset": store.schema.dataset_name,
        "n_docs": store.n_docs,
        "attributes": attributes,
    }
    if store.embeddings is not None:
        doc["projection"] = {
            "n_docs": store.embeddings.n_docs,
            "dimension": store.embeddings.dimension,
            "has_projection": store.embeddings.projection is not None,
        }
    click.echo(json.dumps(doc, indent=2, ensure_ascii=False, sort_keys=True))


if __name__ == "__main__":
    main()
