import random

import numpy as np
import pytest

from conftest import RANDOM_MANIFEST, fixture6_records, random_corpus
from texture.errors import StoreLoadError
from texture.ingest import normalize_dataset, reassemble_document
from texture.schema import schema_from_manifest
from texture.store import NormalizedStore


def test_save_load_round_trip(tmp_path, fixture6_store):
    fixture6_store.save(tmp_path / "store")
    loaded = NormalizedStore.load(tmp_path / "store")
    assert loaded.n_docs == 6
    assert loaded.schema == fixture6_store.schema
    for i, record in enumerate(fixture6_records()):
        assert reassemble_document(loaded, i) == record


def test_save_load_preserves_mixed_and_unicode_values(tmp_path):
    schema = schema_from_manifest(RANDOM_MANIFEST)
    rng = random.Random(21)
    records = random_corpus(rng, max_docs=30, max_tokens=10)
    records[0]["topic"] = None
    store = normalize_dataset(records, schema)
    store.save(tmp_path / "s")
    loaded = NormalizedStore.load(tmp_path / "s")
    for i, record in enumerate(records):
        assert reassemble_document(loaded, i) == record


def test_save_load_embeddings(tmp_path):
    schema = schema_from_manifest(
        {
            "dataset_name": "d",
            "attributes": [
                {"name": "text", "kind": "text"},
                {"name": "emb", "kind": "embedding", "dimension": 3, "has_projection": True},
            ],
        }
    )
    records = [
        {"text": "a", "emb": {"vector": [1, 0, 0], "projection": [0.1, 0.2]}},
        {"text": "b", "emb": {"vector": [0, 2, 0], "projection": [-1.0, 3.0]}},
    ]
    store = normalize_dataset(records, schema)
    store.save(tmp_path / "s")
    loaded = NormalizedStore.load(tmp_path / "s")
    assert np.array_equal(loaded.embeddings.vectors, store.embeddings.vectors)
    assert np.array_equal(loaded.embeddings.projection, store.embeddings.projection)


def test_store_directory_layout(tmp_path, fixture6_store):
    out = tmp_path / "store"
    fixture6_store.save(out)
    names = {p.name for p in out.iterdir()}
    assert {"main.parquet", "child_word.parquet", "manifest", "meta.json"} <= names


def test_load_missing_directory(tmp_path):
    with pytest.raises(StoreLoadError):
        NormalizedStore.load(tmp_path / "nope")


def test_null_counts(fixture6_store):
    assert fixture6_store.null_count("topic") == 0
    schema = schema_from_manifest(
        {
            "dataset_name": "d",
            "attributes": [
                {"name": "text", "kind": "text"},
                {"name": "v", "kind": "single_value", "data_type": "categorical"},
            ],
        }
    )
    store = normalize_dataset([{"text": "a", "v": None}, {"text": "b", "v": "x"}], schema)
    assert store.null_count("v") == 1
