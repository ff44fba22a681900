import json
import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from texture.ingest import normalize_dataset, tokenize_words
from texture.schema import load_manifest

FIXTURE_DIR = Path(__file__).resolve().parents[1] / "fixtures" / "fixture6"

# oracle attribute metadata for the random corpus schema
RANDOM_ATTRS = {
    "text": ("text", "cat"),
    "topic": ("single", "cat"),
    "year": ("single", "temporal"),
    "score": ("single", "quant"),
    "tags": ("list", "cat"),
    "word": ("spanlist", "cat"),
}

VOCAB = [
    "data", "analysis", "model", "graph", "study", "corpus", "topic",
    "visual", "chart", "filter", "query", "span", "word", "text", "année",
    "münchen", "日本", "результат",
]
TOPICS = ["vis", "ml", "nlp", "hci"]
TAGS = ["alpha", "beta", "gamma", "delta"]


def fixture6_records():
    with open(FIXTURE_DIR / "records.jsonl", encoding="utf-8") as f:
        return [json.loads(line) for line in f if line.strip()]


@pytest.fixture(scope="session")
def fixture6_schema():
    return load_manifest(FIXTURE_DIR / "manifest.json")


@pytest.fixture(scope="session")
def fixture6_store(fixture6_schema):
    return normalize_dataset(fixture6_records(), fixture6_schema)


def random_record(rng: random.Random, max_tokens: int = 30) -> dict:
    n_tokens = rng.randint(0, max_tokens)
    tokens = [rng.choice(VOCAB) for _ in range(n_tokens)]
    text = " ".join(tokens)
    word = [
        {"value": v, "start": s, "end": e} for v, s, e in tokenize_words(text)
    ]
    return {
        "text": text,
        "topic": rng.choice(TOPICS) if rng.random() > 0.1 else None,
        "year": rng.randint(2010, 2020) if rng.random() > 0.1 else None,
        "score": round(rng.uniform(0, 10), 2) if rng.random() > 0.1 else None,
        "tags": [rng.choice(TAGS) for _ in range(rng.randint(0, 3))],
        "word": word,
    }


def random_corpus(rng: random.Random, max_docs: int = 200, max_tokens: int = 30):
    n = rng.randint(1, max_docs)
    return [random_record(rng, max_tokens) for _ in range(n)]


RANDOM_MANIFEST = {
    "dataset_name": "random",
    "attributes": [
        {"name": "text", "kind": "text"},
        {"name": "topic", "kind": "single_value", "data_type": "categorical"},
        {"name": "year", "kind": "single_value", "data_type": "temporal"},
        {"name": "score", "kind": "single_value", "data_type": "quantitative"},
        {"name": "tags", "kind": "list", "data_type": "categorical"},
        {"name": "word", "kind": "span_list", "data_type": "categorical", "span_source": "text"},
    ],
}


def random_selection(rng: random.Random):
    from texture.query import Range, SelectionState, Substring, ValueSet

    preds = []
    if rng.random() < 0.5:
        preds.append(ValueSet("topic", frozenset(rng.sample(TOPICS, rng.randint(1, 2)))))
    if rng.random() < 0.4:
        lo = rng.randint(2010, 2020)
        hi = rng.randint(lo, 2020)
        if rng.random() < 0.5:
            preds.append(Range("year", lo, hi))
        else:
            preds.append(ValueSet("year", frozenset(range(lo, hi + 1))))
    if rng.random() < 0.4:
        lo = round(rng.uniform(0, 10), 2)
        hi = round(rng.uniform(lo, 10), 2)
        preds.append(Range("score", lo, hi, rng.random() < 0.8, rng.random() < 0.8))
    if rng.random() < 0.4:
        preds.append(ValueSet("tags", frozenset(rng.sample(TAGS, rng.randint(1, 2)))))
    if rng.random() < 0.5:
        preds.append(ValueSet("word", frozenset(rng.sample(VOCAB, rng.randint(1, 3)))))
    if rng.random() < 0.25:
        preds.append(Substring("text", rng.choice(VOCAB)[: rng.randint(2, 4)]))
    return SelectionState(tuple(preds))
