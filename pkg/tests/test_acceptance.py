"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line. Run with `pytest tests/test_acceptance.py -v -s`.
"""

import json
import random
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

import oracle
from conftest import (
    FIXTURE_DIR,
    RANDOM_ATTRS,
    RANDOM_MANIFEST,
    fixture6_records,
    random_corpus,
    random_selection,
)
from texture import query as q
from texture.embeddings import cosine_distance, similar_to_document, similar_to_query
from texture.errors import AllNull
from texture.highlight import compute_highlights
from texture.ingest import normalize_dataset, reassemble_document, tokenize_words
from texture.schema import schema_from_manifest
from texture.store import ChildTable, EmbeddingMatrix, NormalizedStore


def report(name: str, ok: bool):
    print(f"{'PASS' if ok else 'FAIL'}: {name}")
    assert ok, name


def matching(store, selection, exclude=None):
    return q.matching_documents(store, q.compile_filter(store, selection, exclude))


# ---------------------------------------------------------------------------


def test_oracle_equivalence_500_cases():
    """500 randomized (corpus, selection) cases match a naive full-scan
    oracle exactly, within a 60 s budget."""
    started = time.perf_counter()
    rng = random.Random(2024)
    schema = schema_from_manifest(RANDOM_MANIFEST)
    for case in range(500):
        records = random_corpus(rng, max_docs=200, max_tokens=30)
        store = normalize_dataset(records, schema)
        selection = random_selection(rng)

        got = matching(store, selection)
        assert got == oracle.oracle_matching(records, selection, RANDOM_ATTRS), f"case {case}"

        attr = rng.choice(["topic", "tags", "word"])
        bars = q.summarize_categorical(store, attr, selection, k=10)
        rows, distinct = oracle.oracle_bars(records, attr, selection, RANDOM_ATTRS, k=10)
        assert list(bars.rows) == rows, f"case {case} bars({attr})"
        assert bars.total_distinct == distinct, f"case {case} distinct({attr})"

        try:
            bins = q.summarize_quantitative(store, "score", selection, bin_count=8)
            edges, counts = oracle.oracle_bins(records, "score", selection, RANDOM_ATTRS, 8)
            assert list(bins.edges) == edges, f"case {case} edges"
            assert list(bins.counts) == counts, f"case {case} bins"
        except AllNull:
            assert all(r.get("score") is None for r in records)

        years, ycounts = oracle.oracle_year_series(records, "year", selection, RANDOM_ATTRS)
        if years:
            series = q.summarize_temporal(store, "year", selection)
            assert list(series.timestamps) == years, f"case {case} series labels"
            assert list(series.counts) == ycounts, f"case {case} series"

        page = q.document_page(store, selection, limit=10)
        assert page.total_matching == len(got), f"case {case} page total"

    elapsed = time.perf_counter() - started
    print(f"  (500 cases in {elapsed:.1f}s)")
    report(f"oracle equivalence, 500 randomized cases in {elapsed:.1f}s < 60s", elapsed < 60)


def test_fixture6_golden():
    """Every fixture-derived expected value reproduced exactly."""
    schema = schema_from_manifest(json.loads((FIXTURE_DIR / "manifest.json").read_text()))
    store = normalize_dataset(fixture6_records(), schema)

    bars = q.summarize_categorical(store, "word", q.SelectionState(), k=3)
    assert bars.rows == (("data", 5), ("analysis", 2), ("drawing", 1))

    sel = q.SelectionState(
        (q.ValueSet("word", frozenset({"data", "analysis"})), q.Range("year", 2015, 2016))
    )
    assert matching(store, sel) == {0, 1, 5}

    series = q.summarize_temporal(
        store, "year", q.SelectionState((q.ValueSet("word", frozenset({"data", "analysis"})),))
    )
    assert series.counts == (1, 2, 1)

    bins = q.summarize_quantitative(store, "score", q.SelectionState(), bin_count=2)
    assert bins.counts == (2, 4)

    assert matching(store, q.SelectionState((q.ValueSet("word", frozenset({"data", "analysis"})),))) == {0, 1, 4, 5}
    assert q.summarize_categorical(store, "word", q.SelectionState((q.ValueSet("topic", frozenset({"vis"})),)), k=1).rows == (("data", 4),)
    assert q.summarize_categorical(store, "topic", q.SelectionState((q.ValueSet("word", frozenset({"data"})),))).rows == (("vis", 2), ("ml", 1))
    assert [r.doc_id for r in q.document_page(store, q.SelectionState(), sort=("score", "desc"), limit=2).rows] == [2, 4]
    assert matching(store, q.SelectionState((q.search_predicate("graph", "text"),))) == {2, 4}

    report("FIXTURE-6 golden values", True)


def test_highlight_disambiguation():
    """'won' highlights [3,6) only; random highlights always slice back to
    their matched value (1000 documents)."""
    schema = schema_from_manifest(json.loads((FIXTURE_DIR / "manifest.json").read_text()))
    store = normalize_dataset(fixture6_records(), schema)
    sel = q.SelectionState((q.ValueSet("word", frozenset({"won"})),))
    ranges = compute_highlights(store, 3, sel)
    assert [(r.start, r.end) for r in ranges] == [(3, 6)]

    rng = random.Random(77)
    rschema = schema_from_manifest(RANDOM_MANIFEST)
    checked = 0
    while checked < 1000:
        records = random_corpus(rng, max_docs=100, max_tokens=25)
        rstore = normalize_dataset(records, rschema)
        selection = q.SelectionState(
            (q.ValueSet("word", frozenset(rng.sample(["data", "analysis", "graph", "münchen", "日本"], 2))),)
        )
        vset = {v for v in selection.predicates[0].values}
        for doc_id in range(rstore.n_docs):
            text = records[doc_id]["text"]
            for r in compute_highlights(rstore, doc_id, selection):
                assert text[r.start : r.end].lower() in vset
            checked += 1
            if checked >= 1000:
                break
    report("highlight disambiguation + 1000-doc slice property", True)


def test_round_trip_100_datasets():
    """normalize -> reassemble is lossless on 100 randomized datasets with
    empty lists, nulls, and Unicode text."""
    rng = random.Random(55)
    schema = schema_from_manifest(RANDOM_MANIFEST)
    for _ in range(100):
        records = random_corpus(rng, max_docs=40, max_tokens=12)
        store = normalize_dataset(records, schema)
        for i, record in enumerate(records):
            assert reassemble_document(store, i) == record
    report("round trip, 100 randomized datasets", True)


def test_similarity_correctness():
    """Derived distance columns match brute force within 1e-9 at 1000 docs x
    64 dims; anchor exactly 0; scale invariance within 1e-12."""
    rng = np.random.default_rng(42)
    n, d = 1000, 64
    schema = schema_from_manifest(
        {
            "dataset_name": "sim",
            "attributes": [
                {"name": "text", "kind": "text"},
                {"name": "emb", "kind": "embedding", "dimension": d},
            ],
        }
    )
    vectors = rng.normal(size=(n, d))
    records = [{"text": f"doc {i}", "emb": vectors[i].tolist()} for i in range(n)]
    store = normalize_dataset(records, schema)

    anchor = 137
    col = similar_to_document(store, anchor)
    assert col.values[anchor] == 0.0
    sample = rng.choice(n, size=60, replace=False)
    for i in sample:
        assert abs(col.values[i] - cosine_distance(vectors[anchor], vectors[i])) < 1e-9

    qvec = rng.normal(size=d)

    class Fixed:
        def embed(self, text):
            return qvec.tolist()

    qcol = similar_to_query(store, "q", Fixed())
    for i in sample:
        assert abs(qcol.values[i] - cosine_distance(qvec, vectors[i])) < 1e-9

    for _ in range(100):
        a, b = rng.normal(size=8), rng.normal(size=8)
        k = float(rng.uniform(0.01, 100))
        assert abs(cosine_distance(k * a, b) - cosine_distance(a, b)) < 1e-12
        assert abs(cosine_distance(a, b) - cosine_distance(b, a)) < 1e-12
    report("similarity correctness (brute force 1e-9, anchor 0, scale 1e-12)", True)


def test_semantics_invariants():
    """Monotonicity, document-count bounds, own-chart exclusion identity over
    the randomized suite."""
    rng = random.Random(31)
    schema = schema_from_manifest(RANDOM_MANIFEST)
    for _ in range(60):
        records = random_corpus(rng, max_docs=80, max_tokens=20)
        store = normalize_dataset(records, schema)
        selection = random_selection(rng)

        total = len(matching(store, selection))
        assert total <= len(records)

        # adding a predicate never increases the match count
        extra_word = rng.choice(["data", "study", "span"])
        narrowed = selection.without("word").with_predicate(
            q.ValueSet("word", frozenset({extra_word}))
        )
        base = len(matching(store, selection.without("word")))
        assert len(matching(store, narrowed)) <= base

        # own-chart exclusion: a selection touching only attribute A leaves
        # A's summary identical to the unfiltered one
        only_topic = q.SelectionState((q.ValueSet("topic", frozenset({"vis"})),))
        assert q.summarize_categorical(store, "topic", only_topic) == q.summarize_categorical(
            store, "topic", q.SelectionState()
        )

        # fan-out: duplicate-heavy child tables never inflate document counts
        heavy = q.SelectionState((q.ValueSet("word", frozenset(("data", "study"))),))
        assert len(matching(store, heavy)) <= len(records)
    report("semantics invariants (monotonicity, bounds, own-exclusion)", True)


# ---------------------------------------------------------------------------
# performance at study scale


def _synthetic_16k_store(tmp_path):
    """16k docs x 400 tokens (6.4M span rows), built columnar-first."""
    rng = np.random.default_rng(7)
    n_docs, n_tokens = 16_000, 400
    vocab = np.array([f"w{i:04d}" for i in range(2000)], dtype=object)
    vlen = np.array([len(w) for w in vocab], dtype=np.int64)

    idx = rng.integers(0, len(vocab), size=(n_docs, n_tokens))
    lengths = vlen[idx]
    ends = np.cumsum(lengths + 1, axis=1) - 1
    starts = ends - lengths

    texts = [" ".join(vocab[row]) for row in idx]
    topics = rng.choice(np.array(["vis", "ml", "nlp", "hci"], dtype=object), size=n_docs)
    years = rng.integers(2005, 2021, size=n_docs)
    scores = np.round(rng.uniform(0, 10, size=n_docs), 3)

    manifest = dict(RANDOM_MANIFEST, dataset_name="synth16k")
    manifest = {
        "dataset_name": "synth16k",
        "attributes": [a for a in RANDOM_MANIFEST["attributes"] if a["name"] != "tags"]
        + [{"name": "emb", "kind": "embedding", "dimension": 16, "has_projection": True}],
    }
    schema = schema_from_manifest(manifest)

    child = ChildTable(
        attribute="word",
        doc_ids=np.repeat(np.arange(n_docs, dtype=np.int64), n_tokens),
        values=vocab[idx].ravel(),
        array_index=np.tile(np.arange(n_tokens, dtype=np.int64), n_docs),
        span_start=starts.ravel(),
        span_end=ends.ravel(),
        codes=idx.ravel(),
        uniques=list(vocab),
    )
    main = {
        "text": texts,
        "topic": list(topics),
        "year": [int(y) for y in years],
        "score": [float(s) for s in scores],
    }
    embeddings = EmbeddingMatrix(
        vectors=rng.normal(size=(n_docs, 16)), projection=rng.normal(size=(n_docs, 2))
    )
    store = NormalizedStore(schema, main, {"word": child}, embeddings)
    out = tmp_path / "synth16k"
    store.save(out)
    return out


def _full_refresh(store, selection):
    for attr in ("topic", "year", "score", "word"):
        q.summarize_attribute(store, attr, selection)
    q.document_page(store, selection, limit=50)
    q.projection_points(store, selection)


@pytest.mark.slow
def test_performance_16k_docs(tmp_path):
    """Cold load < 10 s; full refresh (all summaries + page + projection)
    < 250 ms p95 at 16k docs x 400 tokens."""
    store_dir = _synthetic_16k_store(tmp_path)

    t0 = time.perf_counter()
    store = NormalizedStore.load(store_dir)
    load_seconds = time.perf_counter() - t0
    print(f"  cold load: {load_seconds:.2f}s")

    rng = random.Random(13)
    # warm-up builds the lazy typed views (factorized codes, epoch arrays)
    _full_refresh(store, q.SelectionState())

    timings = []
    for _ in range(40):
        words = frozenset(f"w{rng.randint(0, 1999):04d}" for _ in range(rng.randint(1, 3)))
        lo = rng.randint(2005, 2020)
        selection = q.SelectionState(
            (
                q.ValueSet("word", words),
                q.Range("year", lo, min(2020, lo + rng.randint(0, 5))),
                q.Range("score", 1.0, 9.0),
            )
        )
        t = time.perf_counter()
        _full_refresh(store, selection)
        timings.append(time.perf_counter() - t)

    p95 = float(np.percentile(timings, 95))
    print(f"  refresh p50={np.percentile(timings, 50)*1000:.0f}ms p95={p95*1000:.0f}ms")
    report(f"cold load {load_seconds:.2f}s < 10s", load_seconds < 10)
    report(f"full refresh p95 {p95*1000:.0f}ms < 250ms", p95 < 0.250)


def test_cli_determinism(tmp_path):
    """ingest + profile is byte-identical across runs; exit codes honored."""
    env_cmd = [sys.executable, "-m", "texture.cli"]

    def run(args, **kw):
        return subprocess.run(env_cmd + args, capture_output=True, **kw)

    outputs = []
    for run_dir in ("a", "b"):
        out = tmp_path / run_dir
        r = run(
            [
                "ingest",
                "--manifest", str(FIXTURE_DIR / "manifest.json"),
                "--records", str(FIXTURE_DIR / "records.jsonl"),
                "--out", str(out),
            ]
        )
        assert r.returncode == 0, r.stderr
        p = run(["profile", "--store", str(out)])
        assert p.returncode == 0, p.stderr
        outputs.append(p.stdout)
    assert outputs[0] == outputs[1]

    bad = run(["profile", "--store", str(tmp_path / "missing")])
    assert bad.returncode == 1

    malformed = tmp_path / "bad.jsonl"
    malformed.write_text("not json\n", encoding="utf-8")
    r = run(
        [
            "ingest",
            "--manifest", str(FIXTURE_DIR / "manifest.json"),
            "--records", str(malformed),
            "--out", str(tmp_path / "s"),
        ]
    )
    assert r.returncode == 2
    report("CLI determinism and exit codes", True)
