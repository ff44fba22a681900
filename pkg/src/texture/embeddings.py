"""Similarity search over document embeddings.

Similarity results are materialized as derived quantitative columns (cosine
distance, 0 = most similar) registered in the store's session registry, so
they can be brushed and sorted like any ingested attribute. Distance is
computed by exact full scan; at the corpus sizes this engine targets a scan
stays interactive.
"""

from __future__ import annotations

import hashlib
import os
from typing import Protocol

import numpy as np

from .errors import (
    DegenerateData,
    DimensionMismatch,
    EmbedderFailure,
    NoEmbedding,
    UnknownDocument,
    ZeroVector,
)
from .ingest import tokenize_words
from .store import DerivedColumn, EmbeddingMatrix, NormalizedStore

DEFAULT_TIMEOUT_SECONDS = 30.0


def cosine_distance(a, b) -> float:
    """1 - cos(a, b), in [0, 2], computed in double precision."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatch(f"vector dimensions differ: {a.shape} vs {b.shape}")
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        raise ZeroVector("cosine distance undefined for zero vectors")
    return 1.0 - float(np.dot(a, b)) / (na * nb)


def _distances_to(matrix: np.ndarray, anchor: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(matrix, axis=1)
    an = float(np.linalg.norm(anchor))
    if an == 0.0:
        raise ZeroVector("cosine distance undefined for zero vectors")
    return 1.0 - (matrix @ anchor) / (norms * an)


def similar_to_document(store: NormalizedStore, doc_id: int) -> DerivedColumn:
    """Cosine distance from one document's embedding to every document;
    the anchor's own distance is exactly 0."""
    if store.embeddings is None:
        raise NoEmbedding("store has no embedding")
    if not (0 <= doc_id < store.n_docs):
        raise UnknownDocument(f"doc_id {doc_id} out of range [0, {store.n_docs})")
    vectors = store.embeddings.vectors
    values = _distances_to(vectors, vectors[doc_id])
    values[doc_id] = 0.0
    return store.derived.register(label=f"distance to doc {doc_id}", values=values)


class EmbedderClient(Protocol):
    """Maps text to a vector of the store's embedding dimension."""

    def embed(self, text: str) -> list[float]: ...


class HttpEmbedder:
    """Remote embedder: POST {"text": ...} -> {"embedding": [...]}.

    Endpoint and optional bearer token come from configuration
    (TEXTURE_EMBEDDER_URL / TEXTURE_EMBEDDER_TOKEN). No retries; failures
    surface as EmbedderFailure with the cause attached.
    """

    def __init__(
        self,
        url: str | None = None,
        token: str | None = None,
        timeout: float = DEFAULT_TIMEOUT_SECONDS,
    ):
        self.url = url or os.environ.get("TEXTURE_EMBEDDER_URL")
        self.token = token or os.environ.get("TEXTURE_EMBEDDER_TOKEN")
        self.timeout = timeout
        if not self.url:
            raise EmbedderFailure("no embedder endpoint configured (TEXTURE_EMBEDDER_URL)")

    def embed(self, text: str) -> list[float]:
        import httpx

        headers = {}
        if self.token:
            headers["Authorization"] = f"Bearer {self.token}"
        try:
            resp = httpx.post(self.url, json={"text": text}, headers=headers, timeout=self.timeout)
            resp.raise_for_status()
            body = resp.json()
            return [float(x) for x in body["embedding"]]
        except Exception as exc:  # noqa: BLE001 - every remote failure maps to one error
            raise EmbedderFailure(f"remote embedder failed: {exc}") from exc


class HashedBagOfWordsEmbedder:
    """Deterministic offline embedder for tests and air-gapped use.

    Each word token is hashed (salted SHA-256) to a dimension and counted;
    identical text always yields an identical vector.
    """

    def __init__(self, dimension: int, seed: int = 0):
        self.dimension = dimension
        self.seed = seed

    def embed(self, text: str) -> list[float]:
        vec = [0.0] * self.dimension
        for value, _, _ in tokenize_words(text):
            digest = hashlib.sha256(f"{self.seed}:{value}".encode()).digest()
            vec[int.from_bytes(digest[:8], "big") % self.dimension] += 1.0
        return vec


def similar_to_query(
    store: NormalizedStore, query: str, embedder: EmbedderClient
) -> DerivedColumn:
    """Embed the query once, then cosine distance to every document."""
    if store.embeddings is None:
        raise NoEmbedding("store has no embedding")
    qvec = np.asarray(embedder.embed(query), dtype=np.float64)
    if qvec.shape != (store.embeddings.dimension,):
        raise DimensionMismatch(
            f"embedder returned dimension {qvec.shape}, store has {store.embeddings.dimension}"
        )
    values = _distances_to(store.embeddings.vectors, qvec)
    label = query if len(query) <= 40 else query[:37] + "..."
    return store.derived.register(label=f"distance to query '{label}'", values=values)


def pca_projection(matrix: EmbeddingMatrix) -> np.ndarray:
    """Mean-centered projection onto the top-2 principal directions.

    Sign convention: each component's largest-magnitude loading is positive,
    so the output is deterministic across runs and BLAS builds.
    """
    x = matrix.vectors - matrix.vectors.mean(axis=0)
    if x.shape[0] < 2 or not np.any(x):
        raise DegenerateData("PCA needs at least two distinct points")
    _, s, vt = np.linalg.svd(x, full_matrices=False)
    if s[0] == 0.0:
        raise DegenerateData("zero variance in every direction")
    k = min(2, vt.shape[0])
    components = vt[:k]
    for i in range(k):
        j = int(np.argmax(np.abs(components[i])))
        if components[i, j] < 0:
            components[i] = -components[i]
    proj = x @ components.T
    if proj.shape[1] < 2:
        proj = np.hstack([proj, np.zeros((proj.shape[0], 1))])
    return proj
