"""texture: interactive text-corpus exploration engine.

Schema-driven ingest into a normalized columnar store, cross-filtered
summaries with automatic semi-join inference, span highlighting, embedding
similarity search, and an HTTP service for the browser UI.
"""

from .schema import (
    AttributeDescriptor,
    AttributeKind,
    DataType,
    DatasetSchema,
    ValidatedSchema,
    infer_data_type,
    validate_schema,
)
from .ingest import normalize_dataset, reassemble_document, tokenize_words
from .store import EmbeddingMatrix, NormalizedStore
from .query import (
    Bars,
    Bins,
    DocumentFilterPlan,
    DocumentPage,
    NullTest,
    Range,
    SelectionState,
    Series,
    Substring,
    ValueSet,
    compile_filter,
    document_page,
    matching_documents,
    projection_points,
    search_predicate,
    summarize_attribute,
    summarize_categorical,
    summarize_quantitative,
    summarize_temporal,
)
from .highlight import HighlightRange, compute_highlights, merge_ranges
from .embeddings import (
    HashedBagOfWordsEmbedder,
    HttpEmbedder,
    cosine_distance,
    pca_projection,
    similar_to_document,
    similar_to_query,
)

__version__ = "0.1.0"
