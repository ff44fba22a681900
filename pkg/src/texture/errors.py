"""Exception types shared across the engine.

Every error carries a stable machine-readable ``code`` so the HTTP layer can
map engine failures to API error payloads without string matching.
"""

from __future__ import annotations


class TextureError(Exception):
    """Base class for all engine errors."""

    code = "error"


class SchemaValidationError(TextureError):
    """Schema invariant violations; collects every violation found."""

    code = "invalid_schema"

    def __init__(self, violations: list[str]):
        self.violations = violations
        super().__init__("; ".join(violations))


class EmptySample(TextureError):
    code = "empty_sample"


class IngestError(TextureError):
    """Data error during normalization; names the record and attribute."""

    code = "ingest_error"

    def __init__(self, message: str, record_index: int | None = None, attribute: str | None = None):
        self.record_index = record_index
        self.attribute = attribute
        prefix = ""
        if record_index is not None:
            prefix += f"record {record_index}: "
        if attribute is not None:
            prefix += f"attribute '{attribute}': "
        super().__init__(prefix + message)


class SpanOutOfBounds(IngestError):
    code = "span_out_of_bounds"


class SpanValueMismatch(IngestError):
    code = "span_value_mismatch"


class DimensionMismatch(IngestError):
    code = "dimension_mismatch"


class MissingRequiredField(IngestError):
    code = "missing_required_field"


class UnknownDocument(TextureError):
    code = "unknown_document"


class UnknownAttribute(TextureError):
    code = "unknown_attribute"


class WrongDataType(TextureError):
    code = "wrong_data_type"


class AllNull(TextureError):
    code = "all_null"


class UnsortableAttribute(TextureError):
    code = "unsortable_attribute"


class NoEmbedding(TextureError):
    code = "no_embedding"


class InvalidColorAttribute(TextureError):
    code = "invalid_color_attribute"


class EmptyQuery(TextureError):
    code = "empty_query"


class BadSelection(TextureError):
    code = "bad_selection"


class ZeroVector(TextureError):
    code = "zero_vector"


class DegenerateData(TextureError):
    code = "degenerate_data"


class EmbedderFailure(TextureError):
    code = "embedder_failure"


class NameCollision(TextureError):
    code = "name_collision"


class StoreLoadError(TextureError):
    code = "store_load_error"


class UnknownDataset(TextureError):
    code = "unknown_dataset"
