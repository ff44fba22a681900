"""Attribute schema: the five attribute kinds, data types, and validation.

A dataset is described by a manifest of attribute descriptors. Each attribute
is one of five kinds (text, single value, list, span list, embedding); value
columns additionally carry a data type (quantitative / categorical / temporal)
that drives how they are summarized and charted.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any, Iterable

from .errors import EmptySample, SchemaValidationError

NAME_RE = re.compile(r"^[A-Za-z0-9_]+$")

# Bare integers in this range are treated as calendar years during type
# inference and temporal parsing.
YEAR_MIN, YEAR_MAX = 1500, 2100


class AttributeKind(str, Enum):
    TEXT = "text"
    SINGLE_VALUE = "single_value"
    LIST = "list"
    SPAN_LIST = "span_list"
    EMBEDDING = "embedding"


class DataType(str, Enum):
    QUANTITATIVE = "quantitative"
    CATEGORICAL = "categorical"
    TEMPORAL = "temporal"


#: Kinds whose values live in child tables, one row per element.
CHILD_KINDS = (AttributeKind.LIST, AttributeKind.SPAN_LIST)


@dataclass(frozen=True)
class AttributeDescriptor:
    name: str
    kind: AttributeKind
    data_type: DataType | None = None
    span_source: str | None = None
    dimension: int | None = None
    has_projection: bool = False

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"name": self.name, "kind": self.kind.value}
        if self.data_type is not None:
            out["data_type"] = self.data_type.value
        if self.span_source is not None:
            out["span_source"] = self.span_source
        if self.dimension is not None:
            out["dimension"] = self.dimension
        if self.kind is AttributeKind.EMBEDDING:
            out["has_projection"] = self.has_projection
        return out


@dataclass(frozen=True)
class DatasetSchema:
    dataset_name: str
    attributes: tuple[AttributeDescriptor, ...]
    id_field: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "attributes", tuple(self.attributes))

    def attribute(self, name: str) -> AttributeDescriptor | None:
        for a in self.attributes:
            if a.name == name:
                return a
        return None

    def by_kind(self, *kinds: AttributeKind) -> list[AttributeDescriptor]:
        return [a for a in self.attributes if a.kind in kinds]

    def to_manifest(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "dataset_name": self.dataset_name,
            "attributes": [a.to_dict() for a in self.attributes],
        }
        if self.id_field is not None:
            out["id_field"] = self.id_field
        return out


@dataclass(frozen=True)
class ValidatedSchema(DatasetSchema):
    """A DatasetSchema whose invariants have been checked; immutable."""


def validate_schema(schema: DatasetSchema) -> ValidatedSchema:
    """Check every schema invariant; raises SchemaValidationError listing all
    violations, otherwise returns the schema marked validated.

    Idempotent: validating a ValidatedSchema returns an equal schema.
    """
    violations: list[str] = []
    seen: set[str] = set()
    text_names = {a.name for a in schema.attributes if a.kind is AttributeKind.TEXT}
    embeddings = [a for a in schema.attributes if a.kind is AttributeKind.EMBEDDING]

    for a in schema.attributes:
        if not NAME_RE.match(a.name):
            violations.append(f"InvalidName: attribute '{a.name}' must match [A-Za-z0-9_]+")
        if a.name in seen:
            violations.append(f"DuplicateName: attribute '{a.name}' declared more than once")
        seen.add(a.name)

        if a.kind in (AttributeKind.TEXT, AttributeKind.EMBEDDING):
            if a.data_type is not None:
                violations.append(f"UnexpectedDataType: '{a.name}' ({a.kind.value}) carries no data type")
        if a.kind is AttributeKind.SPAN_LIST:
            if a.span_source is None or a.span_source not in text_names:
                violations.append(
                    f"MissingSpanSource: span list '{a.name}' must target a declared text attribute"
                )
        elif a.span_source is not None:
            violations.append(f"UnexpectedSpanSource: '{a.name}' is not a span list")
        if a.kind is AttributeKind.EMBEDDING:
            if a.dimension is None or a.dimension <= 0:
                violations.append(f"MissingDimension: embedding '{a.name}' needs a positive dimension")
        elif a.dimension is not None:
            violations.append(f"UnexpectedDimension: '{a.name}' is not an embedding")

    if len(embeddings) > 1:
        violations.append("MultipleEmbeddings: at most one embedding attribute per dataset")
    if not text_names:
        violations.append("NoTextAttribute: at least one text attribute is required")
    if schema.id_field is not None:
        idf = schema.attribute(schema.id_field)
        if idf is None or idf.kind is not AttributeKind.SINGLE_VALUE:
            violations.append(f"InvalidIdField: id_field '{schema.id_field}' must name a single-value attribute")

    if violations:
        raise SchemaValidationError(violations)
    return ValidatedSchema(schema.dataset_name, schema.attributes, schema.id_field)


# ---------------------------------------------------------------------------
# value parsing


def parse_number(value: Any) -> float | None:
    """Parse a scalar as a number; None if it does not parse."""
    if isinstance(value, bool):
        return None
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(value.strip())
        except ValueError:
            return None
    return None


def _is_bare_year(value: Any) -> int | None:
    if isinstance(value, bool):
        return None
    if isinstance(value, int) and YEAR_MIN <= value <= YEAR_MAX:
        return value
    if isinstance(value, str):
        s = value.strip()
        if len(s) == 4 and s.isdigit() and YEAR_MIN <= int(s) <= YEAR_MAX:
            return int(s)
    return None


def parse_temporal(value: Any) -> float | None:
    """Parse a scalar as a UTC epoch-second timestamp.

    Accepts ISO-8601 dates/datetimes and bare 4-digit years (mapped to
    January 1 of that year). Returns None if the value does not parse.
    """
    year = _is_bare_year(value)
    if year is not None:
        return datetime(year, 1, 1, tzinfo=timezone.utc).timestamp()
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        # Numbers outside the year range are taken as epoch seconds.
        return float(value)
    if isinstance(value, str):
        try:
            dt = datetime.fromisoformat(value.strip())
        except ValueError:
            return None
        if dt.tzinfo is None:
            dt = dt.replace(tzinfo=timezone.utc)
        return dt.timestamp()
    return None


def infer_data_type(sample_values: Iterable[Any]) -> DataType:
    """Infer a data type from sample values.

    Temporal wins when every value parses as an ISO date/datetime or a bare
    4-digit year; quantitative when every value parses as a number; otherwise
    categorical. An explicit manifest data_type always overrides inference.
    """
    values = [v for v in sample_values]
    if not values:
        raise EmptySample("cannot infer a data type from an empty sample")

    def is_temporal(v: Any) -> bool:
        if _is_bare_year(v) is not None:
            return True
        if isinstance(v, str):
            try:
                datetime.fromisoformat(v.strip())
                return True
            except ValueError:
                return False
        return False

    if all(is_temporal(v) for v in values):
        return DataType.TEMPORAL
    if all(parse_number(v) is not None for v in values):
        return DataType.QUANTITATIVE
    return DataType.CATEGORICAL


# ---------------------------------------------------------------------------
# manifest (de)serialization

_ATTR_FIELDS = {"name", "kind", "data_type", "span_source", "dimension", "has_projection"}
_MANIFEST_FIELDS = {"dataset_name", "id_field", "attributes"}


def schema_from_manifest(doc: dict[str, Any]) -> ValidatedSchema:
    """Build and validate a schema from a parsed manifest document.

    Unknown fields are rejected rather than ignored, so manifest typos fail
    fast instead of silently dropping configuration.
    """
    unknown = set(doc) - _MANIFEST_FIELDS
    if unknown:
        raise SchemaValidationError([f"UnknownField: manifest field(s) {sorted(unknown)}"])
    attrs = []
    violations: list[str] = []
    for raw in doc.get("attributes", []):
        extra = set(raw) - _ATTR_FIELDS
        if extra:
            violations.append(f"UnknownField: attribute '{raw.get('name', '?')}' field(s) {sorted(extra)}")
            continue
        try:
            kind = AttributeKind(raw["kind"])
        except (KeyError, ValueError):
            violations.append(f"InvalidKind: attribute '{raw.get('name', '?')}'")
            continue
        dt = raw.get("data_type")
        try:
            data_type = DataType(dt) if dt is not None else None
        except ValueError:
            violations.append(f"InvalidDataType: attribute '{raw.get('name', '?')}': {dt!r}")
            continue
        attrs.append(
            AttributeDescriptor(
                name=raw.get("name", ""),
                kind=kind,
                data_type=data_type,
                span_source=raw.get("span_source"),
                dimension=raw.get("dimension"),
                has_projection=bool(raw.get("has_projection", False)),
            )
        )
    if violations:
        raise SchemaValidationError(violations)
    schema = DatasetSchema(
        dataset_name=doc.get("dataset_name", ""),
        attributes=tuple(attrs),
        id_field=doc.get("id_field"),
    )
    return validate_schema(schema)


def load_manifest(path: str | Path) -> ValidatedSchema:
    with open(path, encoding="utf-8") as f:
        return schema_from_manifest(json.load(f))


def with_attribute(schema: ValidatedSchema, descriptor: AttributeDescriptor) -> ValidatedSchema:
    """Return a new validated schema with one descriptor appended."""
    return validate_schema(
        DatasetSchema(schema.dataset_name, schema.attributes + (descriptor,), schema.id_field)
    )
