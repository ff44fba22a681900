import pytest

from texture.errors import EmptySample, SchemaValidationError
from texture.schema import (
    AttributeDescriptor,
    AttributeKind,
    DataType,
    DatasetSchema,
    ValidatedSchema,
    infer_data_type,
    schema_from_manifest,
    validate_schema,
)


def attr(name, kind, **kw):
    return AttributeDescriptor(name=name, kind=kind, **kw)


def test_minimal_schema_valid():
    schema = DatasetSchema(
        "d",
        (
            attr("abstract", AttributeKind.TEXT),
            attr("topic", AttributeKind.SINGLE_VALUE, data_type=DataType.CATEGORICAL),
        ),
    )
    validated = validate_schema(schema)
    assert isinstance(validated, ValidatedSchema)


def test_span_list_with_declared_text_source_valid():
    schema = DatasetSchema(
        "d",
        (
            attr("abstract", AttributeKind.TEXT),
            attr("word", AttributeKind.SPAN_LIST, data_type=DataType.CATEGORICAL, span_source="abstract"),
        ),
    )
    validated = validate_schema(schema)
    assert validated.attribute("word").span_source == "abstract"


def test_two_embeddings_rejected():
    schema = DatasetSchema(
        "d",
        (
            attr("t", AttributeKind.TEXT),
            attr("e1", AttributeKind.EMBEDDING, dimension=4),
            attr("e2", AttributeKind.EMBEDDING, dimension=4),
        ),
    )
    with pytest.raises(SchemaValidationError) as exc:
        validate_schema(schema)
    assert any("MultipleEmbeddings" in v for v in exc.value.violations)


def test_duplicate_names_rejected():
    schema = DatasetSchema(
        "d",
        (attr("t", AttributeKind.TEXT), attr("t", AttributeKind.SINGLE_VALUE, data_type=DataType.CATEGORICAL)),
    )
    with pytest.raises(SchemaValidationError) as exc:
        validate_schema(schema)
    assert any("DuplicateName" in v for v in exc.value.violations)


def test_span_list_without_text_target_rejected():
    schema = DatasetSchema(
        "d",
        (
            attr("t", AttributeKind.TEXT),
            attr("w", AttributeKind.SPAN_LIST, data_type=DataType.CATEGORICAL, span_source="missing"),
        ),
    )
    with pytest.raises(SchemaValidationError) as exc:
        validate_schema(schema)
    assert any("MissingSpanSource" in v for v in exc.value.violations)


def test_no_text_attribute_rejected():
    schema = DatasetSchema("d", (attr("x", AttributeKind.SINGLE_VALUE, data_type=DataType.CATEGORICAL),))
    with pytest.raises(SchemaValidationError) as exc:
        validate_schema(schema)
    assert any("NoTextAttribute" in v for v in exc.value.violations)


def test_validation_idempotent():
    schema = validate_schema(DatasetSchema("d", (attr("t", AttributeKind.TEXT),)))
    assert validate_schema(schema) == schema


def test_bad_attribute_name_rejected():
    schema = DatasetSchema("d", (attr("t", AttributeKind.TEXT), attr("bad name", AttributeKind.SINGLE_VALUE)))
    with pytest.raises(SchemaValidationError):
        validate_schema(schema)


def test_id_field_must_be_single_value():
    schema = DatasetSchema("d", (attr("t", AttributeKind.TEXT),), id_field="t")
    with pytest.raises(SchemaValidationError) as exc:
        validate_schema(schema)
    assert any("InvalidIdField" in v for v in exc.value.violations)


class TestInferDataType:
    def test_years_are_temporal(self):
        assert infer_data_type(["2015", "2016"]) is DataType.TEMPORAL

    def test_numbers_are_quantitative(self):
        assert infer_data_type(["0.3", "7"]) is DataType.QUANTITATIVE

    def test_strings_are_categorical(self):
        assert infer_data_type(["vis", "ml", "vis"]) is DataType.CATEGORICAL

    def test_iso_dates_are_temporal(self):
        assert infer_data_type(["2015-03-01", "2016-11-30T10:00:00"]) is DataType.TEMPORAL

    def test_mixed_numbers_and_strings_are_categorical(self):
        assert infer_data_type(["3", "vis"]) is DataType.CATEGORICAL

    def test_empty_sample_rejected(self):
        with pytest.raises(EmptySample):
            infer_data_type([])

    def test_never_quantitative_with_a_non_number(self):
        assert infer_data_type(["1.5", "x"]) is DataType.CATEGORICAL


class TestManifest:
    def test_roundtrip(self):
        doc = {
            "dataset_name": "demo",
            "attributes": [
                {"name": "body", "kind": "text"},
                {"name": "topic", "kind": "single_value", "data_type": "categorical"},
                {"name": "word", "kind": "span_list", "data_type": "categorical", "span_source": "body"},
                {"name": "emb", "kind": "embedding", "dimension": 8, "has_projection": True},
            ],
        }
        schema = schema_from_manifest(doc)
        assert schema.to_manifest() == doc

    def test_unknown_manifest_field_rejected(self):
        with pytest.raises(SchemaValidationError):
            schema_from_manifest({"dataset_name": "d", "attributes": [], "extra": 1})

    def test_unknown_attribute_field_rejected(self):
        with pytest.raises(SchemaValidationError):
            schema_from_manifest(
                {"dataset_name": "d", "attributes": [{"name": "t", "kind": "text", "typo": 1}]}
            )
