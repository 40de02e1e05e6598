import math

import numpy as np
import pytest

from relrank.errors import ConfigError, DataError
from relrank.features import (
    CategoricalFeature,
    ContinuousFeature,
    FeatureSchema,
    fit_schema,
    load_schema,
    save_schema,
    transform,
    transform_table,
)


def skeleton(**kwargs):
    defaults = dict(
        continuous=(
            ContinuousFeature("amount"),
            ContinuousFeature("count", skewed=True),
        ),
        categorical=(CategoricalFeature("color", embed_dim=2),),
    )
    defaults.update(kwargs)
    return FeatureSchema(**defaults)


def rows_of(*triples):
    return [{"amount": a, "count": c, "color": col} for a, c, col in triples]


class TestFitSchema:
    def test_population_stats(self):
        schema = fit_schema(rows_of((1.0, 0, "a"), (3.0, 0.5, "b")), skeleton())
        mean, std = schema.stats["amount"]
        assert mean == 2.0 and std == 1.0

    def test_skewed_feature_stats_use_log1p(self):
        schema = fit_schema(rows_of((0.0, 0, "a"), (1.0, 9, "a")), skeleton())
        mean, std = schema.stats["count"]
        expected = (0.0 + math.log1p(9)) / 2
        assert mean == pytest.approx(expected, abs=1e-15)
        assert std == pytest.approx(math.log1p(9) / 2, abs=1e-15)

    def test_vocab_reserves_oov_slot_zero(self):
        schema = fit_schema(rows_of((0, 0, "a"), (1, 2, "b"), (2, 5, "a")), skeleton())
        assert schema.categorical[0].vocab == ("<oov>", "a", "b")
        assert schema.categorical[0].vocab_size == 3

    def test_constant_feature_rejected_by_name(self):
        with pytest.raises(DataError, match="amount"):
            fit_schema(rows_of((5.0, 0, "a"), (5.0, 1, "b")), skeleton())

    def test_missing_field_rejected(self):
        with pytest.raises(DataError, match="color"):
            fit_schema([{"amount": 1, "count": 2}, {"amount": 2, "count": 3}], skeleton())

    def test_needs_two_rows(self):
        with pytest.raises(DataError):
            fit_schema(rows_of((1.0, 0, "a")), skeleton())

    def test_input_dim_counts_embeddings(self):
        schema = fit_schema(rows_of((1, 0, "a"), (2, 1, "b")), skeleton())
        assert schema.continuous_dim == 2
        assert schema.input_dim == 4


class TestTransform:
    @pytest.fixture
    def schema(self):
        return fit_schema(
            rows_of((1.0, 0, "a"), (3.0, 3, "b"), (2.0, 9, "a")), skeleton()
        )

    def test_mean_maps_to_zero(self, schema):
        mean, _ = schema.stats["amount"]
        cont, _ = transform(schema, {"amount": mean, "count": 1, "color": "a"})
        assert cont[0] == 0.0

    def test_mean_plus_std_maps_to_one(self, schema):
        mean, std = schema.stats["amount"]
        cont, _ = transform(schema, {"amount": mean + std, "count": 1, "color": "a"})
        assert cont[0] == pytest.approx(1.0, abs=1e-12)

    def test_unseen_category_gets_oov_id(self, schema):
        _, cat = transform(schema, {"amount": 1, "count": 1, "color": "zzz"})
        assert cat[0] == 0

    def test_seen_categories_get_their_ids(self, schema):
        _, cat = transform(schema, {"amount": 1, "count": 1, "color": "b"})
        assert cat[0] == schema.categorical[0].vocab.index("b")

    def test_skew_composes_as_zscore_of_log1p(self, schema):
        mean, std = schema.stats["count"]
        for x in (0.0, 2.0, 17.0):
            cont, _ = transform(schema, {"amount": 1, "count": x, "color": "a"})
            assert cont[1] == (math.log1p(x) - mean) / std

    def test_non_finite_value_rejected_by_name(self, schema):
        with pytest.raises(DataError, match="amount"):
            transform(schema, {"amount": float("nan"), "count": 1, "color": "a"})

    def test_unfitted_schema_rejected(self):
        with pytest.raises(ConfigError):
            transform(skeleton(), {"amount": 1, "count": 1, "color": "a"})

    def test_fit_set_is_standardized(self):
        rng = np.random.default_rng(2)
        rows = rows_of(
            *[(rng.normal(5, 2), rng.integers(0, 40), "a") for _ in range(500)]
        )
        schema = fit_schema(rows, skeleton())
        transformed = np.array([transform(schema, r)[0] for r in rows])
        np.testing.assert_allclose(transformed.mean(axis=0), 0.0, atol=1e-9)
        np.testing.assert_allclose(transformed.std(axis=0), 1.0, atol=1e-9)


class TestTransformTable:
    def test_matches_row_transform(self):
        rows = rows_of((1.0, 0, "a"), (3.0, 3, "b"), (2.0, 9, "c"), (0.5, 1, "zzz"))
        schema = fit_schema(rows[:3], skeleton())
        columns = {
            "amount": np.array([r["amount"] for r in rows]),
            "count": np.array([r["count"] for r in rows]),
            "color": np.array([r["color"] for r in rows]),
        }
        cont_t, cat_t = transform_table(schema, columns)
        for i, row in enumerate(rows):
            cont_r, cat_r = transform(schema, row)
            np.testing.assert_array_equal(cont_t[i], cont_r)
            np.testing.assert_array_equal(cat_t[i], cat_r)

    def test_missing_column_rejected(self):
        schema = fit_schema(rows_of((1, 0, "a"), (2, 1, "b")), skeleton())
        with pytest.raises(DataError, match="color"):
            transform_table(schema, {"amount": np.ones(2), "count": np.ones(2)})


class TestSchemaRoundTrip:
    def test_save_load_preserves_everything(self, tmp_path):
        schema = fit_schema(rows_of((1.0, 0, "a"), (3.0, 3, "b")), skeleton())
        path = tmp_path / "schema.json"
        save_schema(str(path), schema)
        loaded = load_schema(str(path))
        assert loaded == schema

    def test_transform_identical_after_reload(self, tmp_path):
        schema = fit_schema(rows_of((1.0, 0, "a"), (3.0, 3, "b")), skeleton())
        path = tmp_path / "schema.json"
        save_schema(str(path), schema)
        loaded = load_schema(str(path))
        row = {"amount": 2.2, "count": 7, "color": "b"}
        np.testing.assert_array_equal(transform(schema, row)[0], transform(loaded, row)[0])
