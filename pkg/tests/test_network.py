import numpy as np
import pytest

from relrank.errors import ConfigError, DataError
from relrank.network import (
    Batch,
    EmbeddingSpec,
    ModelSpec,
    forward,
    forward_batch,
    init_weights,
    load_model,
    model_from_dict,
    model_to_dict,
    multiplication_count,
    save_model,
)


def tiny_spec(**overrides):
    kwargs = dict(input_dim=1, hidden_layers=(1,), activation="relu", seed=0)
    kwargs.update(overrides)
    return ModelSpec(**kwargs)


class TestSpecValidation:
    def test_rejects_empty_hidden_layers(self):
        with pytest.raises(ConfigError):
            ModelSpec(input_dim=4, hidden_layers=())

    def test_rejects_bad_leaky_slope(self):
        with pytest.raises(ConfigError):
            ModelSpec(input_dim=4, hidden_layers=(2,), activation="leaky_relu", leaky_slope=1.5)

    def test_input_dim_must_cover_embeddings(self):
        with pytest.raises(ConfigError):
            ModelSpec(input_dim=2, hidden_layers=(2,), embedding_specs=(EmbeddingSpec(5, 4),))

    def test_dims_chain_ends_at_scalar(self):
        spec = ModelSpec(input_dim=6, hidden_layers=(4, 3))
        assert spec.layer_dims == (6, 4, 3, 1)


class TestForward:
    def test_zero_network_scores_zero(self):
        spec = ModelSpec(input_dim=3, hidden_layers=(4, 2), seed=1)
        weights = init_weights(spec)
        for w in weights.dense_w:
            w[:] = 0.0
        x = np.array([[0.5, -2.0, 3.0]])
        assert forward_batch(weights, spec, x, np.empty((1, 0), dtype=np.int64))[0] == 0.0

    def test_hand_evaluated_one_unit_net(self):
        spec = tiny_spec()
        weights = init_weights(spec)
        weights.dense_w[0][:] = 1.0
        weights.dense_w[1][:] = 1.0
        # relu(2*1) * 1 = 2
        assert forward(weights, spec, [2.0], []) == 2.0
        # relu(-2) = 0
        assert forward(weights, spec, [-2.0], []) == 0.0

    def test_zero_input_zero_bias_relu_propagates_zero(self):
        spec = ModelSpec(input_dim=5, hidden_layers=(8, 4), seed=3)
        weights = init_weights(spec)
        x = np.zeros((1, 5))
        assert forward_batch(weights, spec, x, np.empty((1, 0), dtype=np.int64))[0] == 0.0

    def test_leaky_relu_passes_scaled_negatives(self):
        spec = tiny_spec(activation="leaky_relu", leaky_slope=0.1)
        weights = init_weights(spec)
        weights.dense_w[0][:] = 1.0
        weights.dense_w[1][:] = 1.0
        assert forward(weights, spec, [-2.0], []) == pytest.approx(-0.2)

    def test_embedding_rows_enter_the_input(self):
        spec = ModelSpec(
            input_dim=3, hidden_layers=(1,), embedding_specs=(EmbeddingSpec(4, 2),), seed=0
        )
        weights = init_weights(spec)
        weights.dense_w[0][:] = 1.0
        weights.dense_w[1][:] = 1.0
        weights.embeddings[0][2] = [0.25, 0.75]
        got = forward(weights, spec, [1.0], [2])
        assert got == pytest.approx(2.0)  # relu(1 + 0.25 + 0.75)

    def test_dimension_mismatch_names_the_problem(self):
        spec = ModelSpec(input_dim=3, hidden_layers=(2,), seed=0)
        weights = init_weights(spec)
        with pytest.raises(ConfigError, match="continuous input"):
            forward_batch(weights, spec, np.zeros((1, 5)), np.empty((1, 0), dtype=np.int64))
        weights.dense_w[0] = np.zeros((4, 2))
        with pytest.raises(ConfigError, match="dense_0"):
            forward_batch(weights, spec, np.zeros((1, 3)), np.empty((1, 0), dtype=np.int64))

    def test_out_of_vocab_id_names_the_feature(self):
        spec = ModelSpec(
            input_dim=3, hidden_layers=(2,), embedding_specs=(EmbeddingSpec(4, 2),), seed=0
        )
        weights = init_weights(spec)
        with pytest.raises(DataError, match="feature 0"):
            forward_batch(weights, spec, np.zeros((1, 1)), np.array([[7]]))


class TestInitDeterminism:
    def test_same_seed_bitwise_identical(self):
        spec = ModelSpec(
            input_dim=7,
            hidden_layers=(5, 3),
            embedding_specs=(EmbeddingSpec(6, 2), EmbeddingSpec(3, 1)),
            seed=42,
        )
        a, b = init_weights(spec), init_weights(spec)
        for (name_a, arr_a), (_, arr_b) in zip(a.named_arrays(), b.named_arrays()):
            assert np.array_equal(arr_a, arr_b), name_a

    def test_biases_start_at_zero(self):
        weights = init_weights(ModelSpec(input_dim=4, hidden_layers=(3,), seed=9))
        for b in weights.dense_b:
            assert not b.any()

    def test_glorot_bounds(self):
        spec = ModelSpec(input_dim=100, hidden_layers=(50,), seed=2)
        weights = init_weights(spec)
        limit = np.sqrt(6.0 / 150.0)
        assert np.abs(weights.dense_w[0]).max() <= limit


class TestMultiplicationCount:
    @pytest.mark.parametrize(
        "hidden,expected",
        [
            ((128, 64, 32), 36992),
            ((64, 32), 15424),
            ((512, 256, 64, 32), 256512),
        ],
    )
    def test_reference_architectures(self, hidden, expected):
        spec = ModelSpec(input_dim=209, hidden_layers=hidden, seed=0)
        assert multiplication_count(spec) == expected

    def test_single_hidden_layer(self):
        assert multiplication_count(ModelSpec(input_dim=3, hidden_layers=(5,), seed=0)) == 15


class TestSerialization:
    def make_model(self):
        spec = ModelSpec(
            input_dim=6,
            hidden_layers=(4, 3),
            activation="leaky_relu",
            leaky_slope=0.02,
            embedding_specs=(EmbeddingSpec(5, 2),),
            l2_coefficient=5e-4,
            seed=77,
        )
        return init_weights(spec), spec

    def test_round_trip_is_bit_exact(self, tmp_path):
        weights, spec = self.make_model()
        path = tmp_path / "model.json"
        save_model(str(path), weights, spec)
        loaded, loaded_spec, platt = load_model(str(path))
        assert platt is None
        assert loaded_spec == spec
        for (name, arr), (_, arr2) in zip(weights.named_arrays(), loaded.named_arrays()):
            assert np.array_equal(arr, arr2), name

    def test_round_trip_preserves_scores_exactly(self, tmp_path):
        weights, spec = self.make_model()
        rng = np.random.default_rng(0)
        x_cont = rng.normal(size=(20, 4))
        x_cat = rng.integers(0, 5, size=(20, 1))
        before = forward_batch(weights, spec, x_cont, x_cat)
        path = tmp_path / "model.json"
        save_model(str(path), weights, spec)
        loaded, loaded_spec, _ = load_model(str(path))
        after = forward_batch(loaded, loaded_spec, x_cont, x_cat)
        assert np.array_equal(before, after)

    def test_platt_block_survives(self, tmp_path):
        from relrank.calibration import PlattScaler

        weights, spec = self.make_model()
        path = tmp_path / "model.json"
        save_model(str(path), weights, spec, PlattScaler(w=1.5, b=-2.25, fitted_on="validation"))
        _, _, platt = load_model(str(path))
        assert platt.w == 1.5 and platt.b == -2.25
        assert platt.fitted_on == "validation"

    def test_rejects_unknown_format_version(self):
        weights, spec = self.make_model()
        doc = model_to_dict(weights, spec)
        doc["format_version"] = 99
        with pytest.raises(ConfigError):
            model_from_dict(doc)


class TestBatch:
    def test_take_preserves_columns(self):
        batch = Batch(
            x_cont=np.arange(6.0).reshape(3, 2),
            x_cat=np.array([[0], [1], [2]]),
            labels=np.array([0, 1, 0]),
        )
        sub = batch.take(np.array([2, 0]))
        assert sub.x_cont.tolist() == [[4.0, 5.0], [0.0, 1.0]]
        assert sub.x_cat.tolist() == [[2], [0]]
        assert sub.labels.tolist() == [0, 0]

    def test_shape_validation(self):
        with pytest.raises(ConfigError):
            Batch(np.zeros((3, 2)), np.zeros((2, 1), dtype=int), np.zeros(3))
