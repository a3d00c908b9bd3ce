"""Network assembly, geometry selection, prediction semantics, model files."""

import numpy as np
import pytest

from dlpr.errors import ConfigError, ParseError
from dlpr.nn import (
    Adam,
    ModelSpec,
    Network,
    load_network,
    save_network,
    toy_spec,
)


class TestModelSpec:
    def test_canonical_shape_chain(self):
        spec = ModelSpec(input_length=24, num_classes=10)
        assert spec.shape_chain() == [(128, 18), (128, 14), (128, 7), (64, 5)]

    def test_auto_prefers_canonical_kernels(self):
        assert ModelSpec.auto(24, 10).kernels == (7, 5, 3)

    def test_auto_shrinks_kernels_for_short_input(self):
        spec = ModelSpec.auto(8, 4)
        assert spec.kernels == (7, 1, 1)
        spec.shape_chain()  # must be feasible

    def test_auto_is_deterministic_and_feasible_across_lengths(self):
        for length in range(4, 64, 2):
            spec = ModelSpec.auto(length, 3)
            assert spec == ModelSpec.auto(length, 3)
            assert all(l >= 1 for _, l in spec.shape_chain())

    def test_infeasible_geometry_rejected(self):
        with pytest.raises(ConfigError):
            ModelSpec(input_length=8, num_classes=4)  # canonical kernels too wide

    def test_single_class_rejected(self):
        with pytest.raises(ConfigError):
            ModelSpec.auto(24, 1)


class TestNetworkForward:
    def test_live_tensor_shapes_match_chain(self):
        spec = ModelSpec(input_length=24, num_classes=6)
        net = Network(spec, np.random.default_rng(0))
        x = np.random.default_rng(1).standard_normal((3, 24))
        seen = []
        out = x[:, None, :]
        for layer in net.layers:
            out = layer.forward(out, training=False)
            if out.ndim == 3:
                seen.append(out.shape[1:])
        for maps, length in spec.shape_chain():
            assert (maps, length) in seen

    def test_zeroed_final_layer_gives_uniform_probabilities(self):
        net = Network(ModelSpec(input_length=24, num_classes=5), np.random.default_rng(2))
        net.layers[-1].weights[...] = 0.0
        net.layers[-1].bias[...] = 0.0
        probs = net.forward(np.random.default_rng(3).standard_normal((4, 24)))
        np.testing.assert_allclose(probs, 0.2, atol=1e-12)

    def test_prediction_tie_breaks_to_lowest_index(self):
        net = Network(ModelSpec(input_length=24, num_classes=5), np.random.default_rng(2))
        net.layers[-1].weights[...] = 0.0
        net.layers[-1].bias[...] = 0.0
        labels = net.predict(np.random.default_rng(3).standard_normal((4, 24)))
        assert (labels == 0).all()

    def test_inference_is_batch_partition_invariant(self):
        net = Network(toy_spec(), np.random.default_rng(4))
        x = np.random.default_rng(5).standard_normal((10, 8))
        whole = net.forward(x)
        parts = np.concatenate([net.forward(x[:3]), net.forward(x[3:])])
        np.testing.assert_array_equal(whole, parts)

    def test_wrong_input_width_rejected(self):
        net = Network(toy_spec(), np.random.default_rng(6))
        with pytest.raises(Exception):
            net.forward(np.zeros((2, 9)))


class TestTrainingMechanics:
    def _fit(self, seed):
        rng = np.random.default_rng(seed)
        x = rng.standard_normal((16, 8))
        y = rng.integers(0, 4, size=16)
        net = Network(toy_spec(), np.random.default_rng(seed + 1))
        opt = Adam(net.params(), lr=1e-2)
        losses = []
        for _ in range(30):
            loss, _ = net.loss_and_grads(x, y)
            opt.step(net.grads())
            losses.append(loss)
        return net, losses

    def test_loss_decreases(self):
        _, losses = self._fit(0)
        assert losses[-1] < losses[0] * 0.5

    def test_training_is_bit_reproducible(self):
        net_a, losses_a = self._fit(7)
        net_b, losses_b = self._fit(7)
        assert losses_a == losses_b
        for pa, pb in zip(net_a.state_arrays(), net_b.state_arrays()):
            np.testing.assert_array_equal(pa, pb)


class TestModelFile:
    def _trained_net(self):
        net = Network(toy_spec(), np.random.default_rng(11))
        x = np.random.default_rng(12).standard_normal((8, 8))
        y = np.random.default_rng(13).integers(0, 4, size=8)
        opt = Adam(net.params())
        for _ in range(3):
            net.loss_and_grads(x, y)
            opt.step(net.grads())
        return net

    def test_round_trip_is_bit_exact(self, tmp_path):
        net = self._trained_net()
        meta = {"seed": 11, "class_ids": [0, 1, 2, 3],
                "norm_mean": [0.0] * 8, "norm_std": [1.0] * 8}
        first = tmp_path / "a.dlprm"
        second = tmp_path / "b.dlprm"
        save_network(first, net, meta)
        loaded, loaded_meta = load_network(first)
        save_network(second, loaded, loaded_meta)
        assert first.read_bytes() == second.read_bytes()
        x = np.random.default_rng(14).standard_normal((5, 8))
        np.testing.assert_array_equal(net.forward(x), loaded.forward(x))

    def test_bad_magic_rejected(self, tmp_path):
        bad = tmp_path / "bad.dlprm"
        bad.write_bytes(b"NOTDLPR\x00rest")
        with pytest.raises(ParseError):
            load_network(bad)

    def test_truncated_parameters_rejected(self, tmp_path):
        path = tmp_path / "model.dlprm"
        save_network(path, self._trained_net(), {"seed": 0})
        clipped = tmp_path / "clipped.dlprm"
        clipped.write_bytes(path.read_bytes()[:-16])
        with pytest.raises(ParseError):
            load_network(clipped)

    def test_trailing_garbage_rejected(self, tmp_path):
        path = tmp_path / "model.dlprm"
        save_network(path, self._trained_net(), {"seed": 0})
        bloated = tmp_path / "bloated.dlprm"
        bloated.write_bytes(path.read_bytes() + b"\x00" * 8)
        with pytest.raises(ParseError):
            load_network(bloated)
