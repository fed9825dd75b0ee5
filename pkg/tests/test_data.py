import math

import numpy as np
import pytest
from scipy.optimize import minimize

from steergrad.data import (
    Dataset,
    DatasetSpec,
    ProbabilityGrid,
    accuracy,
    evaluate_grid,
    generate,
    grid_bounds,
)
from steergrad.errors import ConfigurationError, InputError
from steergrad.losses import LabeledExample
from steergrad.model import ModelConfig, ModelParams, forward, init_params

from conftest import random_params


def logistic_probe_accuracy(train, test):
    """Independent separability oracle: an off-the-shelf optimizer fitting
    plain logistic regression, nothing shared with the training engine."""
    x = np.array([e.x for e in train])
    y = np.array([e.y for e in train], dtype=float)

    def loss(theta):
        z = x @ theta[:2] + theta[2]
        return np.mean(np.logaddexp(0.0, z) - y * z)

    theta = minimize(loss, np.zeros(3), method="BFGS").x
    tx = np.array([e.x for e in test])
    ty = np.array([e.y for e in test])
    pred = (tx @ theta[:2] + theta[2]) >= 0.0
    return float(np.mean(pred == ty))


class TestGenerate:
    def test_zero_noise_blobs_hit_centers(self):
        ds = generate(DatasetSpec(shape="blobs", n_train=2, n_test=0, noise=0.0, seed=1))
        assert ds.train[0] == LabeledExample(x=(-2.0, 0.0), y=0)
        assert ds.train[1] == LabeledExample(x=(2.0, 0.0), y=1)

    def test_deterministic(self):
        spec = DatasetSpec(shape="moons", n_train=20, n_test=30, seed=7)
        assert generate(spec) == generate(spec)

    def test_seed_changes_data(self):
        a = generate(DatasetSpec(shape="blobs", n_train=10, n_test=0, seed=1))
        b = generate(DatasetSpec(shape="blobs", n_train=10, n_test=0, seed=2))
        assert a.train != b.train

    @pytest.mark.parametrize("shape", ["blobs", "moons", "circles"])
    @pytest.mark.parametrize("n", [2, 9, 10, 37])
    def test_class_balance_within_one(self, shape, n):
        ds = generate(DatasetSpec(shape=shape, n_train=n, n_test=n + 1, seed=3))
        for split in (ds.train, ds.test):
            ones = sum(e.y for e in split)
            assert abs((len(split) - ones) - ones) <= 1

    def test_zero_noise_circles_radii(self):
        ds = generate(DatasetSpec(shape="circles", n_train=12, n_test=0, noise=0.0, seed=4))
        for e in ds.train:
            r = math.hypot(*e.x)
            assert r == pytest.approx(1.0 if e.y == 0 else 2.0, abs=1e-12)

    def test_zero_noise_moons_arcs(self):
        ds = generate(DatasetSpec(shape="moons", n_train=12, n_test=0, noise=0.0, seed=4))
        for e in ds.train:
            if e.y == 0:
                assert math.hypot(*e.x) == pytest.approx(1.0, abs=1e-12)
                assert e.x[1] >= 0.0
            else:
                assert math.hypot(e.x[0] - 1.0, e.x[1] - 0.5) == pytest.approx(1.0, abs=1e-12)
                assert e.x[1] <= 0.5

    def test_train_test_substreams_independent(self):
        ds = generate(DatasetSpec(shape="blobs", n_train=30, n_test=30, seed=5))
        assert not set(ds.train) & set(ds.test)

    def test_nine_point_blobs_linearly_separable(self):
        # nine-observation scale: a plain linear probe must already solve it
        ds = generate(DatasetSpec(shape="blobs", n_train=9, n_test=200, seed=3))
        assert logistic_probe_accuracy(ds.train, ds.test) >= 0.95

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"n_train": 1},
            {"shape": "spiral"},
            {"noise": -0.5},
            {"n_test": -1},
        ],
    )
    def test_invalid_spec_rejected(self, kwargs):
        with pytest.raises(ConfigurationError):
            generate(DatasetSpec(**{"shape": "blobs", "n_train": 4, "n_test": 4, **kwargs}))


class TestGrid:
    def test_zero_weight_model_is_half_everywhere(self):
        ds = generate(DatasetSpec(shape="blobs", n_train=6, n_test=6, seed=1))
        sizes = (2, 3, 1)
        p = ModelParams(sizes, np.zeros(3 * 2 + 3 + 3 + 1))
        grid = evaluate_grid(p, ds, resolution=20)
        assert np.all(grid.values == 0.5)

    def test_bounds_are_bbox_plus_margin(self):
        ds = generate(DatasetSpec(shape="blobs", n_train=8, n_test=8, seed=2))
        xs = [e.x[0] for e in ds.train + ds.test]
        ys = [e.x[1] for e in ds.train + ds.test]
        x_min, x_max, y_min, y_max = grid_bounds(ds)
        assert x_min == pytest.approx(min(xs) - 0.15 * (max(xs) - min(xs)))
        assert x_max == pytest.approx(max(xs) + 0.15 * (max(xs) - min(xs)))
        assert y_min == pytest.approx(min(ys) - 0.15 * (max(ys) - min(ys)))
        assert y_max == pytest.approx(max(ys) + 0.15 * (max(ys) - min(ys)))

    def test_linear_model_structure(self, linear_params):
        # constant along vertical lines, monotone along horizontal ones
        ds = generate(DatasetSpec(shape="blobs", n_train=8, n_test=0, seed=3))
        grid = evaluate_grid(linear_params, ds, resolution=15)
        assert np.all(grid.values == grid.values[0:1, :])
        assert np.all(np.diff(grid.values, axis=1) > 0.0)

    def test_values_match_forward_exactly(self):
        rng = np.random.default_rng(11)
        p = random_params((2, 5, 1), rng)
        ds = generate(DatasetSpec(shape="moons", n_train=10, n_test=5, seed=6))
        grid = evaluate_grid(p, ds, resolution=7)
        xs = np.linspace(grid.x_min, grid.x_max, 7)
        ys = np.linspace(grid.y_min, grid.y_max, 7)
        for i in (0, 3, 6):
            for j in (0, 2, 5):
                assert grid.values[i, j] == forward(p, (xs[j], ys[i]))

    def test_values_in_open_interval(self):
        ds = generate(DatasetSpec(shape="circles", n_train=10, n_test=10, seed=8))
        p = init_params(ModelConfig(hidden_layers=(6,), seed=2))
        grid = evaluate_grid(p, ds, resolution=12)
        assert np.all(grid.values > 0.0)
        assert np.all(grid.values < 1.0)

    def test_resolution_validation(self, linear_params):
        ds = generate(DatasetSpec(shape="blobs", n_train=4, n_test=0, seed=1))
        with pytest.raises(InputError):
            evaluate_grid(linear_params, ds, resolution=1)

    def test_degenerate_extent_padded(self, linear_params):
        ds = Dataset(
            train=(LabeledExample(x=(-2.0, 0.0), y=0), LabeledExample(x=(2.0, 0.0), y=1)),
            test=(),
            spec=DatasetSpec(shape="blobs", n_train=2, n_test=0, noise=0.0, seed=1),
        )
        x_min, x_max, y_min, y_max = grid_bounds(ds)
        assert y_max > y_min  # zero y-extent still yields a usable window


class TestAccuracy:
    def test_tie_predicts_class_one(self):
        sizes = (2, 3, 1)
        p = ModelParams(sizes, np.zeros(3 * 2 + 3 + 3 + 1))  # f = 0.5 everywhere
        examples = [LabeledExample(x=(float(i), 0.0), y=i % 2) for i in range(10)]
        assert accuracy(p, examples) == 0.5  # exactly the label-1 fraction

    def test_separated_blobs_fit_perfectly(self, linear_params):
        ds = generate(DatasetSpec(shape="blobs", n_train=10, n_test=10, noise=0.0, seed=2))
        assert accuracy(linear_params, list(ds.train) + list(ds.test)) == 1.0

    def test_empty_rejected(self, linear_params):
        with pytest.raises(InputError):
            accuracy(linear_params, [])

    def test_untrained_model_near_chance_on_random_labels(self):
        rng = np.random.default_rng(13)
        n = 2000
        examples = [
            LabeledExample(x=tuple(rng.uniform(-3, 3, 2)), y=int(rng.integers(2)))
            for _ in range(n)
        ]
        p = init_params(ModelConfig(hidden_layers=(16, 16), seed=99))
        assert abs(accuracy(p, examples) - 0.5) <= 3.0 / math.sqrt(n)
