"""Backend parity: the compiled core must match the pure-Python reference
bit for bit, since replay determinism is promised per backend and the
benchmark treats them as interchangeable."""

import numpy as np
import pytest

from steergrad._kernels import BACKEND, _core_py
from steergrad.model import n_params

try:
    from steergrad._kernels import _core_c
except ImportError:
    _core_c = None

needs_compiled = pytest.mark.skipif(_core_c is None, reason="compiled core not built")


def _random_case(rng):
    n_hidden = int(rng.integers(0, 3))
    sizes = tuple([2] + list(rng.integers(1, 9, n_hidden)) + [1])
    flat = rng.uniform(-2, 2, n_params(sizes))
    sz = np.asarray(sizes, dtype=np.int64)
    return sz, flat


def test_backend_selected():
    assert BACKEND in ("python", "compiled")


def test_forward_batch_matches_forward_one():
    rng = np.random.default_rng(1)
    sz, flat = _random_case(rng)
    pts = rng.uniform(-3, 3, (6, 2))
    batch = _core_py.forward_batch(sz, flat, pts)
    for k in range(6):
        assert batch[k] == _core_py.forward_one(sz, flat, pts[k, 0], pts[k, 1])


@needs_compiled
@pytest.mark.parametrize("case", range(40))
def test_bit_identical_backends(case):
    rng = np.random.default_rng(1000 + case)
    sz, flat = _random_case(rng)
    x0, x1 = rng.uniform(-3, 3, 2)
    d0, d1 = rng.uniform(-1, 1, 2)
    pts = rng.uniform(-3, 3, (5, 2))
    ys = rng.integers(0, 2, 5).astype(np.float64)
    dirs = rng.uniform(-1, 1, (5, 2))

    assert _core_py.forward_one(sz, flat, x0, x1) == _core_c.forward_one(sz, flat, x0, x1)
    assert np.array_equal(
        _core_py.forward_batch(sz, flat, pts), _core_c.forward_batch(sz, flat, pts)
    )
    assert _core_py.input_gradient_one(sz, flat, x0, x1) == _core_c.input_gradient_one(
        sz, flat, x0, x1
    )
    assert _core_py.jvp_one(sz, flat, x0, x1, d0, d1) == _core_c.jvp_one(
        sz, flat, x0, x1, d0, d1
    )

    p_a, g_a = _core_py.forward_param_grad_one(sz, flat, x0, x1)
    p_b, g_b = _core_c.forward_param_grad_one(sz, flat, x0, x1)
    assert p_a == p_b and np.array_equal(g_a, g_b)

    p_a, j_a, g_a = _core_py.jvp_param_grad_one(sz, flat, x0, x1, d0, d1)
    p_b, j_b, g_b = _core_c.jvp_param_grad_one(sz, flat, x0, x1, d0, d1)
    assert p_a == p_b and j_a == j_b and np.array_equal(g_a, g_b)

    v_a, g_a = _core_py.bce_loss_grad(sz, flat, pts, ys)
    v_b, g_b = _core_c.bce_loss_grad(sz, flat, pts, ys)
    assert v_a == v_b and np.array_equal(g_a, g_b)

    v_a, g_a = _core_py.direction_loss_grad(sz, flat, pts, ys, dirs, 20.0)
    v_b, g_b = _core_c.direction_loss_grad(sz, flat, pts, ys, dirs, 20.0)
    assert v_a == v_b and np.array_equal(g_a, g_b)


@needs_compiled
def test_saturated_regime_identical():
    # steep weights exercise the logit clamp and cross-entropy floor
    sizes = (2, 4, 1)
    sz = np.asarray(sizes, dtype=np.int64)
    rng = np.random.default_rng(5)
    flat = rng.uniform(-30, 30, n_params(sizes))
    pts = rng.uniform(-5, 5, (8, 2))
    ys = rng.integers(0, 2, 8).astype(np.float64)
    v_a, g_a = _core_py.bce_loss_grad(sz, flat, pts, ys)
    v_b, g_b = _core_c.bce_loss_grad(sz, flat, pts, ys)
    assert v_a == v_b and np.array_equal(g_a, g_b)
