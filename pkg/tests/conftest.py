import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from steergrad.model import ModelParams, n_params

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

settings.register_profile(
    "steergrad",
    max_examples=50,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("steergrad")


@pytest.fixture
def linear_params():
    """Single linear layer w=(1,0), b=0: f(x) = sigmoid(x0)."""
    return ModelParams.from_layers([(np.array([[1.0, 0.0]]), np.array([0.0]))])


def random_params(sizes, rng, scale=1.0):
    return ModelParams(tuple(sizes), rng.uniform(-scale, scale, n_params(sizes)))


def fd_param_grad(fn, params, h=1e-5):
    """Central finite differences of a scalar over every parameter: the
    independent oracle for all analytic parameter gradients."""
    flat = params.flat
    grad = np.empty(flat.shape[0])
    for i in range(flat.shape[0]):
        plus = flat.copy()
        minus = flat.copy()
        plus[i] += h
        minus[i] -= h
        grad[i] = (fn(params.with_flat(plus)) - fn(params.with_flat(minus))) / (2.0 * h)
    return grad


def assert_grad_close(analytic, fd, rel_tol, magnitude_floor=1e-8):
    """Relative comparison wherever the analytic magnitude clears the
    floor; below it finite differences are all cancellation noise."""
    analytic = np.asarray(analytic, dtype=np.float64)
    fd = np.asarray(fd, dtype=np.float64)
    mask = np.abs(analytic) > magnitude_floor
    if not mask.any():
        return
    rel = np.abs(fd[mask] - analytic[mask]) / np.abs(analytic[mask])
    assert rel.max() <= rel_tol, f"worst relative error {rel.max():.3e} > {rel_tol:g}"
