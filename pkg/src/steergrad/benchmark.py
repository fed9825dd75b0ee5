"""Benchmark the compiled kernel core against the pure-Python fallback.

    python -m steergrad.benchmark [--repeats N]

Times the three kernels that dominate an interactive run: the full-batch
cross-entropy gradient, the direction-loss gradient, and the probability
grid evaluation. Both backends execute the same operation sequence, so
the results are also checked for bit equality.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from steergrad._kernels import _core_py
from steergrad.model import n_params

try:
    from steergrad._kernels import _core_c
except ImportError:
    _core_c = None

SIZES = (2, 16, 16, 1)


def _workload():
    rng = np.random.default_rng(1234)
    sz = np.asarray(SIZES, dtype=np.int64)
    flat = rng.uniform(-1.0, 1.0, n_params(SIZES))
    train = rng.uniform(-3.0, 3.0, (9, 2))
    labels = rng.integers(0, 2, 9).astype(np.float64)
    ann_pts = train[:3].copy()
    ann_labels = labels[:3].copy()
    dirs = rng.uniform(-1.0, 1.0, (3, 2))
    grid = rng.uniform(-3.0, 3.0, (10_000, 2))
    return sz, flat, train, labels, ann_pts, ann_labels, dirs, grid


def _cases(sz, flat, train, labels, ann_pts, ann_labels, dirs, grid):
    return [
        ("bce_loss_grad (9 pts)", lambda m: m.bce_loss_grad(sz, flat, train, labels)),
        (
            "direction_loss_grad (3 ann)",
            lambda m: m.direction_loss_grad(sz, flat, ann_pts, ann_labels, dirs, 20.0),
        ),
        ("forward_batch (100x100 grid)", lambda m: m.forward_batch(sz, flat, grid)),
    ]


def _time(fn, repeats: int) -> float:
    fn()  # warm up
    start = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - start) / repeats


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=50)
    args = parser.parse_args(argv)

    work = _workload()
    print(f"network {'x'.join(str(s) for s in SIZES)}, {args.repeats} repeats per case\n")
    print(f"{'kernel':<32}{'python':>12}{'compiled':>12}{'speedup':>10}")
    for name, call in _cases(*work):
        t_py = _time(lambda: call(_core_py), args.repeats)
        if _core_c is None:
            print(f"{name:<32}{t_py * 1e3:>10.3f}ms{'-':>12}{'-':>10}")
            continue
        t_c = _time(lambda: call(_core_c), args.repeats)
        r_py, r_c = call(_core_py), call(_core_c)
        if not isinstance(r_py, tuple):
            r_py, r_c = (r_py,), (r_c,)
        matches = all(np.array_equal(a, b) for a, b in zip(r_py, r_c))
        flag = "" if matches else "  MISMATCH"
        print(f"{name:<32}{t_py * 1e3:>10.3f}ms{t_c * 1e3:>10.3f}ms{t_py / t_c:>9.1f}x{flag}")
    if _core_c is None:
        print("\ncompiled backend not built; run: python setup.py build_ext --inplace")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
