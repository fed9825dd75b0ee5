"""Kernel backend selection.

Imports the compiled Cython core when it has been built, otherwise falls
back to the pure-Python reference implementation. Both expose the same
functions and produce bit-identical results; set STEERGRAD_BACKEND=python
to force the fallback (used by the benchmark and parity tests).
"""

import os

if os.environ.get("STEERGRAD_BACKEND", "").lower() == "python":
    from steergrad._kernels import _core_py as _impl

    BACKEND = "python"
else:
    try:
        from steergrad._kernels import _core_c as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        from steergrad._kernels import _core_py as _impl  # type: ignore[no-redef]

        BACKEND = "python"

LOGIT_CLAMP = _impl.LOGIT_CLAMP
PROB_FLOOR = _impl.PROB_FLOOR
forward_one = _impl.forward_one
forward_batch = _impl.forward_batch
input_gradient_one = _impl.input_gradient_one
forward_param_grad_one = _impl.forward_param_grad_one
jvp_one = _impl.jvp_one
jvp_param_grad_one = _impl.jvp_param_grad_one
bce_loss_grad = _impl.bce_loss_grad
direction_loss_grad = _impl.direction_loss_grad
