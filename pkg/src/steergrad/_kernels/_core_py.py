"""Numeric kernels, pure-Python reference backend.

The model is a dense stack sizes[0] -> ... -> sizes[-1] with tanh hidden
units and a logistic output. Parameters live in a single flat float64
vector, layer-major: for each layer the weight matrix (row-major), then
the bias vector.

The compiled backend (_core_c.pyx) implements the exact same sequence of
floating-point operations, so the two backends agree bit for bit; any
change here must be mirrored there.

Conventions shared by both backends:

* The output logit is clamped to [-LOGIT_CLAMP, LOGIT_CLAMP] before the
  sigmoid so probabilities stay strictly inside (0, 1) in double
  precision. The reported derivative is exactly zero where the clamp is
  active, matching what finite differences of the clamped value see.
* Batch reductions accumulate in example order into one accumulator and
  are divided by the batch size once, at the end.
* Gradients accumulate into a single flat buffer in layer-descending
  order (weights from the logit adjoint, then weights from the tangent
  adjoint where applicable, then the bias).
"""

import math

import numpy as np

LOGIT_CLAMP = 36.0
PROB_FLOOR = 1e-12  # cross-entropy clamp, on both sides


def _sigmoid(z):
    if z >= 0.0:
        if z > LOGIT_CLAMP:
            z = LOGIT_CLAMP
        e = math.exp(-z)
        return 1.0 / (1.0 + e)
    if z < -LOGIT_CLAMP:
        z = -LOGIT_CLAMP
    e = math.exp(z)
    return e / (1.0 + e)


def _sig_slope(z, prob):
    # derivative of the clamped sigmoid; identically zero past the clamp
    if z > LOGIT_CLAMP or z < -LOGIT_CLAMP:
        return 0.0
    return prob * (1.0 - prob)


def _forward_layers(sizes, p, x0, x1):
    """Run the network, returning per-layer activations.

    Returns hs with hs[0] = input and hs[l+1] = output of layer l; the
    final entry is the one-element pre-sigmoid logit.
    """
    nlayers = len(sizes) - 1
    tanh = math.tanh
    h = [x0, x1]
    hs = [h]
    off = 0
    for l in range(nlayers):
        nin = sizes[l]
        nout = sizes[l + 1]
        b_off = off + nout * nin
        out = [0.0] * nout
        last = l == nlayers - 1
        for i in range(nout):
            acc = p[b_off + i]
            base = off + i * nin
            for j in range(nin):
                acc += p[base + j] * h[j]
            out[i] = acc if last else tanh(acc)
        h = out
        hs.append(h)
        off = b_off + nout
    return hs


def forward_one(sizes, params, x0, x1):
    sizes = [int(s) for s in sizes]
    hs = _forward_layers(sizes, params.tolist(), x0, x1)
    return _sigmoid(hs[-1][0])


def forward_batch(sizes, params, pts):
    sizes = [int(s) for s in sizes]
    p = params.tolist()
    xs = pts.tolist()
    out = np.empty(len(xs), dtype=np.float64)
    for k, (x0, x1) in enumerate(xs):
        hs = _forward_layers(sizes, p, x0, x1)
        out[k] = _sigmoid(hs[-1][0])
    return out


def input_gradient_one(sizes, params, x0, x1):
    """Probability and its exact gradient in the two input coordinates."""
    sizes = [int(s) for s in sizes]
    p = params.tolist()
    nlayers = len(sizes) - 1
    hs = _forward_layers(sizes, p, x0, x1)
    z = hs[-1][0]
    prob = _sigmoid(z)
    delta = [_sig_slope(z, prob)]
    w_offs = _weight_offsets(sizes)
    for l in range(nlayers - 1, -1, -1):
        nin = sizes[l]
        nout = sizes[l + 1]
        w_off = w_offs[l]
        prev = [0.0] * nin
        for j in range(nin):
            acc = 0.0
            for i in range(nout):
                acc += delta[i] * p[w_off + i * nin + j]
            prev[j] = acc
        if l > 0:
            hl = hs[l]
            for j in range(nin):
                prev[j] *= 1.0 - hl[j] * hl[j]
        delta = prev
    return prob, delta[0], delta[1]


def _weight_offsets(sizes):
    offs = []
    off = 0
    for l in range(len(sizes) - 1):
        offs.append(off)
        off += sizes[l + 1] * sizes[l] + sizes[l + 1]
    return offs


def forward_param_grad_one(sizes, params, x0, x1):
    sizes = [int(s) for s in sizes]
    p = params.tolist()
    grad = [0.0] * len(p)
    hs = _forward_layers(sizes, p, x0, x1)
    z = hs[-1][0]
    prob = _sigmoid(z)
    _accumulate_value_grad(sizes, p, hs, _sig_slope(z, prob), grad)
    return prob, np.asarray(grad, dtype=np.float64)


def _accumulate_value_grad(sizes, p, hs, seed, grad):
    """Reverse pass for a scalar that is `seed` per unit of output logit."""
    nlayers = len(sizes) - 1
    w_offs = _weight_offsets(sizes)
    delta = [seed]
    for l in range(nlayers - 1, -1, -1):
        nin = sizes[l]
        nout = sizes[l + 1]
        w_off = w_offs[l]
        b_off = w_off + nout * nin
        hin = hs[l]
        for i in range(nout):
            di = delta[i]
            base = w_off + i * nin
            for j in range(nin):
                grad[base + j] += di * hin[j]
            grad[b_off + i] += di
        if l == 0:
            break
        prev = [0.0] * nin
        for j in range(nin):
            acc = 0.0
            for i in range(nout):
                acc += delta[i] * p[w_off + i * nin + j]
            prev[j] = acc
        hl = hs[l]
        for j in range(nin):
            prev[j] *= 1.0 - hl[j] * hl[j]
        delta = prev


def _tangent_layers(sizes, p, x0, x1, d0, d1):
    """Forward pass carrying the input-tangent (d0, d1) alongside.

    Returns (hs, ts, us): activations, raw tangent pre-activations per
    layer, and scaled tangents with us[0] = the input tangent.
    """
    nlayers = len(sizes) - 1
    tanh = math.tanh
    h = [x0, x1]
    u = [d0, d1]
    hs = [h]
    ts = []
    us = [u]
    off = 0
    for l in range(nlayers):
        nin = sizes[l]
        nout = sizes[l + 1]
        b_off = off + nout * nin
        out = [0.0] * nout
        tout = [0.0] * nout
        uout = [0.0] * nout
        last = l == nlayers - 1
        for i in range(nout):
            acc = p[b_off + i]
            tacc = 0.0
            base = off + i * nin
            for j in range(nin):
                w = p[base + j]
                acc += w * h[j]
                tacc += w * u[j]
            tout[i] = tacc
            if last:
                out[i] = acc
                uout[i] = tacc
            else:
                th = tanh(acc)
                out[i] = th
                uout[i] = (1.0 - th * th) * tacc
        h = out
        u = uout
        hs.append(h)
        ts.append(tout)
        us.append(u)
        off = b_off + nout
    return hs, ts, us


def jvp_one(sizes, params, x0, x1, d0, d1):
    """Probability and directional derivative along (d0, d1), by a
    tangent pass (the full input gradient is never formed)."""
    sizes = [int(s) for s in sizes]
    hs, ts, us = _tangent_layers(sizes, params.tolist(), x0, x1, d0, d1)
    z = hs[-1][0]
    prob = _sigmoid(z)
    return prob, _sig_slope(z, prob) * us[-1][0]


def jvp_param_grad_one(sizes, params, x0, x1, d0, d1):
    sizes = [int(s) for s in sizes]
    p = params.tolist()
    grad = [0.0] * len(p)
    hs, ts, us = _tangent_layers(sizes, p, x0, x1, d0, d1)
    z = hs[-1][0]
    prob = _sigmoid(z)
    sg = _sig_slope(z, prob)
    jvp = sg * us[-1][0]
    _accumulate_jvp_grad(sizes, p, hs, ts, us, prob, sg, 1.0, grad)
    return prob, jvp, np.asarray(grad, dtype=np.float64)


def _accumulate_jvp_grad(sizes, p, hs, ts, us, prob, sg, seed, grad):
    """Reverse pass over the tangent computation, seeded with `seed` per
    unit of directional derivative. Exact second-order quantity: the
    tangent value t feeds both the product with the sigmoid slope and,
    through the slope itself, the logit."""
    nlayers = len(sizes) - 1
    w_offs = _weight_offsets(sizes)
    t_last = ts[nlayers - 1][0]
    # jvp = sg * t_last; d(sg)/dlogit = (1 - 2p) * sg, zero past the clamp
    # because sg itself is zero there.
    dzs = [(seed * t_last) * (1.0 - 2.0 * prob) * sg]
    dts = [seed * sg]
    for l in range(nlayers - 1, -1, -1):
        nin = sizes[l]
        nout = sizes[l + 1]
        w_off = w_offs[l]
        b_off = w_off + nout * nin
        hin = hs[l]
        uin = us[l]
        for i in range(nout):
            dzi = dzs[i]
            dti = dts[i]
            base = w_off + i * nin
            for j in range(nin):
                grad[base + j] += dzi * hin[j]
            for j in range(nin):
                grad[base + j] += dti * uin[j]
            grad[b_off + i] += dzi
        if l == 0:
            break
        dh = [0.0] * nin
        du = [0.0] * nin
        for j in range(nin):
            acch = 0.0
            accu = 0.0
            for i in range(nout):
                w = p[w_off + i * nin + j]
                acch += dzs[i] * w
                accu += dts[i] * w
            dh[j] = acch
            du[j] = accu
        # hin = tanh(z_prev), uin = (1 - hin^2) * t_prev
        t_prev = ts[l - 1]
        nz = [0.0] * nin
        nt = [0.0] * nin
        for j in range(nin):
            a = 1.0 - hin[j] * hin[j]
            da = du[j] * t_prev[j]
            dhj = dh[j] - 2.0 * hin[j] * da
            nz[j] = dhj * a
            nt[j] = du[j] * a
        dzs = nz
        dts = nt


def bce_loss_grad(sizes, params, pts, ys):
    """Mean binary cross entropy and its exact parameter gradient.

    Probabilities are clamped to [PROB_FLOOR, 1 - PROB_FLOOR] before the
    logarithm; where the clamp is active the per-example gradient is
    exactly zero.
    """
    sizes = [int(s) for s in sizes]
    p = params.tolist()
    xs = pts.tolist()
    labels = ys.tolist()
    n = len(xs)
    grad = [0.0] * len(p)
    lo = PROB_FLOOR
    hi = 1.0 - PROB_FLOOR
    total = 0.0
    for k in range(n):
        x0, x1 = xs[k]
        y = labels[k]
        hs = _forward_layers(sizes, p, x0, x1)
        z = hs[-1][0]
        prob = _sigmoid(z)
        pc = prob
        if pc < lo:
            pc = lo
        elif pc > hi:
            pc = hi
        if y >= 0.5:
            total += -math.log(pc)
        else:
            total += -math.log(1.0 - pc)
        if lo < prob < hi:
            _accumulate_value_grad(sizes, p, hs, prob - y, grad)
    value = total / n
    out = np.asarray(grad, dtype=np.float64)
    out *= 1.0 / n
    return value, out


def direction_loss_grad(sizes, params, pts, ys, dirs, steepness):
    """Mean per-annotation disagreement term and its exact gradient.

    Each annotation contributes |(2y - 1) * tanh(steepness * jvp) + 1|,
    where jvp is the directional derivative of the probability at the
    annotated point. The absolute value is redundant for the tanh
    surrogate (the argument is never negative) but kept as written.
    """
    sizes = [int(s) for s in sizes]
    p = params.tolist()
    xs = pts.tolist()
    labels = ys.tolist()
    ds = dirs.tolist()
    n = len(xs)
    grad = [0.0] * len(p)
    total = 0.0
    for k in range(n):
        x0, x1 = xs[k]
        d0, d1 = ds[k]
        sgn = 2.0 * labels[k] - 1.0
        hs, ts, us = _tangent_layers(sizes, p, x0, x1, d0, d1)
        z = hs[-1][0]
        prob = _sigmoid(z)
        sg = _sig_slope(z, prob)
        jvp = sg * us[-1][0]
        s = math.tanh(steepness * jvp)
        total += math.fabs(sgn * s + 1.0)
        coef = sgn * steepness * (1.0 - s * s)
        if coef != 0.0:
            _accumulate_jvp_grad(sizes, p, hs, ts, us, prob, sg, coef, grad)
    value = total / n
    out = np.asarray(grad, dtype=np.float64)
    out *= 1.0 / n
    return value, out
