# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Numeric kernels, compiled backend.

Mirrors _core_py.py operation for operation, in the same order, using the
same libm calls, so the two backends produce bit-identical results. Any
change to one file must be made to both. See _core_py.py for the layout
and clamping conventions.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, fabs, log, tanh

cnp.import_array()

LOGIT_CLAMP = 36.0
PROB_FLOOR = 1e-12

cdef double _CLAMP = 36.0
cdef double _FLOOR = 1e-12


cdef inline double _sigmoid(double z) noexcept nogil:
    cdef double e
    if z >= 0.0:
        if z > _CLAMP:
            z = _CLAMP
        e = exp(-z)
        return 1.0 / (1.0 + e)
    if z < -_CLAMP:
        z = -_CLAMP
    e = exp(z)
    return e / (1.0 + e)


cdef inline double _sig_slope(double z, double prob) noexcept nogil:
    if z > _CLAMP or z < -_CLAMP:
        return 0.0
    return prob * (1.0 - prob)


cdef void _offsets(const cnp.int64_t* sizes, int nlayers, cnp.int64_t* w_offs) noexcept nogil:
    cdef int l
    cdef cnp.int64_t off = 0
    for l in range(nlayers):
        w_offs[l] = off
        off += sizes[l + 1] * sizes[l] + sizes[l + 1]


cdef void _forward_layers(const cnp.int64_t* sizes, int nlayers, const double* p,
                          double x0, double x1, double* hs, int maxw) noexcept nogil:
    # hs row l = input to layer l; row nlayers = the one-element logit
    cdef int l, i, j, nin, nout, last
    cdef cnp.int64_t off = 0, b_off, base
    cdef double acc
    hs[0] = x0
    hs[1] = x1
    for l in range(nlayers):
        nin = <int> sizes[l]
        nout = <int> sizes[l + 1]
        b_off = off + nout * nin
        last = l == nlayers - 1
        for i in range(nout):
            acc = p[b_off + i]
            base = off + i * nin
            for j in range(nin):
                acc += p[base + j] * hs[l * maxw + j]
            if last:
                hs[(l + 1) * maxw + i] = acc
            else:
                hs[(l + 1) * maxw + i] = tanh(acc)
        off = b_off + nout


cdef void _accumulate_value_grad(const cnp.int64_t* sizes, int nlayers, const double* p,
                                 const cnp.int64_t* w_offs, const double* hs, int maxw,
                                 double seed, double* grad,
                                 double* delta, double* prev) noexcept nogil:
    cdef int l, i, j, nin, nout
    cdef cnp.int64_t w_off, b_off, base
    cdef double di, acc, hl
    delta[0] = seed
    for l in range(nlayers - 1, -1, -1):
        nin = <int> sizes[l]
        nout = <int> sizes[l + 1]
        w_off = w_offs[l]
        b_off = w_off + nout * nin
        for i in range(nout):
            di = delta[i]
            base = w_off + i * nin
            for j in range(nin):
                grad[base + j] += di * hs[l * maxw + j]
            grad[b_off + i] += di
        if l == 0:
            break
        for j in range(nin):
            acc = 0.0
            for i in range(nout):
                acc += delta[i] * p[w_off + i * nin + j]
            prev[j] = acc
        for j in range(nin):
            hl = hs[l * maxw + j]
            prev[j] *= 1.0 - hl * hl
        for j in range(nin):
            delta[j] = prev[j]


cdef void _tangent_layers(const cnp.int64_t* sizes, int nlayers, const double* p,
                          double x0, double x1, double d0, double d1,
                          double* hs, double* ts, double* us, int maxw) noexcept nogil:
    cdef int l, i, j, nin, nout, last
    cdef cnp.int64_t off = 0, b_off, base
    cdef double acc, tacc, w, th
    hs[0] = x0
    hs[1] = x1
    us[0] = d0
    us[1] = d1
    for l in range(nlayers):
        nin = <int> sizes[l]
        nout = <int> sizes[l + 1]
        b_off = off + nout * nin
        last = l == nlayers - 1
        for i in range(nout):
            acc = p[b_off + i]
            tacc = 0.0
            base = off + i * nin
            for j in range(nin):
                w = p[base + j]
                acc += w * hs[l * maxw + j]
                tacc += w * us[l * maxw + j]
            ts[l * maxw + i] = tacc
            if last:
                hs[(l + 1) * maxw + i] = acc
                us[(l + 1) * maxw + i] = tacc
            else:
                th = tanh(acc)
                hs[(l + 1) * maxw + i] = th
                us[(l + 1) * maxw + i] = (1.0 - th * th) * tacc
        off = b_off + nout


cdef void _accumulate_jvp_grad(const cnp.int64_t* sizes, int nlayers, const double* p,
                               const cnp.int64_t* w_offs,
                               const double* hs, const double* ts, const double* us,
                               int maxw, double prob, double sg, double seed, double* grad,
                               double* dzs, double* dts, double* dh, double* du) noexcept nogil:
    cdef int l, i, j, nin, nout
    cdef cnp.int64_t w_off, b_off, base
    cdef double t_last, dzi, dti, acch, accu, w, a, da, dhj, hl
    t_last = ts[(nlayers - 1) * maxw]
    # jvp = sg * t_last; d(sg)/dlogit = (1 - 2p) * sg, zero past the clamp
    # because sg itself is zero there.
    dzs[0] = (seed * t_last) * (1.0 - 2.0 * prob) * sg
    dts[0] = seed * sg
    for l in range(nlayers - 1, -1, -1):
        nin = <int> sizes[l]
        nout = <int> sizes[l + 1]
        w_off = w_offs[l]
        b_off = w_off + nout * nin
        for i in range(nout):
            dzi = dzs[i]
            dti = dts[i]
            base = w_off + i * nin
            for j in range(nin):
                grad[base + j] += dzi * hs[l * maxw + j]
            for j in range(nin):
                grad[base + j] += dti * us[l * maxw + j]
            grad[b_off + i] += dzi
        if l == 0:
            break
        for j in range(nin):
            acch = 0.0
            accu = 0.0
            for i in range(nout):
                w = p[w_off + i * nin + j]
                acch += dzs[i] * w
                accu += dts[i] * w
            dh[j] = acch
            du[j] = accu
        # hs row l = tanh(z_prev), us row l = (1 - h^2) * ts row (l-1)
        for j in range(nin):
            hl = hs[l * maxw + j]
            a = 1.0 - hl * hl
            da = du[j] * ts[(l - 1) * maxw + j]
            dhj = dh[j] - 2.0 * hl * da
            dzs[j] = dhj * a
            dts[j] = du[j] * a


cdef int _maxw(const cnp.int64_t[::1] sizes):
    cdef int m = 0
    cdef Py_ssize_t l
    for l in range(sizes.shape[0]):
        if sizes[l] > m:
            m = <int> sizes[l]
    return m


def forward_one(const cnp.int64_t[::1] sizes, const double[::1] params, double x0, double x1):
    cdef int nlayers = <int> sizes.shape[0] - 1
    cdef int maxw = _maxw(sizes)
    hs_arr = np.empty((nlayers + 1) * maxw, dtype=np.float64)
    cdef double[::1] hs = hs_arr
    _forward_layers(&sizes[0], nlayers, &params[0], x0, x1, &hs[0], maxw)
    return _sigmoid(hs[nlayers * maxw])


def forward_batch(const cnp.int64_t[::1] sizes, const double[::1] params,
                  const double[:, ::1] pts):
    cdef int nlayers = <int> sizes.shape[0] - 1
    cdef int maxw = _maxw(sizes)
    cdef Py_ssize_t n = pts.shape[0], k
    out_arr = np.empty(n, dtype=np.float64)
    hs_arr = np.empty((nlayers + 1) * maxw, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double[::1] hs = hs_arr
    for k in range(n):
        _forward_layers(&sizes[0], nlayers, &params[0], pts[k, 0], pts[k, 1], &hs[0], maxw)
        out[k] = _sigmoid(hs[nlayers * maxw])
    return out_arr


def input_gradient_one(const cnp.int64_t[::1] sizes, const double[::1] params,
                       double x0, double x1):
    cdef int nlayers = <int> sizes.shape[0] - 1
    cdef int maxw = _maxw(sizes)
    cdef int l, i, j, nin, nout
    cdef cnp.int64_t w_off
    cdef double z, prob, acc, hl
    hs_arr = np.empty((nlayers + 1) * maxw, dtype=np.float64)
    offs_arr = np.empty(nlayers, dtype=np.int64)
    delta_arr = np.empty(maxw, dtype=np.float64)
    prev_arr = np.empty(maxw, dtype=np.float64)
    cdef double[::1] hs = hs_arr
    cdef cnp.int64_t[::1] w_offs = offs_arr
    cdef double[::1] delta = delta_arr
    cdef double[::1] prev = prev_arr
    _offsets(&sizes[0], nlayers, &w_offs[0])
    _forward_layers(&sizes[0], nlayers, &params[0], x0, x1, &hs[0], maxw)
    z = hs[nlayers * maxw]
    prob = _sigmoid(z)
    delta[0] = _sig_slope(z, prob)
    for l in range(nlayers - 1, -1, -1):
        nin = <int> sizes[l]
        nout = <int> sizes[l + 1]
        w_off = w_offs[l]
        for j in range(nin):
            acc = 0.0
            for i in range(nout):
                acc += delta[i] * params[w_off + i * nin + j]
            prev[j] = acc
        if l > 0:
            for j in range(nin):
                hl = hs[l * maxw + j]
                prev[j] *= 1.0 - hl * hl
        for j in range(nin):
            delta[j] = prev[j]
    return prob, delta[0], delta[1]


def forward_param_grad_one(const cnp.int64_t[::1] sizes, const double[::1] params,
                           double x0, double x1):
    cdef int nlayers = <int> sizes.shape[0] - 1
    cdef int maxw = _maxw(sizes)
    cdef double z, prob
    grad_arr = np.zeros(params.shape[0], dtype=np.float64)
    hs_arr = np.empty((nlayers + 1) * maxw, dtype=np.float64)
    offs_arr = np.empty(nlayers, dtype=np.int64)
    delta_arr = np.empty(maxw, dtype=np.float64)
    prev_arr = np.empty(maxw, dtype=np.float64)
    cdef double[::1] grad = grad_arr
    cdef double[::1] hs = hs_arr
    cdef cnp.int64_t[::1] w_offs = offs_arr
    cdef double[::1] delta = delta_arr
    cdef double[::1] prev = prev_arr
    _offsets(&sizes[0], nlayers, &w_offs[0])
    _forward_layers(&sizes[0], nlayers, &params[0], x0, x1, &hs[0], maxw)
    z = hs[nlayers * maxw]
    prob = _sigmoid(z)
    _accumulate_value_grad(&sizes[0], nlayers, &params[0], &w_offs[0], &hs[0], maxw,
                           _sig_slope(z, prob), &grad[0], &delta[0], &prev[0])
    return prob, grad_arr


def jvp_one(const cnp.int64_t[::1] sizes, const double[::1] params,
            double x0, double x1, double d0, double d1):
    cdef int nlayers = <int> sizes.shape[0] - 1
    cdef int maxw = _maxw(sizes)
    cdef double z, prob
    hs_arr = np.empty((nlayers + 1) * maxw, dtype=np.float64)
    ts_arr = np.empty(nlayers * maxw, dtype=np.float64)
    us_arr = np.empty((nlayers + 1) * maxw, dtype=np.float64)
    cdef double[::1] hs = hs_arr
    cdef double[::1] ts = ts_arr
    cdef double[::1] us = us_arr
    _tangent_layers(&sizes[0], nlayers, &params[0], x0, x1, d0, d1,
                    &hs[0], &ts[0], &us[0], maxw)
    z = hs[nlayers * maxw]
    prob = _sigmoid(z)
    return prob, _sig_slope(z, prob) * us[nlayers * maxw]


def jvp_param_grad_one(const cnp.int64_t[::1] sizes, const double[::1] params,
                       double x0, double x1, double d0, double d1):
    cdef int nlayers = <int> sizes.shape[0] - 1
    cdef int maxw = _maxw(sizes)
    cdef double z, prob, sg, jvp
    grad_arr = np.zeros(params.shape[0], dtype=np.float64)
    hs_arr = np.empty((nlayers + 1) * maxw, dtype=np.float64)
    ts_arr = np.empty(nlayers * maxw, dtype=np.float64)
    us_arr = np.empty((nlayers + 1) * maxw, dtype=np.float64)
    offs_arr = np.empty(nlayers, dtype=np.int64)
    scratch_arr = np.empty(4 * maxw, dtype=np.float64)
    cdef double[::1] grad = grad_arr
    cdef double[::1] hs = hs_arr
    cdef double[::1] ts = ts_arr
    cdef double[::1] us = us_arr
    cdef cnp.int64_t[::1] w_offs = offs_arr
    cdef double[::1] scratch = scratch_arr
    _offsets(&sizes[0], nlayers, &w_offs[0])
    _tangent_layers(&sizes[0], nlayers, &params[0], x0, x1, d0, d1,
                    &hs[0], &ts[0], &us[0], maxw)
    z = hs[nlayers * maxw]
    prob = _sigmoid(z)
    sg = _sig_slope(z, prob)
    jvp = sg * us[nlayers * maxw]
    _accumulate_jvp_grad(&sizes[0], nlayers, &params[0], &w_offs[0],
                         &hs[0], &ts[0], &us[0], maxw, prob, sg, 1.0, &grad[0],
                         &scratch[0], &scratch[maxw], &scratch[2 * maxw], &scratch[3 * maxw])
    return prob, jvp, grad_arr


def bce_loss_grad(const cnp.int64_t[::1] sizes, const double[::1] params,
                  const double[:, ::1] pts, const double[::1] ys):
    cdef int nlayers = <int> sizes.shape[0] - 1
    cdef int maxw = _maxw(sizes)
    cdef Py_ssize_t n = pts.shape[0], k, idx
    cdef double total = 0.0, y, z, prob, pc, inv
    cdef double lo = _FLOOR, hi = 1.0 - _FLOOR
    grad_arr = np.zeros(params.shape[0], dtype=np.float64)
    hs_arr = np.empty((nlayers + 1) * maxw, dtype=np.float64)
    offs_arr = np.empty(nlayers, dtype=np.int64)
    delta_arr = np.empty(maxw, dtype=np.float64)
    prev_arr = np.empty(maxw, dtype=np.float64)
    cdef double[::1] grad = grad_arr
    cdef double[::1] hs = hs_arr
    cdef cnp.int64_t[::1] w_offs = offs_arr
    cdef double[::1] delta = delta_arr
    cdef double[::1] prev = prev_arr
    _offsets(&sizes[0], nlayers, &w_offs[0])
    for k in range(n):
        y = ys[k]
        _forward_layers(&sizes[0], nlayers, &params[0], pts[k, 0], pts[k, 1], &hs[0], maxw)
        z = hs[nlayers * maxw]
        prob = _sigmoid(z)
        pc = prob
        if pc < lo:
            pc = lo
        elif pc > hi:
            pc = hi
        if y >= 0.5:
            total += -log(pc)
        else:
            total += -log(1.0 - pc)
        if lo < prob < hi:
            _accumulate_value_grad(&sizes[0], nlayers, &params[0], &w_offs[0], &hs[0], maxw,
                                   prob - y, &grad[0], &delta[0], &prev[0])
    inv = 1.0 / n
    for idx in range(grad.shape[0]):
        grad[idx] = grad[idx] * inv
    return total / n, grad_arr


def direction_loss_grad(const cnp.int64_t[::1] sizes, const double[::1] params,
                        const double[:, ::1] pts, const double[::1] ys,
                        const double[:, ::1] dirs, double steepness):
    cdef int nlayers = <int> sizes.shape[0] - 1
    cdef int maxw = _maxw(sizes)
    cdef Py_ssize_t n = pts.shape[0], k, idx
    cdef double total = 0.0, sgn, z, prob, sg, jvp, s, coef, inv
    grad_arr = np.zeros(params.shape[0], dtype=np.float64)
    hs_arr = np.empty((nlayers + 1) * maxw, dtype=np.float64)
    ts_arr = np.empty(nlayers * maxw, dtype=np.float64)
    us_arr = np.empty((nlayers + 1) * maxw, dtype=np.float64)
    offs_arr = np.empty(nlayers, dtype=np.int64)
    scratch_arr = np.empty(4 * maxw, dtype=np.float64)
    cdef double[::1] grad = grad_arr
    cdef double[::1] hs = hs_arr
    cdef double[::1] ts = ts_arr
    cdef double[::1] us = us_arr
    cdef cnp.int64_t[::1] w_offs = offs_arr
    cdef double[::1] scratch = scratch_arr
    _offsets(&sizes[0], nlayers, &w_offs[0])
    for k in range(n):
        sgn = 2.0 * ys[k] - 1.0
        _tangent_layers(&sizes[0], nlayers, &params[0], pts[k, 0], pts[k, 1],
                        dirs[k, 0], dirs[k, 1], &hs[0], &ts[0], &us[0], maxw)
        z = hs[nlayers * maxw]
        prob = _sigmoid(z)
        sg = _sig_slope(z, prob)
        jvp = sg * us[nlayers * maxw]
        s = tanh(steepness * jvp)
        total += fabs(sgn * s + 1.0)
        coef = sgn * steepness * (1.0 - s * s)
        if coef != 0.0:
            _accumulate_jvp_grad(&sizes[0], nlayers, &params[0], &w_offs[0],
                                 &hs[0], &ts[0], &us[0], maxw, prob, sg, coef, &grad[0],
                                 &scratch[0], &scratch[maxw], &scratch[2 * maxw],
                                 &scratch[3 * maxw])
    inv = 1.0 / n
    for idx in range(grad.shape[0]):
        grad[idx] = grad[idx] * inv
    return total / n, grad_arr
