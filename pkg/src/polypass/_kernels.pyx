# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled elementwise nonlinearity kernels.

Hot inner loops of the solver: pointwise catalog evaluation over quadrature
grids and the fused quadrature reduction used by the energy.  Mirrors
``polypass._purepy`` function for function.  Kind dispatch happens once per
call so the simple loops vectorize; integer power exponents (the common
solver case) use multiply chains instead of libm pow.
"""

from libc.math cimport cos, exp, fabs, floor, log, pow, sin

import numpy as np

BACKEND_NAME = "cython"

# Keep in sync with polypass._codes (asserted by tests/test_backends.py).
DEF K_POWER = 0
DEF K_LINEAR = 1
DEF K_LMP = 2
DEF K_ITERLOG = 3
DEF K_LOGDAMP = 4
DEF K_OSC = 5

ctypedef Py_ssize_t idx_t


cdef inline double _ipow(double base, long e) nogil:
    # e >= 0, exact binary powering
    cdef double r = 1.0
    while e > 0:
        if e & 1:
            r *= base
        base *= base
        e >>= 1
    return r


cdef inline long _int_exponent(double q) nogil:
    # returns q as a small nonnegative integer, or -1
    cdef double r = floor(q + 0.5)
    if fabs(q - r) < 1e-12 and 0.0 <= r <= 32.0:
        return <long> r
    return -1


cdef inline double _sign(double s) nogil:
    if s > 0.0:
        return 1.0
    elif s < 0.0:
        return -1.0
    return 0.0


cdef inline void _blend1(double r, double* psi, double* dpsi) nogil:
    cdef double z, e, p
    if r <= 1e-9:
        psi[0] = 0.0
        dpsi[0] = 0.0
    elif r >= 1.0 - 1e-9:
        psi[0] = 1.0
        dpsi[0] = 0.0
    else:
        z = 1.0 / r - 1.0 / (1.0 - r)
        if z > 700.0:
            psi[0] = 0.0
            dpsi[0] = 0.0
        elif z < -700.0:
            psi[0] = 1.0
            dpsi[0] = 0.0
        else:
            e = exp(z)
            p = 1.0 / (1.0 + e)
            psi[0] = p
            dpsi[0] = p * (1.0 - p) * (1.0 / (r * r) + 1.0 / ((1.0 - r) * (1.0 - r)))


cdef inline void _iterlog1(double t, int nu, double* xi, double* dxi) nogil:
    cdef double val = log(t)
    cdef double prod = t
    cdef int j
    for j in range(nu - 1):
        prod = prod * val
        val = log(val)
    xi[0] = val
    dxi[0] = 1.0 / prod


# --------------------------------------------------------------------------
# f

cdef void _f_power(const double* p, const double* s, double* out, idx_t n) nogil:
    cdef double q = p[0]
    cdef long e = _int_exponent(q - 1.0)
    cdef idx_t i
    if e == 0:
        for i in range(n):
            out[i] = s[i]
    elif e == 1:
        for i in range(n):
            out[i] = fabs(s[i]) * s[i]
    elif e == 2:
        for i in range(n):
            out[i] = s[i] * s[i] * s[i]
    elif e > 0:
        for i in range(n):
            out[i] = _ipow(fabs(s[i]), e) * s[i]
    else:
        for i in range(n):
            out[i] = pow(fabs(s[i]), q - 1.0) * s[i]


cdef void _f_linear(const double* p, const double* s, double* out, idx_t n) nogil:
    cdef double a = p[0]
    cdef idx_t i
    for i in range(n):
        out[i] = a * s[i]


cdef void _f_lmp(const double* p, const double* s, double* out, idx_t n) nogil:
    cdef double a = p[0]
    cdef double alpha = p[1]
    cdef idx_t i
    for i in range(n):
        out[i] = a * s[i] - _sign(s[i]) * pow(fabs(s[i]), alpha)


cdef void _f_iterlog(const double* p, const double* s, double* out, idx_t n) nogil:
    cdef double alpha = p[0]
    cdef int nu = <int> p[1]
    cdef double c = p[2]
    cdef double guard = p[3]
    cdef double a, xi, dxi, psi, dpsi
    cdef idx_t i
    for i in range(n):
        a = fabs(s[i])
        if a <= guard:
            out[i] = 0.0
            continue
        _iterlog1(a + c, nu, &xi, &dxi)
        if guard > 0.0:
            _blend1(a - guard, &psi, &dpsi)
        else:
            psi = 1.0
        out[i] = s[i] * pow(xi, alpha) * psi


cdef void _f_logdamp(const double* p, const double* s, double* out, idx_t n) nogil:
    cdef double beta = p[0]
    cdef double q = p[1]
    cdef double a
    cdef idx_t i
    for i in range(n):
        a = fabs(s[i])
        out[i] = _sign(s[i]) * pow(a, beta + 1.0) / pow(log(a + 2.0), q)


cdef void _f_osc(const double* p, const double* s, double* out, idx_t n) nogil:
    cdef double pp = p[0]
    cdef double c = p[1]
    cdef long e = _int_exponent(pp)
    cdef double theta
    cdef idx_t i
    for i in range(n):
        if s[i] <= 0.0:
            out[i] = 0.0
            continue
        theta = log(log(s[i] + c))
        if e >= 0:
            out[i] = _ipow(s[i], e) * (1.0 + sin(theta))
        else:
            out[i] = pow(s[i], pp) * (1.0 + sin(theta))


# --------------------------------------------------------------------------
# f'

cdef void _fp_power(const double* p, const double* s, double* out, idx_t n) nogil:
    cdef double q = p[0]
    cdef long e = _int_exponent(q - 1.0)
    cdef idx_t i
    if e == 2:
        for i in range(n):
            out[i] = q * s[i] * s[i]
    elif e >= 0:
        for i in range(n):
            out[i] = q * _ipow(fabs(s[i]), e)
    else:
        for i in range(n):
            out[i] = q * pow(fabs(s[i]), q - 1.0)


cdef void _fp_linear(const double* p, const double* s, double* out, idx_t n) nogil:
    cdef idx_t i
    for i in range(n):
        out[i] = p[0]


cdef void _fp_lmp(const double* p, const double* s, double* out, idx_t n) nogil:
    cdef double a = p[0]
    cdef double alpha = p[1]
    cdef idx_t i
    for i in range(n):
        out[i] = a - alpha * pow(fabs(s[i]), alpha - 1.0)


cdef void _fp_iterlog(const double* p, const double* s, double* out, idx_t n) nogil:
    cdef double alpha = p[0]
    cdef int nu = <int> p[1]
    cdef double c = p[2]
    cdef double guard = p[3]
    cdef double a, xi, dxi, psi, dpsi, inner
    cdef idx_t i
    for i in range(n):
        a = fabs(s[i])
        if a <= guard:
            out[i] = 0.0
            continue
        _iterlog1(a + c, nu, &xi, &dxi)
        if guard > 0.0:
            _blend1(a - guard, &psi, &dpsi)
        else:
            psi = 1.0
            dpsi = 0.0
        if xi > 0.0:
            inner = alpha * pow(xi, alpha - 1.0) * dxi
        else:
            inner = 0.0
        out[i] = pow(xi, alpha) * psi + a * (inner * psi + pow(xi, alpha) * dpsi)


cdef void _fp_logdamp(const double* p, const double* s, double* out, idx_t n) nogil:
    cdef double beta = p[0]
    cdef double q = p[1]
    cdef double a, t, lt
    cdef idx_t i
    for i in range(n):
        a = fabs(s[i])
        t = a + 2.0
        lt = log(t)
        out[i] = (beta + 1.0) * pow(a, beta) / pow(lt, q) \
            - q * pow(a, beta + 1.0) / (t * pow(lt, q + 1.0))


cdef void _fp_osc(const double* p, const double* s, double* out, idx_t n) nogil:
    cdef double pp = p[0]
    cdef double c = p[1]
    cdef double t, lt, theta
    cdef idx_t i
    for i in range(n):
        if s[i] <= 0.0:
            out[i] = 0.0
            continue
        t = s[i] + c
        lt = log(t)
        theta = log(lt)
        out[i] = pp * pow(s[i], pp - 1.0) * (1.0 + sin(theta)) \
            + pow(s[i], pp) * cos(theta) / (t * lt)


# --------------------------------------------------------------------------
# F (closed-form kinds only)

cdef void _F_power(const double* p, const double* s, double* out, idx_t n) nogil:
    cdef double q = p[0]
    cdef long e = _int_exponent(q + 1.0)
    cdef double inv = 1.0 / (q + 1.0)
    cdef double sq
    cdef idx_t i
    if e == 4:
        for i in range(n):
            sq = s[i] * s[i]
            out[i] = sq * sq * inv
    elif e >= 0:
        for i in range(n):
            out[i] = _ipow(fabs(s[i]), e) * inv
    else:
        for i in range(n):
            out[i] = pow(fabs(s[i]), q + 1.0) * inv


cdef void _F_linear(const double* p, const double* s, double* out, idx_t n) nogil:
    cdef double half_a = 0.5 * p[0]
    cdef idx_t i
    for i in range(n):
        out[i] = half_a * s[i] * s[i]


cdef void _F_lmp(const double* p, const double* s, double* out, idx_t n) nogil:
    cdef double half_a = 0.5 * p[0]
    cdef double alpha = p[1]
    cdef double inv = 1.0 / (alpha + 1.0)
    cdef idx_t i
    for i in range(n):
        out[i] = half_a * s[i] * s[i] - pow(fabs(s[i]), alpha + 1.0) * inv


# --------------------------------------------------------------------------
# Public API

ctypedef void (*loop_t)(const double*, const double*, double*, idx_t) nogil


cdef loop_t _pick(int kind, int which) nogil:
    # which: 0 = f, 1 = f', 2 = F
    if which == 0:
        if kind == K_POWER:
            return _f_power
        elif kind == K_LINEAR:
            return _f_linear
        elif kind == K_LMP:
            return _f_lmp
        elif kind == K_ITERLOG:
            return _f_iterlog
        elif kind == K_LOGDAMP:
            return _f_logdamp
        elif kind == K_OSC:
            return _f_osc
    elif which == 1:
        if kind == K_POWER:
            return _fp_power
        elif kind == K_LINEAR:
            return _fp_linear
        elif kind == K_LMP:
            return _fp_lmp
        elif kind == K_ITERLOG:
            return _fp_iterlog
        elif kind == K_LOGDAMP:
            return _fp_logdamp
        elif kind == K_OSC:
            return _fp_osc
    else:
        if kind == K_POWER:
            return _F_power
        elif kind == K_LINEAR:
            return _F_linear
        elif kind == K_LMP:
            return _F_lmp
    return NULL


cdef _run(int kind, int which, const double[::1] params, const double[::1] s):
    cdef loop_t fn = _pick(kind, which)
    if fn is NULL:
        if which == 2:
            raise ValueError(f"kind code {kind} has no closed-form primitive")
        raise ValueError(f"unknown kind code {kind}")
    cdef idx_t n = s.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    if n > 0:
        with nogil:
            fn(&params[0], &s[0], &out[0], n)
    return out_arr


def nl_f(int kind, const double[::1] params, const double[::1] s):
    return _run(kind, 0, params, s)


def nl_fprime(int kind, const double[::1] params, const double[::1] s):
    return _run(kind, 1, params, s)


def nl_F(int kind, const double[::1] params, const double[::1] s):
    return _run(kind, 2, params, s)


def sum_F(int kind, const double[::1] params, const double[::1] s, double w):
    if kind not in (K_POWER, K_LINEAR, K_LMP):
        raise ValueError(f"kind code {kind} has no closed-form primitive")
    cdef idx_t n = s.shape[0]
    cdef double acc = 0.0
    cdef double q, inv, half_a, alpha, sq
    cdef long e
    cdef idx_t i
    with nogil:
        if kind == K_POWER:
            q = params[0]
            inv = 1.0 / (q + 1.0)
            e = _int_exponent(q + 1.0)
            if e == 4:
                for i in range(n):
                    sq = s[i] * s[i]
                    acc += sq * sq
            elif e >= 0:
                for i in range(n):
                    acc += _ipow(fabs(s[i]), e)
            else:
                for i in range(n):
                    acc += pow(fabs(s[i]), q + 1.0)
            acc *= inv
        elif kind == K_LINEAR:
            half_a = 0.5 * params[0]
            for i in range(n):
                acc += s[i] * s[i]
            acc *= half_a
        else:
            half_a = 0.5 * params[0]
            alpha = params[1]
            inv = 1.0 / (alpha + 1.0)
            for i in range(n):
                acc += half_a * s[i] * s[i] - pow(fabs(s[i]), alpha + 1.0) * inv
    return acc * w


def weighted_dot(const double[::1] a, const double[::1] w, const double[::1] b):
    cdef idx_t n = a.shape[0]
    cdef double acc = 0.0
    cdef idx_t i
    with nogil:
        for i in range(n):
            acc += a[i] * w[i] * b[i]
    return acc
