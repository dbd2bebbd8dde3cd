"""Pure numpy implementation of the elementwise nonlinearity kernels.

Reference backend: always available, used when the compiled extension is
missing or when ``POLYPASS_PURE_PYTHON=1`` is set.  Signatures mirror
``polypass._kernels`` exactly.
"""

import numpy as np

from ._codes import (CLOSED_F, ITERATED_LOG, LINEAR, LINEAR_MINUS_POWER,
                     LOG_DAMPED, OSCILLATING, POWER)

BACKEND_NAME = "numpy"


def _blend(r):
    """C-infinity step on [0, 1] with all derivatives vanishing at the ends.

    Returns (psi, dpsi/dr).  Stable for the full float range: the sigmoid
    form 1/(1+exp(1/r - 1/(1-r))) saturates cleanly at both ends.
    """
    r = np.clip(r, 0.0, 1.0)
    psi = np.zeros_like(r)
    dpsi = np.zeros_like(r)
    mid = (r > 1e-9) & (r < 1.0 - 1e-9)
    ri = r[mid]
    z = 1.0 / ri - 1.0 / (1.0 - ri)
    with np.errstate(over="ignore"):
        e = np.exp(z)
        p = 1.0 / (1.0 + e)
    psi[mid] = p
    dpsi[mid] = p * (1.0 - p) * (1.0 / ri**2 + 1.0 / (1.0 - ri) ** 2)
    psi[r >= 1.0 - 1e-9] = 1.0
    return psi, dpsi


def _iterlog(t, nu):
    """nu-fold iterated logarithm of t and its derivative.

    xi = ln(ln(...ln t)), xi' = 1 / (t * L_1 * ... * L_{nu-1}) with
    L_1 = ln t, L_{j+1} = ln L_j.  Caller guarantees all levels positive.
    """
    val = np.log(t)
    prod = np.array(t, dtype=float, copy=True)
    for _ in range(nu - 1):
        prod = prod * val
        val = np.log(val)
    return val, 1.0 / prod


def nl_f(kind, params, s):
    """Elementwise f(s) for a catalog kind; s is a 1-d float64 array."""
    s = np.asarray(s, dtype=float)
    if kind == POWER:
        q = params[0]
        return np.abs(s) ** (q - 1.0) * s if q != 1.0 else s.copy()
    if kind == LINEAR:
        return params[0] * s
    if kind == LINEAR_MINUS_POWER:
        a, alpha = params[0], params[1]
        return a * s - np.sign(s) * np.abs(s) ** alpha
    if kind == ITERATED_LOG:
        alpha, nu, c, guard = params[0], int(params[1]), params[2], params[3]
        out = np.zeros_like(s)
        a = np.abs(s)
        act = a > guard
        if np.any(act):
            xi, _ = _iterlog(a[act] + c, nu)
            if guard > 0.0:
                psi, _ = _blend(a[act] - guard)
            else:
                psi = 1.0
            out[act] = s[act] * xi**alpha * psi
        return out
    if kind == LOG_DAMPED:
        beta, q = params[0], params[1]
        t = np.abs(s) + 2.0
        return np.sign(s) * np.abs(s) ** (beta + 1.0) / np.log(t) ** q
    if kind == OSCILLATING:
        p, c = params[0], params[1]
        out = np.zeros_like(s)
        pos = s > 0.0
        sp = s[pos]
        theta = np.log(np.log(sp + c))
        out[pos] = sp**p * (1.0 + np.sin(theta))
        return out
    raise ValueError(f"unknown kind code {kind}")


def nl_fprime(kind, params, s):
    """Elementwise f'(s); may return +/-inf where f' is genuinely singular."""
    s = np.asarray(s, dtype=float)
    if kind == POWER:
        q = params[0]
        with np.errstate(divide="ignore"):
            return q * np.abs(s) ** (q - 1.0)
    if kind == LINEAR:
        return np.full_like(s, params[0])
    if kind == LINEAR_MINUS_POWER:
        a, alpha = params[0], params[1]
        with np.errstate(divide="ignore"):
            return a - alpha * np.abs(s) ** (alpha - 1.0)
    if kind == ITERATED_LOG:
        alpha, nu, c, guard = params[0], int(params[1]), params[2], params[3]
        out = np.zeros_like(s)
        a = np.abs(s)
        act = a > guard
        if np.any(act):
            xi, dxi = _iterlog(a[act] + c, nu)
            if guard > 0.0:
                psi, dpsi = _blend(a[act] - guard)
            else:
                psi, dpsi = 1.0, 0.0
            with np.errstate(divide="ignore", invalid="ignore"):
                inner = np.where(xi > 0.0, alpha * xi ** (alpha - 1.0) * dxi, 0.0)
            out[act] = xi**alpha * psi + a[act] * (inner * psi + xi**alpha * dpsi)
        return out
    if kind == LOG_DAMPED:
        beta, q = params[0], params[1]
        a = np.abs(s)
        t = a + 2.0
        lt = np.log(t)
        return (beta + 1.0) * a**beta / lt**q - q * a ** (beta + 1.0) / (t * lt ** (q + 1.0))
    if kind == OSCILLATING:
        p, c = params[0], params[1]
        out = np.zeros_like(s)
        pos = s > 0.0
        sp = s[pos]
        t = sp + c
        lt = np.log(t)
        theta = np.log(lt)
        out[pos] = p * sp ** (p - 1.0) * (1.0 + np.sin(theta)) + sp**p * np.cos(theta) / (t * lt)
        return out
    raise ValueError(f"unknown kind code {kind}")


def nl_F(kind, params, s):
    """Elementwise primitive F(s) = int_0^s f; closed-form kinds only."""
    s = np.asarray(s, dtype=float)
    if kind == POWER:
        q = params[0]
        return np.abs(s) ** (q + 1.0) / (q + 1.0)
    if kind == LINEAR:
        return 0.5 * params[0] * s * s
    if kind == LINEAR_MINUS_POWER:
        a, alpha = params[0], params[1]
        return 0.5 * a * s * s - np.abs(s) ** (alpha + 1.0) / (alpha + 1.0)
    raise ValueError(f"kind code {kind} has no closed-form primitive")


def sum_F(kind, params, s, w):
    """Fused w * sum_j F(s_j) for closed-form kinds (w a scalar weight)."""
    if kind not in CLOSED_F:
        raise ValueError(f"kind code {kind} has no closed-form primitive")
    return w * float(np.sum(nl_F(kind, params, s)))


def weighted_dot(a, w, b):
    """sum_i a_i w_i b_i (the diagonal bilinear form in coefficient space)."""
    return float(np.sum(a * w * b))
