"""Catalog of nonlinearities f(x, s) with primitives and derivatives.

A :class:`NonlinearitySpec` is a closed, immutable description of f built
from a small catalog plus two wrappers (truncation above zero and the C^1
power-growth tail) and finite sums.  Every spec evaluates f, its primitive
F(s) = int_0^s f(t) dt, and f'.  Primitives use closed forms where the
catalog permits and panel Gauss-Legendre quadrature otherwise (absolute
accuracy far below the 1e-10 contract; cross-checked against adaptive
quadrature in the tests).

Space dependence is supported in separable form g(x) * f(s): pass a
callable ``x_modulation`` evaluating the smooth positive factor g on
coordinate arrays.  Modulated specs are not serializable.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad

from . import _codes, backend

__all__ = [
    "NonlinearitySpec",
    "ParameterError",
    "power",
    "linear",
    "linear_minus_power",
    "iterated_log",
    "log_damped_critical",
    "oscillating",
    "composite",
    "positive_truncation",
    "truncate_at",
    "eval_f",
    "eval_F",
    "eval_fprime",
    "spec_to_dict",
    "spec_from_dict",
    "CATALOG_KINDS",
]

CATALOG_KINDS = (
    "power",
    "linear",
    "linear-minus-power",
    "iterated-log",
    "log-damped-critical",
    "oscillating",
    "composite",
)

_WRAPPER_KINDS = ("positive-part", "power-tail")


class ParameterError(ValueError):
    """A spec parameter is missing or outside its documented range."""


@dataclass(frozen=True)
class NonlinearitySpec:
    """Immutable description of a nonlinearity.

    ``params`` is a tuple of (name, value) pairs; values are floats, specs
    (wrapper base) or tuples of specs (composite terms).  Use the module
    constructors rather than building instances by hand.
    """

    kind: str
    params: tuple
    x_modulation: Optional[Callable] = field(default=None, compare=False)

    def param(self, name):
        for key, value in self.params:
            if key == name:
                return value
        raise KeyError(name)

    def with_modulation(self, g):
        return NonlinearitySpec(self.kind, self.params, x_modulation=g)

    def __repr__(self):
        items = ", ".join(f"{k}={v!r}" for k, v in self.params)
        return f"NonlinearitySpec({self.kind}: {items})"


def _require(cond, msg):
    if not cond:
        raise ParameterError(msg)


def _log_tower(nu):
    """Smallest t with the nu-fold iterated log equal to zero: e^^(nu-1)."""
    t = 1.0
    for _ in range(nu - 1):
        t = math.exp(t)
    return t


def power(q):
    """f(s) = |s|^(q-1) s, the odd power of exponent q > 0."""
    q = float(q)
    _require(q > 0, f"power exponent q must be positive, got {q}")
    return NonlinearitySpec("power", (("q", q),))


def linear(a):
    """f(s) = a s."""
    a = float(a)
    _require(math.isfinite(a), "linear slope a must be finite")
    return NonlinearitySpec("linear", (("a", a),))


def linear_minus_power(a, alpha):
    """f(s) = a s - |s|^(alpha-1) s with 0 < alpha < 1."""
    a, alpha = float(a), float(alpha)
    _require(0 < alpha < 1, f"alpha must lie in (0, 1), got {alpha}")
    return NonlinearitySpec("linear-minus-power", (("a", a), ("alpha", alpha)))


def iterated_log(alpha, nu=2, c=0.0):
    """f(s) = s * xi(|s|+c)^alpha with xi the nu-fold iterated logarithm.

    Below the guard point where xi reaches zero f is extended by zero and
    joined with a C-infinity blend over one unit, so f is smooth on all
    of R regardless of c.
    """
    alpha, nu, c = float(alpha), int(nu), float(c)
    _require(alpha > 0, f"alpha must be positive, got {alpha}")
    _require(nu >= 1, f"nesting depth nu must be >= 1, got {nu}")
    _require(c >= 0, f"inner shift c must be >= 0, got {c}")
    return NonlinearitySpec("iterated-log", (("alpha", alpha), ("nu", nu), ("c", c)))


def log_damped_critical(q, N, m):
    """f(s) = |s|^(4m/(N-2m)) s / ln(|s|+2)^q, the log-damped critical power."""
    q, N, m = float(q), int(N), int(m)
    _require(q > 0, f"damping exponent q must be positive, got {q}")
    _require(m >= 1, "order m must be >= 1")
    _require(N >= 2 * m + 1, f"need N >= 2m+1 for the critical exponent, got N={N}, m={m}")
    return NonlinearitySpec("log-damped-critical", (("q", q), ("N", N), ("m", m)))


def oscillating(p, c=math.e**2 + 1.0):
    """f(s) = s^p (1 + sin(ln ln(s + c))) for s >= 0, zero for s < 0.

    Vanishes on the sequence where the sine reaches -1, so f(t)/t has no
    limit at infinity.  Requires c > e so the double log exists at s = 0.
    """
    p, c = float(p), float(c)
    _require(p > 1, f"growth exponent p must exceed 1, got {p}")
    _require(c > math.e, f"shift c must exceed e so ln ln(s+c) exists at 0, got {c}")
    return NonlinearitySpec("oscillating", (("p", p), ("c", c)))


def composite(*terms):
    """Sum of catalog terms: f = f_1 + ... + f_k."""
    _require(len(terms) >= 1, "composite needs at least one term")
    for t in terms:
        _require(isinstance(t, NonlinearitySpec), "composite terms must be specs")
        _require(t.x_modulation is None, "composite terms cannot carry x modulation")
    return NonlinearitySpec("composite", (("terms", tuple(terms)),))


def positive_truncation(spec):
    """Truncate f above zero: 0 for s < 0, unchanged for s >= 0. Idempotent."""
    if spec.kind == "positive-part":
        return spec
    return NonlinearitySpec(
        "positive-part", (("base", spec.with_modulation(None)),),
        x_modulation=spec.x_modulation,
    )


def truncate_at(spec, s_n, p):
    """C^1 truncation growing like s^p beyond s_n.

    Returns the spec equal to 0 for s <= 0, to f on [0, s_n], and to
    A + B s^p for s >= s_n with A = f(s_n) - s_n f'(s_n)/p and
    B = f'(s_n) / (p s_n^(p-1)), which matches value and derivative at s_n
    by construction.
    """
    s_n, p = float(s_n), float(p)
    _require(s_n > 0, f"truncation level s_n must be positive, got {s_n}")
    _require(p >= 1, f"tail exponent p must be >= 1, got {p}")
    base = spec.with_modulation(None)
    fs = float(eval_f(base, s_n))
    fps = float(eval_fprime(base, s_n))
    _require(math.isfinite(fps), "f' must be finite at the truncation level")
    A = fs - s_n * fps / p
    B = fps / (p * s_n ** (p - 1.0))
    return NonlinearitySpec(
        "power-tail",
        (("base", base), ("s_n", s_n), ("p", p), ("A", A), ("B", B)),
        x_modulation=spec.x_modulation,
    )


# --------------------------------------------------------------------------
# Evaluation plans: a spec compiles to a small tree dispatched over arrays.

_BASE_CODES = {
    "power": _codes.POWER,
    "linear": _codes.LINEAR,
    "linear-minus-power": _codes.LINEAR_MINUS_POWER,
    "iterated-log": _codes.ITERATED_LOG,
    "log-damped-critical": _codes.LOG_DAMPED,
    "oscillating": _codes.OSCILLATING,
}


@functools.lru_cache(maxsize=None)
def _plan(spec):
    if spec.kind in _BASE_CODES:
        code = _BASE_CODES[spec.kind]
        if spec.kind == "power":
            packed = np.array([spec.param("q")])
        elif spec.kind == "linear":
            packed = np.array([spec.param("a")])
        elif spec.kind == "linear-minus-power":
            packed = np.array([spec.param("a"), spec.param("alpha")])
        elif spec.kind == "iterated-log":
            nu, c = spec.param("nu"), spec.param("c")
            guard = max(0.0, _log_tower(nu) - c)
            packed = np.array([spec.param("alpha"), float(nu), c, guard])
        elif spec.kind == "log-damped-critical":
            N, m = spec.param("N"), spec.param("m")
            beta = 4.0 * m / (N - 2.0 * m)
            packed = np.array([beta, spec.param("q")])
        else:  # oscillating
            packed = np.array([spec.param("p"), spec.param("c")])
        return ("base", code, packed)
    if spec.kind == "positive-part":
        return ("positive", _plan(spec.param("base")))
    if spec.kind == "power-tail":
        return (
            "tail",
            _plan(spec.param("base")),
            spec.param("s_n"),
            spec.param("p"),
            spec.param("A"),
            spec.param("B"),
        )
    if spec.kind == "composite":
        return ("composite", tuple(_plan(t) for t in spec.param("terms")))
    raise ParameterError(f"unknown nonlinearity kind {spec.kind!r}")


def _plan_f(plan, s):
    tag = plan[0]
    if tag == "base":
        return backend.nl_f(plan[1], plan[2], s)
    if tag == "positive":
        out = np.zeros_like(s)
        mask = s > 0.0
        if mask.any():
            out[mask] = _plan_f(plan[1], s[mask])
        return out
    if tag == "tail":
        _, sub, s_n, p, A, B = plan
        out = np.zeros_like(s)
        mid = (s > 0.0) & (s <= s_n)
        high = s > s_n
        if mid.any():
            out[mid] = _plan_f(sub, s[mid])
        if high.any():
            out[high] = A + B * s[high] ** p
        return out
    return sum(_plan_f(sub, s) for sub in plan[1])


def _plan_fprime(plan, s):
    tag = plan[0]
    if tag == "base":
        return backend.nl_fprime(plan[1], plan[2], s)
    if tag == "positive":
        out = np.zeros_like(s)
        mask = s > 0.0
        if mask.any():
            out[mask] = _plan_fprime(plan[1], s[mask])
        return out
    if tag == "tail":
        _, sub, s_n, p, A, B = plan
        out = np.zeros_like(s)
        mid = (s > 0.0) & (s <= s_n)
        high = s > s_n
        if mid.any():
            out[mid] = _plan_fprime(sub, s[mid])
        if high.any():
            out[high] = p * B * s[high] ** (p - 1.0)
        return out
    return sum(_plan_fprime(sub, s) for sub in plan[1])


def _plan_closed(plan):
    tag = plan[0]
    if tag == "base":
        return plan[1] in _codes.CLOSED_F
    if tag in ("positive", "tail"):
        return _plan_closed(plan[1])
    return all(_plan_closed(sub) for sub in plan[1])


def _plan_F_closed(plan, s):
    tag = plan[0]
    if tag == "base":
        return backend.nl_F(plan[1], plan[2], s)
    if tag == "positive":
        out = np.zeros_like(s)
        mask = s > 0.0
        if mask.any():
            out[mask] = _plan_F_closed(plan[1], s[mask])
        return out
    if tag == "tail":
        _, sub, s_n, p, A, B = plan
        t = np.clip(s, 0.0, s_n)
        out = _plan_F_closed(sub, t)
        out[s < 0.0] = 0.0
        high = s > s_n
        if high.any():
            sh = s[high]
            out[high] += A * (sh - s_n) + B * (sh ** (p + 1.0) - s_n ** (p + 1.0)) / (p + 1.0)
        return out
    return sum(_plan_F_closed(sub, s) for sub in plan[1])


def _plan_breakpoints(plan):
    """Abscissae where f is only piecewise-analytic, for quadrature panels."""
    tag = plan[0]
    if tag == "base":
        pts = [0.0]
        if plan[1] == _codes.ITERATED_LOG:
            guard = plan[2][3]
            if guard > 0.0:
                # resolve the blend window [guard, guard+1] finely
                for b in np.linspace(guard, guard + 1.0, 17):
                    pts.extend((b, -b))
        return pts
    if tag == "positive":
        return [0.0] + _plan_breakpoints(plan[1])
    if tag == "tail":
        return [0.0, plan[2]] + _plan_breakpoints(plan[1])
    out = []
    for sub in plan[1]:
        out.extend(_plan_breakpoints(sub))
    return out


_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)
_GL_X01 = (_GL_X + 1.0) / 2.0
_GL_W01 = _GL_W / 2.0


def _subdivide(edges, max_width):
    widths = np.diff(edges)
    if not np.any(widths > max_width):
        return edges
    out = [edges[0]]
    for a, b in zip(edges[:-1], edges[1:]):
        n = int(np.ceil((b - a) / max_width))
        if n > 1:
            out.extend(np.linspace(a, b, n + 1)[1:])
        else:
            out.append(b)
    return np.asarray(out)


def _plan_F_quad(plan, s):
    """Panel Gauss-Legendre antiderivative of f, exact at the points of s.

    Panels are bounded by the requested values themselves, the plan's
    breakpoints and a maximum-width split, so the integrand is smooth on
    each panel and the composite rule converges spectrally.
    """
    flat = s.ravel()
    lo = min(float(flat.min()), 0.0)
    hi = max(float(flat.max()), 0.0)
    bps = np.asarray(_plan_breakpoints(plan), dtype=float)
    bps = bps[(bps > lo) & (bps < hi)]
    edges = np.unique(np.concatenate([flat, [0.0, lo, hi], bps]))
    span = max(hi - lo, 1e-300)
    edges = _subdivide(edges, span / 64.0)
    widths = np.diff(edges)
    nodes = edges[:-1, None] + widths[:, None] * _GL_X01[None, :]
    fvals = _plan_f(plan, nodes.ravel()).reshape(nodes.shape)
    panels = widths * (fvals @ _GL_W01)
    cum = np.concatenate([[0.0], np.cumsum(panels)])
    anti = cum - cum[np.searchsorted(edges, 0.0)]
    return anti[np.searchsorted(edges, flat)].reshape(s.shape)


# --------------------------------------------------------------------------
# Public evaluation


def _modulation_factor(spec, x):
    if spec.x_modulation is None or x is None:
        return None
    coords = x if isinstance(x, tuple) else (x,)
    return np.asarray(spec.x_modulation(*coords), dtype=float)


def _eval(spec, s, x, worker):
    arr = np.asarray(s, dtype=float)
    scalar = arr.ndim == 0
    flat = np.ascontiguousarray(arr.ravel())
    out = worker(_plan(spec), flat).reshape(arr.shape)
    g = _modulation_factor(spec, x)
    if g is not None:
        out = out * g
    return float(out) if scalar else out


def eval_f(spec, s, x=None):
    """f(x, s) at a scalar or array s (separable modulation applied if set)."""
    return _eval(spec, s, x, _plan_f)


def eval_fprime(spec, s, x=None):
    """Derivative of f in s; +/-inf where f' is genuinely singular."""
    return _eval(spec, s, x, _plan_fprime)


def eval_F(spec, s, x=None):
    """Primitive F(x, s) = int_0^s f(x, t) dt with F(x, 0) = 0."""
    plan = _plan(spec)
    worker = _plan_F_closed if _plan_closed(plan) else _plan_F_quad
    return _eval(spec, s, x, worker)


def eval_F_reference(spec, s):
    """Adaptive-quadrature primitive (scalar), for cross-checking eval_F."""
    plan = _plan(spec)
    pts = [b for b in _plan_breakpoints(plan) if min(0.0, s) < b < max(0.0, s)]
    val, _ = quad(
        lambda t: float(_plan_f(plan, np.array([t]))[0]),
        0.0, float(s), points=sorted(pts) or None, epsabs=1e-10, epsrel=1e-12,
        limit=400,
    )
    return val


def spec_has_closed_primitive(spec):
    return _plan_closed(_plan(spec))


def modulation_on_mesh(spec, grid):
    """Values of the separable factor g on the grid nodes, or None."""
    if spec.x_modulation is None:
        return None
    g = np.asarray(spec.x_modulation(*grid.mesh()), dtype=float)
    if g.shape != grid.node_shape:
        raise ParameterError(
            f"x_modulation returned shape {g.shape}, expected {grid.node_shape}"
        )
    if not np.all(g > 0):
        raise ParameterError("x_modulation must be strictly positive")
    return g


# --------------------------------------------------------------------------
# Serialization (kind + params only; modulated specs are not representable)


def spec_to_dict(spec):
    if spec.x_modulation is not None:
        raise ParameterError("specs with x_modulation cannot be serialized")
    out = {"kind": spec.kind, "params": {}}
    for key, value in spec.params:
        if isinstance(value, NonlinearitySpec):
            out["params"][key] = spec_to_dict(value)
        elif key == "terms":
            out["params"][key] = [spec_to_dict(t) for t in value]
        elif key in ("A", "B"):
            continue  # derived, recomputed on load
        else:
            out["params"][key] = value
    return out


def spec_from_dict(doc):
    try:
        kind = doc["kind"]
        params = dict(doc.get("params", {}))
    except (TypeError, KeyError) as exc:
        raise ParameterError(f"malformed nonlinearity document: missing {exc}") from exc
    builders = {
        "power": lambda p: power(**p),
        "linear": lambda p: linear(**p),
        "linear-minus-power": lambda p: linear_minus_power(**p),
        "iterated-log": lambda p: iterated_log(**p),
        "log-damped-critical": lambda p: log_damped_critical(**p),
        "oscillating": lambda p: oscillating(**p),
    }
    try:
        if kind in builders:
            return builders[kind](params)
        if kind == "composite":
            return composite(*(spec_from_dict(t) for t in params["terms"]))
        if kind == "positive-part":
            return positive_truncation(spec_from_dict(params["base"]))
        if kind == "power-tail":
            return truncate_at(spec_from_dict(params["base"]), params["s_n"], params["p"])
    except TypeError as exc:
        raise ParameterError(f"bad parameters for kind {kind!r}: {exc}") from exc
    except KeyError as exc:
        raise ParameterError(f"missing parameter {exc} for kind {kind!r}") from exc
    raise ParameterError(f"unknown nonlinearity kind {kind!r}")
