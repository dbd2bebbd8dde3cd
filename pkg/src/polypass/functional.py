"""Energy functional, its Riesz gradient, and compactness diagnostics.

The energy is J(u) = (1/2)|u|_m^2 - int F(x, u); its derivative acting on v
is (u, v)_m - int f(x, u) v.  Representing that derivative through the
order-m inner product gives the gradient field u - L(f(u)) with L the
inverse operator, so the dual norm of J'(u) is exactly the |.|_m norm of
the gradient field in the discrete setting.

Also provides the integrability bootstrap: starting from an exponent p1
for which f(u) is controlled, repeated elliptic regularity lifts the
solution exponent through p_{k+1} = p_k^* / p with
p_k^* = N p_k / (N - 2 m p_k), until p + 1 is reached or the exponent
escapes to infinity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import backend
from .grid import (SpectralField, _eigenvalues, _from_grid_array,
                   _to_grid_array, inner_product_m)
from .nonlinearity import (eval_F, eval_f, modulation_on_mesh,
                           spec_has_closed_primitive, _plan)

__all__ = [
    "PSRecord",
    "BootstrapTrace",
    "energy",
    "riesz_gradient",
    "derivative_pairing",
    "ps_diagnostics",
    "bootstrap_chain",
]


@dataclass(frozen=True)
class PSRecord:
    """Compactness diagnostics of one iterate.

    ``defect`` is int (f(u) u - 2 F(u)), which equals 2 J(u) - J'(u)u;
    ``f_norm`` is the L^(2N/(N+2m)) norm of f(u) (only meaningful when
    N > 2m); ``cerami_product`` is (1 + |u|_m) |grad J(u)|_m.
    """

    J_value: float
    grad_norm: float
    sol_norm: float
    defect: float
    f_norm: Optional[float]
    cerami_product: float

    def as_dict(self):
        return {
            "J_value": self.J_value,
            "grad_norm": self.grad_norm,
            "sol_norm": self.sol_norm,
            "defect": self.defect,
            "f_norm": self.f_norm,
            "cerami_product": self.cerami_product,
        }


def _F_on_values(spec, vals):
    """Pointwise F on node values, using the fused kernel when closed."""
    plan = _plan(spec)
    if plan[0] == "base" and spec_has_closed_primitive(spec):
        return backend.nl_F(plan[1], plan[2], np.ascontiguousarray(vals.ravel())).reshape(vals.shape)
    return eval_F(spec, vals)


def energy(u: SpectralField, spec, m):
    """J(u) = (1/2) (u, u)_m - quadrature of F(x, u)."""
    grid = u.grid
    g = modulation_on_mesh(spec, grid)
    vals = _to_grid_array(grid, u.coeffs)
    quad = 0.5 * inner_product_m(u, u, m)
    plan = _plan(spec)
    if g is None and plan[0] == "base" and spec_has_closed_primitive(spec):
        fterm = backend.sum_F(plan[1], plan[2], np.ascontiguousarray(vals.ravel()),
                              grid.cell_weight)
    else:
        Fv = _F_on_values(spec, vals)
        if g is not None:
            Fv = Fv * g
        fterm = grid.cell_weight * float(np.sum(Fv))
    return quad - fterm


def riesz_gradient(u: SpectralField, spec, m):
    """The field representing J'(u) in the order-m inner product: u - L(f(u))."""
    grid = u.grid
    g = modulation_on_mesh(spec, grid)
    vals = _to_grid_array(grid, u.coeffs)
    fv = eval_f(spec, vals)
    if g is not None:
        fv = fv * g
    lam = _eigenvalues(grid, int(m))
    gc = u.coeffs - _from_grid_array(grid, fv) / lam
    return SpectralField(grid, gc)


def derivative_pairing(u: SpectralField, v: SpectralField, spec, m):
    """J'(u) v = (u, v)_m - int f(x, u) v, evaluated by quadrature."""
    u._check(v)
    grid = u.grid
    g = modulation_on_mesh(spec, grid)
    fv = eval_f(spec, _to_grid_array(grid, u.coeffs))
    if g is not None:
        fv = fv * g
    vvals = _to_grid_array(grid, v.coeffs)
    return inner_product_m(u, v, m) - grid.cell_weight * float(np.sum(fv * vvals))


def ps_diagnostics(u: SpectralField, spec, m, N):
    """Assemble the PSRecord of u for nominal dimension N."""
    grid = u.grid
    m, N = int(m), int(N)
    if N < 1:
        raise ValueError("nominal dimension N must be >= 1")
    g = modulation_on_mesh(spec, grid)
    lam = _eigenvalues(grid, m)
    vals = _to_grid_array(grid, u.coeffs)
    fv = eval_f(spec, vals)
    Fv = _F_on_values(spec, vals)
    if g is not None:
        fv, Fv = fv * g, Fv * g
    w = grid.cell_weight
    sol_sq = grid.mode_mass * backend.weighted_dot(
        u.coeffs.ravel(), lam.ravel(), u.coeffs.ravel())
    sol_norm = math.sqrt(sol_sq)
    J = 0.5 * sol_sq - w * float(np.sum(Fv))
    gc = u.coeffs - _from_grid_array(grid, fv) / lam
    grad_norm = math.sqrt(grid.mode_mass * backend.weighted_dot(
        gc.ravel(), lam.ravel(), gc.ravel()))
    defect = w * float(np.sum(fv * vals - 2.0 * Fv))
    f_norm = None
    if N > 2 * m:
        r = 2.0 * N / (N + 2 * m)
        f_norm = float((w * np.sum(np.abs(fv) ** r)) ** (1.0 / r))
    return PSRecord(
        J_value=J,
        grad_norm=grad_norm,
        sol_norm=sol_norm,
        defect=defect,
        f_norm=f_norm,
        cerami_product=(1.0 + sol_norm) * grad_norm,
    )


# --------------------------------------------------------------------------
# Integrability bootstrap


@dataclass
class BootstrapTrace:
    """Exponent chain of the elliptic-regularity iteration."""

    N: int
    m: int
    p: float
    p1: float
    chain: list  # [(p_k, p_k_star)] with math.inf for escaped exponents
    terminated: bool
    steps: int
    threshold_ok: bool
    branch: str  # "p>1" or "p=1"
    reason: str

    def csv_rows(self):
        rows = ["k,p_k,p_k_star"]
        for k, (pk, star) in enumerate(self.chain, start=1):
            s = "inf" if math.isinf(star) else repr(star)
            rows.append(f"{k},{pk!r},{s}")
        return rows

    def as_dict(self):
        return {
            "N": self.N, "m": self.m, "p": self.p, "p1": self.p1,
            "chain": [[pk, ("inf" if math.isinf(st) else st)] for pk, st in self.chain],
            "terminated": self.terminated,
            "steps": self.steps,
            "threshold_ok": self.threshold_ok,
            "branch": self.branch,
            "reason": self.reason,
        }


def _sobolev_star(N, m, pk):
    """N p / (N - 2 m p), escaping to infinity once 2 m p reaches N."""
    if N <= 2.0 * m * pk:
        return math.inf
    return N * pk / (N - 2.0 * m * pk)


def bootstrap_chain(N, m, p, p1, max_steps=10_000):
    """Iterate p_{k+1} = p_k^*/p from p_1 until p_k^* covers p + 1.

    Raises ValueError on invalid exponents (p supercritical for (N, m), or
    p1 <= 1).  Non-termination (fixed points, cycles, sub-threshold p1) is
    flagged on the returned trace, never raised.
    """
    N, m = int(N), int(m)
    p, p1 = float(p), float(p1)
    if N < 1 or m < 1:
        raise ValueError("N and m must be positive integers")
    if p < 1.0:
        raise ValueError(f"growth exponent p must be >= 1, got {p}")
    if N >= 2 * m + 1 and p >= (N + 2.0 * m) / (N - 2.0 * m):
        raise ValueError(
            f"p={p} is not subcritical for N={N}, m={m} "
            f"(needs p < {(N + 2.0 * m) / (N - 2.0 * m)})"
        )
    if p1 <= 1.0:
        raise ValueError(f"starting exponent p1 must exceed 1, got {p1}")

    threshold = max(1.0, N * (p - 1.0) / (2.0 * m * p))
    threshold_ok = p1 > threshold
    branch = "p=1" if p == 1.0 else "p>1"
    target = p + 1.0

    chain = []
    pk = p1
    seen = []
    terminated = False
    reason = "iteration-cap"
    for _ in range(max_steps):
        star = _sobolev_star(N, m, pk)
        chain.append((pk, star))
        if math.isinf(star):
            terminated, reason = True, "infinite-exponent"
            break
        if star >= target:
            terminated, reason = True, "target-reached"
            break
        nxt = star / p
        if abs(nxt - pk) <= 1e-12 * abs(pk):
            reason = "fixed-point"
            break
        if any(abs(nxt - old) <= 1e-12 * abs(old) for old in seen[-8:]):
            reason = "cycle"
            break
        seen.append(pk)
        pk = nxt
    if not terminated and not threshold_ok and reason in ("fixed-point", "cycle", "iteration-cap"):
        reason = f"below-threshold ({reason})"
    return BootstrapTrace(
        N=N, m=m, p=p, p1=p1,
        chain=chain,
        terminated=terminated,
        steps=len(chain),
        threshold_ok=threshold_ok,
        branch=branch,
        reason=reason,
    )
