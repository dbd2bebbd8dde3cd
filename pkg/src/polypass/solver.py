"""Min-max solvers: mountain pass, symmetric multi-solution mode, and
truncation continuation.

The mountain-pass solver maintains a discrete path from 0 to a valley
endpoint, repeatedly locates the path maximizer and deforms a neighborhood
of it along the negative gradient with a backtracking (Armijo) line
search, re-parametrizing the path by arc length.  The maximal energy along
the path never increases: smoothing and re-parametrization steps are only
accepted when they respect the current maximum.  Once the maximizer's
residual is small the critical point is polished by a damped Newton
iteration on grad J = 0 (configurable; the path phase alone converges too,
just slowly near the saddle).

The symmetric mode reruns the solver from successive eigenfunction seeds
and rejects convergence onto previously found pairs (deflation by distance
in the order-m norm).  The continuation mode solves a schedule of
power-tail truncated problems until the solution's sup norm drops below
the truncation level, recording the scalar blow-up diagnostic Q_n(0) for
the stages that keep growing.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import backend
from .functional import PSRecord, energy
from .grid import (SpectralField, _eigenvalues, _from_grid_array,
                   _sine_matrix, _to_grid_array, _to_grid_batch,
                   first_eigenpair, inner_product_m, lp_norm, mode_field,
                   norm_m)
from .hypotheses import SamplingConfig, check_hypothesis
from .nonlinearity import (eval_F, eval_f, eval_fprime, modulation_on_mesh,
                           spec_has_closed_primitive, truncate_at, _plan)

__all__ = [
    "SolverError",
    "ValleyNotFound",
    "FewerFound",
    "PreconditionError",
    "MPConfig",
    "MinMaxTrace",
    "ContinuationSchedule",
    "StageRecord",
    "ContinuationTrace",
    "GeometryReport",
    "find_valley_endpoint",
    "mountain_pass_solve",
    "symmetric_mountain_pass",
    "continuation_solve",
    "mountain_pass_geometry",
    "count_interior_zeros",
]


class SolverError(Exception):
    pass


class ValleyNotFound(SolverError):
    """No beta in the doubling sequence gives J(beta e) < 0."""


class PreconditionError(SolverError):
    pass


class FewerFound(SolverError):
    """Deflation exhausted the seed list before reaching the target count."""

    def __init__(self, requested, traces):
        self.requested = requested
        self.traces = traces
        super().__init__(
            f"found {len(traces)} distinct pairs out of {requested} requested"
        )


@dataclass(frozen=True)
class MPConfig:
    path_points: int = 64
    tol: float = 1e-8
    max_iter: int = 50_000
    step_rule: str = "armijo"
    armijo: float = 1e-4
    step_init: float = 1.0
    min_step: float = 1e-14
    polish: bool = True
    polish_threshold: float = 1e-4
    polish_max_iter: int = 60
    deflation_tol: float = 1e-4
    check_hypotheses: bool = True

    def __post_init__(self):
        if self.step_rule != "armijo":
            raise ValueError(f"unknown step rule {self.step_rule!r}")
        if self.path_points < 8:
            raise ValueError("path needs at least 8 points")


@dataclass
class MinMaxTrace:
    records: list
    path_max_energy: list
    residual: float
    iterations: int
    converged: bool
    solution: SpectralField
    energy: float
    sup_sol_norm: float
    ps_warning: bool
    polish_iterations: int = 0
    notes: str = ""
    meta: dict = field(default_factory=dict)


# --------------------------------------------------------------------------
# Workspace: batched energies and gradients on raw coefficient arrays


class _Workspace:
    def __init__(self, spec, grid, m, N):
        self.spec = spec
        self.grid = grid
        self.m = int(m)
        self.N = int(N)
        self.lam = np.asarray(_eigenvalues(grid, self.m))
        self.lam_flat = self.lam.ravel()
        self.mass = grid.mode_mass
        self.w = grid.cell_weight
        self.gvals = modulation_on_mesh(spec, grid)
        plan = _plan(spec)
        self.fused = (
            self.gvals is None and plan[0] == "base" and spec_has_closed_primitive(spec)
        )
        self.plan = plan

    def values(self, c):
        return _to_grid_array(self.grid, c)

    def norm(self, c):
        cf = c.ravel()
        return math.sqrt(self.mass * backend.weighted_dot(cf, self.lam_flat, cf))

    def ip(self, a, b):
        return self.mass * backend.weighted_dot(a.ravel(), self.lam_flat, b.ravel())

    def energy_one(self, c):
        vals = self.values(c)
        quad = 0.5 * self.mass * backend.weighted_dot(
            c.ravel(), self.lam_flat, c.ravel())
        if self.fused:
            return quad - backend.sum_F(
                self.plan[1], self.plan[2], np.ascontiguousarray(vals.ravel()), self.w)
        Fv = eval_F(self.spec, vals)
        if self.gvals is not None:
            Fv = Fv * self.gvals
        return quad - self.w * float(np.sum(Fv))

    def energy_batch(self, cs):
        vals = _to_grid_batch(self.grid, cs)
        flat = cs.reshape(cs.shape[0], -1)
        quad = 0.5 * self.mass * np.einsum("bi,i,bi->b", flat, self.lam_flat, flat)
        Fv = eval_F(self.spec, vals)
        if self.gvals is not None:
            Fv = Fv * self.gvals
        axes = tuple(range(1, vals.ndim))
        return quad - self.w * Fv.sum(axis=axes)

    def gradient(self, c):
        """(grad coefficients, residual norm, node values, f values)."""
        vals = self.values(c)
        fv = eval_f(self.spec, vals)
        if self.gvals is not None:
            fv = fv * self.gvals
        gc = c - _from_grid_array(self.grid, fv) / self.lam
        return gc, self.norm(gc), vals, fv

    def record(self, c, J, grad_norm, vals, fv):
        """PSRecord assembled from already-computed intermediates.

        The F integral is recovered from J and |u|_m, so no second
        quadrature of the primitive is needed per iteration.
        """
        sol_sq = self.mass * backend.weighted_dot(
            c.ravel(), self.lam_flat, c.ravel())
        sol_norm = math.sqrt(sol_sq)
        pairing_part = self.w * float(np.sum(fv * vals))
        # int F = 0.5 |u|_m^2 - J
        defect = pairing_part - 2.0 * (0.5 * sol_sq - J)
        f_norm = None
        if self.N > 2 * self.m:
            r = 2.0 * self.N / (self.N + 2 * self.m)
            f_norm = float((self.w * np.sum(np.abs(fv) ** r)) ** (1.0 / r))
        return PSRecord(
            J_value=J, grad_norm=grad_norm, sol_norm=sol_norm,
            defect=defect, f_norm=f_norm,
            cerami_product=(1.0 + sol_norm) * grad_norm,
        )

    def hessian_solve(self, c, rhs_flat):
        """Solve (I - L f'(u)) delta = rhs in coefficient space."""
        vals = self.values(c)
        fp = eval_fprime(self.spec, vals)
        if self.gvals is not None:
            fp = fp * self.gvals
        # singular derivatives (e.g. |s|^(alpha-1) at a node with u = 0)
        # are capped; Newton tolerates the inexact Jacobian
        fp = np.nan_to_num(fp, nan=0.0, posinf=1e14, neginf=-1e14)
        n = c.size
        if n <= 2048:
            H = self._dense_hessian(fp)
            return np.linalg.solve(H, rhs_flat)
        return self._minres_hessian(fp, rhs_flat)

    def _dense_hessian(self, fp):
        grid = self.grid
        Phi = np.asarray(_sine_matrix(grid))
        scale = 2.0 / (grid.quad_points_per_dim + 1)
        if grid.d == 1:
            S = scale * (Phi * fp[None, :]) @ Phi.T
        else:
            T = np.einsum("aq,bq,qr->abr", Phi, Phi, fp, optimize=True)
            S = scale**2 * np.einsum("abr,cr,dr->acbd", T, Phi, Phi, optimize=True)
            n = grid.modes_per_dim**2
            S = S.reshape(n, n)
        return np.eye(S.shape[0]) - S / self.lam_flat[:, None]

    def _minres_hessian(self, fp, rhs_flat):
        from scipy.sparse.linalg import LinearOperator, minres

        grid, lam = self.grid, self.lam
        sq = np.sqrt(self.lam_flat)

        def matvec(yhat):
            # symmetrized: D^(1/2) (I - D^(-1) C) D^(-1/2), D = diag(lam)
            v = (yhat / sq).reshape(grid.mode_shape)
            cv = _from_grid_array(grid, fp * _to_grid_array(grid, v)) / lam
            return yhat - sq * cv.ravel()

        n = rhs_flat.size
        op = LinearOperator((n, n), matvec=matvec)
        y, info = minres(op, sq * rhs_flat, rtol=1e-12, maxiter=400)
        if info != 0:
            raise SolverError("inner Newton solve did not converge")
        return y / sq


# --------------------------------------------------------------------------
# Valley endpoint


def find_valley_endpoint(spec, grid, m, max_doublings=60, direction=None,
                         check_h3=True):
    """Smallest beta in {1, 2, 4, ...} with J(beta e) < 0, and the endpoint.

    ``direction`` defaults to the L2-normalized first eigenfunction.  The
    superlinearity condition H3 is checked on a coarse sample first; a
    failure only warns, since the doubling search is its own arbiter.
    """
    if check_h3 and spec.x_modulation is None:
        lam1 = float(grid.d) ** int(m)
        cfg = SamplingConfig(s_max=1e6, points_per_decade=40, lambda1=lam1)
        rep = check_hypothesis(spec, "H3", max(grid.d, 2 * m + 1), m, cfg)
        if not rep.satisfied:
            warnings.warn(
                "H3 looks violated on a coarse sample; the valley search may fail",
                stacklevel=2,
            )
    if direction is None:
        _, direction = first_eigenpair(grid, m)
    for j in range(max_doublings + 1):
        beta = float(2**j)
        e = beta * direction
        scale = 1.0 + inner_product_m(e, e, m)
        # margin keeps roundoff of an exactly-zero energy (f = lambda1 s)
        # from faking a valley
        if energy(e, spec, m) < -1e-12 * scale:
            return beta, e
    raise ValleyNotFound(
        f"J(beta e) stayed nonnegative through beta = 2^{max_doublings}"
    )


# --------------------------------------------------------------------------
# Mountain-pass driver


def _resample_path(path, ws):
    """Redistribute the path points uniformly in order-m arc length."""
    flat = path.reshape(path.shape[0], -1)
    seg = np.diff(flat, axis=0)
    lengths = np.sqrt(ws.mass * np.einsum("bi,i,bi->b", seg, ws.lam_flat, seg))
    cum = np.concatenate([[0.0], np.cumsum(lengths)])
    if cum[-1] <= 0:
        return path
    targets = np.linspace(0.0, cum[-1], path.shape[0])
    idx = np.clip(np.searchsorted(cum, targets, side="right") - 1, 0, len(seg) - 1)
    frac = (targets - cum[idx]) / np.where(lengths[idx] > 0, lengths[idx], 1.0)
    out = flat[idx] + frac[:, None] * seg[idx]
    out[0], out[-1] = flat[0], flat[-1]
    return out.reshape(path.shape)


def _refined_max(ws, path, Js):
    """Path maximum over nodes and segment midpoints.

    Returns (max value, node index, base point, base value).  Midpoint
    probing keeps the discrete maximum honest when the ridge crossing
    falls between nodes; the deformation base is then the midpoint and the
    adjacent node with the lower energy is the slot it will occupy.
    """
    mids = 0.5 * (path[:-1] + path[1:])
    Jm = ws.energy_batch(mids)
    i_node = int(np.argmax(Js))
    i_mid = int(np.argmax(Jm))
    if Jm[i_mid] > Js[i_node]:
        k = i_mid if (Js[i_mid] <= Js[i_mid + 1] or i_mid + 1 == len(Js) - 1) \
            else i_mid + 1
        k = min(max(k, 1), len(Js) - 2)
        return float(Jm[i_mid]), k, mids[i_mid], float(Jm[i_mid])
    return float(Js[i_node]), i_node, path[i_node], float(Js[i_node])


def _backtrack(ws, c, J, g, res, sigma0, armijo, min_step, max_halvings=60):
    sigma = sigma0
    for _ in range(max_halvings):
        trial = c - sigma * g
        Jt = ws.energy_one(trial)
        if Jt <= J - armijo * sigma * res * res:
            return trial, Jt, sigma
        sigma *= 0.5
        if sigma < min_step:
            break
    return None, None, sigma


def _newton_polish(ws, c0, cfg, records, sup_tracker):
    """Damped Newton on grad J = 0 from the path maximizer."""
    c = c0.copy()
    g, res, vals, fv = ws.gradient(c)
    for it in range(1, cfg.polish_max_iter + 1):
        delta = ws.hessian_solve(c, -g.ravel()).reshape(c.shape)
        alpha = 1.0
        stepped = False
        for _ in range(25):
            trial = c + alpha * delta
            gt, rest, valst, fvt = ws.gradient(trial)
            if rest < res * (1.0 - 1e-4 * alpha) or rest <= cfg.tol:
                c, g, res, vals, fv = trial, gt, rest, valst, fvt
                stepped = True
                break
            alpha *= 0.5
        J = ws.energy_one(c)
        rec = ws.record(c, J, res, vals, fv)
        records.append(rec)
        sup_tracker.append(rec.sol_norm)
        if not stepped:
            return c, res, it, False
        if res <= cfg.tol:
            return c, res, it, True
    return c, res, cfg.polish_max_iter, res <= cfg.tol


def _ps_warning(sup_norms):
    arr = np.asarray(sup_norms)
    if len(arr) < 10 or arr.max() <= 1e6:
        return False
    tail = arr[-10:]
    return bool(np.all(np.diff(tail) > 0))


def mountain_pass_solve(spec, grid, m, config=None, N=None, endpoint=None):
    """Approximate the min-max critical point over paths from 0 to a valley.

    Returns a MinMaxTrace; a run that exhausts max_iter still returns its
    trace with converged False ("MaxIterExceeded" in the notes).  Raises
    ValleyNotFound (propagated from the endpoint search) when no valley
    exists.
    """
    cfg = config or MPConfig()
    N = grid.d if N is None else int(N)
    ws = _Workspace(spec, grid, m, N)

    if endpoint is None:
        _, endpoint = find_valley_endpoint(spec, grid, m, check_h3=cfg.check_hypotheses)
    e1 = endpoint.coeffs

    P = cfg.path_points
    path = np.linspace(0.0, 1.0, P)[:, None] * e1.ravel()[None, :]
    path = path.reshape((P,) + grid.mode_shape)
    Js = ws.energy_batch(path)

    records = []
    path_max = []
    sup_norms = []
    solution_c = None
    residual = math.inf
    converged = False
    notes = []
    polish_iters = 0
    sigma_prev = cfg.step_init
    no_progress = 0
    fail_streak = 0
    polish_failures = 0
    it = 0

    def seg_length(a, b):
        d = (a - b).ravel()
        return math.sqrt(ws.mass * backend.weighted_dot(d, ws.lam_flat, d))

    while it < cfg.max_iter:
        it += 1
        M_pre, i, base, Jbase = _refined_max(ws, path, Js)
        if (i == 0 or i == P - 1) and Js[i] >= M_pre:
            raise SolverError(
                "path maximum sits at an endpoint; no mountain-pass geometry"
            )

        g, res, vals, fv = ws.gradient(base)
        rec = ws.record(base, Jbase, res, vals, fv)
        records.append(rec)
        sup_norms.append(rec.sol_norm)
        solution_c, residual = base, res

        if res <= cfg.tol:
            converged = True
            break
        want_polish = cfg.polish and polish_failures < 3 and (
            res <= cfg.polish_threshold
            or (no_progress >= 25 and res <= 0.5 * (1.0 + rec.sol_norm))
        )
        if want_polish:
            u_pol, res_pol, polish_iters, pol_ok = _newton_polish(
                ws, base, cfg, records, sup_norms)
            drift = seg_length(u_pol, base)
            if pol_ok and drift <= 0.5 * (1.0 + ws.norm(base)):
                solution_c, residual, converged = u_pol, res_pol, True
                break
            polish_failures += 1
            no_progress = 0
            notes.append("polish attempt rejected")
            continue

        path_before, Js_before = path.copy(), Js.copy()

        # displacement cap: stay within the local node spacing so the
        # crossing region keeps its resolution
        h_loc = 0.5 * (seg_length(path[i], path[i - 1])
                       + seg_length(path[i + 1], path[i]))
        sigma0 = min(2.0 * sigma_prev, max(h_loc, 1e-12) / max(res, 1e-300))
        trial, Jt, sigma = _backtrack(
            ws, base, Jbase, g, res, sigma0, cfg.armijo, cfg.min_step)
        if trial is None:
            fail_streak += 1
            if fail_streak >= 5:
                notes.append("line search stalled")
                break
        else:
            fail_streak = 0
            sigma_prev = max(sigma, cfg.min_step)
            path[i], Js[i] = trial, Jt

        # drag the immediate neighbors downhill with the same cap
        for j in (i - 1, i + 1):
            if 0 < j < P - 1:
                gj, resj, _, _ = ws.gradient(path[j])
                if resj > cfg.tol:
                    sj = min(sigma_prev, max(h_loc, 1e-12) / max(resj, 1e-300))
                    tr, Jtr, _ = _backtrack(
                        ws, path[j], Js[j], gj, resj, sj,
                        cfg.armijo, cfg.min_step, max_halvings=10)
                    if tr is not None:
                        path[j], Js[j] = tr, Jtr

        # local smoothing by averaging, then arc-length re-parametrization
        lo, hi = max(1, i - 2), min(P - 1, i + 3)
        if hi - lo >= 3:
            smoothed = path.copy()
            smoothed[lo:hi] = 0.25 * path[lo - 1:hi - 1] + 0.5 * path[lo:hi] \
                + 0.25 * path[lo + 1:hi + 1]
            Js_sm = Js.copy()
            Js_sm[lo:hi] = ws.energy_batch(smoothed[lo:hi])
            if float(np.max(Js_sm)) <= float(np.max(Js)):
                path, Js = smoothed, Js_sm
        newpath = _resample_path(path, ws)
        newJs = ws.energy_batch(newpath)
        if float(np.max(newJs)) <= float(np.max(Js)):
            path, Js = newpath, newJs

        # accept the iteration only if the refined path maximum did not rise
        M_post = _refined_max(ws, path, Js)[0]
        if M_post > M_pre:
            path, Js = path_before, Js_before
            sigma_prev = max(0.25 * sigma_prev, cfg.min_step)
            M_post = M_pre
        if path_max and path_max[-1] - M_post <= 1e-14 * (1.0 + abs(M_post)):
            no_progress += 1
        else:
            no_progress = 0
        path_max.append(M_post)
    else:
        notes.append("MaxIterExceeded")

    if solution_c is None:
        raise SolverError("solver made no progress")

    u = SpectralField(grid, solution_c)
    return MinMaxTrace(
        records=records,
        path_max_energy=path_max,
        residual=float(residual),
        iterations=it,
        converged=bool(converged),
        solution=u,
        energy=float(ws.energy_one(solution_c)),
        sup_sol_norm=float(np.max(sup_norms)) if sup_norms else 0.0,
        ps_warning=_ps_warning(sup_norms),
        polish_iterations=polish_iters,
        notes="; ".join(notes),
    )


# --------------------------------------------------------------------------
# Symmetric mode with deflation


def _sorted_modes(grid, m):
    M = grid.modes_per_dim
    if grid.d == 1:
        return [(k,) for k in range(1, M + 1)]
    modes = [(i, j) for i in range(1, M + 1) for j in range(1, M + 1)]
    modes.sort(key=lambda k: (k[0] ** 2 + k[1] ** 2, k))
    return modes


def _check_odd(spec):
    s = np.geomspace(1e-3, 1e3, 61)
    fp, fn = eval_f(spec, s), eval_f(spec, -s)
    scale = 1.0 + np.max(np.abs(fp))
    if np.max(np.abs(fp + fn)) > 1e-9 * scale:
        raise PreconditionError("spec is not odd: f(-s) != -f(s) on samples")


def high_mode_threshold(spec, grid, m, N, s_hi=1e3):
    """Index k0 past which the fitted quadratic-plus-critical bound on F
    leaves J positive on the high-mode subspace (None when N <= 2m)."""
    if N <= 2 * m:
        return None
    kappa = 2.0 * N / (N - 2.0 * m)
    s = np.geomspace(1e-6, s_hi, 4001)
    s = np.concatenate([s, -s])
    C0 = float(np.max(np.abs(eval_F(spec, s)) / (np.abs(s) ** kappa + s * s)))
    lam_sorted = np.sort(np.asarray(_eigenvalues(grid, m)).ravel())
    hits = np.nonzero(lam_sorted >= 4.0 * C0)[0]
    if len(hits) == 0:
        return None
    return {"k0": int(hits[0]) + 1, "C0": C0,
            "r": float((8.0 * C0) ** (-(N - 2.0 * m) / (4.0 * m))),
            "alpha": float((8.0 * C0) ** (-(N - 2.0 * m) / (2.0 * m)) / 8.0)}


def symmetric_mountain_pass(spec, grid, m, n_sol, N=None, config=None):
    """Distinct solution pairs (u, -u) from successive eigenfunction seeds.

    Requires an odd spec.  Solutions converging within deflation_tol (in
    the order-m norm) of a previously found pair are rejected and the next
    seed is tried; FewerFound is raised when seeds run out.  Returned
    traces are ordered by energy; whether the energies increase strictly
    is reported in the metadata, not asserted.
    """
    cfg = config or MPConfig()
    N = grid.d if N is None else int(N)
    _check_odd(spec)
    if cfg.check_hypotheses:
        lam1 = float(grid.d) ** int(m)
        scfg = SamplingConfig(s_max=1e6, points_per_decade=40, lambda1=lam1)
        rep = check_hypothesis(spec, "H'4", max(grid.d, 2 * m + 1), m, scfg)
        if not rep.satisfied:
            warnings.warn("H'4 looks violated on a coarse sample", stacklevel=2)

    k0_info = high_mode_threshold(spec, grid, m, N)
    amp = (2.0 / math.pi) ** (grid.d / 2.0)
    found = []
    seeds = _sorted_modes(grid, m)[: max(3 * n_sol, n_sol + 4)]
    for mode in seeds:
        phi = mode_field(grid, mode, amplitude=amp)
        try:
            _, e = find_valley_endpoint(spec, grid, m, direction=phi,
                                        check_h3=False)
        except ValleyNotFound:
            continue
        trace = mountain_pass_solve(spec, grid, m, config=cfg, N=N, endpoint=e)
        if not trace.converged:
            continue
        u = trace.solution
        if norm_m(u, m) < 1e-6:
            continue  # collapsed to the trivial solution
        deflated = False
        for other in found:
            v = other.solution
            dist = min(norm_m(u - v, m), norm_m(u + v, m))
            if dist < cfg.deflation_tol:
                deflated = True
                break
        if deflated:
            continue
        trace.meta["seed_mode"] = mode
        if k0_info is not None:
            trace.meta["high_mode_threshold"] = k0_info
        found.append(trace)
        if len(found) == n_sol:
            break
    if len(found) < n_sol:
        raise FewerFound(n_sol, found)
    found.sort(key=lambda t: t.energy)
    energies = [t.energy for t in found]
    increasing = all(b > a for a, b in zip(energies, energies[1:]))
    for t in found:
        t.meta["energies_strictly_increasing"] = increasing
    return found


def count_interior_zeros(u: SpectralField, rel_threshold=1e-3):
    """Sign changes of u along the nodes (d=1), ignoring near-zero values."""
    if u.grid.d != 1:
        raise ValueError("zero counting is defined for d = 1")
    vals = _to_grid_array(u.grid, u.coeffs)
    big = np.abs(vals) > rel_threshold * np.max(np.abs(vals))
    signs = np.sign(vals[big])
    return int(np.sum(signs[1:] * signs[:-1] < 0))


# --------------------------------------------------------------------------
# Truncation continuation


@dataclass(frozen=True)
class ContinuationSchedule:
    s1: float = 10.0
    ratio: float = 10.0
    n_max: int = 10

    def levels(self):
        return [self.s1 * self.ratio**k for k in range(self.n_max)]


@dataclass
class StageRecord:
    index: int
    s_n: float
    sup_norm: float
    stopped: bool
    lambda_n: Optional[float]
    Q_n0: Optional[float]
    energy: float
    residual: float
    converged: bool


@dataclass
class ContinuationTrace:
    stages: list
    stopped: bool
    stop_index: Optional[int]
    solution: Optional[SpectralField]
    beta1: float
    p: float
    mu_prime: Optional[float]
    residual_untruncated: Optional[float]
    mp_traces: list = field(default_factory=list)


def continuation_solve(spec, grid, m, p, schedule=None, config=None, N=None):
    """Solve power-tail truncations along a geometric schedule.

    Stops at the first stage whose solution satisfies sup |u_n| <= s_n; the
    returned field then solves the untruncated problem (its residual
    against the original spec is recorded).  Non-stopped stages log the
    rescaling rate lambda_n and the limit diagnostic
    Q_n(0) = lambda_n^(p beta1) f_n(lambda_n^(-beta1)) with
    beta1 = 2m/(p-1).  A schedule that never stops returns the full trace
    with ``stopped`` False.
    """
    cfg = config or MPConfig()
    N = grid.d if N is None else int(N)
    p = float(p)
    if p <= 1.0:
        raise PreconditionError("tail exponent p must exceed 1")
    sched = schedule or ContinuationSchedule()
    lam1 = float(grid.d) ** int(m)

    f0 = float(eval_f(spec, 0.0))
    if abs(f0) > 1e-12:
        raise PreconditionError(f"f(0) must vanish, got {f0}")
    # right derivative at zero via the difference quotient
    tz = np.geomspace(1e-9, 1e-3, 25)
    fp0 = float((eval_f(spec, tz) / tz)[0])
    if not fp0 < lam1:
        raise PreconditionError(
            f"f'(0) = {fp0} is not below the first eigenvalue {lam1}")
    s_probe = np.geomspace(1e-6, sched.s1 * sched.ratio**sched.n_max, 2001)
    fprobe = eval_f(spec, s_probe)
    if np.min(fprobe) < -1e-10 * (1.0 + np.max(np.abs(fprobe))):
        raise PreconditionError("f must be nonnegative on the positive half-line")

    beta1 = 2.0 * m / (p - 1.0)
    stages = []
    mp_traces = []
    mu_candidates = []
    for n, s_n in enumerate(sched.levels(), start=1):
        trunc = truncate_at(spec, s_n, p)
        trace = mountain_pass_solve(trunc, grid, m, config=cfg, N=N)
        mp_traces.append(trace)
        u = trace.solution
        sup = lp_norm(u, np.inf)
        if sup <= s_n and trace.converged:
            ws = _Workspace(spec, grid, m, N)
            _, res_orig, _, _ = ws.gradient(u.coeffs)
            stages.append(StageRecord(
                index=n, s_n=s_n, sup_norm=sup, stopped=True,
                lambda_n=None, Q_n0=None, energy=trace.energy,
                residual=trace.residual, converged=trace.converged))
            return ContinuationTrace(
                stages=stages, stopped=True, stop_index=n, solution=u,
                beta1=beta1, p=p,
                mu_prime=(min(mu_candidates) if mu_candidates else None),
                residual_untruncated=float(res_orig), mp_traces=mp_traces)
        lam_n = sup ** (-1.0 / beta1)
        A, B = trunc.param("A"), trunc.param("B")
        Qn0 = sup ** (-p) * A + B
        mu_candidates.append(float(eval_fprime(spec, s_n)) / s_n ** (p - 1.0))
        stages.append(StageRecord(
            index=n, s_n=s_n, sup_norm=sup, stopped=False,
            lambda_n=lam_n, Q_n0=Qn0, energy=trace.energy,
            residual=trace.residual, converged=trace.converged))
    return ContinuationTrace(
        stages=stages, stopped=False, stop_index=None, solution=None,
        beta1=beta1, p=p,
        mu_prime=(min(mu_candidates) if mu_candidates else None),
        residual_untruncated=None, mp_traces=mp_traces)


# --------------------------------------------------------------------------
# Mountain-pass geometry check


@dataclass
class GeometryReport:
    r: float
    alpha: float
    min_energy: float
    satisfied: bool
    C0: float
    sobolev_kappa: float
    kappa: float
    n_directions: int


def _random_unit_fields(grid, m, n, rng, ws):
    k_decay = 1.0 / np.sqrt(np.asarray(_eigenvalues(grid, 1)))
    fields = []
    for _ in range(n):
        c = rng.standard_normal(grid.mode_shape) * k_decay
        c /= ws.norm(c)
        fields.append(c)
    return fields


def mountain_pass_geometry(spec, grid, m, N, n_directions=100, seed=0,
                           safety=1.5):
    """Fit the ring radius r and level alpha with J >= alpha on |u|_m = r.

    Mirrors the proof device: fit C0 in the pointwise bound
    |F(s)| <= C0 |s|^kappa + (lambda1/8) s^2 with kappa = 2N/(N-2m), fit
    the discrete Sobolev constant for the L^kappa norm on probe fields,
    set r from C0 * S^kappa * r^(kappa-2) = 1/8 and alpha as the resulting
    lower bound, then evaluate J on fresh random directions at radius r.
    """
    N, m = int(N), int(m)
    if N <= 2 * m:
        raise ValueError("geometry fit needs N > 2m for the critical exponent")
    ws = _Workspace(spec, grid, m, N)
    kappa = 2.0 * N / (N - 2.0 * m)
    lam1 = float(grid.d) ** m
    rng = np.random.default_rng(seed)

    probes = _random_unit_fields(grid, m, n_directions, rng, ws)
    sup_vals = [float(np.max(np.abs(ws.values(c)))) for c in probes]
    s_ref = 2.0 * max(sup_vals)
    skap = max(
        (ws.w * np.sum(np.abs(ws.values(c)) ** kappa)) ** (1.0 / kappa)
        for c in probes
    )

    eps = lam1 / 8.0
    s = np.geomspace(1e-8, s_ref, 4001)
    s = np.concatenate([s, -s])
    Fv = np.abs(eval_F(spec, s))
    C0 = float(np.max(np.maximum(Fv - eps * s * s, 0.0) / np.abs(s) ** kappa))

    A = C0 * safety * skap**kappa
    if A > 0:
        r = float((8.0 * A) ** (-1.0 / (kappa - 2.0)))
    else:
        r = 1.0
    r = min(r, 1.0)
    alpha = (0.5 - eps / lam1) * r**2 - A * r**kappa

    fresh = _random_unit_fields(grid, m, n_directions, rng, ws)
    energies = [ws.energy_one(r * c) for c in fresh]
    min_J = float(np.min(energies))
    return GeometryReport(
        r=r, alpha=float(alpha), min_energy=min_J,
        satisfied=bool(min_J >= alpha > 0.0),
        C0=C0, sobolev_kappa=float(skap), kappa=kappa,
        n_directions=n_directions,
    )
