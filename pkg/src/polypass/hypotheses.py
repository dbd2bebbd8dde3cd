"""Sample-based verdicts for the growth conditions used by the solvers.

Each condition on f (growth caps, defect lower bounds, limits at zero or
infinity, superquadraticity) is decided by evaluating its defining
inequality on geometric sample grids and estimating limits by log-log
regression over the top decades.  Verdicts are therefore claims about the
sample, never proofs; a violated verdict always carries explicit witness
points.

Conventions for fitted constants: the reported constant is the extremal
value making the inequality hold at every sample beyond s0 (largest C for
lower bounds such as C|f|^r <= s f - 2F, smallest admissible exponent
margins for growth caps).  Limits that would require evaluating f closer
to a zero than float64 allows (for example ratios of the form 1 + sin(...)
near their vanishing points) are detected through deep relative dips of
the log ratio below its local trend, and the dip locations are refined
and reported as witnesses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .nonlinearity import eval_f, eval_F, eval_fprime

__all__ = [
    "HYPOTHESIS_IDS",
    "SamplingConfig",
    "HypothesisReport",
    "check_hypothesis",
    "hypothesis_suite",
    "applicable_hypotheses",
]

HYPOTHESIS_IDS = (
    "H", "H0", "H1", "H2", "H3", "H4", "H'1", "H'4",
    "AR-i", "SUB-ii", "SSL", "f1", "f2", "f3",
)

SATISFIED = "satisfied-on-sample"
VIOLATED = "violated"


@dataclass(frozen=True)
class SamplingConfig:
    """Geometric sampling grid and decision tolerances.

    The main grid runs from s0 to s_max (both signs when
    ``include_negative``); limits at zero use a second geometric window
    [zero_min, zero_max].  ``lambda1`` is the first operator eigenvalue of
    the target domain (d^m for the box), ``growth_p`` an optional known
    polynomial growth exponent shared by the f1/f2/f3 family.
    """

    s0: float = 10.0
    s_max: float = 1e8
    points_per_decade: int = 200
    include_negative: bool = True
    zero_min: float = 1e-9
    zero_max: float = 1.0
    lambda1: float = 1.0
    growth_p: Optional[float] = None
    slope_tol: float = 0.01
    dip_depth: float = math.log(1e3)


@dataclass
class HypothesisReport:
    hypothesis_id: str
    verdict: str
    witnesses: list
    constants: dict
    sample_range: tuple
    N: int
    m: int
    notes: str = ""

    @property
    def satisfied(self):
        return self.verdict == SATISFIED

    def as_dict(self):
        return {
            "hypothesis_id": self.hypothesis_id,
            "verdict": self.verdict,
            "witnesses": [[float(s), float(v)] for s, v in self.witnesses],
            "constants": {k: float(v) for k, v in self.constants.items()},
            "sample_range": list(self.sample_range),
            "N": self.N,
            "m": self.m,
            "notes": self.notes,
        }


# --------------------------------------------------------------------------
# Shared sample evaluations


class _Samples:
    """Lazily evaluated f, F, f' on the geometric grids of one config."""

    def __init__(self, spec, cfg):
        self.spec = spec
        self.cfg = cfg
        decades = math.log10(cfg.s_max / cfg.s0)
        if decades <= 0:
            raise ValueError("s_max must exceed s0")
        n = max(8, int(round(decades * cfg.points_per_decade)))
        self.s = np.geomspace(cfg.s0, cfg.s_max, n + 1)
        zd = math.log10(cfg.zero_max / cfg.zero_min)
        nz = max(8, int(round(zd * cfg.points_per_decade)))
        self.sz = np.geomspace(cfg.zero_min, cfg.zero_max, nz + 1)
        self._cache = {}

    def _get(self, key, fn, arg):
        if key not in self._cache:
            self._cache[key] = fn(self.spec, arg)
        return self._cache[key]

    @property
    def f_pos(self):
        return self._get("f+", eval_f, self.s)

    @property
    def f_neg(self):
        return self._get("f-", eval_f, -self.s)

    @property
    def F_pos(self):
        return self._get("F+", eval_F, self.s)

    @property
    def F_neg(self):
        return self._get("F-", eval_F, -self.s)

    @property
    def fp_pos(self):
        return self._get("fp+", eval_fprime, self.s)

    @property
    def fz_pos(self):
        return self._get("fz+", eval_f, self.sz)

    @property
    def fz_neg(self):
        return self._get("fz-", eval_f, -self.sz)

    def signed(self, include_negative=None):
        """(s, f, F) stacked over requested signs."""
        inc = self.cfg.include_negative if include_negative is None else include_negative
        if inc:
            s = np.concatenate([self.s, -self.s])
            f = np.concatenate([self.f_pos, self.f_neg])
            F = np.concatenate([self.F_pos, self.F_neg])
        else:
            s, f, F = self.s, self.f_pos, self.F_pos
        return s, f, F

    @property
    def count(self):
        mult = 2 if self.cfg.include_negative else 1
        return mult * len(self.s)


def _modulation_bounds(spec):
    if spec.x_modulation is None:
        return 1.0, 1.0
    x = np.linspace(1e-3, math.pi - 1e-3, 101)
    try:
        g = np.asarray(spec.x_modulation(x), dtype=float)
    except TypeError:
        X, Y = np.meshgrid(x, x, indexing="ij")
        g = np.asarray(spec.x_modulation(X, Y), dtype=float)
    return float(g.min()), float(g.max())


# --------------------------------------------------------------------------
# Regression helpers


def _fit_slope(logx, logy):
    if len(logx) < 3:
        return None
    return float(np.polyfit(logx, logy, 1)[0])


def _envelope_slope(s, v, decades=2.0, upper=True, bins_per_decade=8):
    """Slope of the log-log upper (or lower) envelope over the top decades.

    Binning in log s makes the fit robust against isolated dips or spikes
    (oscillating nonlinearities).  Returns None when fewer than three
    nonempty bins survive.
    """
    mask = np.isfinite(v) & (v > 0)
    if mask.sum() < 3:
        return None
    ls, lv = np.log(s[mask]), np.log(v[mask])
    top = ls >= ls.max() - decades * math.log(10.0)
    ls, lv = ls[top], lv[top]
    nbins = max(3, int(round(decades * bins_per_decade)))
    edges = np.linspace(ls.min(), ls.max() + 1e-12, nbins + 1)
    idx = np.digitize(ls, edges) - 1
    xs, ys = [], []
    for b in range(nbins):
        sel = idx == b
        if sel.any():
            xs.append(0.5 * (edges[b] + edges[b + 1]))
            ys.append(lv[sel].max() if upper else lv[sel].min())
    return _fit_slope(np.array(xs), np.array(ys))


def _top_mask(s, decades=1.0):
    return s >= s.max() / 10.0**decades


def _deep_dips(ratio_fn, s, r, cfg, max_witnesses=5):
    """Locations where the log ratio dips far below its overall trend.

    Detects oscillatory ratios whose infimum is (relatively) zero even when
    float64 cannot resolve the exact vanishing point; each grid dip is
    refined by a bounded scalar minimization in log s.  The whole grid
    beyond s0 is scanned: a deep dip at any large s defeats a uniform
    limit claim.
    """
    mask = np.isfinite(r) & (r > 0)
    if mask.sum() < 8:
        return []
    tau, y = np.log(s[mask]), np.log(r[mask])
    coef = np.polyfit(tau, y, 1)
    res = y - np.polyval(coef, tau)
    hits = []
    for i in range(1, len(tau) - 1):
        if res[i] < -cfg.dip_depth and res[i] <= res[i - 1] and res[i] <= res[i + 1]:
            opt = minimize_scalar(
                lambda t: ratio_fn(math.exp(t)),
                bounds=(tau[i - 1], tau[i + 1]),
                method="bounded",
                options={"xatol": 1e-9},
            )
            hits.append((math.exp(opt.x), float(opt.fun)))
    hits.sort(key=lambda h: h[0])
    return hits[:max_witnesses]


def _limit_at_zero(sz, ratio, cfg):
    """(estimate, blows_up) for the limit of a ratio as s -> 0.

    The estimate is the value at the smallest samples; blow-up is a
    negative log-log slope on the smallest decade together with growth.
    """
    v = np.abs(ratio)
    small = sz <= sz.min() * 10.0
    slope = _fit_slope(np.log(sz[small]), np.log(np.maximum(v[small], 1e-300)))
    blows = slope is not None and slope <= -cfg.slope_tol and v[small].max() > 1e2
    return float(ratio[np.argmin(sz)]), blows


def _fit_growth_exponent(samples, cfg):
    """Upper-envelope growth exponent of |f| over the top decades."""
    s, f, _ = samples.signed()
    slope = _envelope_slope(np.abs(s), np.abs(f), decades=2.0, upper=True)
    prev_slope = None
    mask = np.abs(s) <= np.abs(s).max() / 100.0
    if mask.sum() >= 3:
        prev_slope = _envelope_slope(np.abs(s[mask]), np.abs(f[mask]), decades=2.0, upper=True)
    return slope, prev_slope


def _growth_p(samples, cfg):
    if cfg.growth_p is not None:
        return float(cfg.growth_p), "configured"
    slope, _ = _fit_growth_exponent(samples, cfg)
    if slope is None:
        return 1.0 + 1e-6, "default"
    return max(1.0 + 1e-6, slope + 0.02), "fitted"


def _defect_floor(s, f, F):
    """Positivity threshold for s f - 2F, absorbing cancellation roundoff."""
    return 1e-12 * (np.abs(s * f) + 2.0 * np.abs(F)) + 1e-300


# --------------------------------------------------------------------------
# Individual checkers.  Each returns (verdict, witnesses, constants, notes).


def _check_H(spec, samples, cfg, N, m):
    pc = (N + 2 * m) / (N - 2 * m)
    s, f, _ = samples.signed()
    a = np.abs(s)
    r = np.abs(f) / a**pc
    slope = _envelope_slope(a, r, upper=True)
    if slope is not None and slope > cfg.slope_tol:
        top = _top_mask(a)
        i = np.argmax(np.where(top, r, -np.inf))
        return VIOLATED, [(s[i], r[i])], {"slope": slope, "p_critical": pc}, \
            "ratio |f|/|s|^((N+2m)/(N-2m)) grows along the top decades"
    C0 = float(np.max(r)) if np.isfinite(r).all() else float(np.nanmax(r))
    consts = {"C0": C0, "s0": cfg.s0, "p_critical": pc}
    if slope is not None:
        consts["slope"] = slope
    return SATISFIED, [], consts, ""


def _check_H0(spec, samples, cfg, N, m):
    Fp, Fn = samples.F_pos, samples.F_neg
    ok = (Fp > 0) & (Fn > 0)
    if ok.any():
        i = int(np.argmax(ok))
        s = samples.s[i]
        return SATISFIED, [(s, Fp[i]), (-s, Fn[i])], {"s0_prime": s}, ""
    i = len(samples.s) - 1
    return VIOLATED, [(samples.s[i], Fp[i]), (-samples.s[i], Fn[i])], {}, \
        "no sample with F(s) and F(-s) both positive"


def _check_H1(spec, samples, cfg, N, m):
    r1 = 2.0 * N / (N + 2 * m)
    s, f, F = samples.signed()
    defect = s * f - 2.0 * F
    floor = _defect_floor(s, f, F)
    bad = defect <= floor
    if bad.any():
        i = int(np.argmin(np.where(bad, np.abs(s), np.inf)))
        return VIOLATED, [(s[i], defect[i])], {"exponent": r1}, \
            "s f - 2F is not strictly positive on the sample"
    mask = np.abs(f) > 0
    ratio = np.full_like(defect, np.inf)
    ratio[mask] = defect[mask] / np.abs(f[mask]) ** r1
    slope = _envelope_slope(np.abs(s[mask]), ratio[mask], upper=False)
    C = float(np.min(ratio))
    if slope is not None and slope < -cfg.slope_tol:
        top = _top_mask(np.abs(s))
        i = int(np.argmin(np.where(top & mask, ratio, np.inf)))
        return VIOLATED, [(s[i], ratio[i])], {"exponent": r1, "slope": slope}, \
            "(s f - 2F)/|f|^(2N/(N+2m)) decays toward zero"
    consts = {"C": C, "exponent": r1, "s0": cfg.s0}
    if slope is not None:
        consts["slope"] = slope
    return SATISFIED, [], consts, ""


def _check_H2(spec, samples, cfg, N, m):
    pc = (N + 2 * m) / (N - 2 * m)
    s, f, _ = samples.signed()
    a = np.abs(s)
    r = np.abs(f) / a**pc
    top = _top_mask(a)
    top_max = float(np.max(r[top]))
    if top_max <= 1e-10:
        return SATISFIED, [], {"tail_max": top_max, "p_critical": pc}, "ratio vanishes"
    slope = _envelope_slope(a, r, upper=True)
    if slope is not None and slope <= -cfg.slope_tol:
        return SATISFIED, [], {"tail_max": top_max, "slope": slope, "p_critical": pc}, ""
    i = int(np.argmax(np.where(top, r, -np.inf)))
    return VIOLATED, [(s[i], r[i])], {"tail_max": top_max, "p_critical": pc,
                                      "slope": slope if slope is not None else np.nan}, \
        "ratio |f|/|s|^((N+2m)/(N-2m)) does not decay to zero"


def _check_H3(spec, samples, cfg, N, m):
    gmin, gmax = _modulation_bounds(spec)
    s, f = samples.s, samples.f_pos
    r = f / s
    # exact nonpositive samples well beyond s0 are direct witnesses
    nonpos = (r <= 0) & (s >= 10.0 * cfg.s0)
    witnesses = []
    if nonpos.any():
        idx = np.where(nonpos)[0][:5]
        witnesses = [(s[i], r[i]) for i in idx]
    dips = _deep_dips(lambda sv: float(eval_f(spec, sv)) / sv, s, r, cfg)
    if witnesses or dips:
        return VIOLATED, (dips or witnesses), {"lambda1": cfg.lambda1}, \
            "f(t)/t has recurring near-vanishing dips; no limit above lambda1"
    slope = _envelope_slope(s, r, upper=False)
    worst = np.minimum(gmin * r, gmax * r)
    top = _top_mask(s)
    prev = _top_mask(s, 2.0) & ~top
    if slope is not None and slope > cfg.slope_tol:
        return SATISFIED, [], {"limit": np.inf, "slope": slope, "lambda1": cfg.lambda1}, ""
    est = float(np.median(worst[top]))
    if slope is not None and slope < -cfg.slope_tol and prev.any():
        est = max(0.0, 2.0 * est - float(np.median(worst[prev])))
    if est > cfg.lambda1:
        return SATISFIED, [], {"limit": est, "lambda1": cfg.lambda1}, ""
    i = int(np.argmin(np.where(top, worst, np.inf)))
    return VIOLATED, [(s[i], worst[i])], {"limit": est, "lambda1": cfg.lambda1}, \
        "liminf of f(t)/t does not exceed lambda1"


def _ratio_at_zero(samples, cfg):
    rz_p = samples.fz_pos / samples.sz
    rz_n = samples.fz_neg / (-samples.sz)
    if not cfg.include_negative:
        return [rz_p]
    return [rz_p, rz_n]


def _check_H4(spec, samples, cfg, N, m):
    gmin, gmax = _modulation_bounds(spec)
    worst_est = -np.inf
    for rz in _ratio_at_zero(samples, cfg):
        est, blows = _limit_at_zero(samples.sz, rz, cfg)
        if blows and abs(est) > cfg.lambda1:
            i = int(np.argmin(samples.sz))
            return VIOLATED, [(samples.sz[i], rz[i])], {"lambda1": cfg.lambda1}, \
                "f(t)/t blows up as t -> 0"
        worst_est = max(worst_est, gmin * est, gmax * est)
    if worst_est < cfg.lambda1:
        return SATISFIED, [], {"limit": worst_est, "lambda1": cfg.lambda1}, ""
    i = int(np.argmin(samples.sz))
    return VIOLATED, [(samples.sz[i], worst_est)], {"limit": worst_est,
                                                    "lambda1": cfg.lambda1}, \
        "limit of f(t)/t at zero is not below lambda1"


def _check_Hp4(spec, samples, cfg, N, m):
    worst = -np.inf
    for rz in _ratio_at_zero(samples, cfg):
        est, blows = _limit_at_zero(samples.sz, rz, cfg)
        if blows:
            i = int(np.argmin(samples.sz))
            return VIOLATED, [(samples.sz[i], rz[i])], {}, \
                "f(t)/t is unbounded as t -> 0"
        worst = max(worst, est)
    return SATISFIED, [], {"limit": worst}, ""


def _check_Hp1(spec, samples, cfg, N, m):
    p, p_src = _growth_p(samples, cfg)
    threshold = max(1.0, N * (p - 1.0) / (2.0 * m * p))
    s, f, F = samples.signed()
    defect = s * f - 2.0 * F
    floor = _defect_floor(s, f, F)
    bad = defect <= floor
    if bad.any():
        i = int(np.argmin(np.where(bad, np.abs(s), np.inf)))
        return VIOLATED, [(s[i], defect[i])], {"p": p, "threshold": threshold}, \
            "s f - 2F is not strictly positive on the sample"
    mask = (np.abs(f) > 0) & _top_mask(np.abs(s), 2.0)
    lf, ld = np.log(np.abs(f[mask])), np.log(defect[mask])
    if lf.max() - lf.min() < 0.2:
        # |f| is flat on the tail; any exponent works if the defect stays up
        p1_fit = np.inf
    else:
        p1_fit = _fit_slope(lf, ld)
    if p1_fit is None:
        return VIOLATED, [(s[np.argmax(np.abs(s))], 0.0)], {}, "not enough samples to fit p1"
    p1 = p1_fit if np.isinf(p1_fit) else p1_fit - 0.02
    if p1 <= threshold:
        top = _top_mask(np.abs(s))
        i = int(np.argmin(np.where(top, defect, np.inf)))
        return VIOLATED, [(s[i], defect[i])], \
            {"p1": p1, "threshold": threshold, "p": p}, \
            "fitted defect exponent does not clear sup(1, N(p-1)/(2mp))"
    if np.isinf(p1):
        C = float(np.min(defect / np.maximum(np.abs(f), 1e-300)))
        consts = {"p1": threshold + 1.0, "C": C, "threshold": threshold, "p": p}
        return SATISFIED, [], consts, f"|f| bounded on tail; p ({p_src})"
    ratio = defect / np.abs(f) ** p1
    C = float(np.min(ratio[np.abs(f) > 0]))
    return SATISFIED, [], {"p1": p1, "C": C, "threshold": threshold, "p": p}, \
        f"p ({p_src})"


def _check_ARi(spec, samples, cfg, N, m):
    s, f, F = samples.signed()
    floor = 1e-12 * (np.abs(F) + 1e-300)
    bad = F <= floor
    if bad.any():
        i = int(np.argmin(np.where(bad, np.abs(s), np.inf)))
        return VIOLATED, [(s[i], F[i])], {}, "F is not strictly positive on the sample"
    ratio = s * f / F
    theta = float(np.min(ratio))
    if theta <= 2.0 + 1e-9:
        i = int(np.argmin(ratio))
        return VIOLATED, [(s[i], ratio[i])], {"theta": theta}, \
            "s f / F does not stay above 2"
    gap_slope = _envelope_slope(np.abs(s), ratio - 2.0, upper=False)
    if gap_slope is not None and gap_slope < -cfg.slope_tol / 2.0:
        top = _top_mask(np.abs(s))
        i = int(np.argmin(np.where(top, ratio, np.inf)))
        return VIOLATED, [(s[i], ratio[i])], {"theta": theta, "gap_slope": gap_slope}, \
            "s f / F decays toward 2 along the top decades"
    return SATISFIED, [], {"theta": theta, "s0": cfg.s0}, ""


def _check_SUBii(spec, samples, cfg, N, m):
    slope, prev_slope = _fit_growth_exponent(samples, cfg)
    s, f, _ = samples.signed()
    a = np.abs(s)
    if slope is None:
        return VIOLATED, [(s[np.argmax(a)], float(np.max(np.abs(f))))], {}, \
            "could not fit a growth exponent"
    if prev_slope is not None and slope > prev_slope + 0.5:
        i = int(np.argmax(a))
        return VIOLATED, [(s[i], np.abs(f[i]))], {"slope": slope}, \
            "growth exponent increases between decades (super-polynomial)"
    p = max(1.0 + 1e-6, slope + 0.02)
    consts = {"p": p, "slope": slope}
    if N >= 2 * m + 1:
        pc = (N + 2 * m) / (N - 2 * m)
        consts["p_critical"] = pc
        if p >= pc:
            i = int(np.argmax(a))
            return VIOLATED, [(s[i], np.abs(f[i]))], consts, \
                "fitted growth exponent is not subcritical"
    consts["C"] = float(np.max(np.abs(f) / a**p))
    return SATISFIED, [], consts, ""


def _check_SSL(spec, samples, cfg, N, m):
    s, f, _ = samples.signed()
    a, af = np.abs(s), np.abs(f)
    dips = _deep_dips(lambda sv: abs(float(eval_f(spec, sv))), a, af, cfg)
    zero = (af == 0) & (a >= 10.0 * cfg.s0)
    if dips or zero.any():
        wit = dips or [(s[i], 0.0) for i in np.where(zero)[0][:5]]
        return VIOLATED, wit, {}, "|f| has near-vanishing dips at large |s|"
    q_env = _envelope_slope(a, af, upper=False)
    mask = a <= a.max() / 100.0
    q_prev = _envelope_slope(a[mask], af[mask], upper=False) if mask.sum() >= 3 else None
    if q_env is None:
        return VIOLATED, [(s[np.argmax(a)], float(af.max()))], {}, "no lower envelope fit"
    q_proj = q_env if q_prev is None else q_env - 3.0 * max(0.0, q_prev - q_env)
    if q_proj <= 1.01:
        top = _top_mask(a)
        i = int(np.argmin(np.where(top, af, np.inf)))
        return VIOLATED, [(s[i], af[i])], {"q_envelope": q_env, "q_projected": q_proj}, \
            "lower growth exponent does not stay above 1"
    q_use = q_env - 0.02
    C = float(np.min(af / a**q_use))
    return SATISFIED, [], {"q": q_use, "C": C, "q_envelope": q_env}, ""


def _check_f1(spec, samples, cfg, N, m):
    f0 = float(eval_f(spec, 0.0))
    if abs(f0) > 1e-12:
        return VIOLATED, [(0.0, f0)], {}, "f(0) is not zero"
    s, f = samples.s, samples.f_pos
    scale = 1e-12 * (1.0 + np.abs(f))
    neg = f < -scale
    negz = samples.fz_pos < -1e-12 * (1.0 + np.abs(samples.fz_pos))
    if neg.any() or negz.any():
        if neg.any():
            i = int(np.argmax(neg))
            w = (s[i], f[i])
        else:
            i = int(np.argmax(negz))
            w = (samples.sz[i], samples.fz_pos[i])
        return VIOLATED, [w], {}, "f is negative on the positive half-line"
    # right derivative at zero through the difference quotient (f(0) = 0);
    # wrappers that zero the negative half-line make the two-sided f'(0)
    # meaningless here
    est, blows = _limit_at_zero(samples.sz, samples.fz_pos / samples.sz, cfg)
    if blows:
        return VIOLATED, [(samples.sz.min(), est)], {}, "f'(0) is unbounded"
    fp0 = est
    if fp0 >= cfg.lambda1:
        return VIOLATED, [(0.0, fp0)], {"fprime0": fp0, "lambda1": cfg.lambda1}, \
            "f'(0) is not below lambda1"
    p, p_src = _growth_p(samples, cfg)
    if N >= 2 * m + 1 and p >= (N + 2 * m) / (N - 2 * m):
        return VIOLATED, [(s[-1], f[-1])], {"p": p}, "growth exponent is not subcritical"
    fp = samples.fp_pos
    slope = _envelope_slope(s, np.abs(fp), upper=True)
    if slope is not None and slope > (p - 1.0) + 0.05:
        i = int(np.argmax(s))
        return VIOLATED, [(s[i], fp[i])], {"p": p, "fprime_slope": slope}, \
            "|f'| grows faster than s^(p-1)"
    C = float(np.max(np.abs(fp) / (1.0 + s ** (p - 1.0))))
    return SATISFIED, [], {"fprime0": fp0, "p": p, "C": C, "lambda1": cfg.lambda1}, \
        f"p ({p_src})"


def _check_f2(spec, samples, cfg, N, m):
    p, p_src = _growth_p(samples, cfg)
    s, f = samples.s, samples.f_pos
    rho = f / s**p
    top = _top_mask(s)
    liminf_top = float(np.min(rho[top]))
    # refine interior local maxima of f/s^p as the candidate sequence s_n
    peaks = []
    for i in range(1, len(s) - 1):
        if rho[i] > rho[i - 1] and rho[i] >= rho[i + 1] and rho[i] > 1e-12:
            opt = minimize_scalar(
                lambda t: -float(eval_f(spec, math.exp(t))) / math.exp(t) ** p,
                bounds=(math.log(s[i - 1]), math.log(s[i + 1])),
                method="bounded", options={"xatol": 1e-9},
            )
            peaks.append((math.exp(opt.x), -float(opt.fun)))
    if liminf_top > 1e-12:
        mu = liminf_top if not peaks else max(liminf_top, min(v for _, v in peaks))
        return SATISFIED, peaks[-5:], {"mu": mu, "p": p}, f"p ({p_src})"
    if peaks:
        tail = [pk for pk in peaks if pk[0] >= math.sqrt(s[0] * s[-1])] or peaks
        mu = min(v for _, v in tail)
        if mu > 1e-12:
            values = np.array([v for _, v in tail])
            locs = np.array([sv for sv, _ in tail])
            trend = _fit_slope(np.log(locs), np.log(values)) if len(tail) >= 3 else 0.0
            if trend is None or trend >= -cfg.slope_tol:
                return SATISFIED, tail[-5:], {"mu": mu, "p": p}, f"p ({p_src})"
    i = int(np.argmin(np.where(top, rho, np.inf)))
    return VIOLATED, [(s[i], rho[i])], {"p": p}, \
        "f(s)/s^p has no positive bump sequence on the sample"


def _check_f3(spec, samples, cfg, N, m):
    p, p_src = _growth_p(samples, cfg)
    s, f, fp = samples.s, samples.f_pos, samples.fp_pos
    rho = (s * fp - p * f) / s**p
    top = _top_mask(s)
    tail_max = float(np.max(np.abs(rho[top])))
    if tail_max <= 1e-10:
        return SATISFIED, [], {"tail_max": tail_max, "p": p}, f"p ({p_src})"
    slope = _envelope_slope(s, np.abs(rho), upper=True)
    if slope is not None and slope <= -cfg.slope_tol:
        return SATISFIED, [], {"tail_max": tail_max, "slope": slope, "p": p}, f"p ({p_src})"
    i = int(np.argmax(np.where(top, np.abs(rho), -np.inf)))
    return VIOLATED, [(s[i], rho[i])], {"tail_max": tail_max, "p": p}, \
        "(s f' - p f)/s^p does not decay to zero"


_CHECKERS = {
    "H": (_check_H, True),
    "H0": (_check_H0, False),
    "H1": (_check_H1, False),
    "H2": (_check_H2, True),
    "H3": (_check_H3, False),
    "H4": (_check_H4, False),
    "H'1": (_check_Hp1, False),
    "H'4": (_check_Hp4, False),
    "AR-i": (_check_ARi, False),
    "SUB-ii": (_check_SUBii, False),
    "SSL": (_check_SSL, False),
    "f1": (_check_f1, False),
    "f2": (_check_f2, False),
    "f3": (_check_f3, False),
}


def applicable_hypotheses(N, m):
    """Hypothesis ids whose defining formula exists for the given (N, m)."""
    out = []
    for hid, (_, needs_supercrit) in _CHECKERS.items():
        if needs_supercrit and N < 2 * m + 1:
            continue
        out.append(hid)
    return tuple(out)


def check_hypothesis(spec, hypothesis_id, N, m, sampling=None):
    """Decide one hypothesis on the sampling grid and report witnesses."""
    if hypothesis_id not in _CHECKERS:
        raise ValueError(f"unknown hypothesis id {hypothesis_id!r}")
    N, m = int(N), int(m)
    if m < 1 or N < 1:
        raise ValueError("N and m must be positive integers")
    checker, needs_supercrit = _CHECKERS[hypothesis_id]
    if needs_supercrit and N < 2 * m + 1:
        raise ValueError(
            f"hypothesis {hypothesis_id} is undefined for N={N}, m={m} (needs N >= 2m+1)"
        )
    cfg = sampling or SamplingConfig()
    samples = _Samples(spec, cfg)
    verdict, witnesses, constants, notes = checker(spec, samples, cfg, N, m)
    if spec.x_modulation is not None:
        gmin, gmax = _modulation_bounds(spec)
        constants = dict(constants)
        constants["g_min"], constants["g_max"] = gmin, gmax
        notes = (notes + "; " if notes else "") + \
            "x modulation handled through its sampled range"
    return HypothesisReport(
        hypothesis_id=hypothesis_id,
        verdict=verdict,
        witnesses=[(float(s), float(v)) for s, v in witnesses],
        constants=constants,
        sample_range=(cfg.s0, cfg.s_max, samples.count),
        N=N,
        m=m,
        notes=notes,
    )


def hypothesis_suite(spec, N, m, sampling=None):
    """Run every hypothesis applicable to (N, m) on a shared grid."""
    return [
        check_hypothesis(spec, hid, N, m, sampling=sampling)
        for hid in applicable_hypotheses(N, m)
    ]
