"""Acceptance criteria, one test per criterion.

Each test prints a single PASS/FAIL line (run with -s to see them all) and
asserts the criterion at its stated tolerance.  Tolerances are fixed here,
not calibrated elsewhere.
"""

import math
import time

import numpy as np
import yaml

from helpers import full_catalog, random_field
from oracles import cubic_nodal, cubic_positive
from polypass import (ContinuationSchedule, Grid, MPConfig, SamplingConfig,
                      apply_inverse_operator, check_hypothesis,
                      continuation_solve, count_interior_zeros, energy,
                      first_eigenpair, inner_product_m, iterated_log, linear,
                      linear_minus_power, log_damped_critical,
                      mountain_pass_geometry, mountain_pass_solve,
                      oscillating, power, riesz_gradient,
                      symmetric_mountain_pass, to_grid)
from polypass.cli import main as cli_main
from polypass.grid import _eigenvalues, _sine_matrix


def _report(number, name, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {number:2d} {name}: {status}  {detail}")
    return ok


def test_01_linear_operator_exactness():
    g = Grid(1, 64)
    m = 1
    rng = np.random.default_rng(0)
    lam = np.asarray(_eigenvalues(g, m))
    Phi = np.asarray(_sine_matrix(g))
    to_grid(random_field(g, rng))  # warm the transform caches

    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(50):
        h = random_field(g, rng, amplitude=rng.uniform(0.5, 2.0))
        u = apply_inverse_operator(h, m)
        lhs = g.mode_mass * lam * u.coeffs          # (u, phi_k)_m, all k
        rhs = g.cell_weight * (Phi @ to_grid(h))    # int h phi_k by quadrature
        rel = np.abs(lhs - rhs) / (1.0 + np.abs(rhs))
        worst = max(worst, float(np.max(rel)))
    elapsed = time.perf_counter() - t0

    ok = worst <= 1e-10 and elapsed < 1.0
    assert _report(1, "linear operator exactness", ok,
                   f"worst rel err {worst:.2e}, {elapsed:.2f}s")


def test_02_gradient_correctness():
    g = Grid(1, 16)
    m, h = 1, 1e-4
    rng = np.random.default_rng(0)
    t0 = time.perf_counter()
    worst = 0.0
    for spec in full_catalog():
        for _ in range(20):
            u = random_field(g, rng)
            v = random_field(g, rng)
            exact = inner_product_m(riesz_gradient(u, spec, m), v, m)
            fd = (energy(u + h * v, spec, m) - energy(u - h * v, spec, m)) / (2 * h)
            worst = max(worst, abs(fd - exact) / (1.0 + abs(exact)))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-6 and elapsed < 10.0
    assert _report(2, "gradient correctness", ok,
                   f"worst rel err {worst:.2e}, {elapsed:.2f}s")


def test_03_eigenvalue_exactness():
    ok = True
    for d in (1, 2):
        for m in (1, 2, 3):
            lam1, _ = first_eigenpair(Grid(d, 8), m)
            ok = ok and (lam1 == float(d) ** m)
    assert _report(3, "eigenvalue exactness", ok)


def test_04_oracle_equivalence():
    g = Grid(1, 128)
    t0 = time.perf_counter()
    trace = mountain_pass_solve(power(3.0), g, 1,
                                MPConfig(check_hypotheses=False), N=1)
    elapsed = time.perf_counter() - t0
    err = float(np.max(np.abs(to_grid(trace.solution)
                              - cubic_positive(g.nodes_1d))))
    ok = trace.converged and err <= 1e-4 and elapsed < 60.0
    assert _report(4, "oracle equivalence (mountain pass)", ok,
                   f"sup err {err:.2e}, residual {trace.residual:.1e}, "
                   f"{elapsed:.1f}s")


def test_05_multiplicity():
    g = Grid(1, 64)
    traces = symmetric_mountain_pass(power(3.0), g, 1, 3, N=5,
                                     config=MPConfig(check_hypotheses=False))
    energies = [t.energy for t in traces]
    ok = len(traces) == 3
    ok = ok and all(b > a for a, b in zip(energies, energies[1:]))
    worst = 0.0
    for k, t in enumerate(traces):
        ok = ok and count_interior_zeros(t.solution) == k
        vals = to_grid(t.solution)
        oracle = cubic_nodal(g.nodes_1d, k)
        err = min(np.max(np.abs(vals - oracle)), np.max(np.abs(vals + oracle)))
        worst = max(worst, float(err))
    ok = ok and worst <= 1e-3
    assert _report(5, "multiplicity (three nodal pairs)", ok,
                   f"energies {['%.4f' % e for e in energies]}, "
                   f"worst oracle err {worst:.2e}")


def test_06_hypothesis_regression_suite():
    l1 = math.exp(math.exp(1.5 * math.pi))
    ok = True
    details = []
    for ppd in (200, 400):
        cfg = SamplingConfig(points_per_decade=ppd)
        big = SamplingConfig(points_per_decade=ppd, s_max=1e55)

        rep = check_hypothesis(linear(1.0), "H1", 5, 1, cfg)
        ok = ok and not rep.satisfied
        ok = ok and abs(rep.witnesses[0][1]) <= 1e-12

        ok = ok and check_hypothesis(iterated_log(1.0, nu=2), "H1", 5, 1,
                                     cfg).satisfied

        for alpha in (3.0 / 7.0, 0.7):
            ok = ok and check_hypothesis(linear_minus_power(2.0, alpha),
                                         "H1", 5, 1, cfg).satisfied

        rep = check_hypothesis(oscillating(2.0), "H3", 5, 1, big)
        ok = ok and not rep.satisfied
        rel = abs(rep.witnesses[0][0] - l1) / l1
        ok = ok and rel < 0.01
        details.append(f"l1 witness rel err {rel:.1e} @{ppd}ppd")

        ok = ok and check_hypothesis(log_damped_critical(1.0, 5, 1),
                                     "H2", 5, 1, cfg).satisfied
    assert _report(6, "hypothesis regression suite", ok, "; ".join(details))


def test_07_bootstrap_chain():
    from polypass import bootstrap_chain

    t1 = bootstrap_chain(5, 1, 2, 10.0 / 7.0)
    ok = t1.terminated and t1.steps == 1
    ok = ok and abs(t1.chain[0][1] - 10.0 / 3.0) <= 1e-12

    t2 = bootstrap_chain(5, 1, 2, 1.3)
    ok = ok and t2.terminated and t2.steps == 3
    ok = ok and abs(t2.chain[1][0] - 65.0 / 48.0) <= 1e-12
    ok = ok and abs(t2.chain[2][1] - 3.6111111111111112) <= 1e-10

    t3 = bootstrap_chain(5, 1, 2, 1.25)
    ok = ok and (not t3.terminated) and "fixed-point" in t3.reason
    ok = ok and abs(t3.chain[0][1] / 2.0 - 1.25) <= 1e-12

    t4 = bootstrap_chain(5, 1, 1, 1.1)
    ok = ok and t4.terminated and t4.branch == "p=1"
    assert _report(7, "bootstrap exponent chains", ok,
                   f"steps: {t1.steps}/{t2.steps}/fixed/{t4.steps}")


def test_08_truncation_continuation():
    g = Grid(1, 32)
    trace = continuation_solve(
        oscillating(2.0), g, 1, 2.0,
        ContinuationSchedule(s1=0.05, ratio=10.0, n_max=8),
        config=MPConfig(check_hypotheses=False))
    ok = trace.stopped
    last = trace.stages[-1]
    ok = ok and last.sup_norm <= last.s_n
    ok = ok and trace.residual_untruncated is not None
    ok = ok and trace.residual_untruncated <= 1e-6
    grown = [st for st in trace.stages if not st.stopped]
    ok = ok and all(st.Q_n0 >= 0.0 for st in grown)
    assert _report(8, "truncation continuation", ok,
                   f"stopped at stage {trace.stop_index}, "
                   f"{len(grown)} growth stages, "
                   f"residual {trace.residual_untruncated:.1e}")


def test_09_mountain_pass_geometry():
    geo = mountain_pass_geometry(power(3.0), Grid(1, 32), 1, 5,
                                 n_directions=100, seed=0)
    ok = geo.satisfied and geo.alpha > 0 and geo.min_energy >= geo.alpha
    assert _report(9, "mountain-pass geometry", ok,
                   f"r={geo.r:.3f}, alpha={geo.alpha:.4f}, "
                   f"min J={geo.min_energy:.4f}")


def test_10_cli_reproducibility(tmp_path):
    out = tmp_path / "out"
    cfg = {
        "problem": {"d": 1, "m": 1, "modes": 32, "N_nominal": 5},
        "nonlinearity": {"kind": "power", "params": {"q": 3.0}},
        "check": {"points_per_decade": 60},
        "out": str(out),
    }
    cfg_path = tmp_path / "run.yaml"
    cfg_path.write_text(yaml.safe_dump(cfg), encoding="utf-8")

    snapshots = []
    for _ in range(2):
        assert cli_main(["solve", "--config", str(cfg_path)]) == 0
        assert cli_main(["check", "--config", str(cfg_path)]) == 0
        assert cli_main(["bootstrap", "--config", str(cfg_path)]) == 0
        snapshots.append({
            p.name: p.read_bytes()
            for p in sorted(out.iterdir()) if p.is_file()
        })
    ok = snapshots[0] == snapshots[1]
    assert _report(10, "CLI reproducibility", ok,
                   f"{len(snapshots[0])} files byte-identical")
