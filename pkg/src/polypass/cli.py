"""Command line front end.

Subcommands: check | solve | multi | truncate | bootstrap | sweep.
Each run reads one YAML config (``--config``), applies the common flag
overrides, and writes its outputs into one directory (``--out``):
solution.csv / trace.csv / stages.csv / chain.csv as applicable plus a
meta.json embedding the resolved config, its sha256, and the tool
version.  Identical configs produce byte-identical outputs.

Exit codes: 0 completed; 2 configuration or precondition error; 3 no
valley endpoint found; 4 iteration budget exhausted (or fewer solution
pairs than requested); 5 continuation schedule ended without stopping.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import yaml

from . import __version__
from .functional import bootstrap_chain
from .hypotheses import SamplingConfig, applicable_hypotheses, check_hypothesis
from .nonlinearity import ParameterError, spec_from_dict
from .runio import (ConfigError, grid_from_config, load_config, nominal_N,
                    validate_config, write_csv, write_meta, write_solution_csv,
                    write_trace_csv)
from .solver import (ContinuationSchedule, FewerFound, MPConfig,
                     PreconditionError, SolverError, ValleyNotFound,
                     continuation_solve, mountain_pass_solve,
                     symmetric_mountain_pass)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NO_VALLEY = 3
EXIT_MAX_ITER = 4
EXIT_NOT_STOPPED = 5


def _mp_config(cfg):
    sv = cfg["solve"]
    return MPConfig(
        path_points=sv["path_points"],
        tol=float(sv["tol"]),
        max_iter=sv["max_iter"],
        polish=bool(sv["polish"]),
    )


def _sampling(cfg):
    ck = cfg["check"]
    prob = cfg["problem"]
    return SamplingConfig(
        s0=float(ck["s0"]),
        s_max=float(ck["s_max"]),
        points_per_decade=int(ck["points_per_decade"]),
        zero_min=float(ck["zero_min"]),
        zero_max=float(ck["zero_max"]),
        lambda1=float(prob["d"]) ** int(prob["m"]),
        growth_p=ck.get("growth_p"),
    )


def _spec(cfg):
    return spec_from_dict(cfg["nonlinearity"])


def _outdir(cfg):
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _solve_results(trace):
    return {
        "energy": trace.energy,
        "residual": trace.residual,
        "iterations": trace.iterations,
        "converged": trace.converged,
        "polish_iterations": trace.polish_iterations,
        "sup_sol_norm": trace.sup_sol_norm,
        "ps_warning": trace.ps_warning,
        "notes": trace.notes,
        "meta": trace.meta,
        "ps_records": [r.as_dict() for r in trace.records],
    }


def cmd_check(cfg):
    spec = _spec(cfg)
    N, m = nominal_N(cfg), cfg["problem"]["m"]
    sampling = _sampling(cfg)
    ids = cfg["check"]["ids"] or applicable_hypotheses(N, m)
    reports = [check_hypothesis(spec, hid, N, m, sampling) for hid in ids]
    out = _outdir(cfg)
    results = {"reports": [r.as_dict() for r in reports]}
    write_meta(out / "report.json", "check", cfg, results)
    write_meta(out / "meta.json", "check", cfg, {
        "n_checked": len(reports),
        "violated": [r.hypothesis_id for r in reports if not r.satisfied],
    })
    for r in reports:
        print(f"{r.hypothesis_id:7s} {r.verdict}")
    return EXIT_OK


def cmd_solve(cfg):
    spec = _spec(cfg)
    grid = grid_from_config(cfg)
    m, N = cfg["problem"]["m"], nominal_N(cfg)
    trace = mountain_pass_solve(spec, grid, m, config=_mp_config(cfg), N=N)
    out = _outdir(cfg)
    write_solution_csv(out / "solution.csv", trace.solution)
    write_trace_csv(out / "trace.csv", trace)
    write_meta(out / "meta.json", "solve", cfg, _solve_results(trace))
    print(f"converged={trace.converged} energy={trace.energy!r} "
          f"residual={trace.residual!r} iterations={trace.iterations}")
    return EXIT_OK if trace.converged else EXIT_MAX_ITER


def cmd_multi(cfg):
    spec = _spec(cfg)
    grid = grid_from_config(cfg)
    m, N = cfg["problem"]["m"], nominal_N(cfg)
    out = _outdir(cfg)
    try:
        traces = symmetric_mountain_pass(
            spec, grid, m, cfg["multi"]["n_solutions"], N=N,
            config=_mp_config(cfg))
        code = EXIT_OK
    except FewerFound as exc:
        traces, code = exc.traces, EXIT_MAX_ITER
        print(f"warning: {exc}", file=sys.stderr)
    pair_meta = []
    for k, trace in enumerate(traces):
        pdir = out / f"pair_{k:02d}"
        pdir.mkdir(parents=True, exist_ok=True)
        write_solution_csv(pdir / "solution.csv", trace.solution)
        write_trace_csv(pdir / "trace.csv", trace)
        pair_meta.append(_solve_results(trace))
        print(f"pair {k}: energy={trace.energy!r} residual={trace.residual!r}")
    write_meta(out / "meta.json", "multi", cfg, {
        "n_found": len(traces),
        "n_requested": cfg["multi"]["n_solutions"],
        "energies": [t.energy for t in traces],
        "pairs": pair_meta,
    })
    return code


def cmd_truncate(cfg):
    spec = _spec(cfg)
    grid = grid_from_config(cfg)
    m, N = cfg["problem"]["m"], nominal_N(cfg)
    tr = cfg["truncate"]
    sched = ContinuationSchedule(s1=float(tr["s1"]), ratio=float(tr["ratio"]),
                                 n_max=int(tr["n_max"]))
    trace = continuation_solve(spec, grid, m, float(tr["p"]), schedule=sched,
                               config=_mp_config(cfg), N=N)
    out = _outdir(cfg)
    rows = [(st.index, st.s_n, st.sup_norm, st.stopped, st.lambda_n, st.Q_n0,
             st.energy, st.residual, st.converged) for st in trace.stages]
    write_csv(out / "stages.csv",
              "n,s_n,sup_norm,stopped,lambda_n,Q_n0,energy,residual,converged",
              rows)
    if trace.solution is not None:
        write_solution_csv(out / "solution.csv", trace.solution)
        write_trace_csv(out / "trace.csv", trace.mp_traces[trace.stop_index - 1])
    write_meta(out / "meta.json", "truncate", cfg, {
        "stopped": trace.stopped,
        "stop_index": trace.stop_index,
        "beta1": trace.beta1,
        "mu_prime": trace.mu_prime,
        "residual_untruncated": trace.residual_untruncated,
        "stages": [
            {"n": st.index, "s_n": st.s_n, "sup_norm": st.sup_norm,
             "stopped": st.stopped, "lambda_n": st.lambda_n, "Q_n0": st.Q_n0}
            for st in trace.stages
        ],
    })
    print(f"stopped={trace.stopped} stage={trace.stop_index}")
    return EXIT_OK if trace.stopped else EXIT_NOT_STOPPED


def cmd_bootstrap(cfg):
    bt = cfg["bootstrap"]
    N, m = nominal_N(cfg), cfg["problem"]["m"]
    trace = bootstrap_chain(N, m, float(bt["p"]), float(bt["p1"]))
    out = _outdir(cfg)
    (out / "chain.csv").write_text("\n".join(trace.csv_rows()) + "\n",
                                   encoding="utf-8")
    write_meta(out / "meta.json", "bootstrap", cfg, trace.as_dict())
    print(f"terminated={trace.terminated} steps={trace.steps} reason={trace.reason}")
    return EXIT_OK


def _apply_overrides(cfg, flat):
    import copy

    out = copy.deepcopy(cfg)
    for dotted, value in flat.items():
        node = out
        parts = str(dotted).split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
        node[parts[-1]] = value
    return out


def _sweep_item(args):
    base, command, overrides, outdir = args
    sub = _apply_overrides(base, overrides)
    sub["out"] = outdir
    sub = validate_config(sub)
    return COMMANDS[command](sub)


def cmd_sweep(cfg):
    sw = cfg["sweep"]
    command = sw["command"]
    if command not in COMMANDS or command == "sweep":
        raise ConfigError(f"sweep.command must be one of check/solve/multi/"
                          f"truncate/bootstrap, got {command!r}")
    base_out = Path(cfg["out"])
    items = [
        (cfg, command, overrides, str(base_out / f"run_{k:03d}"))
        for k, overrides in enumerate(sw["overrides"] or [{}])
    ]
    jobs = int(sw.get("jobs") or 1)
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            codes = list(pool.map(_sweep_item, items))
    else:
        codes = [_sweep_item(item) for item in items]
    write_meta(base_out / "meta.json", "sweep", cfg,
               {"n_runs": len(codes), "exit_codes": codes})
    return max(codes) if codes else EXIT_OK


COMMANDS = {
    "check": cmd_check,
    "solve": cmd_solve,
    "multi": cmd_multi,
    "truncate": cmd_truncate,
    "bootstrap": cmd_bootstrap,
    "sweep": cmd_sweep,
}

_CSV_HELP = {
    "solve": "solution.csv: x[,y],u at the quadrature nodes; trace.csv: "
             "iter,path_max,J,grad_norm,sol_norm,defect,f_norm,cerami_product",
    "truncate": "stages.csv: n,s_n,sup_norm,stopped,lambda_n,Q_n0,energy,"
                "residual,converged",
    "bootstrap": "chain.csv: k,p_k,p_k_star",
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="polypass",
        description="Spectral mountain-pass solver and hypothesis checker "
                    "for polyharmonic semilinear problems on (0,pi)^d.",
        epilog="CSV layouts: " + "; ".join(f"[{k}] {v}" for k, v in _CSV_HELP.items()),
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in [
        ("check", "evaluate growth hypotheses on sample grids"),
        ("solve", "mountain-pass solve of the semilinear problem"),
        ("multi", "symmetric mountain pass: several solution pairs"),
        ("truncate", "truncation-continuation solve"),
        ("bootstrap", "integrability exponent chain"),
        ("sweep", "fan out a list of config overrides"),
    ]:
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", type=str, default=None,
                       help="YAML run configuration")
        p.add_argument("--out", type=str, default=None, help="output directory")
        p.add_argument("--tol", type=float, default=None,
                       help="override solve.tol")
        p.add_argument("--max-iter", type=int, default=None,
                       help="override solve.max_iter")
        p.add_argument("--modes", type=int, default=None,
                       help="override problem.modes")
        p.add_argument("--seed", type=int, default=None, help="override seed")
        p.add_argument("--print-config", action="store_true",
                       help="print the resolved config and exit")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    overrides = {}
    if args.out is not None:
        overrides["out"] = args.out
    if args.tol is not None:
        overrides["solve.tol"] = args.tol
    if args.max_iter is not None:
        overrides["solve.max_iter"] = args.max_iter
    if args.modes is not None:
        overrides["problem.modes"] = args.modes
    if args.seed is not None:
        overrides["seed"] = args.seed
    try:
        cfg = load_config(args.config, overrides)
        if args.print_config:
            print(yaml.safe_dump(cfg, sort_keys=True, default_flow_style=False),
                  end="")
            return EXIT_OK
        cfg = validate_config(cfg)
        return COMMANDS[args.command](cfg)
    except (ConfigError, ParameterError, PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValleyNotFound as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_VALLEY
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MAX_ITER


if __name__ == "__main__":
    sys.exit(main())
