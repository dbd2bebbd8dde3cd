"""Run configuration handling and deterministic output writers.

A run is described by one YAML document; unset keys take the defaults
below.  All outputs are byte-reproducible for identical configs: floats
are written with repr (shortest round-trip), JSON keys are sorted, and no
timestamps or host information are embedded.  Every metadata document
carries the sha256 of the resolved config and the tool version.
"""

from __future__ import annotations

import copy
import hashlib
import json
import math
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .grid import Grid, to_grid
from .nonlinearity import ParameterError, spec_from_dict

DEFAULT_CONFIG = {
    "problem": {
        "d": 1,
        "m": 1,
        "modes": 32,
        "quad_points": None,
        "N_nominal": None,
    },
    "nonlinearity": {
        "kind": "power",
        "params": {"q": 3.0},
    },
    "check": {
        "s0": 10.0,
        "s_max": 1.0e8,
        "points_per_decade": 200,
        "zero_min": 1.0e-9,
        "zero_max": 1.0,
        "growth_p": None,
        "ids": None,
    },
    "solve": {
        "tol": 1.0e-8,
        "max_iter": 50_000,
        "path_points": 64,
        "polish": True,
    },
    "multi": {
        "n_solutions": 3,
        "deflation_tol": 1.0e-4,
    },
    "truncate": {
        "p": 2.0,
        "s1": 10.0,
        "ratio": 10.0,
        "n_max": 10,
    },
    "bootstrap": {
        "p": 2.0,
        "p1": 1.3,
    },
    "sweep": {
        "command": "solve",
        "overrides": [],
        "jobs": 1,
    },
    "seed": 0,
    "out": "run",
}


class ConfigError(ValueError):
    """Invalid or missing run-configuration field (exit code 2)."""


def _deep_merge(base, extra):
    out = copy.deepcopy(base)
    for key, val in (extra or {}).items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], val)
        else:
            out[key] = copy.deepcopy(val)
    return out


def load_config(path=None, overrides=None):
    """Resolve defaults, an optional YAML file, and CLI overrides."""
    user = {}
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                user = yaml.safe_load(fh) or {}
        except FileNotFoundError as exc:
            raise ConfigError(f"config file not found: {path}") from exc
        except yaml.YAMLError as exc:
            raise ConfigError(f"config file is not valid YAML: {exc}") from exc
        if not isinstance(user, dict):
            raise ConfigError("config document must be a mapping")
    cfg = _deep_merge(DEFAULT_CONFIG, user)
    # the nonlinearity document is atomic: merging default params into a
    # user-chosen kind would fabricate parameters
    if "nonlinearity" in user:
        cfg["nonlinearity"] = copy.deepcopy(user["nonlinearity"])
    for dotted, value in (overrides or {}).items():
        node = cfg
        parts = dotted.split(".")
        for part in parts[:-1]:
            if not isinstance(node.get(part), dict):
                node[part] = {}
            node = node[part]
        node[parts[-1]] = value
    return cfg


def validate_config(cfg):
    """Raise ConfigError naming the offending field."""
    prob = cfg.get("problem", {})
    d = prob.get("d")
    if d not in (1, 2):
        raise ConfigError(f"problem.d must be 1 or 2, got {d!r}")
    modes = prob.get("modes")
    if not isinstance(modes, int) or modes < 4:
        raise ConfigError(f"problem.modes must be an integer >= 4, got {modes!r}")
    m = prob.get("m")
    if not isinstance(m, int) or m < 1:
        raise ConfigError(f"problem.m must be a positive integer, got {m!r}")
    qp = prob.get("quad_points")
    if qp is not None and (not isinstance(qp, int) or qp < 4 * modes):
        raise ConfigError(
            f"problem.quad_points must be >= 4*modes = {4 * modes}, got {qp!r}")
    N = prob.get("N_nominal")
    if N is not None and (not isinstance(N, int) or N < d):
        raise ConfigError(f"problem.N_nominal must be an integer >= d, got {N!r}")
    nld = cfg.get("nonlinearity")
    if not isinstance(nld, dict) or "kind" not in nld:
        raise ConfigError("nonlinearity.kind is required")
    try:
        spec_from_dict(nld)
    except ParameterError as exc:
        raise ConfigError(f"nonlinearity: {exc}") from exc
    sv = cfg.get("solve", {})
    if not (isinstance(sv.get("tol"), (int, float)) and sv["tol"] > 0):
        raise ConfigError(f"solve.tol must be positive, got {sv.get('tol')!r}")
    if not (isinstance(sv.get("max_iter"), int) and sv["max_iter"] > 0):
        raise ConfigError(f"solve.max_iter must be a positive integer, got {sv.get('max_iter')!r}")
    if not (isinstance(sv.get("path_points"), int) and sv["path_points"] >= 8):
        raise ConfigError(f"solve.path_points must be an integer >= 8, got {sv.get('path_points')!r}")
    tr = cfg.get("truncate", {})
    if not (isinstance(tr.get("p"), (int, float)) and tr["p"] > 1):
        raise ConfigError(f"truncate.p must exceed 1, got {tr.get('p')!r}")
    if not (isinstance(tr.get("n_max"), int) and tr["n_max"] >= 1):
        raise ConfigError(f"truncate.n_max must be a positive integer, got {tr.get('n_max')!r}")
    bt = cfg.get("bootstrap", {})
    for key in ("p", "p1"):
        if not isinstance(bt.get(key), (int, float)):
            raise ConfigError(f"bootstrap.{key} must be a number, got {bt.get(key)!r}")
    mu = cfg.get("multi", {})
    if not (isinstance(mu.get("n_solutions"), int) and mu["n_solutions"] >= 1):
        raise ConfigError(
            f"multi.n_solutions must be a positive integer, got {mu.get('n_solutions')!r}")
    return cfg


def grid_from_config(cfg):
    prob = cfg["problem"]
    return Grid(prob["d"], prob["modes"], prob.get("quad_points"))


def nominal_N(cfg):
    prob = cfg["problem"]
    return prob["N_nominal"] if prob.get("N_nominal") is not None else prob["d"]


def config_hash(cfg):
    return hashlib.sha256(canonical_json(cfg).encode("utf-8")).hexdigest()


def canonical_json(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        x = x.item()
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return repr(x)
    return str(x)


def write_csv(path, header, rows):
    lines = [header]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_solution_csv(path, field):
    grid = field.grid
    vals = to_grid(field)
    if grid.d == 1:
        rows = zip(grid.nodes_1d, vals)
        write_csv(path, "x,u", rows)
    else:
        X, Y = grid.mesh()
        rows = zip(X.ravel(), Y.ravel(), vals.ravel())
        write_csv(path, "x,y,u", rows)


def write_trace_csv(path, trace):
    rows = []
    npm = len(trace.path_max_energy)
    for i, rec in enumerate(trace.records):
        pm = trace.path_max_energy[i] if i < npm else None
        rows.append((i, pm, rec.J_value, rec.grad_norm, rec.sol_norm,
                     rec.defect, rec.f_norm, rec.cerami_product))
    write_csv(path, "iter,path_max,J,grad_norm,sol_norm,defect,f_norm,cerami_product",
              rows)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        obj = obj.item()
    if isinstance(obj, float):
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        if math.isnan(obj):
            return "nan"
    return obj


def write_meta(path, command, cfg, results):
    doc = {
        "tool": "polypass",
        "version": __version__,
        "command": command,
        "config": _jsonable(cfg),
        "config_sha256": config_hash(_jsonable(cfg)),
        "results": _jsonable(results),
    }
    Path(path).write_text(
        json.dumps(doc, sort_keys=True, indent=2) + "\n", encoding="utf-8")
