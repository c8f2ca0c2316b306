"""Batch front-end: JSON configs in, JSON or text reports out.

Rational inputs are "p/q" strings so nothing is lost on the exact paths;
floats may be given as numbers or decimal strings.  Exit codes: 0 all checks
pass, 2 config/schema error, 3 resonance or singular configuration, 4
accuracy or check failure.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from fractions import Fraction

import numpy as np
import jsonschema

from . import __version__
from . import freelie as fl
from . import modules as wm
from . import connections as cx
from . import hypergeom as hg
from . import symmetrize as sym
from . import arrangements as ar
from . import ratlin
from .quadrature import AccuracyError, ConvergenceError

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_SCHEMA = 2
EXIT_SINGULAR = 3
EXIT_ACCURACY = 4

COMMANDS = ("flatness", "solve", "residuals", "det-check",
            "verify-operators", "os-check", "symmetrize-check")

_RATIONAL = {"type": "string", "pattern": r"^-?\d+(/\d+)?$"}
_RATIONAL_LIST = {"type": "array", "items": _RATIONAL}
_MU = {
    "type": "object",
    "properties": {
        "alpha": _RATIONAL_LIST,
        "lam": _RATIONAL_LIST,
        "coords": _RATIONAL_LIST,
    },
    "additionalProperties": False,
}

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "command", "algebra", "lambda", "n"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "command": {"enum": list(COMMANDS)},
        "algebra": {
            "type": "object",
            "required": ["mode"],
            "properties": {
                "mode": {"enum": ["free", "sln"]},
                "gram": {"type": "array", "items": _RATIONAL_LIST},
                "N": {"type": "integer", "minimum": 2},
            },
        },
        "weights": {
            "type": "object",
            "properties": {
                "lam_alpha": {"type": "array", "items": _RATIONAL_LIST},
                "lam_lam": {"type": "array", "items": _RATIONAL_LIST},
                "coords": {"type": "array", "items": _RATIONAL_LIST},
            },
        },
        "lambda": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "n": {"type": "integer", "minimum": 1},
        "z": _RATIONAL_LIST,
        "z2": _RATIONAL_LIST,
        "mu": _MU,
        "mu2": _MU,
        "mu_dirs": {"type": "array", "items": _MU},
        "kappa": _RATIONAL,
        "numeric": {
            "type": "object",
            "properties": {
                "tol": {"type": "number"},
                "fd_step": {"type": "number"},
                "max_depth": {"type": "integer", "minimum": 1},
                "threads": {"type": "integer", "minimum": 0},
                "seed": {"type": "integer"},
            },
            "additionalProperties": False,
        },
    },
}


class ConfigError(ValueError):
    """Invalid configuration; message carries the field path."""


def _frac(s):
    return Fraction(s)


def _check_symmetric(rows, path):
    for i in range(len(rows)):
        if len(rows[i]) != len(rows):
            raise ConfigError("%s: must be square" % path)
        for j in range(len(rows)):
            if rows[i][j] != rows[j][i]:
                raise ConfigError("%s[%d][%d]: matrix must be symmetric" % (path, i, j))


def parse_config(doc):
    """Validate and build the working objects from a config document."""
    try:
        jsonschema.validate(doc, CONFIG_SCHEMA)
    except jsonschema.ValidationError as e:
        path = "/".join(str(p) for p in e.absolute_path)
        raise ConfigError("%s: %s" % (path or "<root>", e.message))
    cfg = {}
    cfg["command"] = doc["command"]
    mode = doc["algebra"]["mode"]
    n = doc["n"]
    lam = tuple(doc["lambda"])
    sln = None
    if mode == "sln":
        if "N" not in doc["algebra"]:
            raise ConfigError("algebra/N: required in sln mode")
        if "coords" not in doc.get("weights", {}):
            raise ConfigError("weights/coords: required in sln mode")
        coords = [[_frac(x) for x in row] for row in doc["weights"]["coords"]]
        if len(coords) != n:
            raise ConfigError("weights/coords: need one row per factor")
        alg, hw, sln = cx.sln_setup(doc["algebra"]["N"], coords)
    else:
        if "gram" not in doc["algebra"]:
            raise ConfigError("algebra/gram: required in free mode")
        gram = [[_frac(x) for x in row] for row in doc["algebra"]["gram"]]
        _check_symmetric(gram, "algebra/gram")
        alg = fl.make_algebra(gram)
        w = doc.get("weights", {})
        if "lam_alpha" not in w or "lam_lam" not in w:
            raise ConfigError("weights: lam_alpha and lam_lam required in free mode")
        la = [[_frac(x) for x in row] for row in w["lam_alpha"]]
        ll = [[_frac(x) for x in row] for row in w["lam_lam"]]
        if len(la) != n or len(ll) != n:
            raise ConfigError("weights: need one row per factor")
        _check_symmetric(ll, "weights/lam_lam")
        hw = wm.HighestWeightData(n=n, lam_alpha=tuple(tuple(r) for r in la),
                                  lam_lam=tuple(tuple(r) for r in ll))
    if len(lam) != alg.rank:
        raise ConfigError("lambda: length must equal the rank")
    cfg["alg"], cfg["hw"], cfg["sln"], cfg["lam"], cfg["n"] = alg, hw, sln, lam, n
    cfg["z"] = tuple(_frac(x) for x in doc.get("z", [Fraction(j) for j in range(n)]))
    if len(cfg["z"]) != n:
        raise ConfigError("z: need one marked point per factor")
    cfg["z2"] = tuple(_frac(x) for x in doc["z2"]) if "z2" in doc else None
    cfg["kappa"] = _frac(doc.get("kappa", "1"))
    if cfg["kappa"] == 0:
        raise ConfigError("kappa: must be nonzero")
    cfg["mu"] = _parse_mu(doc.get("mu"), sln, alg, hw, "mu")
    cfg["mu2"] = _parse_mu(doc.get("mu2"), sln, alg, hw, "mu2") if "mu2" in doc else None
    cfg["mu_dirs"] = [_parse_mu(d, sln, alg, hw, "mu_dirs/%d" % i)
                      for i, d in enumerate(doc.get("mu_dirs", []))]
    numeric = doc.get("numeric", {})
    cfg["tol"] = float(numeric.get("tol", 1e-10))
    cfg["fd_step"] = float(numeric.get("fd_step", 1e-3))
    cfg["threads"] = int(numeric.get("threads", 0)) or (os.cpu_count() or 1)
    cfg["seed"] = int(numeric.get("seed", 1))
    cfg["max_depth"] = int(numeric.get("max_depth", 18))
    return cfg


def _parse_mu(block, sln, alg, hw, path):
    if block is None:
        return None
    if "coords" in block:
        if sln is None:
            raise ConfigError("%s/coords: only valid in sln mode" % path)
        coords = [_frac(x) for x in block["coords"]]
        if len(coords) != alg.rank:
            raise ConfigError("%s/coords: need N-1 entries" % path)
        return sln.mu_from_coords(coords)
    if "alpha" not in block or "lam" not in block:
        raise ConfigError("%s: needs alpha and lam pairings (or coords)" % path)
    a = [_frac(x) for x in block["alpha"]]
    l = [_frac(x) for x in block["lam"]]
    if len(a) != alg.rank or len(l) != hw.n:
        raise ConfigError("%s: pairing lengths must be rank and n" % path)
    return cx.MuVector(alpha=tuple(a), lam=tuple(l))


def _random_mu(alg, hw, rng):
    return cx.MuVector(
        alpha=tuple(Fraction(rng.randint(1, 9), rng.randint(1, 7)) for _ in range(alg.rank)),
        lam=tuple(Fraction(rng.randint(-9, 9), rng.randint(1, 7)) for _ in range(hw.n)))


def _fmt(x):
    if isinstance(x, Fraction):
        return "%d/%d" % (x.numerator, x.denominator)
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, (np.floating, np.complexfloating)):
        return _fmt(complex(x)) if np.iscomplexobj(x) else float(x)
    return x


# ---------------------------------------------------------------------------
# command handlers

def _module(cfg):
    return wm.WeightModule(cfg["alg"], cfg["hw"], cfg["lam"])


def _exact_params(cfg):
    if cfg["mu"] is None:
        raise ConfigError("mu: required for this command")
    return cx.ConnectionParams(z=cfg["z"], mu=cfg["mu"], kappa=cfg["kappa"])


def _numeric_params(cfg, z=None, mu=None):
    mu = mu if mu is not None else cfg["mu"]
    if mu is None:
        raise ConfigError("mu: required for this command")
    z = z if z is not None else cfg["z"]
    muf = cx.MuVector(alpha=tuple(float(x) for x in mu.alpha),
                      lam=tuple(float(x) for x in mu.lam))
    return cx.ConnectionParams(z=tuple(float(x) for x in z), mu=muf,
                               kappa=float(cfg["kappa"]))


def _mu_dirs(cfg, count=2):
    dirs = list(cfg["mu_dirs"])
    rng = random.Random(cfg["seed"])
    while len(dirs) < count:
        dirs.append(_random_mu(cfg["alg"], cfg["hw"], rng))
    return dirs


def cmd_flatness(cfg):
    module = _module(cfg)
    params = _exact_params(cfg)
    dirs = [params.mu] + _mu_dirs(cfg, 2)
    rep = cx.flatness_report(module, params, dirs)
    checks = [
        {"name": "zz_commutators", "passed": rep.zz_exact,
         "max_abs_residual": _fmt(rep.zz_max), "exact_zero": rep.zz_exact},
        {"name": "zmu_commutators", "passed": rep.zmu_exact,
         "max_abs_residual": _fmt(rep.zmu_max), "exact_zero": rep.zmu_exact},
        {"name": "mumu_commutators", "passed": rep.mumu_exact,
         "max_abs_residual": _fmt(rep.mumu_max), "exact_zero": rep.mumu_exact},
    ]
    return checks, {}


def cmd_solve(cfg):
    module = _module(cfg)
    params = _numeric_params(cfg)
    sm = hg.solution_matrix(module, params, cfg["tol"], cfg["threads"], cfg["max_depth"])
    passed = sm.max_rel_error <= max(cfg["tol"] * 100, 1e-8)
    checks = [{"name": "solution_matrix", "passed": passed,
               "max_rel_error": sm.max_rel_error}]
    extra = {"matrix": [[_fmt(v) for v in row] for row in sm.values.tolist()],
             "cells": [str(c.index) for c in sm.cells]}
    return checks, extra


def cmd_residuals(cfg):
    module = _module(cfg)
    params = _numeric_params(cfg)
    dirs = _mu_dirs(cfg, 2)
    dirs_f = [cx.MuVector(alpha=tuple(float(x) for x in d.alpha),
                          lam=tuple(float(x) for x in d.lam)) for d in dirs]
    rep = hg.residuals(module, params, dirs_f, cfg["fd_step"], cfg["tol"], cfg["threads"])
    m = sum(cfg["lam"])
    gate = 1e-6 if m <= 1 else 1e-4
    checks = [{"name": "residual_%s" % k, "passed": v <= gate, "value": float(v)}
              for k, v in sorted(rep.per_direction.items())]
    return checks, {"max_relative": float(rep.max_relative), "gate": gate}


def cmd_det_check(cfg):
    module = _module(cfg)
    p1 = _numeric_params(cfg)
    z2 = cfg["z2"] if cfg["z2"] is not None else cfg["z"]
    mu2 = cfg["mu2"] if cfg["mu2"] is not None else cfg["mu"]
    p2 = _numeric_params(cfg, z=z2, mu=mu2)
    rep = hg.determinant_check(module, p1, p2, cfg["tol"], cfg["threads"])
    checks = [{"name": "log_det_increment", "passed": rep.difference <= 1e-6,
               "difference": float(rep.difference),
               "observed": _fmt(rep.observed_increment),
               "predicted": _fmt(rep.predicted_increment)}]
    structural = all(
        ratlin.is_zero_matrix(module.delta_plus(a))
        for a in _off_range_roots(module))
    checks.append({"name": "delta_trace_vanishes_off_range", "passed": structural})
    return checks, {}


def _off_range_roots(module):
    lam = module.lam
    out = []
    for i in range(len(lam)):
        over = list(lam)
        over[i] += 1
        out.append(tuple(over))
    return out


def cmd_verify_operators(cfg):
    module = _module(cfg)
    checks = []
    gram = module.shapovalov_gram()
    ok_lemma = True
    ok_dual = True
    for alpha in module._positive_degrees():
        dp = module.delta_plus(alpha, "dual")
        dq = module.delta_plus(alpha, "quotient")
        if dp != dq:
            mod_deg, piece_deg = module.degenerate_pieces(alpha)
            ok_dual = False
            checks.append({"name": "delta_methods_alpha_%s" % (alpha,),
                           "passed": False,
                           "module_degenerate": mod_deg,
                           "piece_degenerate": piece_deg})
        lhs = ratlin.mat_mul(gram, dp)
        rhs = ratlin.mat_mul(ratlin.transpose(dp), gram)
        if lhs != rhs:
            ok_lemma = False
    checks.append({"name": "shapovalov_intertwines_delta", "passed": ok_lemma,
                   "exact_zero": ok_lemma})
    checks.append({"name": "delta_dual_equals_quotient", "passed": ok_dual,
                   "exact_zero": ok_dual})
    cd = wm.cd_lemma_check(cfg["alg"], cfg["hw"], cfg["lam"])
    checks.append({"name": "nu_contravariance", "passed": cd, "exact_zero": cd})
    return checks, {}


def cmd_os_check(cfg):
    mu = cfg["mu"] if cfg["mu"] is not None else _random_mu(cfg["alg"], cfg["hw"],
                                                            random.Random(cfg["seed"]))
    lift = sym.lift(cfg["alg"], cfg["hw"], cfg["lam"], mu)
    m = len(lift.coloring)
    config = ar.Configuration(cfg["n"], m)
    kappa = cfg["kappa"]
    weights = []
    for h in config.hyperplanes:
        if h.kind == "tt":
            weights.append(lift.alg.gram[h.a][h.b] / kappa)
        else:
            weights.append(-lift.hw.lam_alpha[h.b][h.a] / kappa)
    rep = ar.chain_check(config, weights)
    checks = [
        {"name": "flag_d_squared", "passed": rep.flag_d_squared_zero, "exact_zero": True},
        {"name": "omega_d_squared", "passed": rep.omega_d_squared_zero, "exact_zero": True},
        {"name": "phi_isomorphism", "passed": rep.phi_iso},
        {"name": "s_chain_map", "passed": rep.chain_map_holds, "exact_zero": True},
        {"name": "unsigned_control_fails", "passed": rep.negative_control_fails},
    ]
    eta_ok = True
    if m <= 3:
        rng = random.Random(cfg["seed"] + 1)
        square_free = tuple(1 for _ in range(m))
        for index in wm.enumerate_basis(square_free, cfg["n"]):
            eta = ar.eta_top(config, index)
            for _ in range(4):
                t = [Fraction(rng.randint(-30, 30), rng.randint(1, 11)) for _ in range(m)]
                if any(h.value(t, config.z) == 0 for h in config.hyperplanes):
                    continue
                lhs = eta.form_coefficient(t, config.z)
                rhs = hg.weight_function(index, config.z, t, square_free)
                if lhs != rhs:
                    eta_ok = False
        checks.append({"name": "eta_matches_weight_function", "passed": eta_ok,
                       "exact_zero": eta_ok})
    return checks, {"ranks": {str(k): list(v) for k, v in rep.ranks.items()}}


def cmd_symmetrize_check(cfg):
    module = _module(cfg)
    lam = cfg["lam"]
    mu = cfg["mu"]
    if mu is None:
        raise ConfigError("mu: required for this command")
    lift = sym.lift(cfg["alg"], cfg["hw"], lam, mu)
    lifted_module = wm.WeightModule(lift.alg, lift.hw, lift.lifted_lam)
    params = _numeric_params(cfg)
    params_l = cx.ConnectionParams(
        z=params.z,
        mu=cx.MuVector(alpha=tuple(float(x) for x in lift.mu.alpha),
                       lam=tuple(float(x) for x in lift.mu.lam)),
        kappa=params.kappa)
    direct = hg.solution_matrix(module, params, cfg["tol"], cfg["threads"])
    lifted = hg.solution_matrix(lifted_module, params_l, cfg["tol"], cfg["threads"])
    lindex = {idx: k for k, idx in enumerate(lifted_module.basis)}
    lcells = {c.index: k for k, c in enumerate(lifted.cells)}
    proj = np.zeros_like(direct.values)
    for i, idx in enumerate(module.basis):
        row = lcells[sym.canonical_lift(idx, lam)]
        for j, jdx in enumerate(module.basis):
            proj[i, j] = sum(lifted.values[row, lindex[K]]
                             for K in sym.sigma_of(jdx, lam))
    scale = np.max(np.abs(direct.values)) or 1.0
    err = float(np.max(np.abs(proj - direct.values)) / scale)
    checks = [{"name": "projected_equals_direct", "passed": err <= 1e-6,
               "max_rel_difference": err}]
    return checks, {}


HANDLERS = {
    "flatness": cmd_flatness,
    "solve": cmd_solve,
    "residuals": cmd_residuals,
    "det-check": cmd_det_check,
    "verify-operators": cmd_verify_operators,
    "os-check": cmd_os_check,
    "symmetrize-check": cmd_symmetrize_check,
}


def run(doc):
    """Dispatch a parsed config document; returns (report, exit_code)."""
    started = time.time()
    cfg = parse_config(doc)
    checks, extra = HANDLERS[cfg["command"]](cfg)
    status = "pass" if all(c["passed"] for c in checks) else "fail"
    report = {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "command": cfg["command"],
        "status": status,
        "checks": checks,
        "timing_s": time.time() - started,
    }
    report.update(extra)
    return report, (EXIT_OK if status == "pass" else EXIT_ACCURACY)


def emit(report, fmt="json"):
    """Serialize a report; JSON is canonical, text is a summary."""
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True)
    lines = ["%s: %s" % (report["command"], report["status"])]
    for c in report["checks"]:
        detail = " ".join("%s=%s" % (k, v) for k, v in sorted(c.items())
                          if k not in ("name", "passed"))
        lines.append("  [%s] %s %s" % ("ok" if c["passed"] else "FAIL", c["name"], detail))
    lines.append("  elapsed: %.3fs" % report["timing_s"])
    return "\n".join(lines)


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="kzd",
        description="Exact and numeric checks for compatible KZ-type systems")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True)
    parser.add_argument("--out")
    parser.add_argument("--format", choices=("json", "text"), default="json")
    parser.add_argument("--threads", type=int)
    parser.add_argument("--tol", type=float)
    parser.add_argument("--seed", type=int)
    args = parser.parse_args(argv)
    try:
        with open(args.config) as f:
            doc = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        print("config error: %s" % e, file=sys.stderr)
        return EXIT_SCHEMA
    if not isinstance(doc, dict):
        print("config error: document must be an object", file=sys.stderr)
        return EXIT_SCHEMA
    doc = dict(doc)
    doc["command"] = args.command
    numeric = dict(doc.get("numeric", {}))
    if args.threads is not None:
        numeric["threads"] = args.threads
    if args.tol is not None:
        numeric["tol"] = args.tol
    if args.seed is not None:
        numeric["seed"] = args.seed
    if numeric:
        doc["numeric"] = numeric
    try:
        report, code = run(doc)
    except ConfigError as e:
        print("config error: %s" % e, file=sys.stderr)
        return EXIT_SCHEMA
    except (cx.ResonanceError, cx.SingularityError, ConvergenceError) as e:
        print("singular configuration: %s" % e, file=sys.stderr)
        return EXIT_SINGULAR
    except AccuracyError as e:
        print("accuracy failure: %s (achieved %.3g)" % (e, e.achieved), file=sys.stderr)
        return EXIT_ACCURACY
    text = emit(report, args.format)
    if args.out:
        with open(args.out, "w") as f:
            f.write(text + "\n")
    else:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
