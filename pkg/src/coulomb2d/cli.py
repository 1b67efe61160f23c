"""Command-line runner wiring configs to the numerical modules.

Commands: ``constants``, ``gaussian-example``, ``verify-bound``,
``stability-sweep``, ``scan``.  One JSON config per run; the only
environment override is SEED.  Numeric output uses shortest round-trip
decimals so identical runs are byte identical.

Exit codes: 0 success, 1 inequality violation, 2 usage or config error,
3 numerical divergence.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from . import constants as bc
from . import density, manybody, stability
from .coulomb import MolecularConfig
from .errors import DivergenceError, DomainError

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_DIVERGENCE = 3

_NATURAL_FORMAT = {
    "constants": "csv",
    "gaussian-example": "csv",
    "scan": "csv",
    "verify-bound": "json",
    "stability-sweep": "json",
}

# Slack below -(this * |rhs| + 3 stderr) counts as a bound violation.
SLACK_REL = 1e-6


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _write_csv(path, header, rows):
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _write_json(path, payload):
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _load_config(path):
    if path is None:
        return {}
    with open(path) as fh:
        return json.load(fh)


def _resolve_seed(args, config):
    if args.seed is not None:
        return args.seed
    env = os.environ.get("SEED")
    if env is not None:
        return int(env)
    return int(config.get("seed", 0))


def _grid(config, key, default):
    grid = config.get(key, default)
    if not grid:
        raise DomainError(f"{key} must be a nonempty list")
    return [float(g) for g in grid]


# --------------------------------------------------------------------------
# constants


def run_constants(gamma_grid, epsilon_grid, out, fmt):
    header = ["gamma", "epsilon", "alpha", "delta", "C_gamma", "C_delta",
              "beta", "b_tilde_sq", "a_tilde_sq"]
    beta = bc.beta_constant()
    rows = []
    for gamma in gamma_grid:
        for epsilon in epsilon_grid:
            params = bc.derive_parameters(gamma, epsilon)
            rows.append([params.gamma, params.epsilon, params.alpha,
                         params.delta, bc.sharp_constant(params.gamma),
                         bc.sharp_constant(params.delta), beta,
                         bc.b_tilde_squared(epsilon),
                         bc.a_tilde_squared(params)])
    _write_csv(out, header, rows)
    return EXIT_OK


# --------------------------------------------------------------------------
# gaussian-example


def run_gaussian_example(n_list, gamma_grid, A, out, fmt):
    header = ["N", "gamma", "L_closed", "L_quad", "G_closed", "G_quad",
              "ratio_closed", "ratio_quad"]
    rows = []
    for n in n_list:
        for gamma in gamma_grid:
            params = bc.derive_parameters(gamma, 1.0)
            c_amp = n * A / math.pi
            profile = density.GaussianProfile(C=c_amp, A=A)
            l_quad = density.evaluate_L(profile).value
            g_quad = density.evaluate_G(profile, params).value
            rows.append([n, gamma,
                         density.gaussian_L_closed_form(c_amp, A), l_quad,
                         density.gaussian_G_closed_form(c_amp, A, params), g_quad,
                         density.gaussian_G_over_L(n, params), g_quad / l_quad])
    _write_csv(out, header, rows)
    return EXIT_OK


# --------------------------------------------------------------------------
# verify-bound


def _default_bound_specs(seed):
    return [manybody.WaveFunctionSpec(kind="gaussian-product", N=n, A=1.0,
                                      seed=seed)
            for n in (2, 3, 5, 10)]


def _parse_specs(config, seed):
    raw = config.get("specs")
    if raw is None:
        return _default_bound_specs(seed)
    specs = []
    for desc in raw:
        desc = dict(desc)
        desc.setdefault("seed", seed)
        specs.append(manybody.spec_from_descriptor(desc))
    return specs


def _active_constants(params, beta_scale):
    """Tilde coefficients as actually used by the run.

    A beta_scale other than 1 deliberately corrupts them; the consistency
    check below must catch that.
    """
    b_tilde_sq = beta_scale * bc.b_tilde_squared(params.epsilon)
    a_tilde_sq = beta_scale ** (1.0 - params.gamma) * bc.a_tilde_squared(params)
    return b_tilde_sq, a_tilde_sq


def run_verify_bound(config, seed, out, fmt):
    gamma_grid = _grid(config, "gamma_grid", [1.5, 2.0, 2.5])
    epsilon_grid = _grid(config, "epsilon_grid", [0.1, 0.5, 1.0])
    samples = int(config.get("samples", 200_000))
    beta_scale = float(config.get("_beta_scale", 1.0))
    specs = _parse_specs(config, seed)

    beta_ref = bc.beta_constant()
    cells = []
    violations = 0
    constants_consistent = True
    cell_index = 0
    for i, spec in enumerate(specs):
        for gamma in gamma_grid:
            for epsilon in epsilon_grid:
                params = bc.derive_parameters(gamma, epsilon)
                b_tilde_sq, a_tilde_sq = _active_constants(params, beta_scale)
                # the leading coefficient must reproduce its defining value
                consistent = math.isclose(b_tilde_sq / (1.0 + epsilon),
                                          beta_ref, rel_tol=1e-12)
                constants_consistent &= consistent
                result = manybody.check_main_bound(
                    spec, params, samples=samples, cell=cell_index,
                    b_tilde_sq=b_tilde_sq, a_tilde_sq=a_tilde_sq)
                ok = consistent and result.slack >= -(
                    SLACK_REL * abs(result.rhs)
                    + 3.0 * result.statistical_error)
                if not ok:
                    violations += 1
                cells.append({
                    "spec": i, "N": spec.N, "gamma": gamma, "epsilon": epsilon,
                    "lhs": result.lhs, "rhs": result.rhs,
                    "slack": result.slack,
                    "ratio": result.tightness_ratio,
                    "stderr": result.statistical_error,
                    "constants_consistent": consistent,
                    "pass": ok,
                })
                cell_index += 1

    payload = {
        "command": "verify-bound",
        "seed": seed,
        "samples": samples,
        "constants_consistent": constants_consistent,
        "violations": violations,
        "cells": cells,
    }
    _write_json(out, payload)
    if violations:
        first = next(c for c in cells if not c["pass"])
        cause = ("inconsistent constants" if not first["constants_consistent"]
                 else f"slack={first['slack']!r}")
        print(f"violation at spec={first['spec']} gamma={first['gamma']} "
              f"epsilon={first['epsilon']}: {cause}", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


# --------------------------------------------------------------------------
# stability-sweep


def _default_stability_config():
    profiles = []
    for A in (0.2, 1.0, 5.0):
        for n in (1.0, 3.0):
            profiles.append({"kind": "gaussian", "C": n * A / math.pi, "A": A})
    nuclei = [
        {"z": 1.0, "positions": [[0.0, 0.0]]},
        {"z": 1.0, "positions": [[-1.0, 0.0], [1.0, 0.0]]},
        {"z": 1.0, "positions": [[0.0, 0.0], [2.0, 0.0], [1.0, math.sqrt(3.0)]]},
    ]
    return {"profiles": profiles, "nuclei": nuclei, "gamma": 2.0, "epsilon": 0.5}


def run_stability_sweep(config, seed, out, fmt):
    if not config:
        config = _default_stability_config()
    params = bc.derive_parameters(float(config.get("gamma", 2.0)),
                                  float(config.get("epsilon", 0.5)))
    a_tilde_sq = bc.a_tilde_squared(params)
    b_tilde_sq = bc.b_tilde_squared(params.epsilon)
    corpus = [density.profile_from_descriptor(d) for d in config["profiles"]]
    configs = [MolecularConfig(z=float(d["z"]),
                               positions=tuple(tuple(p) for p in d["positions"]))
               for d in config["nuclei"]]

    z_values = {c.z for c in configs}
    verdicts = {z: stability.stability_verdict(params, a_tilde_sq, b_tilde_sq, z)
                for z in z_values}
    report = stability.empirical_stability_sweep(corpus, configs, params,
                                                 a_tilde_sq, b_tilde_sq)

    cases = []
    for case in report.cases:
        b = case.breakdown
        cases.append({
            "profile": case.profile_index,
            "config": case.config_index,
            "gradient_term": b.gradient_term,
            "l_term": b.l_term,
            "attraction": b.attraction,
            "direct": b.direct,
            "repulsion": b.repulsion,
            "xi": b.xi,
            "analytic_lower_bound": b.analytic_lower_bound,
            "stable": b.stable,
            "half_distance_limit": b.half_distance_limit,
            "scale": case.scale,
            "violation": case.violation,
        })
    any_verdict = verdicts[next(iter(z_values))]
    payload = {
        "command": "stability-sweep",
        "gamma": params.gamma,
        "epsilon": params.epsilon,
        "a_tilde_sq": a_tilde_sq,
        "b_tilde_sq": b_tilde_sq,
        "z_max": any_verdict.z_max,
        "sigma_star": any_verdict.sigma_star,
        "min_xi": report.min_xi,
        "cases": cases,
        "skipped": [list(s) for s in report.skipped],
    }
    _write_json(out, payload)
    return EXIT_VIOLATION if report.violations else EXIT_OK


# --------------------------------------------------------------------------
# scan


def run_scan(config, seed, out, fmt, jobs):
    gamma_grid = _grid(config, "gamma_grid", [1.2, 1.5, 2.0, 2.5])
    epsilon_grid = _grid(config, "epsilon_grid", [0.1, 0.5, 1.0])
    samples = int(config.get("samples", 100_000))
    specs = _parse_specs(config, seed)
    result = manybody.tightness_scan(specs, gamma_grid, epsilon_grid,
                                     samples=samples, jobs=jobs)
    header = ["gamma", "epsilon", "N", "lhs", "rhs", "slack", "ratio", "stderr"]
    rows = [[r.gamma, r.epsilon, r.N, r.lhs, r.rhs, r.slack, r.ratio, r.stderr]
            for r in result.rows]
    _write_csv(out, header, rows)
    for i, gamma, epsilon, ratio in result.best:
        print(f"spec {i}: best ratio {ratio!r} at gamma={gamma!r} "
              f"epsilon={epsilon!r}")
    bad = [r for r in result.rows
           if r.slack < -(SLACK_REL * abs(r.rhs) + 3.0 * r.stderr)]
    return EXIT_VIOLATION if bad else EXIT_OK


# --------------------------------------------------------------------------
# entry


def build_parser():
    parser = argparse.ArgumentParser(
        prog="coulomb2d",
        description="Constants, density functionals, stability sweeps, and "
                    "bound verification for planar Coulomb systems.",
        epilog="Exit codes: 0 success, 1 inequality violation, "
               "2 usage or config error, 3 numerical divergence.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
            ("constants", "tabulate the bound constants over a grid"),
            ("gaussian-example", "Gaussian closed forms vs quadrature"),
            ("verify-bound", "check the lower bound on a spec corpus"),
            ("stability-sweep", "evaluate the molecular functional corpus"),
            ("scan", "tightness-ratio scan over (gamma, epsilon)")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", default=None, help="JSON config path")
        p.add_argument("--out", default=None, help="output file (stdout if absent)")
        p.add_argument("--format", default=None, choices=["csv", "json"])
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--jobs", type=int, default=1)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE

    natural = _NATURAL_FORMAT[args.command]
    fmt = args.format or natural
    if fmt != natural:
        print(f"{args.command} emits {natural}, not {fmt}", file=sys.stderr)
        return EXIT_USAGE

    try:
        config = _load_config(args.config)
        seed = _resolve_seed(args, config)
        if args.command == "constants":
            return run_constants(_grid(config, "gamma_grid", [1.5, 2.0, 2.5]),
                                 _grid(config, "epsilon_grid", [0.1, 0.5, 1.0]),
                                 args.out, fmt)
        if args.command == "gaussian-example":
            return run_gaussian_example(
                _grid(config, "N_list", [5.0, 20.0, 100.0]),
                _grid(config, "gamma_grid", [1.5, 2.0, 2.5]),
                float(config.get("A", 1.0)), args.out, fmt)
        if args.command == "verify-bound":
            return run_verify_bound(config, seed, args.out, fmt)
        if args.command == "stability-sweep":
            return run_stability_sweep(config, seed, args.out, fmt)
        if args.command == "scan":
            return run_scan(config, seed, args.out, fmt, max(args.jobs, 1))
    except (DomainError, KeyError, TypeError, ValueError,
            OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DivergenceError as exc:
        print(f"numerical divergence: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    raise AssertionError("unreachable")


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
