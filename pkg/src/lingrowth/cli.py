"""Command-line interface.

Subcommands
-----------
density      validate a density's hypotheses and print its growth class
catenoid     sample a barrier profile to CSV and check the flux identity
solve        one Dirichlet solve; writes solution CSV + diagnostics JSON
experiment   run a removability / catenoid / comparison study

Exit codes: 0 success, 1 configuration error, 2 hypothesis violation
(domain errors such as a profile range crossing the neck), 3 solver
non-convergence.

A JSON config file supplies defaults; explicit flags win.  The effective
configuration is echoed into the output directory so a run can be
reproduced from its artifacts alone.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import ioutil
from .catenoid import (Anchor, CatenoidSpec, QuadratureAccuracyError, Sign,
                       neck_limit, ode_residual, sample_profile)
from .config import density_from_config, solver_options_from_config
from .density import (Growth, UndeterminedLimitError, classify_growth,
                      normalize, validate)
from .experiments import (RemovabilityConfig, outer_data_values,
                          run_catenoid_reproduction, run_comparison_suite,
                          run_removability, write_report)
from .mesh import build_polar_mesh
from .solver import NonConvergenceError, solve_dirichlet

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_HYPOTHESIS = 2
EXIT_NONCONVERGENCE = 3


def _say(args, *parts):
    if not args.quiet:
        print(*parts)


def _load_config(args) -> dict:
    if args.config is None:
        return {}
    try:
        with open(args.config) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ValueError(f"cannot read config {args.config}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ValueError("config file must hold a JSON object")
    return cfg


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _density_config(args, cfg: dict) -> dict:
    """Density spec from flags, falling back to the config file."""
    if args.kind is not None:
        dcfg = {"kind": args.kind}
        if args.mu is not None:
            dcfg["mu"] = args.mu
        return dcfg
    if "density" in cfg:
        return cfg["density"]
    raise ValueError("no density specified (use --kind or a config file)")


def _echo_config(args, out: Path, effective: dict):
    ioutil.write_json(out / "config.json", effective)
    _say(args, f"effective config written to {out / 'config.json'}")


# ---------------------------------------------------------------------------
# density


def cmd_density(args) -> int:
    cfg = _load_config(args)
    dcfg = _density_config(args, cfg)
    d = normalize(density_from_config(dcfg))

    t_max = cfg.get("samples_max", 100.0)
    samples = np.concatenate([[0.0], np.geomspace(1e-3, t_max, 200)])
    report = validate(d, samples)
    growth = classify_growth(d)

    out = _out_dir(args)
    payload = report.to_dict()
    payload["growth"] = growth.value
    ioutil.write_json(out / "density_report.json", payload)
    _echo_config(args, out, {"command": "density", "density": dcfg,
                             "seed": args.seed})

    _say(args, f"density {d.label}: growth={growth.value}")
    for key, val in payload.items():
        _say(args, f"  {key}: {val}")
    if not report.hypotheses_ok:
        _say(args, "hypothesis violation detected")
        return EXIT_HYPOTHESIS
    return EXIT_OK


# ---------------------------------------------------------------------------
# catenoid


def cmd_catenoid(args) -> int:
    cfg = _load_config(args)
    dcfg = _density_config(args, cfg)
    d = normalize(density_from_config(dcfg))

    spec_cfg = cfg.get("catenoid", {})
    spec = CatenoidSpec(
        sign=Sign(args.sign or spec_cfg.get("sign", "plus")),
        alpha=args.alpha if args.alpha is not None else float(
            spec_cfg.get("alpha", 1.0)),
        offset_a=args.a if args.a is not None else float(spec_cfg.get("a", 0.0)),
        dim_n=args.n if args.n is not None else int(spec_cfg.get("n", 2)),
        anchor=Anchor(args.convention or spec_cfg.get("convention", "neck")),
    )
    rho_min = args.rho_min if args.rho_min is not None else float(
        spec_cfg.get("rho_min", 1.01 * spec.neck_radius))
    rho_max = args.rho_max if args.rho_max is not None else float(
        spec_cfg.get("rho_max", 5.0))
    num = args.samples if args.samples is not None else int(
        spec_cfg.get("samples", 100))

    if rho_min <= spec.neck_radius:
        _say(args, f"requested range starts at {rho_min}, at or below the "
                   f"neck radius {spec.neck_radius:.12g}: profile undefined")
        return EXIT_HYPOTHESIS

    profile = sample_profile(d, spec, rho_min, rho_max, num)
    residual = ode_residual(d, profile)

    out = _out_dir(args)
    profile.write_csv(out / "profile.csv")
    ioutil.write_json(out / "profile_meta.json", {
        "spec": spec.to_config(),
        "density": dcfg,
        "neck_radius": spec.neck_radius,
        "ode_residual": residual,
        "rows": num,
    })
    _echo_config(args, out, {
        "command": "catenoid", "density": dcfg,
        "catenoid": {**spec.to_config(), "rho_min": rho_min,
                     "rho_max": rho_max, "samples": num},
        "seed": args.seed,
    })

    _say(args, f"profile written to {out / 'profile.csv'} ({num} rows)")
    _say(args, f"flux identity residual: {ioutil.fmt12(residual)}")
    limit = neck_limit(d, spec)
    if np.isinf(limit):
        _say(args, f"neck limit at rho={spec.neck_radius:.12g} is {limit}: "
                   "values grow without bound approaching the neck")
    else:
        _say(args, f"neck limit: {ioutil.fmt12(limit)}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# solve


def _boundary_from_config(mesh, bcfg, d):
    data = {}
    outer_kind = bcfg.get("outer", {"kind": "affine", "q": [0.5, 0.3], "c": 0.0})
    vals = outer_data_values(mesh, outer_kind, d)
    for node, val in zip(mesh.outer_nodes(), vals):
        data[int(node)] = float(val)
    inner_nodes = mesh.inner_nodes()
    if len(inner_nodes):
        inner_cfg = bcfg.get("inner")
        if inner_cfg is None:
            raise ValueError("annulus solve needs boundary.inner in config")
        if inner_cfg.get("kind") == "constant":
            for node in inner_nodes:
                data[int(node)] = float(inner_cfg["value"])
        else:
            inner_vals = outer_data_values(
                _InnerView(mesh), inner_cfg, d)
            for node, val in zip(inner_nodes, inner_vals):
                data[int(node)] = float(val)
    return data


class _InnerView:
    """Adapter presenting the inner circle through the outer-data API."""

    def __init__(self, mesh):
        self._mesh = mesh
        self.n_theta = mesh.n_theta
        self.r_out = mesh.r_in
        self.nodes = mesh.nodes

    def outer_nodes(self):
        return self._mesh.inner_nodes()


def cmd_solve(args) -> int:
    cfg = _load_config(args)
    dcfg = _density_config(args, cfg)
    d = normalize(density_from_config(dcfg))

    mesh_cfg = cfg.get("mesh", {})
    r_in = args.r_in if args.r_in is not None else float(mesh_cfg.get("r_in", 0.5))
    r_out = args.r_out if args.r_out is not None else float(mesh_cfg.get("r_out", 1.0))
    n_r = args.n_r if args.n_r is not None else int(mesh_cfg.get("n_r", 16))
    n_theta = args.n_theta if args.n_theta is not None else int(
        mesh_cfg.get("n_theta", 32))
    mesh = build_polar_mesh(r_in, r_out, n_r, n_theta)

    bcfg = cfg.get("boundary", {})
    data = _boundary_from_config(mesh, bcfg, d)
    opts = solver_options_from_config(cfg.get("solver", {}))

    out = _out_dir(args)
    effective = {"command": "solve", "density": dcfg,
                 "mesh": {"r_in": r_in, "r_out": r_out,
                          "n_r": n_r, "n_theta": n_theta},
                 "boundary": bcfg, "solver": cfg.get("solver", {}),
                 "seed": args.seed}
    _echo_config(args, out, effective)

    try:
        sol = solve_dirichlet(d, mesh, data, opts)
    except NonConvergenceError as exc:
        sol = exc.solution
        sol.write_csv(out / "solution.csv")
        ioutil.write_json(out / "diagnostics.json", sol.diagnostics())
        _say(args, f"solver did not converge: {exc}")
        return EXIT_NONCONVERGENCE

    sol.write_csv(out / "solution.csv")
    ioutil.write_json(out / "diagnostics.json", sol.diagnostics())
    _say(args, f"solved: energy={ioutil.fmt12(sol.energy)} "
               f"grad_norm={sol.grad_norm:.3e} iterations={sol.iterations}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# experiment


def cmd_experiment(args) -> int:
    cfg = _load_config(args)
    kind = args.experiment_kind or cfg.get("experiment", {}).get("kind")
    if kind not in ("removability", "catenoid", "comparison"):
        raise ValueError(f"unknown experiment kind {kind!r}")

    dcfg = _density_config(args, cfg)
    ecfg = dict(cfg.get("experiment", {}))
    ecfg.pop("kind", None)
    out = _out_dir(args)

    if kind == "removability":
        rcfg = RemovabilityConfig(density=dcfg, **ecfg)
        report = run_removability(rcfg)
        effective_exp = {"kind": kind, **rcfg.to_dict()}
        effective_exp.pop("density")
    elif kind == "catenoid":
        d = normalize(density_from_config(dcfg))
        spec = CatenoidSpec.from_config(ecfg.get("spec", {
            "sign": "minus", "alpha": 0.25, "a": 0.0, "n": 2,
            "convention": "neck"}))
        kwargs = {k: ecfg[k] for k in
                  ("r_in", "r_out", "n_r0", "n_theta0") if k in ecfg}
        report = run_catenoid_reproduction(
            d, spec, int(ecfg.get("refinements", 3)), **kwargs)
        effective_exp = {"kind": kind, "spec": spec.to_config(),
                         "refinements": int(ecfg.get("refinements", 3)),
                         **kwargs}
    else:
        d = normalize(density_from_config(dcfg))
        kwargs = {k: ecfg[k] for k in
                  ("r_in", "r_out", "n_r", "n_theta", "fourier_degree")
                  if k in ecfg}
        trials = int(ecfg.get("trials", 20))
        report = run_comparison_suite(d, trials, args.seed, **kwargs)
        effective_exp = {"kind": kind, "trials": trials, **kwargs}

    write_report(report, out / "report.json")
    _echo_config(args, out, {"command": "experiment", "density": dcfg,
                             "experiment": effective_exp, "seed": args.seed})

    ok = report.all_checks_pass()
    for name, passed in report.checks.items():
        _say(args, f"[{'PASS' if passed else 'FAIL'}] {name}")
    _say(args, f"report written to {out / 'report.json'}")
    return EXIT_OK if ok else EXIT_HYPOTHESIS


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lingrowth",
        description="linear-growth energies: densities, barriers, solves, "
                    "and removability experiments")
    parser.add_argument("--config", default=None, help="JSON config file")
    parser.add_argument("--out", default="out", help="output directory")
    parser.add_argument("--seed", type=int, default=0, help="RNG seed")
    parser.add_argument("--quiet", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("density", help="validate a density")
    p.add_argument("--kind", choices=["area", "mu"])
    p.add_argument("--mu", type=float)
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("catenoid", help="sample a barrier profile")
    p.add_argument("--kind", choices=["area", "mu"])
    p.add_argument("--mu", type=float)
    p.add_argument("--sign", choices=[s.value for s in Sign])
    p.add_argument("--alpha", type=float)
    p.add_argument("--a", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--convention", choices=[a.value for a in Anchor])
    p.add_argument("--rho-min", type=float, dest="rho_min")
    p.add_argument("--rho-max", type=float, dest="rho_max")
    p.add_argument("--samples", type=int)
    p.set_defaults(func=cmd_catenoid)

    p = sub.add_parser("solve", help="one Dirichlet solve")
    p.add_argument("--kind", choices=["area", "mu"])
    p.add_argument("--mu", type=float)
    p.add_argument("--r-in", type=float, dest="r_in")
    p.add_argument("--r-out", type=float, dest="r_out")
    p.add_argument("--n-r", type=int, dest="n_r")
    p.add_argument("--n-theta", type=int, dest="n_theta")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("experiment", help="run an experiment study")
    p.add_argument("--kind", choices=["area", "mu"])
    p.add_argument("--mu", type=float)
    p.add_argument("--experiment-kind", dest="experiment_kind",
                   choices=["removability", "catenoid", "comparison"])
    p.set_defaults(func=cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except NonConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except QuadratureAccuracyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except UndeterminedLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except (ValueError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def entry():  # console-script shim
    sys.exit(main())


if __name__ == "__main__":
    entry()
