"""JSON config schema: densities, barrier specs, solver options.

Densities round-trip through  {"kind": "area"}  or
{"kind": "mu", "mu": 3.0};  custom densities are code-only and have no
config form.
"""

from __future__ import annotations

from .catenoid import CatenoidSpec
from .density import Density, make_area_density, make_mu_density
from .solver import SolverOptions


def density_from_config(cfg: dict) -> Density:
    if not isinstance(cfg, dict) or "kind" not in cfg:
        raise ValueError(f"density config needs a 'kind' field, got {cfg!r}")
    kind = cfg["kind"]
    if kind == "area":
        return make_area_density()
    if kind == "mu":
        if "mu" not in cfg:
            raise ValueError("mu density config needs a 'mu' field")
        return make_mu_density(float(cfg["mu"]))
    raise ValueError(f"unknown density kind {kind!r}")


def density_to_config(d: Density) -> dict:
    if d.kind == "area":
        return {"kind": "area"}
    if d.kind == "mu":
        return {"kind": "mu", "mu": d.mu}
    raise ValueError(f"density kind {d.kind!r} has no config form")


def catenoid_spec_from_config(cfg: dict) -> CatenoidSpec:
    return CatenoidSpec.from_config(cfg)


def catenoid_spec_to_config(spec: CatenoidSpec) -> dict:
    return spec.to_config()


def solver_options_from_config(cfg: dict) -> SolverOptions:
    return SolverOptions.from_config(cfg)
