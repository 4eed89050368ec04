"""Convex energy densities of linear growth.

A density is a scalar function g : [0, inf) -> R that is C^2, strictly
convex (g'' > 0), has g'(0) = 0, and grows linearly:

    a*t - b <= g(t) <= A*t + B        for all t >= 0.

All derived machinery (barrier profiles, the finite-element solver) assumes
the normalization  lim_{t->inf} g'(t) = 1,  which can always be arranged by
rescaling; :func:`normalize` does exactly that.

Two built-in families are provided:

* the area integrand  g(t) = sqrt(1 + t^2), and
* a one-parameter family defined through  g''(t) = (mu - 1) * (1 + t)^(-mu)
  for mu > 1, which sweeps from slowly-saturating slopes (mu near 1) to
  rapidly-saturating ones (large mu).

The long-run behaviour of a density is summarized by whether the integral
of t * g''(t) over [0, inf) converges; that dichotomy decides whether the
associated radial barriers stay bounded at their neck or blow up, and is
exposed here as :class:`Growth`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq


class Growth(Enum):
    """Convergence class of integral(t * g''(t), t=0..inf)."""

    FINITE_INTEGRAL = "finite"
    INFINITE_INTEGRAL = "infinite"
    UNDETERMINED = "undetermined"


class UndeterminedLimitError(RuntimeError):
    """The asymptotic slope of a density could not be estimated reliably."""


@dataclass(frozen=True)
class TailEstimate:
    """Certified power bound g''(t) <= coeff * (1 + t)**(-exponent).

    Used to truncate improper integrals of g''-weighted quantities with a
    computable remainder.  ``exponent`` must exceed 2 for the bound to give
    a convergent tail.
    """

    exponent: float
    coeff: float


@dataclass(frozen=True, eq=False)
class Density:
    """One convex linear-growth density with its derivatives.

    Instances are immutable value objects; all fields are set at
    construction and the evaluation callables must be pure.  ``eval`` and
    the convenience accessors accept scalars or numpy arrays.

    Attributes
    ----------
    kind : str
        "area", "mu", or "custom".
    gprime_inf : float or None
        Asymptotic slope when known analytically; None means "estimate it
        during :func:`normalize`".
    analytic_inverse : callable or None
        Closed-form inverse of g' on [0, gprime_inf), when available.
    growth : Growth
        Declared convergence class of integral(t * g'').
    tail : TailEstimate or None
        Optional certified power bound on g'' for tail truncation.
    mu : float or None
        Family parameter for kind == "mu".
    """

    kind: str
    _g: Callable
    _gprime: Callable
    _gsecond: Callable
    gprime_inf: Optional[float]
    analytic_inverse: Optional[Callable]
    growth: Growth
    tail: Optional[TailEstimate] = None
    mu: Optional[float] = None
    label: str = "density"

    def eval(self, t):
        """Return the triple (g(t), g'(t), g''(t))."""
        t = np.asarray(t, dtype=float)
        return self._g(t), self._gprime(t), self._gsecond(t)

    def g(self, t):
        return self._g(np.asarray(t, dtype=float))

    def gprime(self, t):
        return self._gprime(np.asarray(t, dtype=float))

    def gsecond(self, t):
        return self._gsecond(np.asarray(t, dtype=float))

    def __repr__(self):  # keep reports readable
        return f"Density({self.label})"


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of sampling-based hypothesis checks on a density.

    ``linear_growth_bounds`` holds witnesses (a_est, b_est, A_est, B_est)
    such that a_est*t - b_est <= g(t) <= A_est*t + B_est at every sample.
    ``derivative_consistency`` is the pair of maximal relative mismatches
    (g' vs. central difference of g, g'' vs. central difference of g').
    """

    linear_growth_bounds: tuple
    derivative_consistency: tuple
    convexity_ok: bool
    origin_ok: bool

    @property
    def hypotheses_ok(self) -> bool:
        a_est, _, A_est, _ = self.linear_growth_bounds
        return bool(self.convexity_ok and self.origin_ok
                    and a_est > 0 and A_est > 0)

    def to_dict(self) -> dict:
        a_est, b_est, A_est, B_est = self.linear_growth_bounds
        dg, dgg = self.derivative_consistency
        return {
            "linear_growth_bounds": {
                "a_est": a_est, "b_est": b_est,
                "A_est": A_est, "B_est": B_est,
            },
            "derivative_consistency": {
                "gprime_vs_g": dg, "gsecond_vs_gprime": dgg,
            },
            "convexity_ok": self.convexity_ok,
            "origin_ok": self.origin_ok,
            "hypotheses_ok": self.hypotheses_ok,
        }


# ---------------------------------------------------------------------------
# constructors


def make_area_density() -> Density:
    """The area integrand g(t) = sqrt(1 + t^2).

    Already normalized (g' -> 1), with closed-form slope inverse
    y -> y / sqrt(1 - y^2).  Its second derivative satisfies
    g''(t) <= 2*sqrt(2) * (1+t)^(-3), so tail integrals of t*g''
    converge.
    """
    return Density(
        kind="area",
        _g=lambda t: np.sqrt(1.0 + t * t),
        _gprime=lambda t: t / np.sqrt(1.0 + t * t),
        _gsecond=lambda t: (1.0 + t * t) ** (-1.5),
        gprime_inf=1.0,
        analytic_inverse=lambda y: y / np.sqrt(1.0 - y * y),
        growth=Growth.FINITE_INTEGRAL,
        tail=TailEstimate(exponent=3.0, coeff=2.0 * math.sqrt(2.0)),
        label="area",
    )


def make_mu_density(mu: float) -> Density:
    """Density with g''(t) = (mu - 1) * (1 + t)**(-mu), g(0) = g'(0) = 0.

    Integrating twice:

        g'(t) = 1 - (1 + t)**(1 - mu)
        g(t)  = t + ((1 + t)**(2 - mu) - 1) / (mu - 2)   for mu != 2
        g(t)  = t - log(1 + t)                           for mu == 2

    The slope limit is 1 for every mu > 1, so the family is already
    normalized.  t * g'' is integrable exactly when mu > 2.

    Raises
    ------
    ValueError
        If mu <= 1 (the profile would not be strictly convex with
        bounded slope).
    """
    if not (mu > 1.0):
        raise ValueError(f"mu must exceed 1, got {mu}")
    mu = float(mu)

    if mu == 2.0:
        def _g(t, _mu=mu):
            return t - np.log1p(t)
    else:
        def _g(t, _mu=mu):
            return t + ((1.0 + t) ** (2.0 - _mu) - 1.0) / (_mu - 2.0)

    def _gprime(t, _mu=mu):
        return 1.0 - (1.0 + t) ** (1.0 - _mu)

    def _gsecond(t, _mu=mu):
        return (_mu - 1.0) * (1.0 + t) ** (-_mu)

    def _inverse(y, _mu=mu):
        return (1.0 - y) ** (-1.0 / (_mu - 1.0)) - 1.0

    growth = Growth.FINITE_INTEGRAL if mu > 2.0 else Growth.INFINITE_INTEGRAL
    return Density(
        kind="mu",
        _g=_g,
        _gprime=_gprime,
        _gsecond=_gsecond,
        gprime_inf=1.0,
        analytic_inverse=_inverse,
        growth=growth,
        tail=TailEstimate(exponent=mu, coeff=mu - 1.0),
        mu=mu,
        label=f"mu({mu:g})",
    )


def make_custom_density(g, gprime, gsecond, *, gprime_inf=None,
                        analytic_inverse=None,
                        growth: Growth = Growth.UNDETERMINED,
                        tail: Optional[TailEstimate] = None,
                        label: str = "custom") -> Density:
    """Wrap user-supplied callables as a density.

    The callables must be vectorized (accept numpy arrays).  Pass
    ``gprime_inf`` when the slope limit is known; otherwise
    :func:`normalize` estimates it from large-argument samples.
    """
    return Density(
        kind="custom", _g=g, _gprime=gprime, _gsecond=gsecond,
        gprime_inf=gprime_inf, analytic_inverse=analytic_inverse,
        growth=growth, tail=tail, label=label,
    )


# ---------------------------------------------------------------------------
# hypothesis checking


_FD_STEP = 1e-5
_ORIGIN_TOL = 1e-8


def validate(d: Density, samples) -> ValidationReport:
    """Check the structural hypotheses of a density on a sample grid.

    Violations are flagged in the report, never raised; only malformed
    sample grids raise.

    Parameters
    ----------
    d : Density
    samples : array_like
        Nonempty increasing grid of nonnegative reals containing 0.
    """
    t = np.asarray(samples, dtype=float)
    if t.size == 0:
        raise ValueError("sample grid is empty")
    if np.any(t < 0):
        raise ValueError("sample grid contains negative points")
    if not np.any(t == 0.0):
        raise ValueError("sample grid must contain 0")
    t = np.sort(t)

    g, gp, gpp = d.eval(t)

    convexity_ok = bool(np.all(gpp > 0.0))
    origin_ok = bool(abs(float(d.gprime(0.0))) <= _ORIGIN_TOL)

    # Linear-growth witnesses.  g is convex, so its largest sampled slope
    # bounds every chord; the intercepts are then read off the samples.
    slope = float(np.max(gp))
    a_est = A_est = slope
    B_est = float(max(0.0, np.max(g - A_est * t)))
    b_est = float(max(0.0, np.max(a_est * t - g)))

    # Derivative consistency by central differences (skip points whose
    # stencil would leave the domain).
    h = _FD_STEP
    inner = t[t >= h]
    cd_g = (d.g(inner + h) - d.g(inner - h)) / (2.0 * h)
    cd_gp = (d.gprime(inner + h) - d.gprime(inner - h)) / (2.0 * h)
    gp_i = d.gprime(inner)
    gpp_i = d.gsecond(inner)
    rel1 = float(np.max(np.abs(cd_g - gp_i) / np.maximum(1.0, np.abs(gp_i))))
    rel2 = float(np.max(np.abs(cd_gp - gpp_i) / np.maximum(1.0, np.abs(gpp_i))))

    return ValidationReport(
        linear_growth_bounds=(a_est, b_est, A_est, B_est),
        derivative_consistency=(rel1, rel2),
        convexity_ok=convexity_ok,
        origin_ok=origin_ok,
    )


# ---------------------------------------------------------------------------
# normalization


_LIMIT_PROBES = (1.0e3, 1.0e4, 1.0e5)
_LIMIT_AGREEMENT = 1e-6


def normalize(d: Density) -> Density:
    """Rescale a density so that its asymptotic slope equals 1.

    Densities that already carry gprime_inf == 1 are returned unchanged.
    When the limit is not declared it is estimated by evaluating g' at
    t = 1e3, 1e4, 1e5; successive estimates must agree to 1e-6 or an
    :class:`UndeterminedLimitError` is raised.
    """
    if d.gprime_inf == 1.0:
        return d

    if d.gprime_inf is not None:
        c = float(d.gprime_inf)
    else:
        probes = [float(d.gprime(T)) for T in _LIMIT_PROBES]
        gaps = [abs(b - a) for a, b in zip(probes, probes[1:])]
        if any(gap > _LIMIT_AGREEMENT for gap in gaps):
            raise UndeterminedLimitError(
                "slope limit estimates at t=1e3,1e4,1e5 disagree: "
                f"{probes} (gaps {gaps}, tolerance {_LIMIT_AGREEMENT})")
        c = probes[-1]

    if not (c > 0.0 and math.isfinite(c)):
        raise UndeterminedLimitError(f"invalid slope limit {c}")

    old_inv = d.analytic_inverse
    new_inv = None if old_inv is None else (lambda y, _c=c: old_inv(y * _c))
    new_tail = None if d.tail is None else replace(d.tail, coeff=d.tail.coeff / c)
    return Density(
        kind=d.kind,
        _g=lambda t, _c=c, _f=d._g: _f(t) / _c,
        _gprime=lambda t, _c=c, _f=d._gprime: _f(t) / _c,
        _gsecond=lambda t, _c=c, _f=d._gsecond: _f(t) / _c,
        gprime_inf=1.0,
        analytic_inverse=new_inv,
        growth=d.growth,
        tail=new_tail,
        mu=d.mu,
        label=d.label + "/normalized",
    )


# ---------------------------------------------------------------------------
# slope inversion


_INVERT_RTOL = 8.9e-16  # brentq floor, about 4 ulp
_BRACKET_CAP = 1e300


def invert_gprime(d: Density, y: float) -> float:
    """Solve g'(t) = y for t, with y in [0, 1) on a normalized density.

    Uses the closed-form inverse when the density carries one; otherwise a
    bracket is grown by doubling from t = 1 and the root is polished to a
    residual below 1e-12 * max(1, y).
    """
    y = float(y)
    if y < 0.0 or y >= 1.0:
        raise ValueError(f"invert_gprime requires 0 <= y < 1, got {y}")
    if y == 0.0:
        return 0.0
    if d.analytic_inverse is not None:
        return float(d.analytic_inverse(y))

    lo, hi = 0.0, 1.0
    while float(d.gprime(hi)) < y:
        lo = hi
        hi *= 2.0
        if hi > _BRACKET_CAP:
            raise ValueError(
                f"slope never reaches {y}; density may not be normalized")
    t = brentq(lambda s: float(d.gprime(s)) - y, lo, hi,
               xtol=1e-15, rtol=_INVERT_RTOL, maxiter=200)
    return float(t)


# ---------------------------------------------------------------------------
# growth classification


_CLASSIFY_EDGES = (0.0, 1.0e2, 1.0e3, 1.0e4, 1.0e5)
_RATIO_FINITE = 0.5     # increments shrinking at least this fast => finite
_RATIO_STEADY = 0.8     # increments at least this steady => infinite
_INCREMENT_FLOOR = 1e-3


def classify_growth(d: Density) -> Growth:
    """Decide whether integral(t * g''(t), t=0..inf) converges.

    Built-in families answer analytically.  Custom densities are probed
    numerically: the integral is accumulated decade by decade up to 1e5
    and the pattern of increments decides.  Shrinking increments
    (successive ratio < 0.5) indicate convergence; steady or growing
    increments of appreciable size indicate divergence; anything in
    between is honestly Undetermined.
    """
    if d.kind == "area":
        return Growth.FINITE_INTEGRAL
    if d.kind == "mu":
        return Growth.FINITE_INTEGRAL if d.mu > 2.0 else Growth.INFINITE_INTEGRAL

    increments = []
    for a, b in zip(_CLASSIFY_EDGES[:-1], _CLASSIFY_EDGES[1:]):
        val, _ = quad(lambda t: t * float(d.gsecond(t)), a, b,
                      epsabs=1e-10, epsrel=1e-8, limit=200)
        increments.append(val)
    deltas = increments[1:]  # growth of I(T) across the three last decades

    if all(dlt <= 1e-12 for dlt in deltas):
        return Growth.FINITE_INTEGRAL
    ratios = []
    for prev, nxt in zip(deltas[:-1], deltas[1:]):
        if prev <= 0.0:
            return Growth.UNDETERMINED
        ratios.append(nxt / prev)
    if all(r < _RATIO_FINITE for r in ratios):
        return Growth.FINITE_INTEGRAL
    if min(deltas) >= _INCREMENT_FLOOR and all(r >= _RATIO_STEADY for r in ratios):
        return Growth.INFINITE_INTEGRAL
    return Growth.UNDETERMINED


# ---------------------------------------------------------------------------
# vector calculus helpers for the field energy G(p) = g(|p|)


def dG(d: Density, p) -> np.ndarray:
    """Gradient of p -> g(|p|): equals g'(|p|) * p / |p|, and 0 at p = 0."""
    p = np.asarray(p, dtype=float)
    norm = float(np.linalg.norm(p))
    if norm == 0.0:
        return np.zeros_like(p)
    return float(d.gprime(norm)) / norm * p


def hessian_G(d: Density, p) -> np.ndarray:
    """Hessian of p -> g(|p|).

    For p != 0 this is
        g''(|p|) * P + (g'(|p|)/|p|) * (I - P),  P = p p^T / |p|^2,
    and g''(0) * I at the origin.  Strict convexity plus monotone slope
    make it symmetric positive definite everywhere.
    """
    p = np.asarray(p, dtype=float)
    k = p.shape[0]
    norm = float(np.linalg.norm(p))
    if norm == 0.0:
        return float(d.gsecond(0.0)) * np.eye(k)
    u = p / norm
    proj = np.outer(u, u)
    gp = float(d.gprime(norm))
    gpp = float(d.gsecond(norm))
    return gpp * proj + (gp / norm) * (np.eye(k) - proj)
