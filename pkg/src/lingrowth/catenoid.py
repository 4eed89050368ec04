"""Radial catenoid-type barriers for linear-growth densities.

For a normalized density g and flux constant alpha > 0, the rotationally
symmetric functions

    k(x) = a +/- integral( (g')^{-1}(alpha / r^(n-1)), r = anchor..|x| )

solve the Euler-Lagrange equation of the energy  integral g(|grad u|)  away
from the origin.  Their graphs are generalized catenoids: the integrand
blows up as r decreases to the *neck radius*  alpha^(1/(n-1)),  where the
slope becomes vertical.

Two anchoring conventions are supported:

* ``Anchor.NECK``  -- integrate from the neck itself.  The profile tends to
  the offset ``a`` at the neck when integral(t * g'') converges, and the
  defining integral is +inf otherwise (reported as an inf sentinel).
* ``Anchor.UNIT``  -- integrate from radius 1, which requires the flux to
  satisfy 0 < alpha < 1 so the neck sits strictly inside radius 1.  The
  profile is finite at every radius above the neck even for densities whose
  neck integral diverges; it blows up only in the neck limit.

Every profile obeys the first-order flux identity

    r^(n-1) * g'(|k'(r)|) = alpha,

which :func:`ode_residual` checks a posteriori, and the same integrals give
sharp interior envelopes for solutions with an excised inner disk
(:func:`envelope_bound`, :func:`uniform_interior_bound`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from scipy.integrate import quad

from .density import Density, Growth, classify_growth, invert_gprime

# Certified absolute accuracy demanded from every profile quadrature.
# The direct route's integrand loses digits to cancellation in
# 1 - alpha/r^(n-1) as r approaches the neck, which puts QUADPACK's
# achievable error bound near 1e-10 there; 1e-9 keeps the contract
# honest while staying an order of magnitude below the 1e-8 agreement
# tolerances downstream.
QUAD_ABS_TOL = 1e-9
_NEAR_NECK_FRACTION = 0.1


class Sign(Enum):
    PLUS = "plus"
    MINUS = "minus"

    @property
    def factor(self) -> float:
        return 1.0 if self is Sign.PLUS else -1.0


class Anchor(Enum):
    """Lower limit of the defining integral: the neck circle or radius 1."""

    NECK = "neck"
    UNIT = "unit"


class QuadratureAccuracyError(RuntimeError):
    """Adaptive quadrature could not meet the requested tolerance."""

    def __init__(self, message: str, achieved: float):
        super().__init__(f"{message} (achieved error bound {achieved:.3e})")
        self.achieved = achieved


@dataclass(frozen=True)
class CatenoidSpec:
    """Parameters of one radial barrier profile.

    Attributes
    ----------
    sign : Sign
        Whether the profile increases (PLUS) or decreases (MINUS) with
        radius.
    alpha : float
        Flux constant, > 0.  With Anchor.UNIT it must lie in (0, 1).
    offset_a : float
        Additive offset: the value at the anchor radius.
    dim_n : int
        Ambient dimension, >= 2.
    anchor : Anchor
    """

    sign: Sign
    alpha: float
    offset_a: float
    dim_n: int
    anchor: Anchor = Anchor.NECK

    def __post_init__(self):
        if not (self.alpha > 0.0 and math.isfinite(self.alpha)):
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not (isinstance(self.dim_n, int) and self.dim_n >= 2):
            raise ValueError(f"dim_n must be an integer >= 2, got {self.dim_n}")
        if not math.isfinite(self.offset_a):
            raise ValueError(f"offset_a must be finite, got {self.offset_a}")
        if self.anchor is Anchor.UNIT and not (self.alpha < 1.0):
            raise ValueError(
                f"unit anchoring requires 0 < alpha < 1, got {self.alpha}")

    @property
    def neck_radius(self) -> float:
        return self.alpha ** (1.0 / (self.dim_n - 1))

    def to_config(self) -> dict:
        return {
            "sign": self.sign.value,
            "alpha": self.alpha,
            "a": self.offset_a,
            "n": self.dim_n,
            "convention": self.anchor.value,
        }

    @staticmethod
    def from_config(cfg: dict) -> "CatenoidSpec":
        try:
            return CatenoidSpec(
                sign=Sign(cfg["sign"]),
                alpha=float(cfg["alpha"]),
                offset_a=float(cfg["a"]),
                dim_n=int(cfg["n"]),
                anchor=Anchor(cfg["convention"]),
            )
        except (KeyError, ValueError) as exc:
            raise ValueError(f"malformed catenoid config {cfg!r}: {exc}") from exc


# ---------------------------------------------------------------------------
# quadrature plumbing


def _require_normalized(d: Density):
    if d.gprime_inf != 1.0:
        raise ValueError(
            f"density {d.label!r} must be normalized (gprime_inf == 1); "
            "call normalize() first")


def _checked_quad(f, lo, hi, *, abs_tol=QUAD_ABS_TOL, what="integral"):
    # full_output=1 keeps QUADPACK from warning when it stops early; the
    # achieved error bound is checked against the contract instead.
    out = quad(f, lo, hi, epsabs=abs_tol * 1e-2, epsrel=1e-12,
               limit=200, full_output=1)
    val, err = out[0], out[1]
    if err > abs_tol:
        raise QuadratureAccuracyError(f"{what} did not converge", err)
    return val


def _decade_points(lo: float, hi: float) -> list:
    """Split [lo, hi] at powers of ten: wide smooth tails integrate best
    one decade at a time."""
    pts = [lo]
    p = 10.0 ** math.ceil(math.log10(lo) + 1e-12)
    while p < hi:
        if p > pts[-1] * 1.0001:
            pts.append(p)
        p *= 10.0
    pts.append(hi)
    return pts


def _radial_integrand(d: Density, alpha: float, n: int):
    def f(r):
        y = alpha / r ** (n - 1)
        if y >= 1.0:
            y = 1.0 - 1e-16  # only reachable by endpoint roundoff
        return invert_gprime(d, y)
    return f


def _radial_integral(d: Density, alpha: float, n: int,
                     r_lo: float, r_hi: float) -> float:
    """integral( (g')^{-1}(alpha / r^{n-1}), r = r_lo..r_hi ), r_lo <= r_hi.

    The integrand may be (integrably) singular at r_lo when r_lo equals the
    neck radius; Gauss-Kronrod panels never evaluate the endpoints, and the
    QUADPACK extrapolation handles the algebraic blow-up.
    """
    if r_lo == r_hi:
        return 0.0
    return _checked_quad(_radial_integrand(d, alpha, n), r_lo, r_hi,
                         what="radial profile integral")


def _slope_parameter(d: Density, alpha: float, n: int, rho: float) -> float:
    """s*(rho): the slope the profile attains at radius rho."""
    return invert_gprime(d, alpha / rho ** (n - 1))


def _substituted_integrand(d: Density, n: int):
    expo = -n / (n - 1.0)

    def phi(s):
        gp = float(d.gprime(s))
        return s * float(d.gsecond(s)) * gp ** expo / (n - 1.0)
    return phi


def _tail_cutoff(d: Density, n: int, s_lo: float, abs_tol: float) -> float:
    """Upper integration limit S making the neglected substituted tail
    provably below abs_tol.

    With a certified bound g''(s) <= c (1+s)^(-m), m > 2, and using
    g'(s) >= 1/2 beyond the half-slope point:

        tail(S) <= 2^(n/(n-1)) * c / ((m-2)(n-1)) * (1+S)^(2-m).
    """
    s_half = invert_gprime(d, 0.5)
    if d.tail is not None and d.tail.exponent > 2.0:
        m, c = d.tail.exponent, d.tail.coeff
        factor = 2.0 ** (n / (n - 1.0)) * c / ((m - 2.0) * (n - 1.0))
        S = (factor / abs_tol) ** (1.0 / (m - 2.0)) - 1.0
    else:
        # best-effort truncation where the slope has essentially saturated
        S = invert_gprime(d, 1.0 - 1e-8)
    return max(10.0 * max(s_lo, 1.0), s_half, S)


def _substituted_integral(d: Density, n: int, s_lo: float,
                          s_hi: float) -> float:
    """integral( s g''(s) g'(s)^{-n/(n-1)} / (n-1), s = s_lo..s_hi ).

    This is the neck-regular reparametrization of the radial profile
    integral by slope: substituting r^{n-1} = alpha/g'(s) turns the
    vertical-slope endpoint into a decaying tail in s.  ``s_hi`` may be
    inf, in which case the integral is truncated with a certified
    remainder (see :func:`_tail_cutoff`).
    """
    phi = _substituted_integrand(d, n)
    budget = QUAD_ABS_TOL
    if math.isinf(s_hi):
        s_hi = _tail_cutoff(d, n, s_lo, budget * 0.1)
        budget *= 0.9
    if s_hi <= s_lo:
        return 0.0
    points = _decade_points(s_lo, s_hi)
    per_panel = budget / len(points)
    total = 0.0
    for a, b in zip(points[:-1], points[1:]):
        total += _checked_quad(phi, a, b, abs_tol=per_panel,
                               what="substituted profile integral")
    return total


def _signed_span(d, spec, rho, integrate):
    """integral from the anchor radius to rho, computed by ``integrate``
    over an ordered interval and signed by orientation."""
    anchor_r = spec.neck_radius if spec.anchor is Anchor.NECK else 1.0
    if rho >= anchor_r:
        return integrate(anchor_r, rho)
    return -integrate(rho, anchor_r)


def _known_growth(d: Density) -> Growth:
    return d.growth if d.growth is not Growth.UNDETERMINED else classify_growth(d)


def _check_radius(spec: CatenoidSpec, rho: float):
    if not (rho > spec.neck_radius):
        raise ValueError(
            f"radius {rho} is not above the neck radius "
            f"{spec.neck_radius:.12g}; the profile is undefined there")


# ---------------------------------------------------------------------------
# profile evaluation: two independent routes


def profile_value(d: Density, spec: CatenoidSpec, rho: float) -> float:
    """Profile value at radius rho by direct radial quadrature.

    Evaluates  a + sign * integral((g')^{-1}(alpha/r^{n-1}), anchor..rho)
    with adaptive Gauss-Kronrod panels at absolute tolerance 1e-10.  When
    rho sits within 10% of the neck the integrand is too steep for the
    radial variable and the evaluation is delegated to the slope
    parametrization (:func:`profile_value_substituted`).

    For neck-anchored profiles of a density with divergent neck integral
    the defining integral is infinite at every radius; the result is the
    signed inf sentinel rather than a finite number.
    """
    _require_normalized(d)
    rho = float(rho)
    _check_radius(spec, rho)
    neck = spec.neck_radius

    if spec.anchor is Anchor.NECK and _known_growth(d) is Growth.INFINITE_INTEGRAL:
        return spec.offset_a + spec.sign.factor * math.inf

    if rho - neck < _NEAR_NECK_FRACTION * neck:
        return profile_value_substituted(d, spec, rho)

    span = _signed_span(
        d, spec, rho,
        lambda lo, hi: _radial_integral(d, spec.alpha, spec.dim_n, lo, hi))
    return spec.offset_a + spec.sign.factor * span


def profile_value_substituted(d: Density, spec: CatenoidSpec,
                              rho: float) -> float:
    """Profile value at radius rho via the slope reparametrization.

    Independent evaluation route: substituting r^{n-1} = alpha/g'(s) maps
    the radial integral to

        alpha^{1/(n-1)} * integral( s g''(s) g'(s)^{-n/(n-1)} / (n-1) )

    between the slopes attained at the endpoints; the neck corresponds to
    s = inf.  Needs only forward evaluations of g', g'' away from the
    anchor, so it cross-checks the inverse-based radial route.
    """
    _require_normalized(d)
    rho = float(rho)
    _check_radius(spec, rho)

    n = spec.dim_n
    prefactor = spec.alpha ** (1.0 / (n - 1))
    s_rho = _slope_parameter(d, spec.alpha, n, rho)

    if spec.anchor is Anchor.NECK:
        if _known_growth(d) is Growth.INFINITE_INTEGRAL:
            return spec.offset_a + spec.sign.factor * math.inf
        span = prefactor * _substituted_integral(d, n, s_rho, math.inf)
    else:
        s_one = _slope_parameter(d, spec.alpha, n, 1.0)
        if s_rho <= s_one:  # rho >= 1: integrate up in radius = down in slope
            span = prefactor * _substituted_integral(d, n, s_rho, s_one)
        else:
            span = -prefactor * _substituted_integral(d, n, s_one, s_rho)
    return spec.offset_a + spec.sign.factor * span


def neck_limit(d: Density, spec: CatenoidSpec) -> float:
    """Limiting profile value as the radius decreases to the neck.

    Finite exactly when integral(t * g'') converges: neck-anchored
    profiles then tend to their offset, unit-anchored ones to the offset
    minus the signed full span between neck and radius 1.  In the
    divergent case the limit is the signed inf sentinel.
    """
    _require_normalized(d)
    growth = _known_growth(d)
    if growth is Growth.UNDETERMINED:
        raise ValueError(
            "cannot form the neck limit: growth class is undetermined")
    if spec.anchor is Anchor.NECK:
        if growth is Growth.INFINITE_INTEGRAL:
            return spec.offset_a + spec.sign.factor * math.inf
        return spec.offset_a
    if growth is Growth.INFINITE_INTEGRAL:
        return spec.offset_a - spec.sign.factor * math.inf
    n = spec.dim_n
    s_one = _slope_parameter(d, spec.alpha, n, 1.0)
    span = spec.alpha ** (1.0 / (n - 1)) * _substituted_integral(
        d, n, s_one, math.inf)
    return spec.offset_a - spec.sign.factor * span


# ---------------------------------------------------------------------------
# sampled profiles


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """A sampled radial profile: radii, values, and slopes.

    ``slopes[i]`` is the signed derivative of the profile at ``rho[i]``;
    for a profile generated from a spec it equals
    sign * (g')^{-1}(alpha / rho^{n-1}).
    """

    alpha: float
    dim_n: int
    rho: np.ndarray
    values: np.ndarray
    slopes: np.ndarray
    neck_radius: float
    neck_finite: bool

    def __post_init__(self):
        if not (len(self.rho) == len(self.values) == len(self.slopes)):
            raise ValueError("rho, values, slopes must have equal length")

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            fh.write("rho,value,slope\n")
            for r, v, s in zip(self.rho, self.values, self.slopes):
                fh.write(f"{r:.12g},{v:.12g},{s:.12g}\n")


def sample_profile(d: Density, spec: CatenoidSpec, rho_min: float,
                   rho_max: float, num: int = 200) -> RadialProfile:
    """Sample a profile on a geometric grid accumulating at the neck.

    The offsets rho - neck are geometrically spaced between the requested
    endpoints, which resolves the steep region without wasting points on
    the flat wings.
    """
    _require_normalized(d)
    neck = spec.neck_radius
    if not (neck < rho_min < rho_max):
        raise ValueError(
            f"need neck < rho_min < rho_max, got neck={neck:.12g}, "
            f"rho_min={rho_min}, rho_max={rho_max}")
    if num < 2:
        raise ValueError("need at least two samples")
    offsets = np.geomspace(rho_min - neck, rho_max - neck, num)
    rho = neck + offsets
    values = np.array([profile_value(d, spec, r) for r in rho])
    slopes = spec.sign.factor * np.array(
        [invert_gprime(d, spec.alpha / r ** (spec.dim_n - 1)) for r in rho])
    return RadialProfile(
        alpha=spec.alpha, dim_n=spec.dim_n,
        rho=rho, values=values, slopes=slopes,
        neck_radius=neck,
        neck_finite=_known_growth(d) is Growth.FINITE_INTEGRAL,
    )


def ode_residual(d: Density, profile: RadialProfile) -> float:
    """Max violation of the flux identity r^{n-1} g'(|k'|) = alpha.

    A correct profile keeps this below 1e-9; a constant profile (zero
    slope) scores exactly alpha because g'(0) = 0.
    """
    _require_normalized(d)
    r = np.asarray(profile.rho, dtype=float)
    s = np.abs(np.asarray(profile.slopes, dtype=float))
    flux = r ** (profile.dim_n - 1) * np.asarray(d.gprime(s), dtype=float)
    return float(np.max(np.abs(flux - profile.alpha)))


# ---------------------------------------------------------------------------
# interior envelopes


def envelope_bound(d: Density, r: float, rho: float, R: float,
                   outer_value: float, n: int) -> float:
    """Sharp interior upper envelope from a barrier of neck radius r.

    Returns  outer_value + integral( (g')^{-1}(r^{n-1}/t^{n-1}),
    t = rho..R ), the value at radius rho of the decreasing barrier that
    equals outer_value on the sphere of radius R.  Requires
    0 < r < rho < R.  As r -> 0 the integral vanishes and the envelope
    collapses to the outer bound.
    """
    _require_normalized(d)
    if not (0.0 < r < rho < R):
        raise ValueError(f"need 0 < r < rho < R, got r={r}, rho={rho}, R={R}")
    alpha = r ** (n - 1)
    return outer_value + _radial_integral(d, alpha, n, rho, R)


def uniform_interior_bound(d: Density, a: float, x_norm: float) -> float:
    """Interior bound a + (1 - |x|) * (g')^{-1}(1/2) on the unit ball.

    Applies to densities with divergent neck integral, whose barriers
    blow up at their necks: choosing the flux so the neck passes through
    radius |x|/2^{1/(n-1)} caps the barrier slope at (g')^{-1}(1/2) on
    the whole segment from |x| to 1, independent of the dimension.
    """
    _require_normalized(d)
    if not (0.0 < x_norm < 1.0):
        raise ValueError(f"x_norm must lie in (0, 1), got {x_norm}")
    if _known_growth(d) is not Growth.INFINITE_INTEGRAL:
        raise ValueError(
            "the uniform interior bound applies to densities with "
            "divergent neck integral (infinite growth class)")
    return a + (1.0 - x_norm) * invert_gprime(d, 0.5)
