"""Radial barrier profiles: quadrature routes, flux identity, bounds."""

import math

import numpy as np
import pytest

from lingrowth.catenoid import (
    Anchor,
    CatenoidSpec,
    RadialProfile,
    Sign,
    envelope_bound,
    neck_limit,
    ode_residual,
    profile_value,
    profile_value_substituted,
    sample_profile,
    uniform_interior_bound,
)
from lingrowth.density import make_mu_density, normalize


def spec2(sign=Sign.PLUS, alpha=1.0, a=0.0, n=2, anchor=Anchor.NECK):
    return CatenoidSpec(sign=sign, alpha=alpha, offset_a=a, dim_n=n,
                        anchor=anchor)


# -- spec construction ------------------------------------------------------


def test_neck_radius_powers():
    assert spec2(alpha=4.0, n=3).neck_radius == 2.0
    assert spec2(alpha=1.0, n=2).neck_radius == 1.0
    assert spec2(alpha=0.25, n=2).neck_radius == 0.25


@pytest.mark.parametrize("kw", [
    dict(alpha=0.0),
    dict(alpha=-1.0),
    dict(alpha=float("nan")),
    dict(n=1),
    dict(a=float("inf")),
    dict(alpha=1.5, anchor=Anchor.UNIT),
])
def test_spec_rejects_bad_parameters(kw):
    base = dict(sign=Sign.PLUS, alpha=1.0, a=0.0, n=2, anchor=Anchor.NECK)
    base.update(kw)
    with pytest.raises(ValueError):
        spec2(**base)


def test_spec_config_round_trip():
    s = spec2(sign=Sign.MINUS, alpha=0.25, a=1.5, n=3, anchor=Anchor.UNIT)
    assert CatenoidSpec.from_config(s.to_config()) == s


def test_spec_config_rejects_garbage():
    with pytest.raises(ValueError):
        CatenoidSpec.from_config({"sign": "plus", "alpha": 1.0})


# -- golden profile values --------------------------------------------------


def test_area_profile_is_arcosh(area):
    # for g(t)=sqrt(1+t^2), alpha=1, n=2 the profile integral is
    # int dr / sqrt(r^2 - 1) = arcosh(rho)
    s = spec2()
    for rho in (1.1, 2.0, 5.0):
        assert profile_value(area, s, rho) == pytest.approx(
            math.acosh(rho), abs=1e-10)


def test_area_profile_vanishes_at_neck(area):
    s = spec2()
    assert profile_value(area, s, 1.0 + 1e-9) == pytest.approx(0.0, abs=1e-4)
    assert neck_limit(area, s) == 0.0


def test_profile_requires_radius_beyond_neck(area):
    with pytest.raises(ValueError):
        profile_value(area, spec2(), 0.5)
    with pytest.raises(ValueError):
        profile_value(area, spec2(), 1.0)


def test_mu2_unit_anchor_closed_form(mu2):
    # with (g')^{-1}(y) = y/(1-y) the integral from 0.25 is
    # a + r*ln((1-r)/(rho-r)) -> 0.25*ln(3) at rho=0.5 for the MINUS branch
    s = CatenoidSpec(sign=Sign.MINUS, alpha=0.25, offset_a=0.0, dim_n=2,
                     anchor=Anchor.UNIT)
    assert profile_value(mu2, s, 0.5) == pytest.approx(0.25 * math.log(3.0),
                                                       abs=1e-10)


def test_mu2_unit_anchor_blows_up_toward_neck(mu2):
    s = CatenoidSpec(sign=Sign.MINUS, alpha=0.25, offset_a=0.0, dim_n=2,
                     anchor=Anchor.UNIT)
    vals = [profile_value(mu2, s, 0.25 + step)
            for step in (0.1, 0.01, 0.001)]
    assert vals[0] < vals[1] < vals[2]
    assert vals[2] > 1.0
    assert neck_limit(mu2, s) == math.inf  # MINUS branch climbs without bound


def test_neck_limit_sentinels(area, mu2, mu3):
    assert neck_limit(mu2, spec2(sign=Sign.PLUS, a=2.0)) == math.inf
    assert neck_limit(mu2, spec2(sign=Sign.MINUS, a=2.0)) == -math.inf
    assert neck_limit(area, spec2(a=0.7)) == 0.7
    assert neck_limit(mu3, spec2(a=-1.0)) == -1.0


def test_neck_limit_unit_anchor_finite_growth(mu3):
    # anchored at radius 1, the neck value is the full tail integral
    s = CatenoidSpec(sign=Sign.PLUS, alpha=0.5, offset_a=0.0, dim_n=2,
                     anchor=Anchor.UNIT)
    span = profile_value(mu3, s, 1.0) - neck_limit(mu3, s)
    # value at the anchor radius is the offset itself
    assert profile_value(mu3, s, 1.0) == pytest.approx(0.0, abs=1e-10)
    assert span > 0.0
    assert math.isfinite(neck_limit(mu3, s))


# -- parametrization equivalence --------------------------------------------


@pytest.mark.parametrize("mu", [2.5, 3.0, 4.0])
def test_substituted_route_agrees_mu(mu):
    d = normalize(make_mu_density(mu))
    s = spec2(alpha=0.8)
    for rho in np.geomspace(s.neck_radius * 1.001, 10.0, 12):
        direct = profile_value(d, s, float(rho))
        sub = profile_value_substituted(d, s, float(rho))
        assert sub == pytest.approx(direct, abs=1e-8)


def test_substituted_route_agrees_area(area):
    s = spec2()
    for rho in (1.1, 2.0, 5.0):
        assert profile_value_substituted(area, s, rho) == pytest.approx(
            math.acosh(rho), abs=2e-9)


def test_substituted_route_near_neck_mu3(mu3):
    # the substitution absorbs the endpoint singularity, so values just
    # above the neck stay accurate; there the slope behaves like s^(-1/2)
    # in the offset s, giving a 2*sqrt(s) rise
    s = spec2(alpha=1.0)
    v = profile_value_substituted(mu3, s, 1.0 + 1e-6)
    assert v == pytest.approx(2e-3, rel=1e-2)


def test_plus_minus_mirror(area, mu3, rng):
    for d in (area, mu3):
        a = 0.83
        up = CatenoidSpec(Sign.PLUS, 0.6, a, 2, Anchor.NECK)
        dn = CatenoidSpec(Sign.MINUS, 0.6, a, 2, Anchor.NECK)
        for rho in rng.uniform(0.9, 6.0, 8):
            lo = profile_value(d, up, float(rho))
            hi = profile_value(d, dn, float(rho))
            assert (lo - a) == pytest.approx(-(hi - a), abs=1e-12)


def test_higher_dimension_profiles(area):
    # n=3: alpha=1 means neck radius 1, slope (g')^{-1}(1/r^2)
    s = spec2(n=3)
    val = profile_value(area, s, 2.0)
    # oracle: int_1^2 (1/r^2)/sqrt(1-1/r^4) dr via the substitution u=1/r
    # = int_{1/2}^1 du/sqrt(1-u^4); freeze a quadrature-independent value
    from scipy.integrate import quad
    oracle = quad(lambda u: 1.0 / math.sqrt(1.0 - u ** 4), 0.5, 1.0,
                  full_output=1)[0]
    assert val == pytest.approx(oracle, abs=1e-8)


# -- sampled profiles and the flux identity ----------------------------------


def test_sample_profile_flux_residual(area, mu3):
    for d, alpha in ((area, 1.0), (mu3, 0.5)):
        s = spec2(alpha=alpha)
        prof = sample_profile(d, s, s.neck_radius * 1.01, 8.0, 60)
        assert len(prof.rho) == 60
        assert ode_residual(d, prof) <= 1e-9


def test_sample_profile_dimension_sweep(area):
    for n in (2, 3, 5):
        s = spec2(n=n, alpha=0.7)
        prof = sample_profile(area, s, s.neck_radius * 1.05, 4.0, 40)
        assert ode_residual(area, prof) <= 1e-9


def test_perturbed_slopes_break_flux_identity(area):
    s = spec2()
    prof = sample_profile(area, s, 1.1, 5.0, 30)
    bad = RadialProfile(alpha=prof.alpha, dim_n=prof.dim_n, rho=prof.rho,
                        values=prof.values, slopes=prof.slopes + 0.01,
                        neck_radius=prof.neck_radius,
                        neck_finite=prof.neck_finite)
    assert ode_residual(area, bad) > 1e-4


def test_zero_slope_profile_residual_equals_flux(area):
    flat = RadialProfile(alpha=0.3, dim_n=2, rho=np.linspace(1.0, 2.0, 10),
                         values=np.zeros(10), slopes=np.zeros(10),
                         neck_radius=0.3, neck_finite=True)
    assert ode_residual(area, flat) == pytest.approx(0.3, abs=1e-15)


def test_profile_csv_layout(area, tmp_path):
    prof = sample_profile(area, spec2(), 1.1, 3.0, 12)
    path = tmp_path / "profile.csv"
    prof.write_csv(path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "rho,value,slope"
    assert len(lines) == 13


def test_sample_profile_monotone_radii_and_values(mu2):
    s = CatenoidSpec(Sign.MINUS, 0.5, 3.0, 2, Anchor.UNIT)
    prof = sample_profile(mu2, s, 0.51, 4.0, 50)
    assert np.all(np.diff(prof.rho) > 0)
    # MINUS branch decreases in rho
    assert np.all(np.diff(prof.values) < 0)


# -- envelope and uniform bounds --------------------------------------------


def test_envelope_closed_form(area):
    # alpha = r = 0.1: 0.1 * [ln(t + sqrt(t^2 - 0.01))] from 0.5 to 1
    want = 0.1 * (math.log(1 + math.sqrt(0.99))
                  - math.log(0.5 + math.sqrt(0.24)))
    got = envelope_bound(area, 0.1, 0.5, 1.0, 0.0, 2)
    assert got == pytest.approx(want, abs=1e-10)
    assert got == pytest.approx(0.0701, abs=5e-5)


def test_envelope_offsets_by_outer_max(area):
    base = envelope_bound(area, 0.1, 0.5, 1.0, 0.0, 2)
    assert envelope_bound(area, 0.1, 0.5, 1.0, 2.5, 2) == pytest.approx(
        base + 2.5, abs=1e-12)


def test_envelope_vanishes_with_puncture_radius(area):
    vals = [envelope_bound(area, r, 0.5, 1.0, 0.0, 2)
            for r in (0.2, 0.1, 0.05, 0.025, 1e-4)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 1e-3


def test_envelope_monotone_in_puncture_radius(mu2):
    vals = [envelope_bound(mu2, r, 0.5, 1.0, 0.0, 2)
            for r in np.linspace(0.01, 0.4, 10)]
    assert all(a < b for a, b in zip(vals, vals[1:]))


def test_envelope_argument_ordering(area):
    with pytest.raises(ValueError):
        envelope_bound(area, 0.6, 0.5, 1.0, 0.0, 2)
    with pytest.raises(ValueError):
        envelope_bound(area, 0.1, 1.5, 1.0, 0.0, 2)


def test_envelope_matches_profile_construction(area, mu3):
    # the bound is the MINUS profile with alpha = r^{n-1}, offset chosen so
    # the curve passes through the outer value at radius R
    for d in (area, mu3):
        for r in (0.05, 0.2):
            for rho in (0.4, 0.7):
                s = CatenoidSpec(Sign.MINUS, r, 0.0, 2, Anchor.NECK)
                drop = profile_value(d, s, rho) - profile_value(d, s, 1.0)
                want = 3.0 + drop
                got = envelope_bound(d, r, rho, 1.0, 3.0, 2)
                assert got == pytest.approx(want, abs=1e-8)


def test_uniform_bound_mu2_closed_form(mu2):
    # (g')^{-1}(1/2) = 1 for this family
    assert uniform_interior_bound(mu2, 2.0, 0.25) == pytest.approx(2.75, abs=1e-12)
    assert uniform_interior_bound(mu2, 0.0, 0.999) == pytest.approx(
        0.001, abs=1e-12)


def test_uniform_bound_needs_divergent_tail(area):
    with pytest.raises(ValueError):
        uniform_interior_bound(area, 0.0, 0.5)


def test_uniform_bound_dominates_barrier(mu2):
    # the interior estimate sits above the MINUS profile with
    # alpha = x^{n-1}/2, anchored to vanish at radius 1
    for x_norm in (0.2, 0.5, 0.8):
        s = CatenoidSpec(Sign.MINUS, x_norm / 2.0, 0.0, 2, Anchor.UNIT)
        climb = profile_value(mu2, s, x_norm)
        assert climb > 0.0
        assert uniform_interior_bound(mu2, 0.0, x_norm) >= climb - 1e-10


def test_uniform_bound_domain(mu2):
    for bad in (0.0, 1.0, -0.3, 1.4):
        with pytest.raises(ValueError):
            uniform_interior_bound(mu2, 0.0, bad)
