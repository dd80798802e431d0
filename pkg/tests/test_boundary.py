import math
import time
import warnings

import numpy as np
import pytest

from freebound.boundary import (
    GcaBoundary,
    integral_equation_residual,
    p_func,
    phi,
    solve_z0,
    solve_z_star,
    sqrt_law_constant,
)
from freebound.errors import AssumptionViolated, DegenerateMarket
from freebound.model import ModelParams, derive_params, validate_assumption
from freebound.numerics import integrate
from freebound.utility import DualUtilityFamily

# frozen oracle values (30-digit closed-form evaluation, baseline parameters)
POWER_Z0 = 0.44690893801104824
POWER_ZSTAR = -0.23794839243562305
POWER_BSTAR = 2.7023032686081068
POWER_GCA_TMAX = 0.31546557420924775
POWER_X0 = 1.532096109810538
POWER_XT = 1.4090909090909091
NONH_Z0 = 0.48799416746628051
NONH_ZSTAR = -0.15609045114538492
NONH_BSTAR = 3.0552619262060306
NONH_GCA_TMAX = 0.3567107233807256
NONH_X0 = 1.7300305772841218
NONH_XT = 1.5188128658269147
SQRT_LAW = 0.562907657024788177
LAMBDA_TABLE1 = -4.2816103031751148


class TestPhi:
    def test_zero_at_z0(self, derived, power):
        assert abs(phi(POWER_Z0, derived, power)) < 1e-10

    def test_zero_floor_form(self, derived):
        # with no floor the linear term disappears
        u = DualUtilityFamily.non_hara(K=0.0)
        a1 = -3.0 - derived.kappa - derived.rho / -3.0
        a2 = -1.0 - derived.kappa - derived.rho / -1.0
        for z in (-1.0, 0.5, 3.0):
            expected = a1 * math.exp(-3 * z) + a2 * math.exp(-z)
            assert abs(phi(z, derived, u) - expected) < 1e-12
        assert phi(30.0, derived, u) > 0.0

    def test_strictly_decreasing(self, derived, power):
        zs = np.linspace(-3, 3, 61)
        vals = phi(zs, derived, power)
        assert np.all(np.diff(vals) < 0)


class TestPFunc:
    def test_zero_at_z_star(self, derived, power):
        assert abs(p_func(POWER_ZSTAR, derived, power)) < 1e-9

    def test_limit_at_infinity(self, derived, power):
        expected = -1.0 * (1.0 - LAMBDA_TABLE1)
        assert abs(p_func(40.0, derived, power) - expected) < 1e-9
        assert abs(expected + 5.2816103031751148) < 1e-12

    def test_strictly_decreasing(self, derived, power):
        zs = np.linspace(-3, 3, 61)
        vals = [p_func(float(z), derived, power) for z in zs]
        assert np.all(np.diff(vals) < 0)

    def test_assumption_required(self, derived):
        u = DualUtilityFamily.non_hara(K=0.0)
        with pytest.raises(AssumptionViolated):
            p_func(0.0, derived, u)


class TestLevels:
    def test_power_levels(self, derived, power):
        assert abs(solve_z0(derived, power) - POWER_Z0) < 1e-9
        assert abs(solve_z_star(derived, power) - POWER_ZSTAR) < 1e-9

    def test_non_hara_levels(self, derived, non_hara):
        assert abs(solve_z0(derived, non_hara) - NONH_Z0) < 1e-9
        assert abs(solve_z_star(derived, non_hara) - NONH_ZSTAR) < 1e-9

    def test_floor_scaling(self, params, derived):
        # for a single exponent the short-maturity level shifts by log(2)/(q-1)
        u1 = DualUtilityFamily.power(0.5, K=1.0)
        u2 = DualUtilityFamily.power(0.5, K=2.0)
        shift = solve_z0(derived, u2) - solve_z0(derived, u1)
        assert abs(shift - math.log(2.0) / (-2.0)) < 1e-12

    def test_custom_family_by_root_finding(self, derived):
        # no closed form for the custom tag; the root must match the power one
        u = DualUtilityFamily.custom([-1.0], K=1.0)
        assert abs(solve_z0(derived, u) - POWER_Z0) < 1e-9
        assert abs(solve_z_star(derived, u) - POWER_ZSTAR) < 1e-9

    def test_closed_form_agreement_random(self):
        rng = np.random.default_rng(29)
        found = 0
        while found < 100:
            p = ModelParams(
                mu=rng.uniform(0.02, 0.2),
                r=rng.uniform(0.005, 0.1),
                sigma=rng.uniform(0.08, 0.6),
                beta=rng.uniform(0.01, 0.25),
                T=rng.uniform(0.25, 5.0),
                K=rng.uniform(0.05, 3.0),
            )
            u = (
                DualUtilityFamily.power(rng.uniform(0.2, 0.8), p.K)
                if found % 2
                else DualUtilityFamily.non_hara(p.K)
            )
            try:
                validate_assumption(p, u)
            except (AssumptionViolated, DegenerateMarket):
                continue
            d = derive_params(p)
            # solve_z0/solve_z_star assert root-vs-closed-form agreement internally
            z0 = solve_z0(d, u)
            zs = solve_z_star(d, u)
            assert zs < z0
            found += 1


class TestSqrtLawConstant:
    def test_value_and_runtime(self):
        sqrt_law_constant.cache_clear()
        t0 = time.perf_counter()
        a = sqrt_law_constant()
        elapsed = time.perf_counter() - t0
        assert abs(a - SQRT_LAW) < 1e-12
        assert elapsed < 0.05

    def test_bracket_signs(self):
        def combo(a):
            integral = integrate(
                lambda e: np.exp(-(a * a) * e**2) * (3 * e**2 + e**4) / (1 + e**2) ** 2,
                0.0,
                1.0,
                order=64,
                vectorized=True,
            )
            return 0.5 * math.exp(-a * a) - 0.5 * math.sqrt(math.pi) * a + a * a * integral

        assert combo(0.1) > 0
        assert combo(2.0) < 0
        assert abs(combo(sqrt_law_constant())) < 1e-12


class TestCurve:
    def test_frozen_values(self, boundary_power, boundary_non_hara, derived):
        assert abs(boundary_power.b_star - POWER_BSTAR) < 1e-10
        assert abs(boundary_power.curve(derived.tau_max) - POWER_GCA_TMAX) < 1e-10
        assert abs(boundary_non_hara.b_star - NONH_BSTAR) < 1e-10
        assert abs(boundary_non_hara.curve(derived.tau_max) - NONH_GCA_TMAX) < 1e-10

    def test_short_end_exact(self, boundary_power):
        assert boundary_power.curve(0.0) == boundary_power.z0

    def test_long_end(self, boundary_power, derived):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            far = boundary_power.curve(1e3 * derived.tau_max)
        assert abs(far - boundary_power.z_star) <= 1e-6

    def test_monotone_and_range(self, boundary_power, derived):
        taus = np.linspace(1e-9, derived.tau_max, 200)
        vals = [boundary_power.curve(float(t)) for t in taus]
        assert np.all(np.diff(vals) < 0)
        assert all(boundary_power.z_star < v <= boundary_power.z0 for v in vals)

    def test_square_root_law(self, boundary_power):
        for tau in (1e-6, 1e-8):
            ratio = (boundary_power.z0 - boundary_power.curve(tau)) / (
                2.0 * boundary_power.coeff * math.sqrt(tau)
            )
            assert abs(ratio - 1.0) < 1e-3

    def test_deriv_matches_finite_difference(self, boundary_power):
        tau, h = 0.006, 1e-8
        fd = (boundary_power.curve(tau + h) - boundary_power.curve(tau - h)) / (2 * h)
        assert abs(fd - boundary_power.curve_deriv(tau)) < 1e-5 * abs(fd)

    def test_extrapolation_warns(self, boundary_power, derived):
        with pytest.warns(UserWarning):
            boundary_power.curve(2.0 * derived.tau_max)


class TestPrimalBoundary:
    def test_frozen_endpoints(self, boundary_power, boundary_non_hara):
        assert abs(boundary_power.primal_boundary(0.0) - POWER_X0) < 1e-9
        assert abs(boundary_power.primal_boundary(1.0) - POWER_XT) < 1e-12
        assert abs(boundary_non_hara.primal_boundary(0.0) - NONH_X0) < 1e-9
        assert abs(boundary_non_hara.primal_boundary(1.0) - NONH_XT) < 1e-12

    def test_strictly_decreasing(self, boundary_power):
        ts = np.linspace(0.0, 1.0, 101)
        xs = [boundary_power.primal_boundary(float(t)) for t in ts]
        assert np.all(np.diff(xs) < 0)

    def test_terminal_closed_form(self, boundary_power, derived, power):
        # e^{(q-1) z0} equals floor * nu / A1 for the single-exponent family
        expected = 1.0 * derived.nu / 8.8 + 1.0
        assert abs(boundary_power.primal_boundary(1.0) - expected) < 1e-10


class TestIntegralEquationResidual:
    def test_frozen_curve_vanishes_short(self, boundary_power, derived, power):
        # with the curve pinned at its short-maturity level the residual decays
        # like sqrt(tau) (both integrals vanish in the limit)
        z0 = boundary_power.z0
        resid = [
            abs(integral_equation_residual(tau, lambda s: z0, lambda s: 0.0, derived, power, z0=z0))
            for tau in (1e-2, 1e-4, 1e-6, 1e-8)
        ]
        assert resid[0] > resid[1] > resid[2] > resid[3]
        assert resid[3] < 1e-3
        # sqrt-rate: each hundredfold tau cut shrinks the residual ~tenfold
        assert resid[3] < 0.2 * resid[2]

    def test_gca_residual_small(self, boundary_power, derived, power):
        tau = derived.tau_max
        resid = integral_equation_residual(
            tau,
            boundary_power.curve,
            boundary_power.curve_deriv,
            derived,
            power,
            z0=boundary_power.z0,
        )
        scale = abs(
            phi(boundary_power.z_star, derived, power)
            * (boundary_power.z0 - boundary_power.z_star)
        )
        assert abs(resid) < 0.05 * scale

    def test_gca_beats_frozen_curve(self, boundary_power, derived, power):
        tau = derived.tau_max
        z0 = boundary_power.z0
        r_gca = integral_equation_residual(
            tau, boundary_power.curve, boundary_power.curve_deriv, derived, power, z0=z0
        )
        r_frozen = integral_equation_residual(
            tau, lambda s: z0, lambda s: 0.0, derived, power, z0=z0
        )
        assert abs(r_gca) < abs(r_frozen)


class TestGcaBoundaryInvariants:
    def test_ordering_and_coeff(self, boundary_power, boundary_non_hara):
        for b in (boundary_power, boundary_non_hara):
            assert b.z_star < b.z0
            assert b.b_star > 0
            assert 0.5 < b.coeff < 0.6

    def test_assumption_gate(self, non_hara):
        p = ModelParams(mu=0.1, r=0.05, sigma=0.3, beta=0.07, T=1.0, K=1.0)
        with pytest.raises(AssumptionViolated):
            GcaBoundary.build(p, non_hara)
