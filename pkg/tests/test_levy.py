"""Moments, admissibility classes and pointwise exponents."""

import math

import numpy as np
import pytest
from scipy import integrate

from levyfield.levy import (
    CompoundPoisson,
    CustomDensity,
    Dirac,
    GaussianLaw,
    LevyTriplet,
    SAlphaStable,
    TwoPoint,
    Uniform,
    VarianceGamma,
    in_class,
    is_levy_schwartz,
    jump_exponent,
    levy_exponent,
    moment,
    stable_norm_constant,
)

INF = float("inf")


def log_tail_density(a):
    a = np.abs(a)
    return 1.0 / (a * np.log(2.0 + a) ** 2)


class TestMoments:
    def test_sas_at_alpha_both_infinite(self):
        rep = moment(SAlphaStable(1.5, 1.0), 1.5)
        assert rep.inner == INF and rep.outer == INF

    def test_poisson_point_mass(self):
        rep = moment(CompoundPoisson(2.0, Dirac(3.0)), 2.0)
        assert rep.inner == 0.0
        assert rep.outer == pytest.approx(18.0, abs=0)
        assert rep.total == pytest.approx(18.0)

    def test_variance_gamma_order_one(self):
        # high-resolution trapezoid oracle for the symmetric density
        # exp(-|a|)/|a|, split exactly at |a| = 1
        a_in = np.linspace(0.0, 1.0, 2_000_001)
        a_out = np.linspace(1.0, 60.0, 2_000_001)
        inner_oracle = 2.0 * np.trapezoid(np.exp(-a_in), a_in)
        outer_oracle = 2.0 * np.trapezoid(np.exp(-a_out), a_out)
        rep = moment(VarianceGamma(1.0), 1.0)
        assert rep.outer == pytest.approx(outer_oracle, rel=1e-6)
        assert rep.inner == pytest.approx(inner_oracle, rel=1e-6)
        # closed values: 2/e and 2(1 - 1/e)
        assert rep.outer == pytest.approx(2.0 / math.e, rel=1e-12)
        assert rep.inner == pytest.approx(2.0 * (1.0 - 1.0 / math.e), rel=1e-12)

    def test_variance_gamma_inner_diverges_at_zero(self):
        assert moment(VarianceGamma(2.0), 0.0).inner == INF

    def test_negative_order_rejected(self):
        with pytest.raises(ValueError):
            moment(SAlphaStable(1.0), -0.5)

    def test_extended_real_sum(self):
        rep = moment(SAlphaStable(0.8), 0.3)
        assert math.isfinite(rep.outer) and rep.inner == INF
        assert rep.total == INF

    def test_custom_density_matches_power_law(self):
        sas = SAlphaStable(1.2, 1.0)
        c = sas.norm_constant
        v = CustomDensity(lambda a: c / np.abs(a) ** 2.2, symmetric=True)
        rep = moment(v, 0.7)
        assert rep.inner == INF
        assert rep.outer == pytest.approx(2 * c / (1.2 - 0.7), rel=1e-6)
        rep = moment(v, 1.5)
        assert rep.outer == INF
        assert rep.inner == pytest.approx(2 * c / (1.5 - 1.2), rel=1e-6)


class TestClasses:
    def test_sas_strict_window(self):
        assert in_class(SAlphaStable(1.0), 0.9, 1.1)
        assert not in_class(SAlphaStable(1.0), 1.0, 1.0)

    def test_variance_gamma_wide_window(self):
        assert in_class(VarianceGamma(2.0), 10.0, 0.01)

    def test_lattice_identities(self):
        measures = [
            SAlphaStable(1.2),
            VarianceGamma(0.7),
            CompoundPoisson(1.0, Uniform(-2.0, 3.0)),
        ]
        grid = [0.3, 0.8, 1.0, 1.2, 1.7, 2.0]
        for v in measures:
            for p1 in grid:
                for q1 in grid:
                    for p2 in grid:
                        for q2 in grid:
                            lhs = in_class(v, p1, q1) and in_class(v, p2, q2)
                            rhs = in_class(v, max(p1, p2), min(q1, q2))
                            assert lhs == rhs

    def test_levy_schwartz_witnesses(self):
        ok, eps = is_levy_schwartz(SAlphaStable(0.5))
        assert ok and eps == 0.25
        ok, eps = is_levy_schwartz(CompoundPoisson(1.0, Uniform(-1.0, 1.0)))
        assert ok and eps == 1.0

    def test_log_tail_not_levy_schwartz(self):
        v = CustomDensity(log_tail_density, symmetric=True)
        ok, eps = is_levy_schwartz(v)
        assert not ok and eps is None
        # it is still a valid Levy measure (construction did not raise)
        assert math.isfinite(moment(v, 2.0).inner)
        assert math.isfinite(moment(v, 0.0).outer)


class TestExponent:
    def test_gaussian_closed_form(self):
        assert levy_exponent(LevyTriplet.gaussian(0.0, 1.0), 2.0) == pytest.approx(
            -2.0
        )

    def test_sas_closed_form(self):
        f = levy_exponent(LevyTriplet.sas(1.0, 1.0), -3.0)
        assert f == pytest.approx(-3.0, abs=1e-12)

    @pytest.mark.parametrize(
        "t",
        [
            LevyTriplet.gaussian(0.5, 2.0),
            LevyTriplet.sas(0.7),
            LevyTriplet.variance_gamma(1.5),
            LevyTriplet.compound_poisson(2.0, Dirac(0.5)),
        ],
    )
    def test_normalization_at_zero(self, t):
        assert levy_exponent(t, 0.0) == 0.0

    @pytest.mark.parametrize(
        "t",
        [
            LevyTriplet(0.3, 0.5, SAlphaStable(1.3)),
            LevyTriplet.compound_poisson(1.5, Dirac(0.4)),
            LevyTriplet.compound_poisson(1.0, GaussianLaw(0.5, 0.2)),
            LevyTriplet.variance_gamma(2.0),
        ],
    )
    def test_conjugate_symmetry(self, t):
        ws = np.linspace(-8.0, 8.0, 33)
        f = levy_exponent(t, ws)
        assert np.abs(f[::-1] - np.conj(f)).max() < 1e-12

    @pytest.mark.parametrize(
        "t",
        [
            LevyTriplet.gaussian(0.0, 1.0),
            LevyTriplet.sas(1.5),
            LevyTriplet.variance_gamma(0.8),
            LevyTriplet.compound_poisson(2.0, TwoPoint(-0.7, 0.7, 0.5)),
        ],
    )
    def test_symmetric_exponent_real_nonpositive(self, t):
        ws = np.linspace(-10.0, 10.0, 41)
        f = levy_exponent(t, ws)
        assert np.abs(f.imag).max() < 1e-12
        assert f.real.max() <= 1e-15

    @pytest.mark.parametrize("alpha", [0.7, 1.0, 1.5])
    def test_sas_closed_vs_quadrature(self, alpha):
        sas = SAlphaStable(alpha, 1.0)
        v = CustomDensity(
            lambda a, c=sas.norm_constant, e=alpha: c / np.abs(a) ** (1.0 + e),
            symmetric=True,
        )
        ws = np.linspace(-10.0, 10.0, 21)
        closed = jump_exponent(sas, ws)
        quad = jump_exponent(v, ws)
        assert np.all(np.abs(closed - quad) <= 1e-6 * (1.0 + np.abs(closed)))

    def test_vg_closed_vs_quadrature(self):
        lam = 1.3
        vg = VarianceGamma(lam)
        v = CustomDensity(
            lambda a: np.exp(-lam * np.abs(a)) / np.abs(a), symmetric=True
        )
        ws = np.linspace(-10.0, 10.0, 21)
        closed = jump_exponent(vg, ws)
        quad = jump_exponent(v, ws)
        assert np.all(np.abs(closed - quad) <= 1e-6 * (1.0 + np.abs(closed)))

    def test_asymmetric_custom_vs_direct_quadrature(self):
        v = CustomDensity(
            lambda a: np.where(a > 0, np.exp(-np.abs(a)) / np.maximum(np.abs(a), 1e-300), 0.0),
            symmetric=False,
        )
        w = 2.0
        re = integrate.quad(
            lambda a: (np.cos(w * a) - 1.0) * np.exp(-a) / a, 0, np.inf, limit=400
        )[0]
        im1 = integrate.quad(
            lambda a: (np.sin(w * a) - w * a) * np.exp(-a) / a, 0, 1, limit=400
        )[0]
        im2 = integrate.quad(
            lambda a: np.sin(w * a) * np.exp(-a) / a, 1, np.inf, limit=400
        )[0]
        got = jump_exponent(v, w)
        assert got == pytest.approx(re + 1j * (im1 + im2), abs=1e-7)


class TestStableConstant:
    @pytest.mark.parametrize("alpha", [0.4, 0.9, 1.0, 1.3, 1.9])
    def test_against_gamma_function_form(self, alpha):
        # independent closed form of the kernel integral
        expected = math.gamma(1.0 + alpha) * math.sin(math.pi * alpha / 2.0) / math.pi
        assert stable_norm_constant(alpha, 1.0) == pytest.approx(expected, rel=1e-9)

    def test_scale_dependence(self):
        assert stable_norm_constant(1.2, 2.0) == pytest.approx(
            2.0 ** 1.2 * stable_norm_constant(1.2, 1.0), rel=1e-14
        )


class TestValidation:
    def test_dirac_at_zero_rejected(self):
        with pytest.raises(ValueError):
            Dirac(0.0)

    def test_negative_variance_rejected(self):
        with pytest.raises(ValueError):
            LevyTriplet(0.0, -1.0, None)

    def test_alpha_out_of_range(self):
        with pytest.raises(ValueError):
            SAlphaStable(2.0)
        with pytest.raises(ValueError):
            SAlphaStable(0.0)

    def test_inadmissible_custom_density_rejected(self):
        with pytest.raises(ValueError):
            CustomDensity(lambda a: 1.0 / np.abs(a) ** 3.5, symmetric=True)
