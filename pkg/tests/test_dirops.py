"""Directional factors: stable and marginally stable left inverses."""

import math

import numpy as np
import pytest
from scipy.signal import lfilter

from levyfield.dirops import (
    DirFactor,
    OperatorSpec,
    apply_operator_adjoint,
    compose_adjoint_left_inverse,
    directional_derivative,
    line_derivative,
    marginal_adjoint_left_inverse,
    marginal_full_inverse,
    marginal_full_inverse_adjoint,
    marginal_right_inverse,
    orthogonal_projection,
    stable_inverse,
    stable_inverse_transpose,
    unit_direction,
)
from levyfield.grids import SampledFunction, box_function, gaussian_bump

H64 = dict(shape=(256, 256), spacing=1 / 64)   # box [-2, 2)


def bump(center=(0.3, 0.15), width=0.18, **kw):
    args = dict(H64)
    args.update(kw)
    return gaussian_bump(args["shape"], args["spacing"], width=width, center=center)


class TestDerivative:
    def test_axis_cosine(self):
        n, h = 256, 1 / 64
        phi = gaussian_bump((n,), h, width=0.4)
        x = phi.axis_coordinates()[0]
        w = 2 * math.pi * 3 / (n * h)
        phi.values = np.cos(w * x)
        out = directional_derivative(phi, (1,))
        assert np.abs(out.values + w * np.sin(w * x)).max() < 1e-11

    def test_constant_maps_to_zero(self):
        phi = SampledFunction(np.ones((64, 64)), 1 / 16, (32, 32))
        assert np.abs(directional_derivative(phi, (2, 1)).values).max() < 1e-14

    def test_oblique_matches_finite_differences(self):
        h = H64["spacing"]
        phi = bump(width=0.35, center=(0.0, 0.0))
        out = directional_derivative(phi, (2, 1))
        v = phi.values
        fd = (
            2.0 * (np.roll(v, -1, 0) - np.roll(v, 1, 0))
            + (np.roll(v, -1, 1) - np.roll(v, 1, 1))
        ) / (2.0 * h * math.sqrt(5.0))
        scale = np.abs(out.values).max()
        assert np.abs(out.values - fd).max() <= 10.0 * h ** 2 * scale


class TestStableInverse:
    def test_left_and_right_identity(self):
        phi = bump(width=0.3, center=(0.2, -0.1))
        inv = stable_inverse(phi, (2, 1), -1.5)
        back = directional_derivative(inv, (2, 1)).values + 1.5 * inv.values
        assert np.abs(back - phi.values).max() <= 1e-10
        der = directional_derivative(phi, (2, 1))
        two = stable_inverse(phi.with_values(der.values + 1.5 * phi.values), (2, 1), -1.5)
        assert np.abs(two.values - phi.values).max() <= 1e-10

    def test_single_mode_eigenfunction(self):
        n, h = 64, 1 / 16
        k = (3, 5)
        freqs = [2 * math.pi * kk / (n * h) for kk in k]
        f = SampledFunction(np.zeros((n, n)), h, (0, 0))
        mesh = f.coordinate_mesh()
        vals = np.exp(1j * (freqs[0] * mesh[0] + freqs[1] * mesh[1]))
        f.values = vals
        alpha = -0.8
        out = stable_inverse(f, (2, 1), alpha)
        u = unit_direction((2, 1))
        lam = 1.0 / (1j * (freqs[0] * u[0] + freqs[1] * u[1]) - alpha)
        assert np.abs(out.values - lam * vals).max() < 1e-12

    def test_recursive_filter_oracle_1d(self):
        # causal exponential smoothing of a narrow bump: e^{alpha t} tail
        n, h = 1024, 1 / 128
        phi = gaussian_bump((n,), h, width=0.05)
        alpha = -1.0
        inv = stable_inverse(phi, (1,), alpha)
        decay = math.exp(alpha * h)
        oracle = lfilter([h], [1.0, -decay], phi.values)
        assert np.abs(inv.values - oracle).max() <= 5.0 * h

    def test_sup_norm_bound(self):
        phi = bump(width=0.3)
        for alpha in (-0.5, -2.0):
            inv = stable_inverse(phi, (2, -1), alpha)
            assert np.abs(inv.values).max() <= np.abs(phi.values).max() / (-alpha) * (
                1 + 1e-12
            )

    def test_marginal_alpha_rejected(self):
        phi = bump()
        with pytest.raises(ValueError):
            stable_inverse(phi, (1, 0), 1j * 2.0)


class TestMarginalRightInverse:
    def test_identity_converges_first_order(self):
        w0 = 1.7
        errs = []
        for n, h in ((128, 1 / 32), (256, 1 / 64), (512, 1 / 128)):
            a = gaussian_bump((n, n), h, width=0.18, center=(0.3, 0.15))
            J = marginal_right_inverse(a, (2, 1), w0)
            ld, mask = line_derivative(J, (2, 1))
            errs.append(np.abs(ld.values - 1j * w0 * J.values - a.values)[mask].max())
        orders = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
        assert min(orders) >= 0.9
        assert errs[-1] <= 5e-3

    def test_vanishes_on_anchor_hyperplane(self):
        a = bump(center=(0.5, 0.25), width=0.2)
        J = marginal_right_inverse(a, (2, 1), 0.0)
        n = a.shape[0]
        o = a.origin[0]
        ii, jj = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
        on_plane = 2 * (ii - o) + (jj - o) == 0
        assert on_plane.sum() > 0
        assert np.abs(J.values[on_plane]).max() == 0.0

    def test_axis_box_gives_ramp(self):
        n, h = 256, 1 / 64
        box = box_function((n,), h, 0.0, 1.0, 1.0, origin=(n // 2,))
        J = marginal_right_inverse(box, (1,), 0.0)
        x = box.axis_coordinates()[0]
        assert np.abs(J.values - np.clip(x, 0.0, 1.0)).max() <= h


class TestMarginalAdjoint:
    def test_left_inverse_converges(self):
        w0 = 1.7
        errs = []
        for n, h in ((128, 1 / 32), (256, 1 / 64), (512, 1 / 128)):
            a = gaussian_bump((n, n), h, width=0.18, center=(0.3, 0.15))
            src = -directional_derivative(a, (2, 1)).values - 1j * w0 * a.values
            rec = marginal_adjoint_left_inverse(a.with_values(src), (2, 1), w0)
            errs.append(np.abs(rec.values - a.values).max())
        orders = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
        assert min(orders) >= 0.9
        assert errs[-1] <= 5e-3

    def test_adjoint_pairing_halves_with_h(self):
        w0 = 1.7
        gaps, allows = [], []
        for n, h in ((128, 1 / 32), (256, 1 / 64), (512, 1 / 128)):
            a = gaussian_bump((n, n), h, width=0.18, center=(0.3, 0.15))
            b = gaussian_bump((n, n), h, width=0.16, center=(-0.3, 0.2))
            lhs = (marginal_right_inverse(a, (2, 1), w0).values * b.values).sum() * h * h
            rhs = (a.values * marginal_adjoint_left_inverse(b, (2, 1), w0).values).sum() * h * h
            gaps.append(abs(lhs - rhs))
            allows.append(5e-3 * a.quasi_norm(2) * b.quasi_norm(2))
        assert gaps[-1] <= allows[-1]
        orders = [math.log2(gaps[i] / gaps[i + 1]) for i in range(2)]
        assert min(orders) >= 0.9

    def test_decay_transfer_constant(self):
        # |J* phi|_{inf,alpha-1} <= 2^{3/2} alpha/(alpha-1) 2^{(alpha-1)/2}
        # |phi|_{inf,alpha} at alpha = 3
        n, h = 512, 1 / 64
        phi = gaussian_bump((n, n), h, width=0.35)
        Js = marginal_adjoint_left_inverse(phi, (2, 1), 0.0)
        mesh = phi.coordinate_mesh()
        r = np.sqrt(sum(m * m for m in mesh))
        alpha = 3.0
        lhs = ((1.0 + r ** (alpha - 1.0)) * np.abs(Js.values)).max()
        rhs = ((1.0 + r ** alpha) * np.abs(phi.values)).max()
        c_alpha = 2.0 ** 1.5 * alpha / (alpha - 1.0) * 2.0 ** ((alpha - 1.0) / 2.0)
        assert lhs <= c_alpha * rhs

    def test_jump_across_hyperplane(self):
        # J output is continuous across the anchor; J* jumps by the
        # full-line integral
        n, h = 256, 1 / 64
        phi = gaussian_bump((n, n), h, width=0.25)
        J = marginal_right_inverse(phi, (1, 0), 0.0)
        Js = marginal_adjoint_left_inverse(phi, (1, 0), 0.0)
        o = n // 2
        jump = lambda f: np.abs(np.diff(f.values[o - 1: o + 2, :], axis=0)).max()
        line_mass = np.abs(phi.values[:, o].sum() * h)
        assert jump(J) <= 5.0 * h
        assert jump(Js) >= 0.5 * line_mass


class TestModulationIdentities:
    def _reference(self, phi, e, w0, kind):
        """Independent direct evaluation: walk each lattice line, build the
        modulated trapezoid integral pointwise."""
        from collections import defaultdict

        n0, n1 = phi.shape
        o = phi.origin
        ev = np.asarray(e)
        u = ev / np.linalg.norm(ev)
        lines = defaultdict(list)
        for i in range(n0):
            for j in range(n1):
                rel = np.array([i - o[0], j - o[1]])
                key = rel[1] * ev[0] - rel[0] * ev[1]
                s = int(rel @ ev)
                lines[key].append((s, (i, j)))
        out = np.zeros(phi.shape, dtype=complex)
        h = phi.spacing
        step = h * np.linalg.norm(ev)
        for pts in lines.values():
            pts.sort()
            s_vals = np.array([p[0] for p in pts], dtype=float)
            tau = s_vals * h / np.linalg.norm(ev)
            vals = np.array([phi.values[p[1]] for p in pts])
            integrand = np.exp(-1j * w0 * tau) * vals
            C = np.concatenate(
                [[0.0], np.cumsum(step * 0.5 * (integrand[1:] + integrand[:-1]))]
            )
            if kind == "J":
                nonneg = np.flatnonzero(s_vals >= 0)
                anchor = nonneg[0] if len(nonneg) else len(pts) - 1
                base = C - C[anchor]
                res = np.exp(1j * w0 * tau) * base
            elif kind == "I":
                res = np.exp(1j * w0 * tau) * C
            elif kind == "I*":
                integrand = np.exp(1j * w0 * tau) * vals
                C = np.concatenate(
                    [[0.0], np.cumsum(step * 0.5 * (integrand[1:] + integrand[:-1]))]
                )
                res = np.exp(-1j * w0 * tau) * (C[-1] - C)
            else:  # J*
                integrand = np.exp(1j * w0 * tau) * vals
                C = np.concatenate(
                    [[0.0], np.cumsum(step * 0.5 * (integrand[1:] + integrand[:-1]))]
                )
                gate = (s_vals <= 0).astype(float)
                res = np.exp(-1j * w0 * tau) * (C[-1] - C - gate * C[-1])
            for val, (_, ij) in zip(res, pts):
                out[ij] = val
        return out

    @pytest.mark.parametrize("kind", ["J", "J*", "I", "I*"])
    def test_both_paths_agree(self, kind):
        n, h = 48, 1 / 12
        phi = gaussian_bump((n, n), h, width=0.22, center=(0.1, 0.05))
        e, w0 = (2, 1), 1.3
        ops = {
            "J": marginal_right_inverse,
            "J*": marginal_adjoint_left_inverse,
            "I": marginal_full_inverse,
            "I*": marginal_full_inverse_adjoint,
        }
        lib = ops[kind](phi, e, w0)
        ref = self._reference(phi, e, w0, kind)
        assert np.abs(lib.values - ref).max() <= 1e-12


class TestComposition:
    def test_single_stable_factor_is_transpose_inverse(self):
        phi = bump(width=0.3)
        spec = OperatorSpec((DirFactor((2, 1), -1.2),))
        a = compose_adjoint_left_inverse(spec, phi)
        b = stable_inverse_transpose(phi, (2, 1), -1.2)
        assert np.abs(a.values - b.values).max() == 0.0

    def test_mondrian_composition_left_identity(self):
        errs = []
        for n, h in ((128, 1 / 32), (256, 1 / 64)):
            phi = gaussian_bump((n, n), h, width=0.2, center=(0.2, 0.1))
            spec = OperatorSpec((DirFactor((1, 0)), DirFactor((0, 1))))
            lstar = apply_operator_adjoint(spec, phi)
            rec = compose_adjoint_left_inverse(spec, lstar)
            errs.append(np.abs(rec.values - phi.values).max())
        assert errs[-1] <= 5e-3
        assert math.log2(errs[0] / errs[1]) >= 0.9

    def test_right_identity_away_from_anchor(self):
        # L* (L*^{-1} phi) = phi off the anchor hyperplanes, by line
        # differentiation of the iterated reverse sums
        n, h = 256, 1 / 64
        phi = gaussian_bump((n, n), h, width=0.2, center=(0.2, 0.1))
        spec = OperatorSpec((DirFactor((1, 0)), DirFactor((0, 1))))
        inv = compose_adjoint_left_inverse(spec, phi)
        d1, m1 = line_derivative(inv, (0, 1))
        d1 = d1.with_values(-d1.values)
        d2, m2 = line_derivative(d1, (1, 0))
        d2 = d2.with_values(-d2.values)
        o = n // 2
        interior = m1 & m2
        interior[o - 2: o + 3, :] = False
        interior[:, o - 2: o + 3] = False
        assert np.abs(d2.values - phi.values)[interior].max() <= 5e-2

    def test_marginal_order_swap_changes_output_keeps_identity(self):
        # axis factors are tensor products on separate axes and commute;
        # oblique line families interact and expose the order dependence
        n, h = 512, 1 / 128
        phi = gaussian_bump((n, n), h, width=0.2, center=(0.2, 0.1))
        f1, f2 = DirFactor((2, 1)), DirFactor((2, -1))
        a = compose_adjoint_left_inverse(OperatorSpec((f1, f2)), phi)
        b = compose_adjoint_left_inverse(OperatorSpec((f2, f1)), phi)
        assert np.abs(a.values - b.values).max() > 1e-2
        for spec in (OperatorSpec((f1, f2)), OperatorSpec((f2, f1))):
            lstar = apply_operator_adjoint(spec, phi)
            rec = compose_adjoint_left_inverse(spec, lstar)
            assert np.abs(rec.values - phi.values).max() <= 5e-3


class TestHelpers:
    def test_orthogonal_decomposition(self):
        rng = np.random.Generator(np.random.Philox(5))
        for e in ((2, 1), (1, -3), (1, 2, -2)):
            u = unit_direction(e)
            for _ in range(50):
                r = rng.normal(size=len(e))
                p = orthogonal_projection(r, e)
                lhs = float(r @ r)
                rhs = float((r @ u) ** 2 + p @ p)
                assert abs(lhs - rhs) <= 1e-12 * max(1.0, lhs)

    def test_direction_normalization(self):
        f = DirFactor((4, 2), -1.0)
        assert f.direction == (2, 1)
        assert f.kind == "stable"
        g = DirFactor((1, 0), 1j * 2.0)
        assert g.kind == "marginal" and g.omega0 == 2.0

    def test_zero_direction_rejected(self):
        with pytest.raises(ValueError):
            DirFactor((0, 0))


class TestDirectionValidation:
    def test_non_lattice_direction_rejected(self):
        phi = gaussian_bump((64, 64), 1 / 16, width=0.3)
        with pytest.raises(ValueError):
            marginal_right_inverse(phi, (1.5, 1.0), 0.0)
        with pytest.raises(ValueError):
            directional_derivative(phi, (0.5, 0.25))
