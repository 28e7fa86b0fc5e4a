import numpy as np
import pytest

from homharm.fields import (FieldType, GroupFunction, field_from_spin_coeffs,
                            induced_action, lift, project)
from homharm.groups import Rotation3, quadrature_grid
from homharm.harmonics import wigner_D_real
from homharm.nonlin import (ActivationSpec, activate, delta_projection_kernel,
                            lift_sum, nonlinearity, point_sphere_nonlin,
                            project_column, project_kernel)

rng = np.random.default_rng(606)


def random_field(B, order, channels=1, scale=1.0):
    grid = quadrature_grid("S2", B)
    coeffs = [None] * B
    for l in range(abs(order), B):
        coeffs[l] = scale * (rng.standard_normal((channels, 2 * l + 1))
                             + 1j * rng.standard_normal((channels, 2 * l + 1)))
    return field_from_spin_coeffs(coeffs, order, grid)


class TestActivationSpec:
    def test_kinds(self):
        x = np.array([[-1.0, 0.5, 2.0]])
        assert np.allclose(ActivationSpec("relu").apply_real(x),
                           [[0.0, 0.5, 2.0]])
        assert np.allclose(ActivationSpec("tanh").apply_real(x), np.tanh(x))
        g = ActivationSpec("gelu").apply_real(x)
        assert g[0, 0] < 0 and g[0, 2] > 1.9   # smooth relu-like

    def test_mlp(self):
        W1, b1 = np.array([[1.0, -1.0], [0.0, 2.0]]), np.zeros(2)
        W2, b2 = np.eye(2), np.array([0.5, 0.0])
        spec = ActivationSpec("per_point_mlp", [(W1, b1), (W2, b2)])
        x = np.array([[1.0], [2.0]])
        # relu(W1 x) = [0, 4]; W2 . + b2 = [0.5, 4]
        assert np.allclose(spec.apply_real(x), [[0.5], [4.0]])

    def test_invalid(self):
        with pytest.raises(ValueError):
            ActivationSpec("sigmoid")
        with pytest.raises(ValueError):
            ActivationSpec("per_point_mlp")


class TestLiftSumActivate:
    def test_single_field_equals_lift(self):
        f = random_field(4, 1)
        assert np.allclose(lift_sum([f]).samples, lift(f).samples)

    def test_sum_formula(self):
        B = 4
        f0 = random_field(B, 0)
        f1 = random_field(B, 1)
        total = lift_sum([f0, f1]).flat()
        grid = quadrature_grid("SO3", B)
        n = 2 * B
        expect = (f0.flat().reshape(1, n, n, 1)
                  + f1.flat().reshape(1, n, n, 1)
                  * np.exp(-1j * grid.gammas)[None, None, None, :])
        assert np.abs(total - expect.reshape(1, -1)).max() < 1e-13

    def test_grid_mismatch(self):
        with pytest.raises(ValueError):
            lift_sum([random_field(4, 0), random_field(5, 0)])

    def test_activation_commutes_with_grid_shift(self):
        # node-wise maps commute bitwise with sample permutations
        B = 3
        gf = lift_sum([random_field(B, 0), random_field(B, 1)])
        n = 2 * B
        spec = ActivationSpec("relu")
        rolled = GroupFunction(gf.grid, np.roll(
            gf.flat().reshape(-1, n, n, n), 2, axis=3).reshape(1, -1))
        a = activate(rolled, spec).flat().reshape(-1, n, n, n)
        b = np.roll(activate(gf, spec).flat().reshape(-1, n, n, n), 2, axis=3)
        assert np.array_equal(a, b)


class TestProjection:
    def test_project_column_inverts_lift(self):
        for k in (-2, 0, 1):
            f = random_field(5, k, channels=2)
            back = project_column(lift(f), k)
            assert np.abs(back.samples - f.samples).max() < 1e-12

    def test_cross_order_projection_vanishes(self):
        f = random_field(5, 1)
        other = project_column(lift(f), 0)
        assert np.abs(other.samples).max() < 1e-12

    def test_linearity_over_a_mixed_lift(self):
        B = 4
        f0, f1 = random_field(B, 0), random_field(B, 1)
        gf = lift_sum([f0, f1])
        p0 = project_column(gf, 0)
        p1 = project_column(gf, 1)
        assert np.abs(p0.samples - f0.samples).max() < 1e-12
        assert np.abs(p1.samples - f1.samples).max() < 1e-12

    def test_delta_kernel_matches_column_projection(self):
        B = 4
        gf = lift_sum([random_field(B, 0), random_field(B, 1)])
        for m in (0, 1):
            a = project_kernel(gf, delta_projection_kernel(m, B), m)
            b = project_column(gf, m)
            assert np.abs(a.samples - b.samples).max() < 1e-10

    def test_kernel_must_satisfy_mackey_constraint(self):
        B = 3
        gf = lift(random_field(B, 0))
        grid = quadrature_grid("SO3", B)
        bad = GroupFunction(grid, rng.standard_normal((1, grid.n_nodes)))
        with pytest.raises(ValueError):
            project_kernel(gf, bad, 1)

    def test_zero_kernel_projects_to_zero(self):
        B = 3
        gf = lift(random_field(B, 0))
        grid = quadrature_grid("SO3", B)
        zero = GroupFunction(grid, np.zeros((1, grid.n_nodes)))
        out = project_kernel(gf, zero, 0)
        assert np.abs(out.samples).max() == 0.0


class TestNonlinearity:
    def test_identity_like_path(self):
        # tanh at tiny amplitude is near-linear: output approximates input
        B = 4
        f = random_field(B, 1, scale=1e-4)
        (out,) = nonlinearity([f], ActivationSpec("tanh"), [1], oversample=2)
        rel = (np.abs(out.samples - f.samples).max()
               / np.abs(f.samples).max())
        assert rel < 1e-6

    def test_grid_aligned_equivariance_is_exact(self):
        """For grid-aligned z-rotations of a pure-order field the pipeline
        commutes with the action to machine precision (the output stays
        bandlimited, so the spectral action is a pure sample permutation).
        Order 0 is excluded: relu of a real scalar field generates a full
        spectrum, and the exactness argument needs bandlimited output."""
        B = 4
        for k in (1, -1):
            f = random_field(B, k)
            spec = ActivationSpec("relu")
            g = Rotation3.rz(2 * np.pi * 3 / (2 * B))
            a = nonlinearity([induced_action(g, f)], spec, [k],
                             oversample=1)[0]
            b = induced_action(g, nonlinearity([f], spec, [k],
                                               oversample=1)[0])
            scale = max(1.0, np.abs(b.samples).max())
            assert np.abs(a.samples - b.samples).max() / scale < 1e-12

    def test_oversampling_reduces_aliasing(self):
        B = 4
        f = random_field(B, 0, scale=0.3)
        spec = ActivationSpec("relu")
        g = Rotation3(0.83, 0.41, 1.77)             # generic rotation
        errs = []
        for ov in (1, 2, 4):
            a = nonlinearity([induced_action(g, f)], spec, [0], oversample=ov)
            b = induced_action(g, nonlinearity([f], spec, [0],
                                               oversample=ov)[0])
            errs.append(np.abs(a[0].samples - b.samples).max()
                        / np.abs(b.samples).max())
        assert errs[0] > errs[1] > errs[2]

    def test_matches_prior_lift_project_pipeline(self):
        """The fused entry point equals composing lift_sum, activate and
        project_column by hand."""
        B = 4
        fields = [random_field(B, 0), random_field(B, -1)]
        spec = ActivationSpec("gelu")
        fused = nonlinearity(fields, spec, [0, -1], oversample=1)
        manual = [project_column(activate(lift_sum(fields), spec), m)
                  for m in (0, -1)]
        for x, y in zip(fused, manual):
            assert np.abs(x.samples - y.samples).max() < 1e-10

    def test_bad_oversample(self):
        with pytest.raises(ValueError):
            nonlinearity([random_field(3, 0)], ActivationSpec("relu"), [0],
                         oversample=0)


class TestPointSphereNonlin:
    def _features(self, n_pts, n_ch, lmax, scale):
        return [scale * rng.standard_normal((n_pts, n_ch, 2 * l + 1))
                for l in range(lmax + 1)]

    def test_near_linear_limit(self):
        feats = self._features(3, 2, 2, 1e-5)
        out = point_sphere_nonlin(feats, ActivationSpec("tanh"), 8)
        for f, o in zip(feats, out):
            assert np.abs(o - f).max() / np.abs(f).max() < 1e-8

    def test_per_point_equivariance(self):
        """Rotating every point's feature stack commutes with the
        nonlinearity (up to activation aliasing, small at this amplitude)."""
        lmax, Bs = 2, 8
        feats = self._features(4, 1, lmax, 0.02)
        spec = ActivationSpec("tanh")
        g = Rotation3(1.1, 0.7, -0.4)
        D = [wigner_D_real(l, g) for l in range(lmax + 1)]
        rotated = [np.einsum("mn,pcn->pcm", D[l], feats[l])
                   for l in range(lmax + 1)]
        a = point_sphere_nonlin(rotated, spec, Bs)
        b = point_sphere_nonlin(feats, spec, Bs)
        b_rot = [np.einsum("mn,pcn->pcm", D[l], b[l])
                 for l in range(lmax + 1)]
        scale = max(np.abs(x).max() for x in b_rot)
        err = max(np.abs(x - y).max() for x, y in zip(a, b_rot)) / scale
        assert err < 1e-8

    def test_absent_orders_stay_absent(self):
        feats = [rng.standard_normal((2, 1, 1)), None,
                 rng.standard_normal((2, 1, 5))]
        out = point_sphere_nonlin(feats, ActivationSpec("relu"), 6)
        assert out[1] is None and out[0].shape == (2, 1, 1)

    def test_order_must_fit_bandwidth(self):
        feats = [None, None, rng.standard_normal((1, 1, 5))]
        with pytest.raises(ValueError):
            point_sphere_nonlin(feats, ActivationSpec("relu"), 2)
