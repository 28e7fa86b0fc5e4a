import numpy as np
import pytest

from homharm.groups import (Rotation3, SE2Element, SE3Element, compose,
                            inverse, project_s2, quadrature_grid, section,
                            section_s2, twist, twist_s2)

rng = np.random.default_rng(101)


def random_rotation():
    return Rotation3(rng.uniform(0, 2 * np.pi), rng.uniform(0, np.pi),
                     rng.uniform(0, 2 * np.pi))


class TestRotation3:
    def test_matrix_is_orthogonal(self):
        for _ in range(20):
            M = random_rotation().matrix()
            assert np.allclose(M @ M.T, np.eye(3), atol=1e-14)
            assert np.linalg.det(M) == pytest.approx(1.0, abs=1e-12)

    def test_euler_round_trip(self):
        for _ in range(50):
            g = random_rotation()
            h = Rotation3.from_matrix(g.matrix())
            assert np.allclose(h.matrix(), g.matrix(), atol=1e-12)

    def test_compose_matches_matrix_product(self):
        for _ in range(20):
            a, b = random_rotation(), random_rotation()
            assert np.allclose(a.compose(b).matrix(), a.matrix() @ b.matrix(),
                               atol=1e-12)

    def test_inverse(self):
        g = random_rotation()
        assert np.allclose(g.compose(g.inverse()).matrix(), np.eye(3),
                           atol=1e-12)

    def test_gimbal_beta_zero(self):
        g = Rotation3.from_matrix(Rotation3.rz(1.2).matrix())
        assert g.beta == 0.0 and g.gamma == 0.0
        assert g.alpha == pytest.approx(1.2)

    def test_gimbal_beta_pi(self):
        M = (Rotation3.rz(0.7).compose(Rotation3.ry(np.pi))
             .compose(Rotation3.rz(0.2))).matrix()
        g = Rotation3.from_matrix(M)
        assert g.beta == pytest.approx(np.pi)
        assert np.allclose(g.matrix(), M, atol=1e-12)

    def test_ry_wraps_large_angles(self):
        g = Rotation3.ry(4.0)  # beyond pi
        ref = np.array([[np.cos(4.0), 0, np.sin(4.0)],
                        [0, 1, 0],
                        [-np.sin(4.0), 0, np.cos(4.0)]])
        assert np.allclose(g.matrix(), ref, atol=1e-12)

    def test_beta_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            Rotation3(0.0, -0.5, 0.0)


class TestSE2SE3:
    def test_se2_compose_inverse(self):
        g = SE2Element.from_xy(1.0, -2.0, 0.7)
        h = SE2Element.from_xy(0.3, 0.4, -1.1)
        gh = compose(g, h)
        assert np.allclose(gh.matrix(), g.matrix() @ h.matrix(), atol=1e-12)
        assert np.allclose(compose(g, inverse(g)).matrix(), np.eye(3),
                           atol=1e-12)

    def test_se3_compose_inverse(self):
        g = SE3Element(np.array([1.0, 0.0, -2.0]), random_rotation())
        h = SE3Element(np.array([0.5, 0.5, 0.5]), random_rotation())
        assert np.allclose(compose(g, h).matrix(),
                           g.matrix() @ h.matrix(), atol=1e-12)
        assert np.allclose(compose(inverse(g), g).matrix(), np.eye(4),
                           atol=1e-12)

    def test_kind_mismatch(self):
        with pytest.raises(TypeError):
            compose(SE2Element.from_xy(0, 0, 0), random_rotation())


class TestSectionsAndTwist:
    def test_section_hits_the_point(self):
        # s(x) applied to the north pole gives x
        alpha, beta = 1.1, 0.6
        v = section_s2(alpha, beta).apply([0.0, 0.0, 1.0])
        expect = [np.sin(beta) * np.cos(alpha), np.sin(beta) * np.sin(alpha),
                  np.cos(beta)]
        assert np.allclose(v, expect, atol=1e-14)

    def test_twist_defining_identity(self):
        """g s(x) = s(gx) h(g, x) with h a z-rotation."""
        for _ in range(20):
            g = random_rotation()
            x = (rng.uniform(0, 2 * np.pi), rng.uniform(0.1, np.pi - 0.1))
            theta = twist_s2(g, x)
            gs = g.compose(section_s2(*x))
            gx = project_s2(gs)
            recon = section_s2(*gx).compose(Rotation3.rz(theta))
            assert np.allclose(recon.matrix(), gs.matrix(), atol=1e-10)

    def test_twist_dispatch(self):
        g = SE2Element.from_xy(1.0, 2.0, 0.3)
        assert twist(g) == pytest.approx(0.3)
        r = random_rotation()
        se3 = SE3Element(np.zeros(3), r)
        assert np.allclose(twist(se3).matrix(), r.matrix())

    def test_section_dispatch(self):
        assert isinstance(section("R3", np.zeros(3)), SE3Element)
        with pytest.raises(ValueError):
            section("R7", np.zeros(3))


class TestQuadratureGrid:
    @pytest.mark.parametrize("space", ["S2", "SO3", "Circle"])
    def test_weights_sum_to_one(self, space):
        grid = quadrature_grid(space, 6)
        assert grid.weights.sum() == pytest.approx(1.0, abs=1e-13)

    def test_node_counts(self):
        B = 5
        assert quadrature_grid("S2", B).n_nodes == (2 * B) ** 2
        assert quadrature_grid("SO3", B).n_nodes == (2 * B) ** 3
        assert quadrature_grid("Circle", B).n_nodes == 2 * B

    def test_beta_weights_integrate_legendre(self):
        """The colatitude weights integrate Legendre polynomials of degree
        below 2B exactly (zero for degree >= 1 under normalized measure).
        """
        B = 6
        grid = quadrature_grid("S2", B)
        x = np.cos(grid.betas)
        wb = grid.beta_weights
        polys = [np.ones_like(x), x]
        for l in range(2, 2 * B):
            polys.append(((2 * l - 1) * x * polys[-1]
                          - (l - 1) * polys[-2]) / l)
        assert np.dot(wb, polys[0]) == pytest.approx(1.0, abs=1e-13)
        for l in range(1, 2 * B):
            assert np.dot(wb, polys[l]) == pytest.approx(0.0, abs=1e-13)

    def test_bad_bandwidth(self):
        with pytest.raises(ValueError):
            quadrature_grid("S2", 0)
