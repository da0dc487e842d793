import numpy as np
import pytest

from minkaehler.charts import (
    FDJetChart,
    Jet2,
    ProductChart,
    ellipse_chart,
    grid_points,
    plane_chart,
    polar_plane_chart,
    random_points,
    shrink_box,
    sphere_chart,
)
from minkaehler.errors import (
    DomainError,
    IndeterminateRankWarning,
    NonImmersionPointError,
)
from minkaehler.geometry import (
    anticommutation_residual,
    christoffel,
    codazzi_residual,
    covariant_field_derivative,
    frame_at,
    generalized_cross,
    gnorm_op,
    gnorm_vec,
    laplace_beltrami,
    metric_at,
    point_frame,
    rank_and_nullity,
    scalar_fd_jet,
    weingarten_residual,
)
from minkaehler.weierstrass import chart_complex_structure

from oracles import ellipse_support, polar_christoffel, sphere_harmonic_eigencheck


def graph_jet(lam: float) -> Jet2:
    """Jet of the graph z = (x^2 + lam y^2) / 2 at the origin."""
    d2 = np.zeros((2, 2, 3))
    d2[0, 0, 2] = 1.0
    d2[1, 1, 2] = lam
    return Jet2(
        coords=np.zeros(2),
        value=np.zeros(3),
        d1=np.array([[1.0, 0, 0], [0, 1.0, 0]]),
        d2=d2,
    )


class TestCross:
    def test_r3_right_handed(self):
        out = generalized_cross(np.array([[1.0, 0, 0], [0, 1.0, 0]]))
        np.testing.assert_array_equal(out, [0, 0, 1])

    def test_row_swap_flips_sign(self, rng):
        v = rng.standard_normal((3, 4))
        a = generalized_cross(v)
        b = generalized_cross(v[[1, 0, 2]])
        np.testing.assert_allclose(a, -b, atol=1e-14)

    def test_orthogonal_to_all_inputs(self, rng):
        for d in (1, 2, 3, 4):
            v = rng.standard_normal((d, d + 1))
            out = generalized_cross(v)
            np.testing.assert_allclose(v @ out, 0.0, atol=1e-12)

    def test_shape_rejected(self):
        with pytest.raises(DomainError):
            generalized_cross(np.zeros((2, 4)))


class TestPointFrame:
    def test_sphere_is_totally_umbilic(self):
        chart = sphere_chart()
        for p in ([0.5, 1.2], [1.0, 0.8], [0.3, 2.1]):
            fr = frame_at(chart, p)
            np.testing.assert_allclose(fr.shape_operator, np.eye(2), atol=1e-12)
            np.testing.assert_allclose(fr.eigenvalues, [1.0, 1.0], atol=1e-12)
            np.testing.assert_allclose(fr.normal, -fr.jet.value, atol=1e-12)

    def test_eigenvectors_are_g_orthonormal(self):
        fr = frame_at(sphere_chart(), [0.7, 1.1])
        v = fr.eigenvectors
        np.testing.assert_allclose(v.T @ fr.metric @ v, np.eye(2), atol=1e-12)

    def test_eigen_order_is_descending_modulus(self):
        fr = point_frame(graph_jet(-3.0))
        assert abs(fr.eigenvalues[0]) >= abs(fr.eigenvalues[1])
        np.testing.assert_allclose(sorted(fr.eigenvalues), [-3.0, 1.0], atol=1e-14)

    def test_dependent_partials_rejected(self):
        bad = Jet2(
            coords=np.zeros(2),
            value=np.zeros(3),
            d1=np.array([[1.0, 0, 0], [2.0, 0, 0]]),
            d2=np.zeros((2, 2, 3)),
        )
        with pytest.raises(NonImmersionPointError):
            point_frame(bad)

    def test_non_hypersurface_codimension_rejected(self):
        bad = Jet2(
            coords=np.zeros(2),
            value=np.zeros(4),
            d1=np.zeros((2, 4)),
            d2=np.zeros((2, 2, 4)),
        )
        with pytest.raises(DomainError):
            point_frame(bad)

    def test_ellipse_support_function(self):
        a, b = 1.5, 0.8
        chart = ellipse_chart(a, b)
        for t in (0.4, 1.3, 2.6):
            fr = frame_at(chart, [t])
            support = float(fr.jet.value @ fr.normal)
            assert support == pytest.approx(ellipse_support(a, b, t), rel=1e-12)


class TestRank:
    def test_plane_has_rank_zero(self):
        fr = frame_at(plane_chart(), [0.2, -0.4])
        res = rank_and_nullity(fr)
        assert (res.rank, res.nullity) == (0, 2)
        assert res.nullity_basis.shape == (2, 2)

    def test_sphere_has_full_rank(self):
        res = rank_and_nullity(frame_at(sphere_chart(), [0.5, 1.0]))
        assert (res.rank, res.nullity) == (2, 0)
        assert not res.indeterminate

    def test_m4r5_has_rank_two(self, m4r5_chart):
        fr = frame_at(m4r5_chart, [0.1, 0.05, 0.2, -0.1])
        res = rank_and_nullity(fr)
        assert (res.rank, res.nullity) == (2, 2)
        # the relative-nullity directions are G-orthonormal and killed by A
        basis = res.nullity_basis
        np.testing.assert_allclose(basis.T @ fr.metric @ basis, np.eye(2), atol=1e-10)
        np.testing.assert_allclose(fr.shape_operator @ basis, 0.0, atol=1e-10)

    def test_band_value_warns_and_flags(self):
        fr = point_frame(graph_jet(1e-7))
        with pytest.warns(IndeterminateRankWarning):
            res = rank_and_nullity(fr, rel_tol=1e-7)
        assert res.indeterminate

    def test_clearly_separated_value_is_silent(self):
        import warnings

        fr = point_frame(graph_jet(1e-12))
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            res = rank_and_nullity(fr, rel_tol=1e-7)
        assert (res.rank, res.nullity) == (1, 1)
        np.testing.assert_allclose(np.abs(res.nullity_basis[:, 0]), [0, 1], atol=1e-9)

    def test_cylinder_over_ellipse_has_rank_one(self):
        chart = ProductChart(profile=ellipse_chart(), extra=1)
        fr = frame_at(chart, [1.0, 0.2])
        res = rank_and_nullity(fr)
        assert (res.rank, res.nullity) == (1, 1)
        # the flat factor spans the nullity
        np.testing.assert_allclose(np.abs(res.nullity_basis[:, 0]), [0, 1], atol=1e-12)


class TestNorms:
    def test_euclidean_reduction(self, rng):
        chol = np.eye(3)
        v = rng.standard_normal(3)
        M = rng.standard_normal((3, 3))
        assert gnorm_vec(chol, v) == pytest.approx(np.linalg.norm(v))
        assert gnorm_op(chol, M) == pytest.approx(np.linalg.norm(M, 2))

    def test_metric_invariance_of_operator_norm(self):
        # the identity has G-operator norm 1 in any metric
        G = np.array([[4.0, 1.0], [1.0, 2.0]])
        chol = np.linalg.cholesky(G)
        assert gnorm_op(chol, np.eye(2)) == pytest.approx(1.0)


class TestChristoffel:
    def test_polar_plane_matches_closed_form(self):
        chart = polar_plane_chart()
        for r, t in ((1.3, 0.7), (0.8, 0.4)):
            gam = christoffel(chart, [r, t])
            np.testing.assert_allclose(gam, polar_christoffel(r), atol=1e-8)

    def test_flat_chart_is_torsion_free_zero(self):
        gam = christoffel(plane_chart(), [0.1, 0.3])
        np.testing.assert_allclose(gam, 0.0, atol=1e-10)

    def test_stencil_leaving_domain_raises(self, catenoid_chart):
        with pytest.raises(DomainError):
            christoffel(catenoid_chart, [0.9 - 1e-7, 0.0])

    def test_metric_at_matches_jets(self, catenoid_chart):
        p = [0.2, -0.1]
        d1 = catenoid_chart.jet(np.asarray(p)).d1
        np.testing.assert_array_equal(metric_at(catenoid_chart, p), d1 @ d1.T)


class TestScalarCalculus:
    def test_fd_jet_on_quadratic(self):
        A = np.array([[2.0, 0.5], [0.5, -1.0]])
        b = np.array([0.3, -0.7])

        def fn(p):
            return 0.5 * p @ A @ p + b @ p + 2.0

        p = np.array([0.4, -0.2])
        val, grad, hess = scalar_fd_jet(fn, p)
        assert val == pytest.approx(fn(p))
        np.testing.assert_allclose(grad, A @ p + b, atol=1e-9)
        np.testing.assert_allclose(hess, A, atol=1e-6)

    def test_laplacian_flat_cartesian(self):
        chart = plane_chart()
        val = laplace_beltrami(chart, lambda p: p @ p, [0.2, 0.1])
        assert val == pytest.approx(4.0, abs=1e-6)

    def test_laplacian_flat_polar(self):
        # same function r^2 = x^2 + y^2 expressed in polar coordinates;
        # the Christoffel correction must reproduce Delta = 4
        chart = polar_plane_chart()
        val = laplace_beltrami(chart, lambda p: p[0] ** 2, [1.1, 0.6])
        assert val == pytest.approx(4.0, abs=1e-6)

    def test_sphere_degree_one_harmonic(self):
        chart = sphere_chart()

        def gamma(p):
            return chart.value(p)[2]

        for p in ([0.5, 1.2], [0.9, 1.7]):
            got = laplace_beltrami(chart, gamma, p)
            want = sphere_harmonic_eigencheck(gamma(np.asarray(p)))
            assert got == pytest.approx(want, abs=2e-6)


class TestCurvatureIdentities:
    def test_weingarten_on_sphere(self):
        assert weingarten_residual(sphere_chart(), [0.6, 1.3]) < 1e-9

    def test_weingarten_on_catenoid(self, catenoid_chart):
        assert weingarten_residual(catenoid_chart, [0.15, -0.1]) < 1e-9

    def test_codazzi_for_sphere_shape_operator(self):
        chart = sphere_chart()

        def field(p):
            return frame_at(chart, p).shape_operator

        assert codazzi_residual(chart, field, [0.7, 1.2]) < 5e-6

    def test_covariant_derivative_of_metric_vanishes(self):
        # nabla G = 0, checked through the (1,1) field G^{-1}G = identity
        chart = polar_plane_chart()
        nab = covariant_field_derivative(chart, lambda p: np.eye(2), [1.2, 0.5])
        np.testing.assert_allclose(nab, 0.0, atol=1e-9)


class TestKaehlerResiduals:
    def test_minimal_chart_anticommutes(self, enneper_chart, m4r5_chart):
        for chart, p in ((enneper_chart, [0.2, 0.1]), (m4r5_chart, [0.1, 0.05, 0.1, 0.2])):
            fr = frame_at(chart, p)
            J = chart_complex_structure(chart.d)
            assert anticommutation_residual(fr, J) < 1e-12

    def test_sphere_fails_anticommutation(self):
        fr = frame_at(sphere_chart(), [0.5, 1.2])
        J = np.array([[0.0, 1.0], [-1.0, 0.0]])
        assert anticommutation_residual(fr, J) > 0.5

    def test_zero_shape_operator_gives_zero_residual(self):
        fr = frame_at(plane_chart(), [0.0, 0.0])
        J = np.array([[0.0, 1.0], [-1.0, 0.0]])
        assert anticommutation_residual(fr, J) == 0.0

    def test_chart_structure_parallel_on_kaehler_chart(self, enneper_chart):
        from minkaehler.geometry import parallel_J_residual

        J = chart_complex_structure(2)
        assert parallel_J_residual(enneper_chart, J, [0.2, -0.1]) < 1e-7

    def test_constant_matrix_not_parallel_in_polar_coordinates(self):
        from minkaehler.geometry import parallel_J_residual

        J = np.array([[0.0, 1.0], [-1.0, 0.0]])
        assert parallel_J_residual(polar_plane_chart(), J, [1.2, 0.6]) > 1e-2


class TestSampling:
    def test_grid_shape_and_bounds(self):
        box = np.array([[0.0, 1.0], [-1.0, 1.0]])
        pts = grid_points(box, [3, 4])
        assert pts.shape == (12, 2)
        assert pts.min(axis=0) == pytest.approx(box[:, 0])
        assert pts.max(axis=0) == pytest.approx(box[:, 1])

    def test_grid_count_broadcast_and_errors(self):
        box = np.array([[0.0, 1.0], [0.0, 1.0]])
        assert grid_points(box, 3).shape == (9, 2)
        with pytest.raises(DomainError):
            grid_points(box, [3, 4, 5])
        with pytest.raises(DomainError):
            grid_points(box, [1, 4])

    def test_random_points_inside_box(self, rng):
        box = np.array([[-0.5, 0.5], [2.0, 3.0]])
        pts = random_points(box, 50, rng)
        assert pts.shape == (50, 2)
        assert (pts >= box[:, 0]).all() and (pts <= box[:, 1]).all()

    def test_shrink_box_keeps_center(self):
        box = np.array([[0.0, 4.0], [-2.0, 2.0]])
        small = shrink_box(box, 0.5)
        np.testing.assert_allclose(small, [[1.0, 3.0], [-1.0, 1.0]])


class TestFDJetChart:
    def test_matches_analytic_sphere_jets(self):
        analytic = sphere_chart()
        fd = FDJetChart(
            d=2, ambient=3, box=analytic.box, value_fn=lambda p: analytic.value(p)
        )
        p = np.array([0.8, 1.4])
        ja, jf = analytic.jet(p), fd.jet(p)
        np.testing.assert_allclose(jf.d1, ja.d1, atol=1e-9)
        np.testing.assert_allclose(jf.d2, ja.d2, atol=1e-6)

    def test_frames_agree_through_fd_jets(self):
        analytic = sphere_chart()
        fd = FDJetChart(
            d=2, ambient=3, box=analytic.box, value_fn=lambda p: analytic.value(p)
        )
        fr = frame_at(fd, [0.6, 1.1])
        np.testing.assert_allclose(fr.shape_operator, np.eye(2), atol=1e-5)
