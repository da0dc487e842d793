import numpy as np
import pytest

from minkaehler.bending import (
    B_by_BAT,
    B_by_fd,
    B_by_formula,
    CombinationField,
    PerturbedChart,
    TrivialField,
    b_route_agreement,
    bat_residual,
    bending_residual,
    classify_triviality,
    codazzi_b_residual,
    conjugate_field,
    first_variation_metric_residual,
    fundamental_equation_residual,
    gauss_tangency_residual,
    make_cylinder_bending,
    make_trivial,
    normal_variation_residual,
    nullity_annihilation_residual,
    parallel_tangential_residual,
    recover_bending_decomposition,
    rotation_coefficient,
    second_variation_metric_residual,
)
from minkaehler.charts import ProductChart, ellipse_chart, random_points, shrink_box
from minkaehler.errors import DomainError, PreconditionError
from minkaehler.geometry import frame_at, rank_and_nullity
from minkaehler.weierstrass import conjugate_fbar


def sample(chart, rng, count=4):
    return random_points(shrink_box(chart.box, 0.8), count, rng)


@pytest.fixture()
def cylinder():
    return ProductChart(profile=ellipse_chart(), extra=1)


class TestConjugateIsBending:
    @pytest.mark.parametrize("name", ["enneper", "catenoid", "m4r5"])
    def test_bending_condition(self, name, request, rng):
        chart = request.getfixturevalue(f"{name}_chart")
        fld = conjugate_field(chart)
        for p in sample(chart, rng):
            assert bending_residual(chart, fld, p) < 1e-13

    @pytest.mark.parametrize("name", ["enneper", "m4r5"])
    def test_first_metric_variation_vanishes(self, name, request, rng):
        chart = request.getfixturevalue(f"{name}_chart")
        fld = conjugate_field(chart)
        for p in sample(chart, rng, 3):
            assert first_variation_metric_residual(chart, fld, p) < 1e-10

    def test_metric_deformation_is_exactly_quadratic(self, catenoid_chart, rng):
        fld = conjugate_field(catenoid_chart)
        for p in sample(catenoid_chart, rng, 3):
            assert second_variation_metric_residual(catenoid_chart, fld, p, t=0.2) < 1e-13

    @pytest.mark.parametrize("name", ["enneper", "catenoid", "m4r5"])
    def test_gauss_map_is_preserved(self, name, request, rng):
        chart = request.getfixturevalue(f"{name}_chart")
        fld = conjugate_field(chart)
        for p in sample(chart, rng, 3):
            assert gauss_tangency_residual(chart, fld, p) < 1e-13
            assert normal_variation_residual(chart, fld, p) < 1e-9

    def test_conjugating_twice_negates(self, catenoid_chart, catenoid_fbar):
        fld = conjugate_field(catenoid_fbar)
        p = np.array([0.15, -0.1])
        np.testing.assert_allclose(
            fld.value(p), -catenoid_chart.value(p), atol=1e-14
        )

    def test_scaling_field_is_not_a_bending(self, enneper_chart):
        # T = f itself stretches the metric: the condition must fail
        from minkaehler.bending import ChartField

        fld = ChartField(enneper_chart, 1.0)
        assert bending_residual(enneper_chart, fld, [0.2, 0.1]) > 1e-2


class TestTrivialFields:
    def test_trivial_is_a_bending(self, catenoid_chart, rng):
        fld = make_trivial(catenoid_chart, rng=rng)
        for p in sample(catenoid_chart, rng, 3):
            assert bending_residual(catenoid_chart, fld, p) < 1e-13

    def test_formula_route_kills_trivial_exactly(self, catenoid_chart, rng):
        fld = make_trivial(catenoid_chart, rng=rng)
        for p in sample(catenoid_chart, rng, 3):
            b = B_by_formula(catenoid_chart, fld, p)
            assert np.abs(b.form).max() < 1e-11

    def test_fd_route_kills_trivial(self, catenoid_chart, rng):
        fld = make_trivial(catenoid_chart, rng=rng)
        b = B_by_fd(catenoid_chart, fld, [0.1, 0.2])
        assert np.abs(b.op).max() < 1e-6

    def test_skewness_enforced(self, catenoid_chart):
        with pytest.raises(DomainError):
            TrivialField(catenoid_chart, np.eye(3), np.zeros(3))

    def test_random_construction_shapes(self, m4r5_chart, rng):
        fld = make_trivial(m4r5_chart, rng=rng)
        assert fld.skew.shape == (5, 5)
        np.testing.assert_allclose(fld.skew, -fld.skew.T, atol=0)

    def test_rng_required_when_data_missing(self, catenoid_chart):
        with pytest.raises(DomainError):
            make_trivial(catenoid_chart)


class TestBTensor:
    @pytest.mark.parametrize("name", ["enneper", "catenoid", "m4r5"])
    def test_three_routes_agree(self, name, request, rng):
        chart = request.getfixturevalue(f"{name}_chart")
        fld = conjugate_field(chart)
        for p in sample(chart, rng, 3):
            assert b_route_agreement(chart, fld, p) < 1e-6

    def test_bat_identity(self, m4r5_chart, rng):
        fld = conjugate_field(m4r5_chart)
        for p in sample(m4r5_chart, rng, 3):
            assert bat_residual(m4r5_chart, fld, p) < 1e-7

    def test_form_and_op_are_consistent(self, enneper_chart):
        fld = conjugate_field(enneper_chart)
        b = B_by_formula(enneper_chart, fld, [0.2, -0.1])
        np.testing.assert_allclose(b.form, (b.metric @ b.op).T, atol=1e-12)
        b2 = B_by_BAT(enneper_chart, fld, [0.2, -0.1])
        np.testing.assert_allclose(b2.form, (b2.metric @ b2.op).T, atol=1e-12)

    def test_nullity_annihilation_on_m4r5(self, m4r5_chart, rng):
        fld = conjugate_field(m4r5_chart)
        for p in sample(m4r5_chart, rng, 3):
            frame = frame_at(m4r5_chart, p)
            rr = rank_and_nullity(frame)
            b = B_by_formula(m4r5_chart, fld, p)
            assert nullity_annihilation_residual(frame, b.op, rr.nullity_basis) < 1e-7


class TestStructuralIdentities:
    @pytest.mark.parametrize("name", ["enneper", "m4r5"])
    def test_linearized_curvature_identity(self, name, request, rng):
        chart = request.getfixturevalue(f"{name}_chart")
        fld = conjugate_field(chart)
        for p in sample(chart, rng, 3):
            assert fundamental_equation_residual(chart, fld, p) < 1e-9

    def test_tangential_part_is_parallel(self, catenoid_chart, rng):
        fld = conjugate_field(catenoid_chart)
        for p in sample(catenoid_chart, rng, 2):
            assert parallel_tangential_residual(catenoid_chart, fld, p) < 1e-7

    def test_codazzi_for_b(self, enneper_chart, rng):
        fld = conjugate_field(enneper_chart)
        for p in sample(enneper_chart, rng, 2):
            assert codazzi_b_residual(enneper_chart, fld, p) < 1e-4

    def test_curvature_identity_fails_for_sphere_pair(self):
        # sanity: the identity is not vacuous - feeding a non-bending pair
        # (sphere with its own position field) must not pass
        from minkaehler.bending import ChartField
        from minkaehler.charts import sphere_chart

        chart = sphere_chart()
        fld = ChartField(chart, 1.0)
        assert fundamental_equation_residual(chart, fld, [0.6, 1.2]) > 1e-3


class TestRotation:
    @pytest.mark.parametrize("name", ["enneper", "catenoid", "m4r5"])
    def test_conjugate_rotates_by_plus_one(self, name, request, rng):
        chart = request.getfixturevalue(f"{name}_chart")
        fld = conjugate_field(chart)
        for p in sample(chart, rng, 3):
            rot = rotation_coefficient(chart, fld, p)
            assert rot.coefficient == pytest.approx(1.0, abs=1e-9)
            assert rot.fit_residual < 1e-9

    def test_scaled_conjugate_scales_coefficient(self, enneper_chart, rng):
        fld = CombinationField((conjugate_field(enneper_chart),), (2.5,))
        p = sample(enneper_chart, rng, 1)[0]
        rot = rotation_coefficient(enneper_chart, fld, p)
        assert rot.coefficient == pytest.approx(2.5, abs=1e-9)

    def test_oriented_basis_is_g_orthonormal(self, m4r5_chart):
        fld = conjugate_field(m4r5_chart)
        rot = rotation_coefficient(m4r5_chart, fld, [0.1, 0.05, 0.2, -0.1])
        frame = frame_at(m4r5_chart, [0.1, 0.05, 0.2, -0.1])
        v = rot.basis
        np.testing.assert_allclose(v.T @ frame.metric @ v, np.eye(2), atol=1e-10)


class TestClassification:
    def test_trivial_fields_classify_trivial(self, catenoid_chart, rng):
        pts = sample(catenoid_chart, rng, 5)
        for _ in range(5):
            fld = make_trivial(catenoid_chart, rng=rng)
            res = classify_triviality(catenoid_chart, fld, pts)
            assert res.trivial and res.score < 1e-6

    def test_translation_only_is_trivial(self, catenoid_chart, rng):
        fld = TrivialField(catenoid_chart, np.zeros((3, 3)), np.array([1.0, -2.0, 0.5]))
        res = classify_triviality(catenoid_chart, fld, sample(catenoid_chart, rng, 3))
        assert res.trivial and res.score == 0.0

    def test_conjugate_classifies_nontrivial(self, m4r5_chart, rng):
        fld = conjugate_field(m4r5_chart)
        res = classify_triviality(m4r5_chart, fld, sample(m4r5_chart, rng, 5))
        assert not res.trivial

    def test_mixture_classifies_nontrivial(self, enneper_chart, rng):
        mix = CombinationField(
            (conjugate_field(enneper_chart), make_trivial(enneper_chart, rng=rng)),
            (2.0, 1.0),
        )
        res = classify_triviality(enneper_chart, mix, sample(enneper_chart, rng, 5))
        assert not res.trivial

    def test_non_bending_is_rejected(self, enneper_chart, rng):
        from minkaehler.bending import ChartField

        fld = ChartField(enneper_chart, 1.0)  # T = f scales the metric
        with pytest.raises(PreconditionError):
            classify_triviality(enneper_chart, fld, sample(enneper_chart, rng, 3))


class TestDecomposition:
    def test_pure_conjugate(self, catenoid_chart, rng):
        fld = conjugate_field(catenoid_chart)
        dec = recover_bending_decomposition(
            catenoid_chart, fld, sample(catenoid_chart, rng, 8)
        )
        assert dec.coefficient == pytest.approx(1.0, abs=1e-8)
        assert np.abs(dec.skew).max() < 1e-8
        assert np.abs(dec.offset).max() < 1e-8
        assert dec.residual < 1e-8

    def test_mixture_recovers_all_parts(self, catenoid_chart, rng):
        raw = rng.standard_normal((3, 3))
        skew = raw - raw.T
        offset = np.array([0.4, -1.2, 0.7])
        mix = CombinationField(
            (conjugate_field(catenoid_chart), TrivialField(catenoid_chart, skew, offset)),
            (2.0, 1.0),
        )
        dec = recover_bending_decomposition(
            catenoid_chart, mix, sample(catenoid_chart, rng, 8)
        )
        assert dec.coefficient == pytest.approx(2.0, abs=1e-6)
        np.testing.assert_allclose(dec.skew, skew, atol=1e-6)
        np.testing.assert_allclose(dec.offset, offset, atol=1e-6)
        assert dec.residual < 1e-6

    def test_m4r5_mixture(self, m4r5_chart, rng):
        mix = CombinationField(
            (conjugate_field(m4r5_chart), make_trivial(m4r5_chart, rng=rng)),
            (2.0, 1.0),
        )
        dec = recover_bending_decomposition(m4r5_chart, mix, sample(m4r5_chart, rng, 10))
        assert dec.coefficient == pytest.approx(2.0, abs=1e-6)
        assert dec.residual < 1e-6


class TestCylinder:
    def test_field_is_a_bending(self, cylinder, rng):
        fld = make_cylinder_bending(cylinder, 1.5, 0.8)
        for p in sample(cylinder, rng, 4):
            assert bending_residual(cylinder, fld, p) < 1e-13

    def test_field_is_nontrivial(self, cylinder, rng):
        fld = make_cylinder_bending(cylinder, 1.5, 0.8)
        res = classify_triviality(cylinder, fld, sample(cylinder, rng, 5))
        assert not res.trivial

    def test_b_annihilates_flat_directions(self, cylinder, rng):
        fld = make_cylinder_bending(cylinder, 1.5, 0.8)
        for p in sample(cylinder, rng, 3):
            b = B_by_formula(cylinder, fld, p)
            # the straight factor is chart coordinate 1
            assert np.abs(b.op[:, 1]).max() < 1e-10
            assert np.abs(b.form[1, :]).max() < 1e-10

    def test_b_is_nonzero_on_profile_direction(self, cylinder):
        fld = make_cylinder_bending(cylinder, 1.5, 0.8)
        b = B_by_formula(cylinder, fld, [1.0, 0.1])
        assert np.abs(b.form[0, 0]) > 1e-3


class TestPerturbedChart:
    def test_dimension_mismatch_rejected(self, catenoid_chart, m4r5_chart):
        fld = conjugate_field(m4r5_chart)
        with pytest.raises(DomainError):
            PerturbedChart(catenoid_chart, fld, 0.1)

    def test_zero_deformation_reproduces_chart(self, catenoid_chart):
        fld = conjugate_field(catenoid_chart)
        pert = PerturbedChart(catenoid_chart, fld, 0.0)
        p = np.array([0.1, 0.2])
        np.testing.assert_array_equal(pert.jet(p).value, catenoid_chart.jet(p).value)

    def test_domain_passthrough(self, catenoid_chart):
        pert = PerturbedChart(catenoid_chart, conjugate_field(catenoid_chart), 0.1)
        assert pert.domain_contains([0.1, 0.1])
        assert not pert.domain_contains([5.0, 0.0])
