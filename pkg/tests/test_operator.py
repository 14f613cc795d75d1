import numpy as np
import pytest
from numpy.testing import assert_allclose

from bessel_subord.besselgen.models import BesselParams, ClosedForm, HypergeometricParams
from bessel_subord.besselgen.service import closed_form_eval, phi_series
from bessel_subord.exceptions import DomainError, NormalizationError, RatioGuardError
from bessel_subord.operator.models import OperatorKind, OperatorSpec, RatioCheck
from bessel_subord.operator.service import (
    apply,
    combination_residual,
    lower_shift,
    normalized_combination,
    ratio_identity_check,
    ratio_transform,
    recursion_combination,
    recursion_residual,
)
from bessel_subord.series.models import TruncatedSeries
from bessel_subord.series.service import add, evaluate_on_grid, random_class_a, scale

IDENTITY = TruncatedSeries.identity_convolver(48)

RECURSION_PARAMS = [
    BesselParams(p=0.5, b=1, c=1),
    BesselParams(p=-0.5, b=1, c=-2),
    BesselParams(p=1.5, b=4, c=0.5),
    BesselParams(p=0.25 + 0.75j, b=2, c=2 - 1j),
]


class TestApply:
    def test_identity_convolver_gives_the_kernel(self):
        params = BesselParams(p=0.7, b=1.3, c=-0.4)
        assert apply(params, IDENTITY).equals(phi_series(params, 48))

    def test_c_zero_keeps_only_the_linear_term(self, rng):
        f = random_class_a(rng, order=20)
        out = apply(BesselParams(p=2.0, b=1, c=0), f)
        assert out.equals(TruncatedSeries.monomial(1, order=20))

    def test_result_is_class_a(self, rng):
        assert apply(BesselParams(p=0.5, b=1, c=1), random_class_a(rng, order=20)).normalized

    @pytest.mark.parametrize(
        "spec, form",
        [
            (OperatorSpec.bessel_j(0.5), ClosedForm.SIN_HALF),
            (OperatorSpec.bessel_j(-0.5), ClosedForm.COS_NEGH),
            (OperatorSpec.modified_i(0.5), ClosedForm.SINH_HALF),
            (OperatorSpec.spherical_s(1.0), ClosedForm.SIN_3H),
        ],
    )
    def test_special_kinds_match_closed_forms(self, spec, form):
        pts = np.array([0.5, -0.9 + 0.1j, 0.3j, 0.95 * np.exp(2j)])
        values = evaluate_on_grid(apply(spec, IDENTITY), pts)
        assert_allclose(values, closed_form_eval(form, pts), rtol=1e-10)

    def test_special_kind_parameters(self):
        spec = OperatorSpec.spherical_s(0.0)
        assert spec.kind is OperatorKind.SPHERICAL_S
        assert (spec.params.b, spec.params.c) == (2, 1)
        assert spec.params.kappa == 1.5

    def test_dziok_srivastava_path(self, rng):
        params = BesselParams(p=0.5, b=2, c=1.5)
        f = random_class_a(rng, order=30)
        spec = OperatorSpec.dziok_srivastava(HypergeometricParams(betas=(params.kappa,)), argument_scale=-params.c / 4)
        assert_allclose(apply(spec, f).coeffs, apply(params, f).coeffs, rtol=1e-14)

    def test_spec_needs_its_parameters(self):
        with pytest.raises(ValueError, match="needs BesselParams"):
            OperatorSpec(kind=OperatorKind.GENERAL)
        with pytest.raises(ValueError, match="needs HypergeometricParams"):
            OperatorSpec(kind=OperatorKind.DZIOK_SRIVASTAVA)

    def test_strict_mode_requires_class_a(self):
        f = TruncatedSeries.from_coefficients([0, 2, 1])
        with pytest.raises(NormalizationError, match="class A"):
            apply(BesselParams(p=0.5, b=1, c=1), f)

    def test_linear_without_strict(self, rng):
        params = BesselParams(p=0.5, b=1, c=1)
        f, g = random_class_a(rng, order=24), random_class_a(rng, order=24)
        combo = add(scale(f, 2 - 1j), g)
        lhs = apply(params, combo, strict=False)
        rhs = add(scale(apply(params, f), 2 - 1j), apply(params, g))
        assert_allclose(lhs.coeffs, rhs.coeffs, rtol=1e-14, atol=1e-300)


class TestRecursion:
    @pytest.mark.parametrize("params", RECURSION_PARAMS)
    def test_three_term_recursion(self, params, family):
        for _, f in family:
            assert recursion_residual(params, f, check_negated_c=True) < 1e-11

    @pytest.mark.parametrize("params", [BesselParams(p=0, b=1, c=1), BesselParams.from_kappa(2.5, -2.0)])
    def test_high_truncation_order(self, params, rng):
        f = random_class_a(rng, order=128)
        assert recursion_residual(params, f, check_negated_c=True) < 1e-11

    def test_spherical_spec(self, rng):
        spec = OperatorSpec.spherical_s(0.5)
        assert recursion_residual(spec, random_class_a(rng, order=32)) < 1e-11

    def test_needs_bessel_operator(self):
        spec = OperatorSpec.dziok_srivastava(HypergeometricParams(betas=(2.0,)))
        with pytest.raises(DomainError, match="Bessel-type"):
            recursion_residual(spec, IDENTITY)

    def test_lower_shift(self, rng):
        params = BesselParams.from_kappa(3.5, 1.0)
        f = random_class_a(rng, order=24)
        assert lower_shift(params, f, 1).equals(apply(params.shifted(-1), f))
        assert lower_shift(params, f, 2).equals(apply(params.shifted(-2), f))

    @pytest.mark.parametrize("kappa, steps", [(1.0, 1), (2.0, 2), (1.0, 2)])
    def test_lower_shift_onto_a_pole(self, kappa, steps):
        with pytest.raises(DomainError, match="nonpositive integer"):
            lower_shift(BesselParams.from_kappa(kappa, 1.0), IDENTITY, steps)

    def test_lower_shift_steps(self):
        with pytest.raises(ValueError, match="steps"):
            lower_shift(BesselParams.from_kappa(4.0, 1.0), IDENTITY, 3)


class TestCombinations:
    @pytest.mark.parametrize("kappa", [2.5, 4.0])
    @pytest.mark.parametrize("depth", [1, 2])
    @pytest.mark.parametrize("normalized", [False, True])
    def test_combination_rebuilds_lower_operator(self, kappa, depth, normalized, family):
        params = BesselParams.from_kappa(kappa, 1.0)
        for _, f in family:
            assert combination_residual(params, f, depth, normalized) < 1e-11

    def test_depth_one_coefficients(self):
        # B_kappa f from p = B_{kappa+1} f: coefficient n scales by (n + kappa - 1) / kappa
        params = BesselParams.from_kappa(2.5, 1.0)
        rebuilt = recursion_combination(params, IDENTITY, 1)
        assert_allclose(rebuilt.coeffs, phi_series(params, 48).coeffs, rtol=1e-13, atol=1e-300)

    @pytest.mark.parametrize("combine", [recursion_combination, normalized_combination])
    def test_depth_two_needs_kappa_not_one(self, combine):
        with pytest.raises(DomainError, match="kappa=1"):
            combine(BesselParams.from_kappa(1.0, 1.0), IDENTITY, 2)

    def test_unknown_depth(self):
        with pytest.raises(ValueError, match="depth"):
            recursion_combination(BesselParams.from_kappa(2.5, 1.0), IDENTITY, 3)


class TestRatioIdentities:
    def test_transform_on_a_known_triple(self):
        # p = 1 + z at z = 0.5: r = 1.5, s = 0.5, t = 0
        u, v, w = ratio_transform(1.5, 0.5, 0.0, 3.0)
        assert u == 1.5
        assert v == pytest.approx((0.5 / 1.5 + 4.5 - 1) / 2)
        inner = 0.5 / 1.5 + 4.5 - 1
        expected_w = 0.5 / 1.5 + 4.5 - 2 + (0.5 / 1.5 - (0.5 / 1.5) ** 2 + 1.5) / inner
        assert w == pytest.approx(expected_w)

    @pytest.mark.parametrize("kappa, c", [(2.5, 1.0), (4.0, 1.0), (3.0, -2.0), (4.0, 2.0 + 1j)])
    @pytest.mark.parametrize("depth", [1, 2])
    def test_pointwise_identity(self, kappa, c, depth, small_grid):
        check = ratio_identity_check(BesselParams.from_kappa(kappa, c), IDENTITY, small_grid, depth=depth)
        assert check.residual < 1e-8
        assert check.skipped == 0
        assert check.checked == small_grid.size

    def test_random_function(self, rng, small_grid):
        f = random_class_a(rng, order=32, radius=0.3)
        check = ratio_identity_check(BesselParams.from_kappa(4.0, 1.0), f, small_grid, depth=2)
        assert check.residual < 1e-8

    @pytest.mark.parametrize("kappa, depth", [(1.0, 1), (1.0, 2), (2.0, 2)])
    def test_excluded_kappa(self, kappa, depth, small_grid):
        with pytest.raises(DomainError, match="undefined"):
            ratio_identity_check(BesselParams.from_kappa(kappa, 1.0), IDENTITY, small_grid, depth=depth)

    def test_guard_rejects_vanishing_denominators(self, small_grid):
        with pytest.raises(RatioGuardError, match="Denominators vanish"):
            ratio_identity_check(BesselParams.from_kappa(2.5, 1.0), IDENTITY, small_grid, guard=10.0)

    def test_skip_fraction(self):
        assert RatioCheck(residual=0.0, checked=95, skipped=5).skip_fraction == pytest.approx(0.05)
        assert RatioCheck(residual=0.0, checked=0, skipped=0).skip_fraction == 0.0
