import warnings

import numpy as np
import pytest

from modcone import extreal
from modcone.cone import ConeError, fixed_cone, orthant
from modcone.metrics import (
    IN_XW,
    IN_XW_STAR,
    NEITHER,
    ConeMetricFn,
    ConstructionWarning,
    ModularConeMetricFn,
    RealModularMetricFn,
    Space,
    abs_cone_metric,
    audit_cone_metric,
    audit_convex_axioms,
    audit_modular_cone_axioms,
    audit_real_modular,
    convex_from_cone_metric,
    from_cone_metric,
    grid,
    interval,
    modular_space_membership,
    real_line,
    scalarize,
    squared_cone_metric,
)
from modcone.scalarization import ScalarizationContext, xi

ONES = np.ones(2)


@pytest.fixture
def d_abs():
    return abs_cone_metric(orthant(2), direction=ONES)


@pytest.fixture
def w_phi(d_abs):
    return from_cone_metric(d_abs, e=ONES)


@pytest.fixture
def w_div(d_abs):
    return convex_from_cone_metric(d_abs)


def two_points():
    return Space("two-points", points=(0.0, 1.0))


class TestConeMetric:
    def test_abs_passes(self, d_abs):
        assert audit_cone_metric(d_abs, real_line(), 2000, seed=2).passed

    def test_squared_fails_triangle(self):
        d = squared_cone_metric(orthant(2))
        u = orthant(2).slater_point
        # d(0,2) = 4u is not below d(0,1) + d(1,2) = 2u
        assert not orthant(2).partial_le(d(0.0, 2.0), d(0.0, 1.0) + d(1.0, 2.0))
        assert np.allclose(d(0.0, 2.0), 4 * u)
        rep = audit_cone_metric(d, real_line(), 2000, seed=2)
        assert rep.check("cm3_triangle").violations > 0
        assert rep.check("cm2_symmetry").passed

    def test_zero_fails_distinctness(self):
        P = orthant(2)
        d = ConeMetricFn(lambda x, y: np.zeros(2), P, name="zero")
        rep = audit_cone_metric(d, two_points(), 50)
        chk = rep.check("cm1_distinctness")
        assert chk.violations == 1 and not chk.statistical
        assert not rep.passed

    def test_direction_outside_cone(self):
        with pytest.raises(ConeError):
            abs_cone_metric(orthant(2), direction=[1, -1])


class TestExample22:
    def test_values(self, w_phi):
        # phi(c) = 1 / xi_e(c) with xi_e((2, 2)) = max(2, 2) = 2
        ctx = ScalarizationContext(orthant(2), ONES)
        assert xi(ctx, [2, 2]) == 2.0
        assert np.allclose(w_phi([2, 2], 0.0, 1.0), [0.5, 0.5])
        assert np.allclose(w_phi([4, 4], 0.0, 1.0), [0.25, 0.25])
        assert orthant(2).partial_le(w_phi([4, 4], 0.0, 1.0), w_phi([2, 2], 0.0, 1.0))

    def test_identity(self, w_phi, rng):
        for c in rng.uniform(0.1, 10, size=(50, 2)):
            assert not w_phi(c, 1.5, 1.5).any()

    def test_audit_passes(self, w_phi):
        rep = audit_modular_cone_axioms(w_phi, real_line(), 2000, seed=7)
        assert rep.passed, rep.dumps()

    def test_wedge_default_phi_passes(self):
        P = fixed_cone("wedge2")
        w = from_cone_metric(abs_cone_metric(P))
        assert audit_modular_cone_axioms(w, real_line(), 1000, seed=1).passed

    def test_parameter_must_be_interior(self, w_phi):
        with pytest.raises(ConeError):
            w_phi([1, 0], 0.0, 1.0)

    def test_nonpositive_phi_rejected(self, d_abs):
        with pytest.raises(ConeError):
            from_cone_metric(d_abs, phi=lambda c: -1.0)

    def test_increasing_phi_warns_and_fails_triangle(self, d_abs):
        ctx = ScalarizationContext(orthant(2), ONES)
        with pytest.warns(ConstructionWarning):
            w = from_cone_metric(d_abs, phi=lambda c: xi(ctx, c))
        rep = audit_modular_cone_axioms(w, real_line(), 1000, seed=0)
        chk = rep.check("iii_triangle")
        assert chk.violations > 0
        assert chk.worst_case_payload is not None


class TestExample33:
    def test_value(self, w_div):
        assert np.array_equal(w_div([2, 4], 0.0, 2.0), [1.0, 0.5])
        assert not w_div([2, 4], 3.0, 3.0).any()

    def test_convex_audit_passes_and_implies_plain(self, w_div):
        rep = audit_convex_axioms(w_div, real_line(), 2000, seed=4)
        assert rep.passed, rep.dumps()
        # the plain triangle is checked on the same samples
        assert rep.check("iii_triangle").passed
        assert rep.check("convex_weights_sum_to_one").passed
        assert audit_modular_cone_axioms(w_div, real_line(), 2000, seed=4).passed

    def test_strict_variant(self, d_abs):
        w = convex_from_cone_metric(d_abs, strict=True)
        rep = audit_convex_axioms(w, real_line(), 500, seed=1)
        assert rep.check("i_double_prime_strict_identity").passed

    def test_needs_orthant(self):
        with pytest.raises(ConeError):
            convex_from_cone_metric(abs_cone_metric(fixed_cone("wedge2")))

    def test_zero_modular_fails_distinctness(self):
        P = orthant(2)
        w = ModularConeMetricFn(lambda c, x, y: np.zeros(2), P, name="zero")
        rep = audit_modular_cone_axioms(w, two_points(), 100)
        assert rep.check("i_distinctness").violations == 1
        assert not rep.passed


class TestScalarized:
    def test_value(self, w_div):
        W = scalarize(w_div, e=ONES)
        for lam in (0.5, 1.0, 4.0, 10.0):
            assert W(lam, 0.0, 2.0) == pytest.approx(2.0 / lam, rel=1e-15)
        assert W(4.0, 0.0, 2.0) == 0.5
        assert W(3.0, 1.0, 1.0) == 0.0

    def test_plain_audit(self, w_phi):
        rep = audit_real_modular(scalarize(w_phi, e=ONES), real_line(), 1000, seed=1)
        assert rep.passed, rep.dumps()

    def test_convex_audit(self, w_div):
        W = scalarize(w_div, e=ONES)
        assert W.convex
        assert audit_real_modular(W, real_line(), 1000, convex=True, seed=1).passed

    def test_positive_lambda_required(self, w_div):
        with pytest.raises(ValueError):
            scalarize(w_div)(0.0, 0.0, 1.0)

    def test_nan_is_recorded(self):
        W = RealModularMetricFn(lambda lam, x, y: float("nan") if x != y else 0.0)
        rep = audit_real_modular(W, interval(0, 1), 50)
        assert rep.check("no_nan").violations > 0

    def test_non_modular_detected(self):
        # W_lam = lam |x - y| grows with lam
        W = RealModularMetricFn(lambda lam, x, y: lam * abs(x - y))
        rep = audit_real_modular(W, real_line(), 500)
        assert rep.check("lambda_monotonicity").violations > 0


class TestMembership:
    def test_decaying(self):
        W = RealModularMetricFn(lambda lam, x, y: abs(x - y) / lam)
        assert modular_space_membership(W, 0.0, 3.0).verdict == IN_XW
        assert modular_space_membership(W, 0.0, 0.0).verdict == IN_XW

    def test_saturated(self):
        W = RealModularMetricFn(lambda lam, x, y: 0.0 if x == y else extreal.INF)
        res = modular_space_membership(W, 0.0, 1.0)
        assert res.verdict == NEITHER
        assert all(v == extreal.INF for v in res.values)

    def test_finite_but_not_vanishing(self):
        W = RealModularMetricFn(lambda lam, x, y: abs(x - y))
        assert modular_space_membership(W, 0.0, 1.0).verdict == IN_XW_STAR

    def test_grid_validation(self):
        W = RealModularMetricFn(lambda lam, x, y: 0.0)
        with pytest.raises(ValueError):
            modular_space_membership(W, 0.0, 1.0, lam_grid=[2.0, 1.0])


class TestSpaces:
    def test_interval(self, rng):
        X = interval(-1, 1)
        assert all(X.contains(x) for x in X.sample(rng, 100))
        assert not X.contains(1.5)

    def test_grid(self):
        X = grid(0, 2, 101)
        assert X.is_finite and len(X.points) == 101
        assert len(list(X.distinct_pairs())) == 101 * 100 // 2

    def test_extreal(self):
        assert extreal.add(1.0, extreal.INF) == extreal.INF
        assert extreal.scale(0.0, extreal.INF) == 0.0
        with pytest.raises(extreal.ExtendedRealError):
            extreal.check(float("nan"))
        assert extreal.le(1.0, extreal.INF)
        assert not extreal.le(extreal.INF, 1.0)
