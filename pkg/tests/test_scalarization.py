import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modcone.cone import ConeError, fixed_cone, orthant
from modcone.scalarization import ScalarizationContext, audit_scalarization, xi, xi_oracle

coord = st.floats(-100, 100, allow_nan=False, allow_infinity=False)


def ctx_for(name):
    return ScalarizationContext.default(fixed_cone(name))


class TestXi:
    def test_orthant_example(self):
        ctx = ScalarizationContext(orthant(2), [1, 1])
        assert xi(ctx, [3, -1]) == 3.0

    @pytest.mark.parametrize("name", ["orthant2", "wedge2", "pyramid3", "hexcone3"])
    def test_theta_is_zero(self, name):
        ctx = ctx_for(name)
        assert xi(ctx, np.zeros(ctx.cone.dim)) == 0.0

    def test_wedge_example_against_oracle(self):
        ctx = ScalarizationContext(fixed_cone("wedge2"), [1, 0.5])
        y = [0.2, 1.0]
        assert abs(xi(ctx, y) - xi_oracle(ctx, y, tol=1e-10)) <= 1e-9
        # Ay = (0.2, 1.2), Ae = (1, 1.5): max(0.2, 0.8)
        assert xi(ctx, y) == pytest.approx(0.8, abs=1e-15)

    def test_direction_must_be_interior(self):
        with pytest.raises(ConeError):
            ScalarizationContext(orthant(2), [1, 0])

    def test_subadditivity_tight_example(self):
        ctx = ScalarizationContext(orthant(2), [1, 1])
        assert xi(ctx, [1, 0]) + xi(ctx, [0, 1]) == 2.0
        assert xi(ctx, [1, 1]) == 1.0


class TestOracle:
    @pytest.mark.parametrize("name", ["orthant2", "wedge2", "pyramid3", "hexcone3"])
    def test_theta_and_e(self, name):
        ctx = ctx_for(name)
        assert abs(xi_oracle(ctx, np.zeros(ctx.cone.dim))) <= 1e-10
        assert abs(xi_oracle(ctx, ctx.e) - 1.0) <= 1e-10

    def test_same_three_inputs(self):
        cases = [
            (ScalarizationContext(orthant(2), [1, 1]), [3, -1]),
            (ScalarizationContext(orthant(2), [1, 1]), [0, 0]),
            (ScalarizationContext(fixed_cone("wedge2"), [1, 0.5]), [0.2, 1.0]),
        ]
        for ctx, y in cases:
            assert abs(xi(ctx, y) - xi_oracle(ctx, y)) <= 1e-9

    @settings(max_examples=300)
    @given(st.tuples(coord, coord, coord))
    def test_agrees_on_pyramid(self, y):
        ctx = ctx_for("pyramid3")
        assert abs(xi(ctx, y) - xi_oracle(ctx, y)) <= 1e-9


class TestProperties:
    @settings(max_examples=200)
    @given(st.tuples(coord, coord), st.floats(0, 1e3))
    def test_homogeneity(self, y, t):
        ctx = ctx_for("wedge2")
        y = np.array(y)
        assert xi(ctx, t * y) == pytest.approx(t * xi(ctx, y), rel=1e-12, abs=1e-12)

    @settings(max_examples=200)
    @given(st.tuples(coord, coord), st.tuples(coord, coord))
    def test_subadditive(self, a, b):
        ctx = ctx_for("wedge2")
        a, b = np.array(a), np.array(b)
        assert xi(ctx, a + b) <= xi(ctx, a) + xi(ctx, b) + 1e-10

    @settings(max_examples=200)
    @given(st.tuples(coord, coord), st.floats(0, 50), st.floats(0, 50))
    def test_monotone_along_cone(self, y, s, t):
        # s*(1,0)+t*(0,1) ... use generators of the wedge: (1,-1) and (0,1)
        ctx = ctx_for("wedge2")
        y = np.array(y)
        p = s * np.array([1.0, -1.0]) + t * np.array([0.0, 1.0])
        assert ctx.cone.contains(p, tol=1e-9)
        assert xi(ctx, y) <= xi(ctx, y + p) + 1e-10

    @settings(max_examples=200)
    @given(st.tuples(coord, coord), st.floats(-100, 100))
    def test_translation_along_e(self, y, r):
        ctx = ctx_for("wedge2")
        y = np.array(y)
        assert xi(ctx, y + r * ctx.e) == pytest.approx(xi(ctx, y) + r, abs=1e-9)


class TestAudit:
    def test_orthant_passes(self):
        rep = audit_scalarization(ctx_for("orthant2"), 2000, seed=3)
        assert rep.passed, rep.dumps()
        assert {c.name for c in rep.checks} >= {
            "i_threshold_le", "ii_threshold_lt", "iii_positive_homogeneity",
            "iv_monotonicity", "v_subadditivity",
        }

    def test_polyhedral_passes(self):
        assert audit_scalarization(ctx_for("hexcone3"), 1000, seed=1).passed

    def test_zero_scale_exact(self):
        ctx = ctx_for("pyramid3")
        assert xi(ctx, 0.0 * np.array([4.0, -2.0, 7.0])) == 0.0

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            audit_scalarization(ctx_for("orthant2"), 0)
