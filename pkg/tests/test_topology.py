import csv
import io
from fractions import Fraction

import numpy as np
import pytest

from modcone.cone import ConeError, orthant
from modcone.metrics import abs_cone_metric, convex_from_cone_metric, grid, sample_interior
from modcone.topology import (
    check_cauchy,
    check_convergence,
    check_sequential_continuity,
    check_norm_equivalence,
    check_scalarized_equivalence,
    hausdorff_witness,
    in_ball,
    local_base_inclusion,
)


@pytest.fixture
def w1():
    P = orthant(1)
    return convex_from_cone_metric(abs_cone_metric(P, direction=[1.0]))


@pytest.fixture
def w2():
    P = orthant(2)
    return convex_from_cone_metric(abs_cone_metric(P, direction=np.ones(2)))


HARMONIC = [1.0 / n for n in range(1, 201)]
ALTERNATING = [0.5 if n % 2 else 1.0 for n in range(1, 201)]
CONSTANT = [0.3] * 50


def ball_oracle(x, c, y):
    # w_c(x, y) = |x - y| / c, so y is in the ball iff |x - y| < c^2
    return abs(x - y) < c * c


class TestBalls:
    def test_examples(self, w1):
        assert in_ball(w1, 0.0, [1.0], 0.5)
        assert in_ball(w1, 0.0, [1.0], 0.0)
        assert not in_ball(w1, 0.0, [1.0], 2.0)

    def test_against_formula(self, w1, rng):
        for x, y, c in zip(rng.normal(size=500), rng.normal(size=500), rng.uniform(0.1, 2, 500)):
            # skip points within rounding of the boundary
            if abs(abs(x - y) - c * c) > 1e-9:
                assert in_ball(w1, x, [c], y) == ball_oracle(x, c, y)

    def test_radius_must_be_interior(self, w1):
        with pytest.raises(ConeError):
            in_ball(w1, 0.0, [0.0], 0.0)

    def test_nesting(self, w2, rng):
        P = w2.cone
        for c, bump in zip(sample_interior(P, rng, 200), sample_interior(P, rng, 200)):
            big = c + bump
            for y in rng.normal(scale=2, size=20):
                if in_ball(w2, 0.0, c, y):
                    assert in_ball(w2, 0.0, big, y)


class TestWindows:
    def test_harmonic_converges(self, w1):
        tr = check_convergence(w1, HARMONIC, 0.0)
        assert tr.verdict
        # probe c needs 1/(n c) < c, i.e. n > 1/c^2
        # exact rationals: probes are e/10, e/2, e, 2e with e = 1
        cs = [Fraction(1, 10), Fraction(1, 2), Fraction(1), Fraction(2)]
        expected = [next(n for n in range(1, 10**4) if Fraction(1, n) / c < c) for c in cs]
        assert expected == [101, 5, 2, 1]
        assert tr.first_index == expected

    def test_constant_converges_from_start(self, w1):
        tr = check_convergence(w1, CONSTANT, 0.3)
        assert tr.verdict and tr.first_index == [1] * len(tr.probes)

    def test_alternating_fails(self, w1):
        assert not check_convergence(w1, ALTERNATING, 0.5).verdict
        assert not check_cauchy(w1, ALTERNATING[:60]).verdict

    def test_convergent_implies_cauchy(self, w1, rng):
        for rho in rng.uniform(0.2, 0.7, size=5):
            seq = [rho ** n for n in range(1, 41)]
            assert check_convergence(w1, seq, 0.0).verdict
            assert check_cauchy(w1, seq).verdict
        assert check_cauchy(w1, CONSTANT).verdict
        assert check_cauchy(w1, HARMONIC).verdict

    def test_residual_below_one_iff_relation_holds(self, w1):
        tr = check_convergence(w1, HARMONIC, 0.0)
        for k, c in enumerate(tr.probes):
            for xn, r in zip(HARMONIC, tr.residuals[k]):
                if abs(abs(xn) - c[0] ** 2) > 1e-12:
                    assert (r < 1) == (abs(xn) < c[0] ** 2)

    def test_csv(self, w1, tmp_path):
        tr = check_convergence(w1, HARMONIC[:5], 0.0)
        text = tr.to_csv(tmp_path / "t.csv")
        rows = list(csv.reader(io.StringIO(text)))
        assert rows[0][:2] == ["n", "point_0"]
        assert len(rows) == 6 and len(rows[1]) == 2 + len(tr.probes)
        assert (tmp_path / "t.csv").read_text() == text

    def test_empty(self, w1):
        with pytest.raises(ValueError):
            check_convergence(w1, [], 0.0)


class TestEquivalences:
    @pytest.mark.parametrize("seq,x,expected", [
        (HARMONIC, 0.0, True), (ALTERNATING, 0.5, False), (CONSTANT, 0.3, True),
    ])
    def test_norm_equivalence(self, w2, seq, x, expected):
        rep = check_norm_equivalence(w2, seq, x)
        assert rep.agree, rep.details
        assert rep.order_verdict is expected
        assert rep.details["normal_constant"] == 1.0
        if expected:
            assert all(t <= b for t, b in zip(rep.details["tail_norms"], rep.details["order_bound"]))

    def test_norm_equivalence_wedge(self):
        from modcone.cone import fixed_cone
        from modcone.metrics import from_cone_metric
        w = from_cone_metric(abs_cone_metric(fixed_cone("wedge2")))
        # off the orthant the norm radius is only sufficient: norm verdict implies order verdict
        for seq, x in ((HARMONIC, 0.0), (ALTERNATING, 0.5)):
            rep = check_norm_equivalence(w, seq, x)
            assert rep.order_verdict or not rep.other_verdict
        rep = check_norm_equivalence(w, [0.8 ** n for n in range(150)], 0.0)
        assert rep.agree and rep.order_verdict

    @pytest.mark.parametrize("seq,x,expected", [
        (HARMONIC, 0.0, True), (ALTERNATING, 0.5, False), (CONSTANT, 0.3, True),
    ])
    def test_scalarized_equivalence(self, w2, seq, x, expected):
        rep = check_scalarized_equivalence(w2, np.ones(2), seq, x, lam_grid=(0.1, 0.5, 1.0))
        assert rep.agree, rep.details
        assert rep.order_verdict is expected

    def test_scalarized_equivalence_small_lambda(self, w2):
        # at lam = 0.01 the harmonic window needs n > 10^4: both verdicts say no
        rep = check_scalarized_equivalence(w2, np.ones(2), HARMONIC, 0.0, lam_grid=(0.01, 1.0))
        assert rep.agree and rep.order_verdict is False
        assert rep.details["scalar_first_index"][1] == 2

    def test_constant_scalarized_is_zero(self, w2):
        rep = check_scalarized_equivalence(w2, np.ones(2), CONSTANT, 0.3)
        assert rep.details["tail_sup"] == [0.0] * len(rep.details["lam_grid"])


class TestWitnesses:
    def test_hausdorff_example(self, w1):
        X = grid(0, 2, 101)
        wit = hausdorff_witness(w1, 0.0, 1.0, X)
        assert wit.found and wit.exact
        r = wit.c0[0] / (2 * wit.n)
        # membership oracle: no grid point within r^2 of both
        assert not any(ball_oracle(0.0, r, p) and ball_oracle(1.0, r, p) for p in X.points)

    def test_hausdorff_finer_grid(self, w1):
        assert hausdorff_witness(w1, 0.0, 1.0, grid(0, 2, 1001)).found

    def test_hausdorff_distinct_required(self, w1):
        with pytest.raises(ValueError):
            hausdorff_witness(w1, 1.0, 1.0, grid(0, 2, 11))

    def test_local_base_examples(self, w2):
        assert local_base_inclusion(w2, 0.0, [1, 1], [0.3, 0.3]).n == 4
        assert local_base_inclusion(w2, 0.0, [1, 1], [2, 2]).n == 1

    def test_local_base_minimal_and_spot_checked(self, w2, rng):
        P = w2.cone
        X = grid(-2, 2, 201)
        for c, c1 in zip(sample_interior(P, rng, 30), sample_interior(P, rng, 30)):
            res = local_base_inclusion(w2, 0.0, c, c1, points=X)
            assert res.ok
            assert P.way_below(c / res.n, c1)
            if res.n > 1:
                assert not P.way_below(c / (res.n - 1), c1)

    def test_local_base_needs_interior(self, w2):
        with pytest.raises(ConeError):
            local_base_inclusion(w2, 0.0, [1, 0], [1, 1])


def test_sequential_continuity_of_picard_map(w1):
    def T(x):
        return x / 2 + 1

    seq = [2 + 0.5 ** n for n in range(1, 80)]
    chk = check_sequential_continuity(w1, T, seq, 2.0)
    assert chk.inputs.verdict and chk.images.verdict and chk.ok
