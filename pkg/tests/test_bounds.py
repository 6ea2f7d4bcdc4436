import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from arfs_lab.bounds import (
    coef_bound_constants,
    decay_constants,
    family_pt_bound,
    nu,
    nu_product_bound,
    verify_coefficient_bound,
    verify_decay,
)
from arfs_lab.errors import (
    DegenerateInput,
    GapViolated,
    HypothesisViolated,
    ThresholdViolated,
)
from arfs_lab.expsums import ExponentSet, ExpSum

LN2 = math.log(2.0)


class TestNu:
    def test_anchors(self):
        assert nu(1.0, 3.0) == 2.0
        assert nu(0.0, 2.5) == 1.0

    def test_degenerate(self):
        with pytest.raises(DegenerateInput):
            nu(1.0, 1.0)

    @given(
        st.floats(min_value=0.0, max_value=50.0),
        st.floats(min_value=0.0, max_value=50.0),
    )
    def test_symmetric(self, x, y):
        if x != y:
            assert nu(x, y) == nu(y, x)


class TestNuProductBound:
    def test_single_value_anchor(self):
        # lhs = nu(1, 2) = 3; rhs = exp(2 + 8 ln2) = e^2 * 256
        lhs, rhs = nu_product_bound(1.0, [2.0], 1.0)
        assert lhs == 3.0
        assert rhs == pytest.approx(math.exp(2.0) * 256.0, rel=1e-12)
        assert lhs <= rhs

    def test_empty_product(self):
        lhs, rhs = nu_product_bound(1.0, [], 1.0)
        assert lhs == 1.0
        assert rhs == pytest.approx(256.0, rel=1e-12)

    def test_scaling_reduces_to_unit_gap(self):
        # the general-gap bound is the unit-gap bound of the rescaled inputs
        x, ys, delta = 2.7, [0.9, 5.3, 7.9], 0.45
        lhs, rhs = nu_product_bound(x, ys, delta)
        lhs1, rhs1 = nu_product_bound(x / delta, [y / delta for y in ys], 1.0)
        assert lhs == pytest.approx(lhs1, rel=1e-12)
        assert rhs == pytest.approx(rhs1, rel=1e-12)

    def test_gap_violation(self):
        with pytest.raises(GapViolated):
            nu_product_bound(1.0, [1.5], 1.0)
        with pytest.raises(GapViolated):
            nu_product_bound(1.0, [2.0, 2.5], 1.0)

    def test_random_configurations(self):
        rng = np.random.default_rng(77)
        for _ in range(100):
            n = int(rng.integers(0, 9))
            delta = float(rng.uniform(0.2, 2.0))
            pts = np.cumsum(delta * rng.uniform(1.0, 2.5, n + 1))
            pick = int(rng.integers(0, n + 1))
            lhs, rhs = nu_product_bound(float(pts[pick]), np.delete(pts, pick), delta)
            assert lhs <= rhs


class TestConstants:
    def test_coef_constants_anchor(self):
        a, b = coef_bound_constants(1.0, 1.0)
        assert a == pytest.approx(math.exp(2.0) * 2.0**5.5, rel=1e-12)
        assert b == pytest.approx(5.0 + 5.0 * LN2, rel=1e-12)

    def test_large_gap_limit(self):
        a, b = coef_bound_constants(1e12, 2.0)
        assert a == pytest.approx(8.0 * math.exp(4.0), rel=1e-9)
        assert b == pytest.approx(9.0, rel=1e-9)

    def test_monotone_in_reciprocal_cap(self):
        pairs = [coef_bound_constants(1.0, m) for m in (0.5, 1.0, 2.0, 4.0)]
        assert all(p1[0] < p2[0] and p1[1] < p2[1] for p1, p2 in zip(pairs, pairs[1:]))

    def test_decay_constants_anchor(self):
        consts = decay_constants(1.0, 1.0)
        assert consts.m * consts.M == 1.0
        assert consts.c == pytest.approx(math.exp(7.0) * 2.0**10.5, rel=1e-12)
        assert consts.threshold == pytest.approx(6.0 + 5.0 * LN2, rel=1e-12)

    def test_identity_on_grid(self):
        for delta in (0.1, 0.7, 3.0, 10.0):
            for m_cap in (0.1, 1.0, 4.5, 10.0):
                consts = decay_constants(delta, m_cap)
                rebuilt = consts.a * consts.M * math.exp(
                    consts.m * (consts.b + 1.0) - 1.0
                )
                assert abs(consts.c - rebuilt) / consts.c <= 1e-12


class TestVerifyCoefficientBound:
    def test_single_term_huge_slack(self):
        rep = verify_coefficient_bound(ExpSum([(1.0, 1.0)]), 1.0, 1.0)
        assert rep.passed
        # bound is a e^b ~ 1.59e6 against |a_1| = 1
        assert rep.margin > 1e6

    def test_two_term_anchor(self):
        rep = verify_coefficient_bound(ExpSum([(1.0, 1.0), (-1.0, 2.0)]), 1.0, 1.5)
        assert rep.passed

    def test_reciprocal_cap_violation(self):
        with pytest.raises(HypothesisViolated):
            verify_coefficient_bound(ExpSum([(1.0, 1.0), (1.0, 2.0)]), 1.0, 1.0)

    def test_gap_violation(self):
        with pytest.raises(HypothesisViolated):
            verify_coefficient_bound(ExpSum([(1.0, 1.0), (1.0, 1.5)]), 1.0, 4.0)

    def test_report_shape(self):
        rep = verify_coefficient_bound(ExpSum([(1.0, 1.0)]), 1.0, 1.0)
        data = rep.to_jsonable()
        assert set(data) == {"check", "pass", "margin", "witness"}


class TestVerifyDecay:
    def test_single_term_past_threshold(self):
        # threshold for delta=M=1 is 6 + 5 ln2 ~ 9.47, and c > 1
        rep = verify_decay(ExpSum([(1.0, 1.0)]), 1.0, 1.0, [10.0])
        assert rep.passed

    def test_below_threshold_rejected(self):
        threshold = decay_constants(1.0, 1.0).threshold
        with pytest.raises(ThresholdViolated):
            verify_decay(ExpSum([(1.0, 1.0)]), 1.0, 1.0, [threshold - 1.0])

    def test_random_admissible(self):
        rng = np.random.default_rng(13)
        for _ in range(25):
            n = int(rng.integers(1, 5))
            delta = float(rng.uniform(0.4, 1.2))
            alphas = 0.6 + np.cumsum(delta * rng.uniform(1.0, 2.0, n))
            coefs = rng.uniform(-1.0, 1.0, n)
            coefs[coefs == 0.0] = 0.5
            f = ExpSum(zip(coefs, alphas))
            big_m = float(sum(1.0 / a for a in alphas) * 1.1)
            t0 = decay_constants(delta, big_m).threshold
            rep = verify_decay(f, delta, big_m, list(t0 + rng.uniform(0, 20, 3)), tol=1e-4)
            assert rep.passed


class TestFamilyPtBound:
    def test_three_singletons(self):
        rep = family_pt_bound(
            [ExponentSet([1.0]), ExponentSet([2.0]), ExponentSet([3.0])],
            1.0, 1.0, 10.0,
        )
        assert rep.passed
        # slowest member dominates: max ~ e^{-10}
        assert rep.witness["max_observed"] == pytest.approx(math.exp(-10.0), rel=1e-2)

    def test_empty_family_list(self):
        rep = family_pt_bound([], 1.0, 1.0, 10.0)
        assert rep.passed and rep.witness["max_observed"] == 0.0

    def test_below_threshold(self):
        with pytest.raises(ThresholdViolated):
            family_pt_bound([ExponentSet([1.0])], 1.0, 1.0, 5.0)

    def test_hypothesis_violations(self):
        with pytest.raises(HypothesisViolated):
            family_pt_bound([ExponentSet([1.0, 1.5])], 1.0, 2.0, 20.0)
        with pytest.raises(HypothesisViolated):
            family_pt_bound([ExponentSet([0.5])], 1.0, 1.0, 10.0)

    def test_values_shrink_geometrically_along_grid(self):
        families = [ExponentSet([1.0]), ExponentSet([1.0, 2.0])]
        consts = decay_constants(1.0, 1.5)
        t0 = consts.threshold
        first = family_pt_bound(families, 1.0, 1.5, t0)
        last = family_pt_bound(families, 1.0, 1.5, t0 + 6.0)
        # decay at rate at least m across the grid span
        ceiling = first.witness["max_observed"] * math.exp(-consts.m * 6.0)
        assert last.witness["max_observed"] <= ceiling * 1.01 + 1e-9
