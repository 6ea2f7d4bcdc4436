import math

import numpy as np
import pytest

from arfs_lab.distances import (
    _chain_error_certificate,
    density_gap_bound,
    golitschek_approximant,
    l2_distance_closed_form,
    l2_distance_gram_oracle,
    sup_distance_bound,
)
from arfs_lab.errors import (
    DegenerateInput,
    IllConditioned,
    NearCoincidentExponents,
    PreconditionViolated,
)
from arfs_lab.expsums import ExponentSet, ExpSum, sup_norm


class TestGramOracle:
    """The Gram route is the independent oracle; its anchors are hand
    computations with the monomial inner products 1/(p+q+1)."""

    def test_power_zero_against_x(self):
        # dist^2 = 1 - (1/2)^2 / (1/3) = 1/4
        assert l2_distance_gram_oracle(0.0, [1.0]) == pytest.approx(0.5, abs=1e-12)

    def test_power_two_against_x(self):
        # dist^2 = 1/5 - (1/4)^2 / (1/3) = 1/80
        assert l2_distance_gram_oracle(2.0, [1.0]) == pytest.approx(
            1.0 / math.sqrt(80.0), rel=1e-12
        )

    def test_empty_span_is_plain_norm(self):
        assert l2_distance_gram_oracle(5.0, []) == pytest.approx(
            1.0 / math.sqrt(11.0), rel=1e-14
        )

    def test_ill_conditioned_rejected(self):
        with pytest.raises(IllConditioned):
            l2_distance_gram_oracle(0.3, [5.0, 5.00001, 5.00002, 5.00003, 5.00004])

    def test_dimension_cap(self):
        with pytest.raises(ValueError):
            l2_distance_gram_oracle(0.3, list(np.linspace(1, 40, 13)))


class TestClosedForm:
    def test_anchor_values(self):
        assert l2_distance_closed_form(0.0, [1.0]) == pytest.approx(0.5, abs=1e-15)
        assert l2_distance_closed_form(2.0, [1.0]) == pytest.approx(
            1.0 / (4.0 * math.sqrt(5.0)), rel=1e-15
        )
        assert l2_distance_closed_form(3.0, []) == pytest.approx(
            1.0 / math.sqrt(7.0), rel=1e-15
        )

    def test_degenerate_rejected(self):
        with pytest.raises(DegenerateInput):
            l2_distance_closed_form(2.0, [2.0 + 1e-14])
        with pytest.raises(DegenerateInput):
            l2_distance_closed_form(1.0, [2.0, 2.0 + 1e-14])

    def test_below_half_rejected(self):
        with pytest.raises(ValueError):
            l2_distance_closed_form(-0.6, [1.0])

    def test_matches_oracle_on_random_instances(self):
        rng = np.random.default_rng(5)
        done = 0
        while done < 50:
            n = int(rng.integers(0, 7))
            vals = np.sort(rng.uniform(0.5, 20.0, n + 1))
            if n and np.min(np.diff(vals)) < 0.1:
                continue
            pick = int(rng.integers(0, n + 1))
            gamma = float(vals[pick])
            others = np.delete(vals, pick)
            try:
                gram = l2_distance_gram_oracle(gamma, others)
            except IllConditioned:
                continue
            closed = l2_distance_closed_form(gamma, others)
            assert gram == pytest.approx(closed, rel=1e-9)
            done += 1


class TestGolitschek:
    def test_single_exponent_anchor(self):
        # chain: f_1 = e^-t - e^-2t whose true sup-norm is 1/4 at t = ln 2
        res = golitschek_approximant(1.0, ExponentSet([2.0]))
        assert res.bound == pytest.approx(0.5, abs=1e-15)
        assert res.approximant.terms == ((1.0, 2.0),)
        assert res.full_chain[-1].terms == ((1.0, 1.0), (-1.0, 2.0))
        assert res.certified_error.upper == pytest.approx(0.25, abs=1e-5)
        assert res.certified_error.upper <= res.bound + 1e-6

    def test_two_exponent_bound(self):
        res = golitschek_approximant(1.0, ExponentSet([2.0, 4.0]))
        assert res.bound == pytest.approx(0.375, abs=1e-15)
        assert res.certified_error.upper <= 0.375 + 1e-6

    def test_coincident_alpha_rejected(self):
        with pytest.raises(NearCoincidentExponents):
            golitschek_approximant(2.0, ExponentSet([1.0, 2.0]))

    def test_leading_coefficient_and_span_structure(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            n = int(rng.integers(1, 6))
            vals = np.sort(0.3 + np.cumsum(rng.uniform(0.25, 1.5, n + 1)))
            pick = int(rng.integers(0, n + 1))
            alpha = float(vals[pick])
            exps = ExponentSet(np.delete(vals, pick))
            res = golitschek_approximant(alpha, exps)
            lead = [a for a, e in res.full_chain[-1].terms if abs(e - alpha) < 1e-9]
            assert len(lead) == 1 and abs(lead[0] - 1.0) <= 1e-12
            for _, e in res.approximant.terms:
                assert any(abs(e - ak) < 1e-9 for ak in exps.alphas)

    def test_chain_contraction(self):
        alpha = 1.3
        exps = ExponentSet([0.4, 2.2, 3.7])
        res = golitschek_approximant(alpha, exps)
        tol = 1e-6
        prev = sup_norm(res.full_chain[0], tol)
        for ak, f_k in zip(exps.alphas, res.full_chain[1:]):
            cur = sup_norm(f_k, tol)
            assert cur.upper <= abs(1.0 - alpha / ak) * prev.upper + tol
            prev = cur

    def test_reconstruction_matches_certificate(self):
        # independent route: rebuild e^{-alpha t} - approximant explicitly
        alpha, exps = 0.9, ExponentSet([1.7, 3.1])
        res = golitschek_approximant(alpha, exps, tol=1e-7)
        rebuilt = ExpSum([(1.0, alpha)]) - res.approximant
        est = sup_norm(rebuilt, 1e-7)
        assert est.lower <= res.certified_error.upper + 1e-7
        assert res.certified_error.lower <= est.upper + 1e-7

    def test_chain_certificate_matches_coefficient_route(self):
        alpha, exps = 1.0, ExponentSet([2.0, 4.0])
        chain = _chain_error_certificate(alpha, exps, 1e-5)
        coeff = sup_norm(golitschek_approximant(alpha, exps).full_chain[-1], 1e-5)
        assert chain.lower <= coeff.upper + 1e-5
        assert coeff.lower <= chain.upper + 1e-5

    def test_crowded_exponents_use_chain_route(self):
        # coefficient representation cancels catastrophically here; the
        # certificate must still come in under the product bound
        exps = ExponentSet([1.0 + 0.01 * k for k in range(15)])
        res = golitschek_approximant(0.5, exps, tol=1e-4)
        assert res.certified_error.upper <= res.bound + 1e-4
        assert res.certified_error.upper < 1e-3

    def test_json_shape(self):
        res = golitschek_approximant(1.0, ExponentSet([2.0]))
        data = res.to_jsonable()
        assert set(data) == {"approximant", "bound", "certified_error_upper"}


class TestSupDistanceBound:
    def test_anchors(self):
        assert sup_distance_bound(1.0, ExponentSet([2.0])) == 0.5
        assert sup_distance_bound(1.0, ExponentSet([2.0, 4.0])) == 0.375

    def test_coincident_warns_and_returns_zero(self):
        with pytest.warns(UserWarning):
            assert sup_distance_bound(3.0, ExponentSet([3.0 + 1e-13])) == 0.0


class TestDensityGapBound:
    def test_anchor_dominates_product(self):
        e = ExponentSet([2.0, 4.0])
        val = density_gap_bound(1.0, e)
        assert val == pytest.approx(math.exp(-0.75), rel=1e-15)
        assert sup_distance_bound(1.0, e) <= val

    def test_near_alpha(self):
        assert density_gap_bound(1.0, ExponentSet([1.0001])) == pytest.approx(
            math.exp(-1.0 / 1.0001), rel=1e-12
        )

    def test_precondition(self):
        with pytest.raises(PreconditionViolated):
            density_gap_bound(2.0, ExponentSet([1.0]))

    def test_domination_on_random_admissible_sets(self):
        rng = np.random.default_rng(23)
        for _ in range(50):
            n = int(rng.integers(1, 7))
            alpha = float(rng.uniform(0.2, 2.0))
            exps = ExponentSet(alpha + np.cumsum(rng.uniform(0.05, 2.0, n)))
            assert sup_distance_bound(alpha, exps) <= density_gap_bound(alpha, exps) + 1e-12

    def test_monotone_decrease_to_zero_on_nested_sets(self):
        alpha = 0.5
        ladder = [1.0 + 0.25 * k for k in range(12)]
        values = [
            density_gap_bound(alpha, ExponentSet(ladder[: n + 1]))
            for n in range(len(ladder))
        ]
        assert all(b < a for a, b in zip(values, values[1:]))
        assert values[-1] == pytest.approx(
            math.exp(-alpha * ExponentSet(ladder).beta()), rel=1e-12
        )
