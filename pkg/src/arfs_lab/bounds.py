"""Explicit-constant calculus for decay of gap-separated exponential sums.

Under the two hypotheses "consecutive exponents differ by at least delta"
and "sum of reciprocal exponents is at most M", every f in the span decays
like c * exp(-t/M) once t passes an explicit threshold, with

    a = exp(2M + 5 ln2 / (2 delta) + 3 ln2)
    b = 4M + 5 ln2 / delta + 1
    m = 1/M
    c = M exp(2M + 2/M + 5 ln2/(2 delta) + 5 ln2/(delta M) + 3 ln2 + 3)

and the coefficient bound |a_k| <= a exp(b alpha_k) ||f||. The identity
c = a M exp(m (b + 1) - 1) ties the two constant sets together; the decay
threshold is b + 1. This module computes the constants, the product bound
on nu(x, y) = (x+y)/|x-y| they rest on, and one-sided numerical
verification of the bounds on concrete exponential sums.

Everything here is pure and deterministic over immutable inputs; reports
are returned, never asserted, so aggregation stays with the caller.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DegenerateInput,
    GapViolated,
    HypothesisViolated,
    ThresholdViolated,
)
from .expsums import ExponentSet, ExpSum, gap_check, point_eval_restriction_norm, sup_norm
from .reporting import Report

LN2 = math.log(2.0)


def nu(x: float, y: float) -> float:
    """(x + y) / |x - y| for nonnegative x != y."""
    if x < 0.0 or y < 0.0:
        raise ValueError("arguments must be nonnegative")
    if x == y:
        raise DegenerateInput("nu(x, x) is undefined")
    return (x + y) / abs(x - y)


def nu_product_bound(
    x: float, ys: Sequence[float], delta: float
) -> tuple[float, float]:
    """Exact product prod_k nu(x, y_k) and its certified upper bound

        exp((4 sum_k 1/y_k + 5 ln2 / delta) x + 3 ln2),

    valid when |x - y_k| >= delta and |y_k - y_l| >= delta for k != l.
    Returns (lhs, rhs); the hypotheses are checked with a 1e-12 relative
    slack and GapViolated is raised on failure.
    """
    if delta <= 0.0:
        raise ValueError("delta must be positive")
    if x <= 0.0 or any(y <= 0.0 for y in ys):
        raise ValueError("x and every y_k must be positive")
    slack = delta * (1.0 - 1e-12)
    ys = [float(y) for y in ys]
    for y in ys:
        if abs(x - y) < slack:
            raise GapViolated(f"|x - y| = {abs(x - y)} below delta = {delta}")
    for i in range(len(ys)):
        for j in range(i + 1, len(ys)):
            if abs(ys[i] - ys[j]) < slack:
                raise GapViolated("span values violate the pairwise gap")
    lhs = 1.0
    for y in ys:
        lhs *= nu(x, y)
    rhs = math.exp((4.0 * sum(1.0 / y for y in ys) + 5.0 * LN2 / delta) * x + 3.0 * LN2)
    return lhs, rhs


def coef_bound_constants(delta: float, M: float) -> tuple[float, float]:
    """The pair (a, b) of the coefficient bound |a_k| <= a e^{b alpha_k} ||f||."""
    if delta <= 0.0 or M <= 0.0:
        raise ValueError("delta and M must be positive")
    a = math.exp(2.0 * M + 5.0 * LN2 / (2.0 * delta) + 3.0 * LN2)
    b = 4.0 * M + 5.0 * LN2 / delta + 1.0
    return a, b


@dataclass(frozen=True)
class BoundConstants:
    """The tuple (delta, M, m, a, b, c) of explicit decay constants."""

    delta: float
    M: float
    m: float
    a: float
    b: float
    c: float

    @property
    def threshold(self) -> float:
        """The time b + 1 past which the decay bound is asserted."""
        return self.b + 1.0


def decay_constants(delta: float, M: float) -> BoundConstants:
    """All explicit constants for the gap/reciprocal-sum hypotheses."""
    a, b = coef_bound_constants(delta, M)
    c = M * math.exp(
        2.0 * M
        + 2.0 / M
        + 5.0 * LN2 / (2.0 * delta)
        + 5.0 * LN2 / (delta * M)
        + 3.0 * LN2
        + 3.0
    )
    return BoundConstants(delta=delta, M=M, m=1.0 / M, a=a, b=b, c=c)


def _check_hypotheses(f: ExpSum, delta: float, M: float) -> ExponentSet:
    if not f.terms:
        raise HypothesisViolated("empty sum has no exponent set")
    E = ExponentSet(f.exponents())
    if not gap_check(E, delta):
        raise HypothesisViolated(f"exponents violate the {delta}-gap condition")
    if E.beta() > M * (1.0 + 1e-12):
        raise HypothesisViolated(f"reciprocal sum {E.beta()} exceeds M = {M}")
    return E


def verify_coefficient_bound(
    f: ExpSum, delta: float, M: float, tol: float = 1e-6
) -> Report:
    """One-sided check of |a_k| <= a e^{b alpha_k} ||f|| on a concrete sum.

    The sup norm enters through its certified lower estimate, which makes
    the check harder than the bound itself; the pass threshold absorbs the
    bracket width rigorously.
    """
    _check_hypotheses(f, delta, M)
    a, b = coef_bound_constants(delta, M)
    est = sup_norm(f, tol)
    margins = []
    thresholds = []
    for coef, exponent in f.terms:
        scale = a * math.exp(b * exponent)
        margins.append(scale * est.lower - abs(coef))
        thresholds.append(-tol - scale * (est.upper - est.lower))
    worst = int(np.argmin(np.array(margins) - np.array(thresholds)))
    passed = all(m >= th for m, th in zip(margins, thresholds))
    return Report(
        check="coefficient-bound",
        passed=passed,
        margin=float(margins[worst]),
        witness={
            "a": a,
            "b": b,
            "norm_lower": est.lower,
            "norm_upper": est.upper,
            "margins": [float(m) for m in margins],
            "worst_exponent": float(f.terms[worst][1]),
        },
    )


def verify_decay(
    f: ExpSum, delta: float, M: float, ts: Sequence[float], tol: float = 1e-6
) -> Report:
    """One-sided check of |f(t)| <= c e^{-m t} ||f|| at the given times.

    Every t must be at or past the threshold b + 1 (ThresholdViolated
    otherwise). As with the coefficient check, the conservative lower sup-norm
    estimate is used on the right-hand side.
    """
    _check_hypotheses(f, delta, M)
    consts = decay_constants(delta, M)
    for t in ts:
        if t < consts.threshold * (1.0 - 1e-12):
            raise ThresholdViolated(
                f"t = {t} is below the decay threshold {consts.threshold}"
            )
    est = sup_norm(f, tol)
    margins = []
    thresholds = []
    for t in ts:
        envelope = consts.c * math.exp(-consts.m * t)
        margins.append(envelope * est.lower - abs(f.eval(t)))
        thresholds.append(-tol - envelope * (est.upper - est.lower))
    if margins:
        worst = int(np.argmin(np.array(margins) - np.array(thresholds)))
        margin = float(margins[worst])
        witness_t = float(ts[worst])
    else:
        margin, witness_t = math.inf, math.nan
    passed = all(m >= th for m, th in zip(margins, thresholds))
    return Report(
        check="decay-bound",
        passed=passed,
        margin=margin,
        witness={
            "c": consts.c,
            "m": consts.m,
            "threshold": consts.threshold,
            "norm_lower": est.lower,
            "margins": [float(m) for m in margins],
            "worst_t": witness_t,
        },
    )


def family_pt_bound(
    families: Sequence[ExponentSet],
    delta: float,
    M: float,
    t: float,
    tol: float = 1e-4,
    dim_cap: int = 6,
) -> Report:
    """Uniform point-evaluation bound across a family of exponential spans:

        max over families of ||p_t restricted to the span|| <= c e^{-m t}

    for t past the threshold. Each family must satisfy the gap condition and
    the reciprocal-sum cap. An empty family list passes vacuously with max 0.
    """
    consts = decay_constants(delta, M)
    if t < consts.threshold * (1.0 - 1e-12):
        raise ThresholdViolated(f"t = {t} is below the threshold {consts.threshold}")
    values = []
    for E in families:
        if not gap_check(E, delta):
            raise HypothesisViolated("a family violates the gap condition")
        if E.beta() > M * (1.0 + 1e-12):
            raise HypothesisViolated("a family exceeds the reciprocal-sum cap")
        values.append(point_eval_restriction_norm(E, t, tol, dim_cap=dim_cap))
    bound = consts.c * math.exp(-consts.m * t)
    max_observed = max(values, default=0.0)
    return Report(
        check="point-evaluation-family-bound",
        passed=max_observed <= bound + tol,
        margin=bound - max_observed,
        witness={
            "t": t,
            "bound": bound,
            "max_observed": max_observed,
            "per_family": [float(v) for v in values],
        },
    )
