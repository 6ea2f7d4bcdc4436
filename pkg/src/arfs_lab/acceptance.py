"""The acceptance suite: twelve numbered end-to-end checks, each returning a
structured Report. The CLI's ``accept`` command prints one line per check;
the pytest suite asserts each one individually. All randomness is seeded, so
the suite is deterministic.
"""

from __future__ import annotations

import math

import numpy as np

from .bounds import (
    decay_constants,
    family_pt_bound,
    nu_product_bound,
    verify_coefficient_bound,
    verify_decay,
)
from .decompose import greedy_decompose, min_cost_decompose, representation_constant
from .distances import (
    density_gap_bound,
    golitschek_approximant,
    l2_distance_closed_form,
    l2_distance_gram_oracle,
)
from .errors import IllConditioned
from .expsums import ExponentSet, ExpSum
from .reporting import Report
from .spaces import (
    DistanceFunctional,
    DualFunctional,
    NormedSpace,
    SeminormFunctional,
    Subspace,
    SubspaceFamily,
    epsilon_star,
    perturb_family,
    restriction_norm,
    rho0,
    stability_floor,
    subadditive_bound_check,
)


# ---------------------------------------------------------------------------
# seeded generators (shared with the test suite)
# ---------------------------------------------------------------------------

def separated_values(
    rng: np.random.Generator, count: int, lo: float, hi: float, sep: float
) -> np.ndarray:
    """``count`` sorted values in [lo, hi] with consecutive differences >= sep."""
    slack = hi - lo - sep * (count - 1)
    if slack <= 0:
        raise ValueError("interval too small for the requested separation")
    u = np.sort(rng.uniform(0.0, 1.0, count))
    return lo + slack * u + sep * np.arange(count)


def random_admissible_expsum(
    rng: np.random.Generator, max_terms: int = 5
) -> tuple[ExpSum, float, float]:
    """A sum with unit-scale coefficients whose exponents satisfy a gap
    condition and reciprocal-sum cap; returns (f, delta, M)."""
    n = int(rng.integers(1, max_terms + 1))
    delta = float(rng.uniform(0.3, 1.5))
    alphas = [float(rng.uniform(0.5, 2.0))]
    for _ in range(n - 1):
        alphas.append(alphas[-1] + delta * float(rng.uniform(1.0, 2.0)))
    coefs = rng.uniform(-1.0, 1.0, n)
    coefs[np.abs(coefs) < 0.05] = 0.25
    big_m = sum(1.0 / a for a in alphas) * float(rng.uniform(1.0, 1.3))
    return ExpSum(zip(coefs, alphas)), delta, big_m


def random_spanning_family(
    rng: np.random.Generator,
    dim: int,
    norm_kind: str = "l2",
    n_members: int | None = None,
    min_eps: float = 0.05,
    max_tries: int = 200,
) -> SubspaceFamily:
    """A random family of proper subspaces that spans the ambient space and
    whose criterion constant is not degenerate (at least ``min_eps``)."""
    space = NormedSpace(dim, norm_kind)
    for _ in range(max_tries):
        k = n_members if n_members is not None else int(rng.integers(dim, dim + 3))
        members = []
        for i in range(k):
            d = int(rng.integers(1, dim)) if dim > 1 else 1
            members.append((f"m{i}", Subspace(rng.standard_normal((d, dim)))))
        family = SubspaceFamily(space, members)
        if not family.spans_ambient():
            continue
        if epsilon_star(family) >= min_eps:
            return family
    raise RuntimeError("could not draw a well-conditioned spanning family")


# ---------------------------------------------------------------------------
# criteria
# ---------------------------------------------------------------------------

def criterion_01_l2_oracle_equivalence() -> Report:
    """Closed-form vs Gram-oracle L2[0,1] distances on 200 random instances
    plus the hand-computed anchor (power 0 against the span of x)."""
    rng = np.random.default_rng(101)
    worst = 0.0
    done = 0
    redrawn = 0
    while done < 200:
        n = int(rng.integers(0, 7))
        values = separated_values(rng, n + 1, 0.5, 20.0, 0.1)
        pick = int(rng.integers(0, n + 1))
        gamma = float(values[pick])
        others = np.delete(values, pick)
        try:
            gram = l2_distance_gram_oracle(gamma, others)
        except IllConditioned:
            # the oracle refuses condition estimates above 1e12; redraw
            redrawn += 1
            continue
        closed = l2_distance_closed_form(gamma, others)
        worst = max(worst, abs(closed - gram) / closed)
        done += 1
    anchor = abs(l2_distance_closed_form(0.0, [1.0]) - 0.5)
    anchor_gram = abs(l2_distance_gram_oracle(0.0, [1.0]) - 0.5)
    passed = worst <= 1e-9 and anchor <= 1e-12 and anchor_gram <= 1e-12
    return Report(
        "C01-l2-distance-oracle-equivalence",
        passed,
        1e-9 - worst,
        {"max_rel_diff": worst, "anchor_err": max(anchor, anchor_gram), "redrawn": redrawn},
    )


def criterion_02_golitschek_soundness() -> Report:
    """Certified approximation error against the product bound on 100 random
    instances; anchor: one exponent doubling the target rate gives bound 1/2
    and true error 1/4."""
    rng = np.random.default_rng(202)
    worst = math.inf
    for _ in range(100):
        n = int(rng.integers(1, 6))
        values = separated_values(rng, n + 1, 0.3, 6.0, 0.25)
        pick = int(rng.integers(0, n + 1))
        alpha = float(values[pick])
        exps = ExponentSet(np.delete(values, pick))
        result = golitschek_approximant(alpha, exps, tol=1e-6)
        worst = min(worst, result.bound + 1e-6 - result.certified_error.upper)
    anchor = golitschek_approximant(1.0, ExponentSet([2.0]), tol=1e-6)
    anchor_ok = (
        abs(anchor.bound - 0.5) <= 1e-12
        and abs(anchor.certified_error.upper - 0.25) <= 1e-5
    )
    return Report(
        "C02-golitschek-soundness",
        worst >= 0.0 and anchor_ok,
        worst,
        {"min_margin": worst, "anchor_bound": anchor.bound,
         "anchor_error_upper": anchor.certified_error.upper},
    )


def criterion_03_nu_product() -> Report:
    """Product of nu values against its exponential bound on 500 random
    gap-respecting configurations."""
    rng = np.random.default_rng(303)
    worst = math.inf
    violations = 0
    for _ in range(500):
        n = int(rng.integers(0, 9))
        delta = float(rng.uniform(0.2, 2.0))
        gaps = delta * rng.uniform(1.0, 2.5, n + 1)
        points = np.cumsum(gaps) + rng.uniform(0.0, delta)
        pick = int(rng.integers(0, n + 1))
        x = float(points[pick])
        ys = np.delete(points, pick)
        lhs, rhs = nu_product_bound(x, ys, delta)
        worst = min(worst, rhs - lhs)
        if lhs > rhs:
            violations += 1
    return Report(
        "C03-nu-product-bound",
        violations == 0,
        worst,
        {"violations": violations, "min_gap": worst},
    )


def criterion_04_constants_identity() -> Report:
    """c = a M e^{m(b+1)-1} to 1e-12 relative on a 20x20 grid of (delta, M)
    in [0.1, 10]^2; anchor: delta = M = 1 gives c = e^7 * 2^10.5."""
    worst = 0.0
    for delta in np.linspace(0.1, 10.0, 20):
        for big_m in np.linspace(0.1, 10.0, 20):
            consts = decay_constants(float(delta), float(big_m))
            rebuilt = consts.a * consts.M * math.exp(consts.m * (consts.b + 1.0) - 1.0)
            worst = max(worst, abs(consts.c - rebuilt) / consts.c)
    anchor = decay_constants(1.0, 1.0).c
    anchor_err = abs(anchor - math.exp(7.0) * 2.0**10.5) / anchor
    passed = worst <= 1e-12 and anchor_err <= 1e-12
    return Report(
        "C04-constants-identity",
        passed,
        1e-12 - worst,
        {"max_rel_err": worst, "anchor_c": anchor, "anchor_rel_err": anchor_err},
    )


def criterion_05_coefficient_and_decay_bounds() -> Report:
    """Coefficient and decay bounds on 200 random admissible sums each."""
    rng = np.random.default_rng(505)
    coefficient_failures = 0
    decay_failures = 0
    worst = math.inf
    for _ in range(200):
        f, delta, big_m = random_admissible_expsum(rng)
        rep = verify_coefficient_bound(f, delta, big_m, tol=1e-4)
        if not rep.passed:
            coefficient_failures += 1
        worst = min(worst, rep.margin)
    for _ in range(200):
        f, delta, big_m = random_admissible_expsum(rng)
        threshold = decay_constants(delta, big_m).threshold
        ts = threshold + rng.uniform(0.0, 20.0, 3)
        rep = verify_decay(f, delta, big_m, list(ts), tol=1e-4)
        if not rep.passed:
            decay_failures += 1
        worst = min(worst, rep.margin)
    passed = coefficient_failures == 0 and decay_failures == 0
    return Report(
        "C05-coefficient-and-decay-bounds",
        passed,
        worst,
        {"coefficient_failures": coefficient_failures, "decay_failures": decay_failures},
    )


def criterion_06_point_eval_family_bound() -> Report:
    """Uniform point-evaluation bound for singleton and pair exponent sets
    with gap 1 and reciprocal-sum cap 1.5, on a time grid past the
    threshold."""
    delta, big_m = 1.0, 1.5
    families = [
        ExponentSet([2.0 / 3.0]),
        ExponentSet([1.0]),
        ExponentSet([3.0]),
        ExponentSet([1.0, 2.0]),
        ExponentSet([2.0, 3.5]),
    ]
    threshold = decay_constants(delta, big_m).threshold
    worst = math.inf
    failures = 0
    grid = [threshold + dt for dt in (0.0, 2.0, 4.0, 6.0, 8.0, 10.0)]
    for t in grid:
        rep = family_pt_bound(families, delta, big_m, t, tol=1e-4)
        worst = min(worst, rep.margin)
        if not rep.passed:
            failures += 1
    return Report(
        "C06-point-eval-family-bound",
        failures == 0,
        worst,
        {"failures": failures, "threshold": threshold, "t_grid": grid},
    )


def criterion_07_kernel_observation() -> Report:
    """rho0 against a functional's kernel equals the restriction norm, on
    100 random Euclidean instances in dimensions 2 to 5."""
    rng = np.random.default_rng(707)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(2, 6))
        space = NormedSpace(n, "l2")
        w = rng.standard_normal(n)
        w /= np.linalg.norm(w)
        phi = DualFunctional(w)
        d = int(rng.integers(1, n))
        sub = Subspace(rng.standard_normal((d, n)))
        diff = abs(
            rho0(sub, phi.kernel(), space) - restriction_norm(phi, sub, space)
        )
        worst = max(worst, diff)
    return Report(
        "C07-kernel-observation",
        worst <= 1e-6,
        1e-6 - worst,
        {"max_abs_diff": worst},
    )


def criterion_08_epsilon_star_anchor() -> Report:
    """Coordinate-axes family in the Euclidean plane has criterion constant
    1/sqrt(2)."""
    space = NormedSpace(2, "l2")
    family = SubspaceFamily(
        space,
        [("e1", Subspace([[1.0, 0.0]])), ("e2", Subspace([[0.0, 1.0]]))],
    )
    eps = epsilon_star(family, tol=1e-6)
    err = abs(eps - 1.0 / math.sqrt(2.0))
    return Report(
        "C08-epsilon-star-anchor",
        err <= 1e-4,
        1e-4 - err,
        {"epsilon_star": eps, "target": 1.0 / math.sqrt(2.0)},
    )


def criterion_09_stability() -> Report:
    """Perturbing members by at most r keeps the criterion constant above
    (eps - r)/(1 + r), on 50 random Euclidean families."""
    rng = np.random.default_rng(909)
    worst = math.inf
    violations = 0
    for i in range(50):
        dim = int(rng.integers(2, 4))
        family = random_spanning_family(rng, dim, "l2")
        eps = epsilon_star(family)
        for frac in (0.1, 0.5):
            r = frac * eps
            tilted = perturb_family(family, r, seed=1000 + i)
            eps_tilted = epsilon_star(tilted)
            margin = eps_tilted - (stability_floor(eps, r) - 2e-4)
            worst = min(worst, margin)
            if margin < 0.0:
                violations += 1
    return Report(
        "C09-stability",
        violations == 0,
        worst,
        {"violations": violations},
    )


def criterion_10_decomposition_duality() -> Report:
    """Sampled representation constant within 5 percent of 1/eps*; greedy
    cost bound on families with a whole-space member (the finite-dimensional
    dense-union hypothesis); forced-decomposition anchor with cost 2."""
    rng = np.random.default_rng(1010)
    space2 = NormedSpace(2, "l2")
    axes = SubspaceFamily(
        space2,
        [("e1", Subspace([[1.0, 0.0]])), ("e2", Subspace([[0.0, 1.0]]))],
    )
    families = [axes]
    for dim in (2, 3):
        families.append(random_spanning_family(rng, dim, "l2"))
    worst_rel = 0.0
    for i, family in enumerate(families):
        eps = epsilon_star(family)
        m_hat = representation_constant(family, samples=1000, seed=2000 + i)
        target = 1.0 / eps
        if m_hat > target + 1e-6:
            worst_rel = max(worst_rel, 1.0)
        worst_rel = max(worst_rel, abs(m_hat - target) / target)

    greedy_margin = math.inf
    for i in range(30):
        dim = int(rng.integers(2, 4))
        base = random_spanning_family(rng, dim, "l2")
        members = list(base.members) + [("whole", Subspace(np.eye(dim)))]
        rng.shuffle(members)
        family = SubspaceFamily(base.space, members)
        x = rng.standard_normal(dim)
        eps_budget = float(rng.uniform(0.01, 1.0))
        dec = greedy_decompose(x, family, eps=eps_budget, tol=1e-10)
        greedy_margin = min(
            greedy_margin, family.space.norm(x) + eps_budget + 1e-8 - dec.cost
        )

    anchor = min_cost_decompose(np.array([1.0, 1.0]), axes)
    anchor_err = abs(anchor.cost - 2.0)
    passed = worst_rel <= 0.05 and greedy_margin >= 0.0 and anchor_err <= 1e-6
    return Report(
        "C10-decomposition-duality",
        passed,
        0.05 - worst_rel,
        {
            "worst_rel_gap": worst_rel,
            "greedy_margin": greedy_margin,
            "anchor_cost": anchor.cost,
        },
    )


def criterion_11_subadditive_condition() -> Report:
    """Necessary condition for subadditive functionals on 20 random
    representing families, using coordinate seminorms and
    distance-to-subspace functionals."""
    rng = np.random.default_rng(1111)
    worst = math.inf
    violations = 0
    for i in range(20):
        dim = int(rng.integers(2, 4))
        kind = ("l2", "l1", "linf")[i % 3]
        family = random_spanning_family(rng, dim, kind)
        functionals = [SeminormFunctional(np.eye(dim)[j]) for j in range(dim)]
        d = int(rng.integers(1, dim))
        functionals.append(DistanceFunctional(Subspace(rng.standard_normal((d, dim)))))
        for f in functionals:
            rep = subadditive_bound_check(family, f, tol=1e-3)
            worst = min(worst, rep.margin)
            if not rep.passed:
                violations += 1
    return Report(
        "C11-subadditive-necessary-condition",
        violations == 0,
        worst,
        {"violations": violations},
    )


def criterion_12_density_dichotomy_trend() -> Report:
    """Nested exponent sets with exploding reciprocal sums drive both the
    reciprocal-sum distance bound and the certified approximation error of
    exp(-t/2) below 1e-3 once the reciprocal sum passes 14."""
    alpha = 0.5
    ladder = [1.0 + 0.01 * k for k in range(15)]
    density_values = []
    certified_values = []
    betas = []
    for n in range(1, len(ladder) + 1):
        exps = ExponentSet(ladder[:n])
        betas.append(exps.beta())
        density_values.append(density_gap_bound(alpha, exps))
        result = golitschek_approximant(alpha, exps, tol=1e-4)
        certified_values.append(result.certified_error.upper)
    decreasing = all(
        b < a for a, b in zip(density_values, density_values[1:])
    )
    final_beta = betas[-1]
    tail_ok = True
    worst = math.inf
    for b, dv, cv in zip(betas, density_values, certified_values):
        if b >= 14.0:
            tail_ok = tail_ok and dv < 1e-3 and cv < 1e-3
            worst = min(worst, 1e-3 - max(dv, cv))
    passed = decreasing and tail_ok and final_beta >= 14.0
    return Report(
        "C12-density-dichotomy-trend",
        passed,
        worst,
        {
            "final_beta": final_beta,
            "final_density_bound": density_values[-1],
            "final_certified_error": certified_values[-1],
            "monotone": decreasing,
        },
    )


ACCEPTANCE_CHECKS = [
    criterion_01_l2_oracle_equivalence,
    criterion_02_golitschek_soundness,
    criterion_03_nu_product,
    criterion_04_constants_identity,
    criterion_05_coefficient_and_decay_bounds,
    criterion_06_point_eval_family_bound,
    criterion_07_kernel_observation,
    criterion_08_epsilon_star_anchor,
    criterion_09_stability,
    criterion_10_decomposition_duality,
    criterion_11_subadditive_condition,
    criterion_12_density_dichotomy_trend,
]


def run_all(verbose: bool = False) -> list[Report]:
    reports = []
    for check in ACCEPTANCE_CHECKS:
        rep = check()
        reports.append(rep)
        if verbose:
            status = "PASS" if rep.passed else "FAIL"
            print(f"{status} {rep.check} (margin {rep.margin:.6g})")
    return reports
