"""Distances from one exponential (or power) to the span of others.

Two independent routes to the L2[0,1] distance between powers (closed form
vs. Gram-matrix least squares), the iterated-integral construction of an
explicit sup-norm approximant to exp(-alpha t) from a span of exponentials,
and the product / reciprocal-sum upper bounds on that sup-norm distance.

All functions are pure and deterministic; the only shared state is the
high-precision context used by the Gram oracle, which is guarded by a lock,
so concurrent callers need no coordination of their own.
"""

from __future__ import annotations

import math
import threading
import warnings
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy.linalg import expm

from .errors import (
    DegenerateInput,
    IllConditioned,
    NearCoincidentExponents,
    PreconditionViolated,
    TolTooSmall,
)
from .expsums import ExponentSet, ExpSum, SupNormEstimate, sup_norm

COINCIDENCE_RTOL = 1e-12
RECURSION_GUARD = 1e-10
GRAM_DIM_CAP = 12
GRAM_COND_CAP = 1e12

# mpmath's working precision is process-global state
_MP_LOCK = threading.Lock()


def _check_power_inputs(gamma: float, gammas) -> np.ndarray:
    gs = np.asarray(list(gammas), dtype=float)
    if gamma <= -0.5 or np.any(gs <= -0.5):
        raise ValueError("all powers must be greater than -1/2")
    scale = np.maximum(np.abs(gs), abs(gamma)) + 1.0
    if np.any(np.abs(gs - gamma) <= COINCIDENCE_RTOL * scale):
        raise DegenerateInput(f"gamma={gamma} coincides with a span power")
    for i in range(len(gs)):
        for j in range(i + 1, len(gs)):
            s = max(abs(gs[i]), abs(gs[j])) + 1.0
            if abs(gs[i] - gs[j]) <= COINCIDENCE_RTOL * s:
                raise DegenerateInput("span powers are not pairwise distinct")
    return gs


def l2_distance_closed_form(gamma: float, gammas) -> float:
    """L2[0,1] distance from x^gamma to span{x^gamma_k}:

        (2*gamma+1)^(-1/2) * prod_k |gamma - gamma_k| / (gamma + gamma_k + 1).

    The empty span gives the plain L2 norm of x^gamma.
    """
    gs = _check_power_inputs(gamma, gammas)
    prod = 1.0
    for g in gs:
        prod *= abs(gamma - g) / (gamma + g + 1.0)
    return prod / math.sqrt(2.0 * gamma + 1.0)


def l2_distance_gram_oracle(gamma: float, gammas, dps: int = 50) -> float:
    """Brute-force L2[0,1] distance via the normal equations.

    Uses the monomial inner products int_0^1 x^p x^q dx = 1/(p+q+1); the
    Gram system is solved with a symmetric positive-definite (Cholesky)
    factorization carried out in ``dps``-digit arithmetic, because these
    Hilbert-like matrices routinely cost 10+ digits. Systems whose condition
    estimate exceeds 1e12 are rejected outright.
    """
    gs = _check_power_inputs(gamma, gammas)
    if len(gs) > GRAM_DIM_CAP:
        raise ValueError(f"span size {len(gs)} exceeds conditioning cap {GRAM_DIM_CAP}")
    if len(gs) == 0:
        return math.sqrt(1.0 / (2.0 * gamma + 1.0))
    gram64 = 1.0 / (gs[:, None] + gs[None, :] + 1.0)
    if np.linalg.cond(gram64) > GRAM_COND_CAP:
        raise IllConditioned("Gram matrix condition estimate exceeds 1e12")
    with _MP_LOCK, mpmath.workdps(dps):
        n = len(gs)
        gram = mpmath.matrix(n, n)
        cross = mpmath.matrix(n, 1)
        for i in range(n):
            cross[i] = 1 / (mpmath.mpf(gamma) + mpmath.mpf(gs[i]) + 1)
            for j in range(n):
                gram[i, j] = 1 / (mpmath.mpf(gs[i]) + mpmath.mpf(gs[j]) + 1)
        sol = mpmath.cholesky_solve(gram, cross)
        dist_sq = 1 / (2 * mpmath.mpf(gamma) + 1) - sum(
            cross[i] * sol[i] for i in range(n)
        )
        return float(mpmath.sqrt(max(dist_sq, mpmath.mpf(0))))


@dataclass(frozen=True)
class GolitschekResult:
    """Constructive sup-norm approximation of exp(-alpha t) from span(E).

    ``full_chain`` is the sequence f_0, ..., f_N of the iterated-integral
    recursion; f_N = exp(-alpha t) - approximant and its sup norm is at most
    ``bound`` = prod |1 - alpha/alpha_k|. ``certified_error`` brackets the
    sup norm of f_N.
    """

    approximant: ExpSum
    full_chain: tuple[ExpSum, ...]
    bound: float
    certified_error: SupNormEstimate

    @property
    def certified_error_upper(self) -> float:
        return self.certified_error.upper

    def to_jsonable(self) -> dict:
        return {
            "approximant": self.approximant.to_jsonable(),
            "bound": self.bound,
            "certified_error_upper": self.certified_error.upper,
        }


def _chain_error_certificate(
    alpha: float, E: ExponentSet, tol: float, refresh_every: int = 50_000
) -> SupNormEstimate:
    """Certified sup-norm bracket of the recursion tail f_N without its
    (possibly astronomically cancelling) coefficient representation.

    The chain h_0 = exp(-alpha t), h_k = int_0^t exp(-alpha_k (t-v)) h_{k-1} dv
    solves h' = A h with A bidiagonal (diagonal -gamma_j, subdiagonal ones),
    so f_N(t) = prod(alpha_k - alpha) * h_N(t) is evaluated by propagating a
    single step matrix expm(h A). Certification uses the recursion's own
    derivative bounds:

        ||f_k||  <= B_k = prod_{j<=k} |1 - alpha/alpha_j|
        ||f_k'|| <= D_k = |alpha_k - alpha| B_{k-1} + alpha_k B_k
        ||f_N''||<= |alpha_N - alpha| D_{N-1} + alpha_N D_N

    and the convolution tail |f_N(t)| <= |P| exp(-g t) t^N / N! with
    g = min(alpha, alpha_1).
    """
    al = np.array(E.alphas)
    n = len(al)
    gammas = np.concatenate([[alpha], al])
    log_abs_p = float(np.sum(np.log(np.abs(al - alpha))))
    signed_p = float(np.prod(al - alpha))
    if not math.isfinite(signed_p):
        raise TolTooSmall("chain prefactor overflows double precision")

    factors = np.abs(1.0 - alpha / al)
    b_chain = np.concatenate([[1.0], np.cumprod(factors)])
    d_chain = [alpha]
    for k in range(1, n + 1):
        d_chain.append(abs(al[k - 1] - alpha) * b_chain[k - 1] + al[k - 1] * b_chain[k])
    m2 = abs(al[-1] - alpha) * d_chain[-2] + al[-1] * d_chain[-1]

    g = float(gammas.min())
    half = 0.5 * tol

    def log_tail(t: float) -> float:
        return log_abs_p - g * t + n * math.log(t) - math.lgamma(n + 1)

    horizon = max((n + 1) / g, 1.0)
    while log_tail(horizon) > math.log(half):
        horizon *= 2.0
        if horizon > 1e9:
            raise TolTooSmall("tail of the recursion chain does not certify")

    spacing = math.sqrt(4.0 * tol / max(m2, 1e-300))
    steps = max(2, math.ceil(horizon / spacing))
    if steps > 5_000_000:
        raise TolTooSmall(f"chain certification needs {steps} steps")

    h = horizon / steps
    gen = -np.diag(gammas) + np.diag(np.ones(n), -1)
    step_mat = expm(h * gen)
    state = np.zeros(n + 1)
    state[0] = 1.0
    best = abs(signed_p * state[-1])
    witness = 0.0
    for i in range(1, steps + 1):
        if i % refresh_every == 0:
            state = expm((i * h) * gen)[:, 0]
        else:
            state = step_mat @ state
        v = abs(signed_p * state[-1])
        if v > best:
            best = v
            witness = i * h
    return SupNormEstimate(best, best + half, witness)


def golitschek_approximant(
    alpha: float, E: ExponentSet, tol: float = 1e-6
) -> GolitschekResult:
    """Run the iterated-integral recursion producing f_N = exp(-alpha t) + g_N
    with g_N in span(E), and certify the sup norm of f_N against the product
    bound prod |1 - alpha/alpha_k|.

    The recursion uses the closed antiderivative
    int_0^t exp(-a(t-v)) exp(-b v) dv = (exp(-b t) - exp(-a t)) / (a - b),
    guarding every denominator at 1e-10. Certification prefers the plain
    coefficient representation; when coefficient cancellation makes that
    infeasible it falls back to the chain-propagation certificate.
    """
    if alpha <= 0.0:
        raise ValueError("alpha must be positive")
    for ak in E.alphas:
        if abs(ak - alpha) <= COINCIDENCE_RTOL * max(ak, alpha):
            raise NearCoincidentExponents(f"alpha={alpha} coincides with exponent {ak}")

    exps = [alpha]
    coefs = [1.0]
    chain = [ExpSum([(1.0, alpha)])]
    for ak in E.alphas:
        dens = ak - np.array(exps)
        if np.min(np.abs(dens)) < RECURSION_GUARD:
            raise NearCoincidentExponents(
                f"denominator below {RECURSION_GUARD} at exponent {ak}"
            )
        w = (ak - alpha) * np.array(coefs) / dens
        coefs = list(w) + [-float(np.sum(w))]
        exps = exps + [ak]
        chain.append(ExpSum(zip(coefs, exps)))

    f_n = chain[-1]
    lead = [a for a, e in f_n.terms if abs(e - alpha) <= COINCIDENCE_RTOL * max(e, alpha)]
    if len(lead) != 1 or abs(lead[0] - 1.0) > 1e-12:
        raise ArithmeticError("recursion lost the unit leading coefficient")
    approximant = ExpSum(
        [(-a, e) for a, e in f_n.terms if abs(e - alpha) > COINCIDENCE_RTOL * max(e, alpha)]
    )
    bound = sup_distance_bound(alpha, E)

    try:
        certified = sup_norm(f_n, tol)
    except TolTooSmall:
        certified = _chain_error_certificate(alpha, E, tol)
    return GolitschekResult(approximant, tuple(chain), bound, certified)


def sup_distance_bound(alpha: float, E: ExponentSet) -> float:
    """Product bound prod_k |1 - alpha/alpha_k| on the sup-norm distance from
    exp(-alpha t) to span(E). A coincident exponent makes the bound zero; that
    degenerate case warns instead of raising."""
    if alpha <= 0.0:
        raise ValueError("alpha must be positive")
    prod = 1.0
    for ak in E.alphas:
        if abs(ak - alpha) <= COINCIDENCE_RTOL * max(ak, alpha):
            warnings.warn("alpha coincides with a span exponent; bound is 0")
            return 0.0
        prod *= abs(1.0 - alpha / ak)
    return prod


def density_gap_bound(alpha: float, E: ExponentSet) -> float:
    """Reciprocal-sum bound exp(-alpha * sum_k 1/alpha_k), valid when every
    span exponent dominates alpha; dominates sup_distance_bound there."""
    if alpha <= 0.0:
        raise ValueError("alpha must be positive")
    for ak in E.alphas:
        if ak < alpha * (1.0 - COINCIDENCE_RTOL):
            raise PreconditionViolated(f"exponent {ak} lies below alpha={alpha}")
    return math.exp(-alpha * E.beta())
