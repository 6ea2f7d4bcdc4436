"""Finite exponential sums f(t) = sum_k a_k exp(-alpha_k t) on [0, inf).

Provides the two basic value types (sorted exponent sets and canonicalized
exponential sums), certified sup-norm estimation, and the norm of the
point-evaluation functional restricted to an exponential span.

All values are immutable after construction and all operations are
deterministic, so everything here is safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import minimize

from .errors import DimensionCap, TolTooSmall

MERGE_RTOL = 1e-12
DEFAULT_SAMPLE_BUDGET = 10_000_000
_CHUNK = 1 << 19


@dataclass(frozen=True)
class ExponentSet:
    """Strictly increasing positive exponents alpha_1 < ... < alpha_n.

    Carries the two derived quantities the decay machinery keys on: the
    reciprocal sum beta = sum 1/alpha_k and the minimal consecutive gap.
    """

    alphas: tuple[float, ...]

    def __init__(self, alphas: Iterable[float]):
        vals = sorted(float(a) for a in alphas)
        if not vals:
            raise ValueError("exponent set must be nonempty")
        if vals[0] <= 0.0:
            raise ValueError("exponents must be strictly positive")
        for lo, hi in zip(vals, vals[1:]):
            if hi - lo <= MERGE_RTOL * hi:
                raise ValueError(f"exponents {lo} and {hi} are not distinct")
        object.__setattr__(self, "alphas", tuple(vals))

    def __len__(self) -> int:
        return len(self.alphas)

    def __iter__(self):
        return iter(self.alphas)

    def __contains__(self, alpha: float) -> bool:
        return any(abs(alpha - a) <= MERGE_RTOL * max(abs(alpha), a) for a in self.alphas)

    def beta(self) -> float:
        """Sum of reciprocals of the exponents."""
        return float(sum(1.0 / a for a in self.alphas))

    def gap(self) -> float:
        """Minimal consecutive difference (inf for a singleton)."""
        if len(self.alphas) == 1:
            return math.inf
        return float(min(hi - lo for lo, hi in zip(self.alphas, self.alphas[1:])))

    def to_jsonable(self) -> list[float]:
        return list(self.alphas)

    @classmethod
    def from_jsonable(cls, data: Sequence[float]) -> "ExponentSet":
        return cls(data)


def beta(E: ExponentSet) -> float:
    """Reciprocal sum of an exponent set."""
    return E.beta()


def gap_check(E: ExponentSet, delta: float) -> bool:
    """True iff consecutive exponents differ by at least ``delta``.

    Vacuously true for a singleton. A relative slack of 1e-12 absorbs
    floating-point dust in the differences.
    """
    if delta <= 0.0:
        raise ValueError("delta must be positive")
    return E.gap() >= delta * (1.0 - 1e-12)


@dataclass(frozen=True)
class ExpSum:
    """Canonical exponential sum: terms (coefficient, exponent), exponents
    strictly positive, sorted, and pairwise distinct.

    Construction merges duplicate exponents (relative distance 1e-12) and
    drops exact-zero coefficients, so the empty sum is representable.
    """

    terms: tuple[tuple[float, float], ...]

    def __init__(self, terms: Iterable[tuple[float, float]]):
        pairs = sorted(((float(a), float(e)) for a, e in terms), key=lambda t: t[1])
        merged: list[list[float]] = []
        for a, e in pairs:
            if e <= 0.0:
                raise ValueError("exponents must be strictly positive")
            if merged and e - merged[-1][1] <= MERGE_RTOL * e:
                merged[-1][0] += a
            else:
                merged.append([a, e])
        object.__setattr__(
            self, "terms", tuple((a, e) for a, e in merged if a != 0.0)
        )

    @classmethod
    def single(cls, coefficient: float, exponent: float) -> "ExpSum":
        return cls([(coefficient, exponent)])

    @classmethod
    def zero(cls) -> "ExpSum":
        return cls([])

    def coefficients(self) -> np.ndarray:
        return np.array([a for a, _ in self.terms], dtype=float)

    def exponents(self) -> np.ndarray:
        return np.array([e for _, e in self.terms], dtype=float)

    def eval(self, t: float) -> float:
        """Value sum_k a_k exp(-alpha_k t) at t >= 0."""
        if t < 0.0:
            raise ValueError("t must be nonnegative")
        return float(sum(a * math.exp(-e * t) for a, e in self.terms))

    def eval_many(self, ts: np.ndarray) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        if self.terms == ():
            return np.zeros_like(ts)
        a = self.coefficients()
        e = self.exponents()
        return np.exp(-np.outer(ts, e)) @ a

    def __add__(self, other: "ExpSum") -> "ExpSum":
        return ExpSum(self.terms + other.terms)

    def __sub__(self, other: "ExpSum") -> "ExpSum":
        return self + (-other)

    def __neg__(self) -> "ExpSum":
        return ExpSum([(-a, e) for a, e in self.terms])

    def __mul__(self, s: float) -> "ExpSum":
        return ExpSum([(s * a, e) for a, e in self.terms])

    __rmul__ = __mul__

    def to_jsonable(self) -> list[dict]:
        return [{"a": a, "alpha": e} for a, e in self.terms]

    @classmethod
    def from_jsonable(cls, data: Sequence[dict]) -> "ExpSum":
        return cls([(d["a"], d["alpha"]) for d in data])


@dataclass(frozen=True)
class SupNormEstimate:
    """Certified bracket lower <= sup_{t>=0} |f(t)| <= upper."""

    lower: float
    upper: float
    witness_t: float

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lower + self.upper)


def sup_norm(
    f: ExpSum, tol: float, sample_budget: int = DEFAULT_SAMPLE_BUDGET
) -> SupNormEstimate:
    """Certified sup-norm bracket with upper - lower <= tol.

    Truncation: beyond T = ln(2 * sum|a_k| / tol) / alpha_min the tail is
    below tol/2. On [0, T] a piecewise grid is certified by the chord bound
    sup |f| <= max over grid + h^2 * M2 / 8, where M2 bounds |f''| from the
    decaying envelope sum |a_k| alpha_k^2 exp(-alpha_k t). The grid never
    exceeds ``sample_budget`` points; otherwise TolTooSmall is raised.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    if not f.terms:
        return SupNormEstimate(0.0, 0.0, 0.0)

    a = f.coefficients()
    al = f.exponents()
    abs_a = np.abs(a)
    total = float(abs_a.sum())
    amin = float(al.min())
    half = 0.5 * tol

    if total <= half:
        lo = abs(f.eval(0.0))
        return SupNormEstimate(lo, total, 0.0)

    horizon = math.log(total / half) / amin
    curvature = abs_a * al * al

    # Segment [0, horizon] at the decay scale 1/amin; within a segment the
    # curvature envelope at the left endpoint is valid throughout.
    seg_len = 1.0 / amin
    n_seg = max(1, math.ceil(horizon / seg_len))
    starts = np.arange(n_seg) * seg_len
    ends = np.minimum(starts + seg_len, horizon)
    m2 = np.exp(-np.outer(starts, al)) @ curvature
    spacing = np.sqrt(4.0 * tol / np.maximum(m2, 1e-300))
    estimate = float(np.sum((ends - starts) / spacing)) + 2.0 * n_seg
    if not math.isfinite(estimate) or estimate > sample_budget:
        raise TolTooSmall(
            f"certifying tol={tol} needs ~{estimate:.3g} samples, "
            f"budget is {sample_budget}"
        )
    counts = np.maximum(2, np.ceil((ends - starts) / spacing).astype(np.int64) + 1)

    best = -1.0
    witness = 0.0
    for s, e, cnt in zip(starts, ends, counts):
        grid = np.linspace(s, e, int(cnt))
        for lo_i in range(0, len(grid), _CHUNK):
            chunk = grid[lo_i : lo_i + _CHUNK]
            vals = np.abs(np.exp(-np.outer(chunk, al)) @ a)
            k = int(np.argmax(vals))
            if vals[k] > best:
                best = float(vals[k])
                witness = float(chunk[k])
    return SupNormEstimate(best, best + half, witness)


def point_eval_restriction_norm(
    E: ExponentSet,
    t: float,
    tol: float,
    dim_cap: int = 6,
    n_random_starts: int = 16,
) -> float:
    """Norm of the point-evaluation functional f -> f(t) restricted to the
    span of exp(-alpha_k s), alpha_k in E, i.e.

        sup { |f(t)| : f in span, sup-norm of f <= 1 }.

    Multistart maximization of |f(t)| / ||f|| over coefficient vectors: a
    cheap grid surrogate ranks candidates during the search, then the best
    candidate is re-normalized through the certified sup_norm bracket. The
    result never exceeds 1 (point evaluations have norm one).
    """
    if len(E) > dim_cap:
        raise DimensionCap(f"|E| = {len(E)} exceeds cap {dim_cap}")
    if t < 0.0:
        raise ValueError("t must be nonnegative")
    if tol <= 0.0:
        raise ValueError("tol must be positive")

    al = np.array(E.alphas)
    n = len(al)
    amin = float(al[0])

    # Search surrogate: sup-norm approximated on a grid that is uniform in
    # x = exp(-amin * t); the substitution concentrates points where the
    # functions vary.
    xs = np.linspace(1e-7, 1.0, 2001)
    ts_grid = -np.log(xs) / amin
    grid_mat = np.exp(-np.outer(ts_grid, al))
    value_row = np.exp(-al * t)

    def surrogate(c: np.ndarray) -> float:
        denom = float(np.max(np.abs(grid_mat @ c)))
        if denom <= 0.0:
            return 0.0
        return abs(float(value_row @ c)) / denom

    starts: list[np.ndarray] = []
    eye = np.eye(n)
    for i in range(n):
        starts.append(eye[i])
        starts.append(-eye[i])
    alt = np.array([(-1.0) ** k for k in range(n)])
    starts.append(alt / np.linalg.norm(alt))
    rng = np.random.default_rng(0)
    for _ in range(n_random_starts):
        v = rng.standard_normal(n)
        starts.append(v / np.linalg.norm(v))

    best_c = starts[0]
    best_r = surrogate(best_c)
    for s in starts:
        res = minimize(
            lambda c: -surrogate(c),
            s,
            method="Nelder-Mead",
            options={"maxiter": 300 * n, "xatol": 1e-9, "fatol": 1e-13},
        )
        if -res.fun > best_r:
            best_r = -res.fun
            best_c = res.x

    # Certified normalization of the winning candidate.
    f = ExpSum(zip(best_c, al))
    if not f.terms:
        return 0.0
    coarse = sup_norm(f, 1e-3 * max(1.0, float(np.sum(np.abs(best_c)))))
    f_unit = f * (1.0 / coarse.midpoint)
    fine = sup_norm(f_unit, 0.25 * tol)
    value = abs(f_unit.eval(t)) / fine.midpoint
    return min(value, 1.0)
