"""Decomposing a vector across a family of subspaces with small total norm.

Two constructions: a greedy schedule that repeatedly removes the best
single-member approximation of the running residual, and the exact
minimum of sum-of-part-norms subject to the parts reassembling the vector
(a small convex program). The worst-case minimal cost over unit vectors is
the representation constant, which is the reciprocal of the family's
criterion constant in finite dimensions; that duality is what the sampled
estimate here is checked against.

Deterministic given (inputs, seed); each call builds its own solver state,
so parallel invocations do not interfere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
import cvxpy as cp
import numpy as np
from scipy.optimize import minimize

from .errors import NoConvergence, NotSpanning, ScheduleStall
from .spaces import NormedSpace, Subspace, SubspaceFamily

_CP_NORMS = {"l1": 1, "l2": 2, "linf": "inf"}
_SOLVERS = (cp.CLARABEL, cp.SCS)


@dataclass(frozen=True)
class Decomposition:
    """Labeled parts x_lambda with cost = sum of their ambient norms and the
    reconstruction residual ||x - sum of parts||."""

    parts: tuple[tuple[str, np.ndarray], ...]
    cost: float
    residual: float

    def part_sum(self, dim: int) -> np.ndarray:
        total = np.zeros(dim)
        for _, v in self.parts:
            total = total + v
        return total

    def to_jsonable(self, space: NormedSpace | None = None) -> dict:
        entries = []
        for label, v in self.parts:
            entry = {"label": label, "vector": [float(c) for c in v]}
            if space is not None:
                entry["norm"] = space.norm(v)
            entries.append(entry)
        return {"parts": entries, "cost": self.cost, "residual": self.residual}


def _best_member_approx(
    residual: np.ndarray, sub: Subspace, space: NormedSpace
) -> tuple[np.ndarray, float]:
    """Best approximation of the residual inside one member, in the ambient
    norm. l2 is an orthogonal projection; l1/linf solve a tiny convex
    program with an l2 tie-break so that flat optimal faces yield the
    centered minimizer (plain vertex solutions can cycle the greedy loop)."""
    n = residual.shape[0]
    if sub.is_zero:
        return np.zeros(n), space.norm(residual)
    if space.norm_kind == "l2":
        q = sub.orthonormal()
        z = (residual @ q.T) @ q
        return z, float(np.linalg.norm(residual - z))
    w = cp.Variable(sub.dim)
    gap = residual - w @ sub.basis
    objective = cp.norm(gap, _CP_NORMS[space.norm_kind]) + 1e-8 * cp.sum_squares(gap)
    problem = cp.Problem(cp.Minimize(objective))
    _solve(problem)
    z = np.asarray(w.value) @ sub.basis
    return z, space.norm(residual - z)


def _solve(problem: cp.Problem) -> None:
    for solver in _SOLVERS:
        try:
            problem.solve(solver=solver)
        except cp.error.SolverError:
            continue
        if problem.status in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE):
            return
    raise NoConvergence(f"convex solver failed with status {problem.status!r}")


def greedy_decompose(
    x: np.ndarray,
    S: SubspaceFamily,
    eps: float,
    tol: float,
    max_steps: int = 10_000,
) -> Decomposition:
    """Greedy schedule: at every step pick the member whose best
    approximation leaves the smallest residual (ties by label order), take
    that approximation, and aggregate the steps by label. Stops once the
    residual norm is at most tol.

    Whenever every step meets the schedule bound eps / 2^(m+2) — which in
    finite dimensions requires the union of members to be dense, i.e. some
    member is the whole space — the total cost is at most ||x|| + eps + tol.
    ScheduleStall signals that no member reduces the residual; with spanning
    members that indicates an internal failure, not a user error.
    """
    if eps <= 0.0 or tol <= 0.0:
        raise ValueError("eps and tol must be positive")
    x = np.asarray(x, dtype=float)
    if not np.any(x != 0.0):
        raise ValueError("x must be nonzero")
    if not S.spans_ambient():
        raise NotSpanning("family members do not span the ambient space")

    n = S.space.dim
    parts = {label: np.zeros(n) for label, _ in S.members}
    residual = x.copy()
    stall = 0
    for _ in range(max_steps):
        if S.space.norm(residual) <= tol:
            break
        best_label, best_z, best_d = None, None, math.inf
        for label, sub in S.members:
            z, d = _best_member_approx(residual, sub, S.space)
            if d < best_d:
                best_label, best_z, best_d = label, z, d
        new_residual = residual - best_z
        shrank_ambient = best_d < S.space.norm(residual) * (1.0 - 1e-12)
        shrank_l2 = np.linalg.norm(new_residual) < np.linalg.norm(residual) * (
            1.0 - 1e-12
        )
        stall = 0 if (shrank_ambient or shrank_l2) else stall + 1
        if stall >= 3:
            raise ScheduleStall("no member reduces the residual")
        parts[best_label] += best_z
        residual = new_residual
    else:
        raise ScheduleStall(f"residual above tol after {max_steps} steps")

    used = tuple(
        (label, parts[label]) for label, _ in S.members if np.any(parts[label] != 0.0)
    )
    cost = float(sum(S.space.norm(v) for _, v in used))
    total = np.zeros(n)
    for _, v in used:
        total += v
    return Decomposition(used, cost, S.space.norm(x - total))


class _MinCostProgram:
    """Parameterized convex program min sum ||x_lambda|| s.t. sum = x,
    reusable across right-hand sides."""

    def __init__(self, S: SubspaceFamily):
        self.family = S
        self.x_param = cp.Parameter(S.space.dim)
        self.vars: list[tuple[str, cp.Variable, Subspace]] = []
        exprs = []
        norms = []
        p = _CP_NORMS[S.space.norm_kind]
        for label, sub in S.members:
            if sub.is_zero:
                continue
            w = cp.Variable(sub.dim)
            self.vars.append((label, w, sub))
            part = w @ sub.basis
            exprs.append(part)
            norms.append(cp.norm(part, p))
        self.problem = cp.Problem(
            cp.Minimize(cp.sum(norms)), [sum(exprs) == self.x_param]
        )

    def solve(self, x: np.ndarray) -> Decomposition:
        self.x_param.value = np.asarray(x, dtype=float)
        _solve(self.problem)
        parts = []
        total = np.zeros(self.family.space.dim)
        cost = 0.0
        for label, w, sub in self.vars:
            v = np.asarray(w.value).reshape(-1) @ sub.basis
            nrm = self.family.space.norm(v)
            if nrm > 0.0:
                parts.append((label, v))
                cost += nrm
                total += v
        return Decomposition(
            tuple(parts), cost, self.family.space.norm(np.asarray(x) - total)
        )


def min_cost_decompose(x: np.ndarray, S: SubspaceFamily, tol: float = 1e-6) -> Decomposition:
    """Minimize the total part norm subject to the parts summing to x, each
    part confined to its member. Solved as a convex cone program; the
    reported cost is within the solver tolerance (well below ``tol`` at
    these sizes) of the optimum."""
    if not S.spans_ambient():
        raise NotSpanning("family members do not span the ambient space")
    return _MinCostProgram(S).solve(x)


def representation_constant(
    S: SubspaceFamily, tol: float = 1e-6, samples: int = 1000, seed: int = 0
) -> float:
    """Sampled estimate of the representation constant: the largest minimal
    decomposition cost over unit vectors. Seeded directions on the ambient
    unit sphere are topped off with a local polish around the best one; every
    evaluated cost is a genuine minimal cost of a unit vector, so the
    estimate never exceeds the true constant (which equals 1/eps*)."""
    if samples < 1:
        raise ValueError("samples must be at least 1")
    if not S.spans_ambient():
        raise NotSpanning("family members do not span the ambient space")
    n = S.space.dim
    program = _MinCostProgram(S)
    rng = np.random.default_rng(seed)
    dirs = rng.standard_normal((samples, n))
    dirs = np.vstack([dirs, np.eye(n), np.ones((1, n))])

    def cost_of(v: np.ndarray) -> float:
        nrm = S.space.norm(v)
        if nrm == 0.0:
            return 0.0
        return program.solve(v / nrm).cost

    best = -math.inf
    best_dir = dirs[0]
    for v in dirs:
        c = cost_of(v)
        if c > best:
            best, best_dir = c, v
    res = minimize(
        lambda v: -cost_of(v),
        best_dir,
        method="Nelder-Mead",
        options={"maxiter": 80 * n, "xatol": 1e-8, "fatol": 1e-10},
    )
    return float(max(best, -res.fun))
