"""Finite-dimensional normed spaces and families of subspaces.

Ambient norms are drawn from {l1, l2, linf}; their duals stay inside the
menu (l1 <-> linf, l2 self-dual), which keeps every norm computation exact.
Restriction norms and the subspace closeness measure rho0 are computed in
closed form for l2 (orthogonal projections / principal angles) and by exact
extreme-point enumeration plus linear programming for l1/linf, whose unit
balls are polytopes. The criterion constant eps* (the smallest possible
maximum of restriction norms over the family, taken over dual-unit
functionals) is the quantity everything else revolves around: it is
positive exactly when every vector decomposes across the family with
summable norms.

All operations are pure and deterministic given their inputs (and seed,
where one is taken); values are immutable after construction, so concurrent
use requires no coordination.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import expm
from scipy.optimize import linprog, minimize
from scipy.stats import norm as _gaussian, qmc

from .errors import NotAnARFS, NotSurjective, RTooLarge, ZeroVector
from .reporting import Report

NORM_KINDS = ("l1", "l2", "linf")
RANK_TOL = 1e-10


def _vector_norm(x: np.ndarray, kind: str) -> float:
    if kind == "l1":
        return float(np.sum(np.abs(x)))
    if kind == "l2":
        return float(np.linalg.norm(x))
    if kind == "linf":
        return float(np.max(np.abs(x))) if x.size else 0.0
    raise ValueError(f"unknown norm kind {kind!r}")


def _dual_kind(kind: str) -> str:
    return {"l1": "linf", "l2": "l2", "linf": "l1"}[kind]


@dataclass(frozen=True)
class NormedSpace:
    """Ambient space: a dimension and one of the l1/l2/linf norms."""

    dim: int
    norm_kind: str

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be at least 1")
        if self.norm_kind not in NORM_KINDS:
            raise ValueError(f"norm_kind must be one of {NORM_KINDS}")

    def norm(self, x: np.ndarray) -> float:
        return _vector_norm(np.asarray(x, dtype=float), self.norm_kind)

    @property
    def dual_norm_kind(self) -> str:
        return _dual_kind(self.norm_kind)


@dataclass(frozen=True)
class Subspace:
    """Subspace given by linearly independent basis vectors (rows).

    The zero subspace is the empty basis. Independence is enforced with a
    relative singular-value cutoff of 1e-10.
    """

    basis: np.ndarray

    def __init__(self, basis):
        arr = np.atleast_2d(np.asarray(basis, dtype=float))
        if arr.size == 0:
            arr = arr.reshape(0, arr.shape[-1] if arr.ndim == 2 and arr.shape[-1] else 1)
        if arr.shape[0] > 0:
            s = np.linalg.svd(arr, compute_uv=False)
            if s[-1] <= RANK_TOL * s[0]:
                raise ValueError("basis vectors are not linearly independent")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "basis", arr)

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(np.zeros((0, ambient_dim)))

    @classmethod
    def span_of(cls, *vectors) -> "Subspace":
        return cls(np.vstack([np.asarray(v, dtype=float) for v in vectors]))

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[1]

    @property
    def is_zero(self) -> bool:
        return self.dim == 0

    def orthonormal(self) -> np.ndarray:
        """Orthonormal basis as rows (Euclidean), empty for the zero subspace."""
        if self.is_zero:
            return np.zeros((0, self.ambient_dim))
        q, _ = np.linalg.qr(self.basis.T)
        return q.T

    def contains(self, x: np.ndarray, tol: float = 1e-10) -> bool:
        x = np.asarray(x, dtype=float)
        if self.is_zero:
            return bool(np.linalg.norm(x) <= tol)
        q = self.orthonormal()
        return bool(np.linalg.norm(x - (x @ q.T) @ q) <= tol * max(1.0, np.linalg.norm(x)))


@dataclass(frozen=True)
class SubspaceFamily:
    """Labeled members living in one ambient space."""

    space: NormedSpace
    members: tuple[tuple[str, Subspace], ...]

    def __init__(self, space: NormedSpace, members: Iterable[tuple[str, Subspace]]):
        mem = tuple((str(label), sub) for label, sub in members)
        labels = [l for l, _ in mem]
        if len(set(labels)) != len(labels):
            raise ValueError("member labels must be unique")
        for _, sub in mem:
            if sub.ambient_dim != space.dim:
                raise ValueError("member ambient dimension mismatch")
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "members", mem)

    def labels(self) -> list[str]:
        return [l for l, _ in self.members]

    def subspaces(self) -> list[Subspace]:
        return [s for _, s in self.members]

    def spans_ambient(self) -> bool:
        rows = [s.basis for _, s in self.members if not s.is_zero]
        if not rows:
            return False
        stacked = np.vstack(rows)
        return int(np.linalg.matrix_rank(stacked, tol=RANK_TOL)) == self.space.dim

    def to_jsonable(self) -> dict:
        return {
            "dim": self.space.dim,
            "norm": self.space.norm_kind,
            "members": [
                {"label": label, "basis": sub.basis.tolist()}
                for label, sub in self.members
            ],
        }

    @classmethod
    def from_jsonable(cls, data: dict) -> "SubspaceFamily":
        space = NormedSpace(int(data["dim"]), str(data["norm"]))
        members = []
        for item in data["members"]:
            basis = np.asarray(item["basis"], dtype=float)
            if basis.size == 0:
                sub = Subspace.zero(space.dim)
            else:
                sub = Subspace(basis)
            members.append((item["label"], sub))
        return cls(space, members)


@dataclass(frozen=True)
class DualFunctional:
    """Linear functional x -> <coeffs, x>."""

    coeffs: np.ndarray

    def __init__(self, coeffs):
        arr = np.asarray(coeffs, dtype=float).reshape(-1).copy()
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    def __call__(self, x: np.ndarray) -> float:
        return float(self.coeffs @ np.asarray(x, dtype=float))

    def kernel(self) -> Subspace:
        """Null space as a Subspace (dimension dim-1 for nonzero coeffs)."""
        n = self.coeffs.shape[0]
        if np.all(self.coeffs == 0.0):
            return Subspace(np.eye(n))
        _, _, vt = np.linalg.svd(self.coeffs.reshape(1, -1))
        return Subspace(vt[1:])


def dual_norm(phi: DualFunctional, space: NormedSpace) -> float:
    """Norm of phi over the unit ball of the space (conjugate vector norm)."""
    return _vector_norm(phi.coeffs, space.dual_norm_kind)


def _unit_ball_vertices(basis: np.ndarray, kind: str) -> np.ndarray:
    """Extreme points of {y in span(basis rows): ||y||_kind <= 1}, kind
    polyhedral (l1 or linf). Rows of the result are the vertices."""
    k, n = basis.shape
    if k == 0:
        return np.zeros((0, n))
    out: list[np.ndarray] = []
    if kind == "linf":
        # A vertex activates k independent coordinate constraints |y_i| = 1.
        for cols in itertools.combinations(range(n), k):
            sub = basis[:, cols].T
            if abs(np.linalg.det(sub)) < 1e-12:
                continue
            for signs in itertools.product((-1.0, 1.0), repeat=k):
                u = np.linalg.solve(sub, np.array(signs))
                y = u @ basis
                sup = np.max(np.abs(y))
                if sup <= 1.0 + 1e-9:
                    out.append(y / sup)
    elif kind == "l1":
        # A vertex zeroes k-1 independent coordinates; the remaining line is
        # scaled onto the unit sphere.
        if k == 1:
            y = basis[0]
            s = np.sum(np.abs(y))
            out.extend([y / s, -y / s])
        else:
            for cols in itertools.combinations(range(n), k - 1):
                sub = basis[:, cols].T
                _, s, vt = np.linalg.svd(sub)
                if np.sum(s > 1e-12 * max(s[0], 1e-300)) < k - 1:
                    continue
                u = vt[-1]
                y = u @ basis
                nrm = np.sum(np.abs(y))
                if nrm > 1e-12:
                    out.extend([y / nrm, -y / nrm])
    else:
        raise ValueError("vertex enumeration applies to polyhedral norms only")
    return np.array(out) if out else np.zeros((0, n))


def restriction_norm(
    phi: DualFunctional, Y: Subspace, space: NormedSpace, tol: float = 1e-9
) -> float:
    """sup { |phi(y)| : y in Y, ||y|| <= 1 }; zero subspaces give 0.

    Exact for l2 (norm of the projected representing vector) and for l1/linf
    (the maximum of |phi| over the finitely many extreme points of the
    sliced unit ball); ``tol`` is part of the contract but unused by these
    exact paths.
    """
    if Y.is_zero:
        return 0.0
    if space.norm_kind == "l2":
        q = Y.orthonormal()
        return float(np.linalg.norm(q @ phi.coeffs))
    verts = _unit_ball_vertices(Y.basis, space.norm_kind)
    if verts.shape[0] == 0:
        return 0.0
    return float(np.max(np.abs(verts @ phi.coeffs)))


def distance_to_subspace(x: np.ndarray, Z: Subspace, space: NormedSpace) -> float:
    """min_{z in Z} ||x - z|| in the ambient norm (an LP for l1/linf)."""
    x = np.asarray(x, dtype=float)
    if Z.is_zero:
        return space.norm(x)
    if space.norm_kind == "l2":
        q = Z.orthonormal()
        return float(np.linalg.norm(x - (x @ q.T) @ q))
    B = Z.basis
    k, n = B.shape
    if space.norm_kind == "linf":
        # variables (w, s): minimize s subject to |x - w B| <= s
        c = np.zeros(k + 1)
        c[-1] = 1.0
        a_ub = np.block(
            [[B.T, -np.ones((n, 1))], [-B.T, -np.ones((n, 1))]]
        )
        b_ub = np.concatenate([x, -x])
        # (wB)_i - s <= x_i  and  -(wB)_i - s <= -x_i
        res = linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=[(None, None)] * k + [(0, None)], method="highs")
    else:
        # variables (w, s in R^n): minimize sum s subject to |x - w B| <= s
        c = np.concatenate([np.zeros(k), np.ones(n)])
        a_ub = np.block([[B.T, -np.eye(n)], [-B.T, -np.eye(n)]])
        b_ub = np.concatenate([x, -x])
        res = linprog(
            c, A_ub=a_ub, b_ub=b_ub,
            bounds=[(None, None)] * k + [(0, None)] * n, method="highs",
        )
    if not res.success:
        raise ArithmeticError(f"distance LP failed: {res.message}")
    return float(res.fun)


def rho0(Y: Subspace, Z: Subspace, space: NormedSpace, tol: float = 1e-9) -> float:
    """sup over unit vectors of Y of their distance to Z (0 for Y = 0).

    For l2 this is the sine of the largest principal angle; for l1/linf the
    distance function is convex, so its maximum over the unit ball is
    attained at an extreme point and the enumeration is exact.
    """
    if Y.is_zero:
        return 0.0
    if space.norm_kind == "l2":
        qy = Y.orthonormal()
        if Z.is_zero:
            return 1.0
        qz = Z.orthonormal()
        resid = qy - (qy @ qz.T) @ qz
        return float(np.linalg.svd(resid, compute_uv=False)[0])
    verts = _unit_ball_vertices(Y.basis, space.norm_kind)
    return max(
        (distance_to_subspace(v, Z, space) for v in verts),
        default=0.0,
    )


def _sphere_grid(n: int, count: int) -> np.ndarray:
    """Deterministic unit directions: angle grid in the plane, a scrambled-free
    Sobol/Gaussian map otherwise. Coordinate and diagonal directions are
    always included."""
    if n == 1:
        return np.array([[1.0]])
    if n == 2:
        th = np.linspace(0.0, np.pi, count, endpoint=False)
        pts = np.stack([np.cos(th), np.sin(th)], axis=1)
    else:
        sampler = qmc.Sobol(d=n, scramble=False)
        raw = sampler.random_base2(max(1, math.ceil(math.log2(count + 1))))[1:]
        raw = np.clip(raw, 1e-12, 1.0 - 1e-12)
        pts = _gaussian.ppf(raw)
        lengths = np.linalg.norm(pts, axis=1, keepdims=True)
        keep = lengths[:, 0] > 1e-9
        pts = pts[keep] / lengths[keep]
    extra = np.vstack([np.eye(n), np.ones((1, n)) / math.sqrt(n)])
    return np.vstack([pts, extra])


def _eps_objective_l2(family: SubspaceFamily):
    mats = [s.orthonormal().T for _, s in family.members]  # n x d each

    def value(phi: np.ndarray) -> float:
        nrm = np.linalg.norm(phi)
        if nrm == 0.0:
            return math.inf
        best = 0.0
        for m in mats:
            if m.shape[1]:
                best = max(best, float(np.linalg.norm(phi @ m)) / nrm)
        return best

    def batch(dirs: np.ndarray) -> np.ndarray:
        out = np.zeros(dirs.shape[0])
        for m in mats:
            if m.shape[1]:
                np.maximum(out, np.linalg.norm(dirs @ m, axis=1), out)
        return out

    return value, batch


def _epsilon_star_polyhedral(family: SubspaceFamily) -> float:
    """Exact minimum over the dual-norm unit sphere of the largest
    restriction norm, for polyhedral ambient norms: the restriction norms
    are maxima of |<w, phi>| over the members' ball vertices, and the dual
    sphere is a union of facets, so each facet yields one LP."""
    n = family.space.dim
    kind = family.space.norm_kind
    verts = [
        _unit_ball_vertices(s.basis, kind)
        for _, s in family.members
        if not s.is_zero
    ]
    W = np.vstack([v for v in verts if v.shape[0]])
    m = W.shape[0]
    ab_rows = np.block([[W, -np.ones((m, 1))], [-W, -np.ones((m, 1))]])
    b_rows = np.zeros(2 * m)
    best = math.inf
    cost = np.zeros(n + 1)
    cost[-1] = 1.0
    if kind == "l1":
        # dual sphere: ||phi||_inf = 1, facets phi_i = +-1
        for i in range(n):
            for sign in (-1.0, 1.0):
                a_eq = np.zeros((1, n + 1))
                a_eq[0, i] = 1.0
                res = linprog(
                    cost, A_ub=ab_rows, b_ub=b_rows, A_eq=a_eq, b_eq=[sign],
                    bounds=[(-1, 1)] * n + [(0, None)], method="highs",
                )
                if res.success:
                    best = min(best, float(res.fun))
    else:
        # ambient linf; dual sphere: ||phi||_1 = 1, one facet per orthant
        for signs in itertools.product((-1.0, 1.0), repeat=n):
            sg = np.array(signs)
            orthant = np.zeros((n, n + 1))
            orthant[np.arange(n), np.arange(n)] = -sg
            a_eq = np.zeros((1, n + 1))
            a_eq[0, :n] = sg
            res = linprog(
                cost,
                A_ub=np.vstack([ab_rows, orthant]),
                b_ub=np.concatenate([b_rows, np.zeros(n)]),
                A_eq=a_eq,
                b_eq=[1.0],
                bounds=[(None, None)] * n + [(0, None)],
                method="highs",
            )
            if res.success:
                best = min(best, float(res.fun))
    return best


def epsilon_star(
    S: SubspaceFamily, tol: float = 1e-6, grid_points: int | None = None
) -> float:
    """The criterion constant: the smallest achievable value, over dual-unit
    functionals phi, of the family's largest restriction norm.

    Returns exactly 0 when the members fail to span the ambient space. For
    l1/linf the value is exact (facet LPs); for l2 a deterministic sphere
    grid is polished by local minimization, so the reported value carries
    the stated tolerance.
    """
    if not S.members:
        raise ValueError("family must have at least one member")
    if not S.spans_ambient():
        return 0.0
    if S.space.norm_kind in ("l1", "linf"):
        return _epsilon_star_polyhedral(S)

    n = S.space.dim
    if grid_points is None:
        grid_points = 20001 if n == 2 else 65536
    value, batch = _eps_objective_l2(S)
    dirs = _sphere_grid(n, grid_points)
    scores = batch(dirs)
    order = np.argsort(scores)[:8]
    best = float(scores[order[0]])
    for idx in order:
        res = minimize(
            value,
            dirs[idx],
            method="Nelder-Mead",
            options={"maxiter": 4000, "xatol": 1e-10, "fatol": 1e-14},
        )
        if res.fun < best:
            best = float(res.fun)
    return max(best, 0.0)


def stability_floor(eps: float, r: float) -> float:
    """(eps - r) / (1 + r): the guaranteed criterion constant after moving
    each member by at most r in the rho0 sense. Requires r < eps."""
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    if r < 0.0:
        raise ValueError("r must be nonnegative")
    if r >= eps:
        raise RTooLarge(f"r = {r} must be strictly below eps = {eps}")
    return (eps - r) / (1.0 + r)


def perturb_family(S: SubspaceFamily, r: float, seed: int) -> SubspaceFamily:
    """Tilt every member by a seeded random rotation scaled so that
    rho0(member, tilted member) <= r, verified post hoc. r = 0 returns the
    family unchanged; the output is a deterministic function of (S, r, seed).
    """
    if r < 0.0:
        raise ValueError("r must be nonnegative")
    if r == 0.0:
        return S
    rng = np.random.default_rng(seed)
    n = S.space.dim
    new_members = []
    for label, sub in S.members:
        if sub.is_zero or n == 1:
            new_members.append((label, sub))
            continue
        skew = rng.standard_normal((n, n))
        skew = skew - skew.T
        spectral = np.linalg.norm(skew, 2)
        if spectral > 0:
            skew /= spectral
        theta = min(r, 1.0)
        tilted = sub
        for _ in range(80):
            rot = expm(theta * skew)
            cand = Subspace(sub.basis @ rot.T)
            if rho0(sub, cand, S.space) <= r:
                tilted = cand
                break
            theta *= 0.7
        new_members.append((label, tilted))
    return SubspaceFamily(S.space, new_members)


@dataclass(frozen=True)
class SeminormFunctional:
    """f(x) = |<u, x>|: a continuous seminorm."""

    u: np.ndarray

    def __init__(self, u):
        arr = np.asarray(u, dtype=float).reshape(-1).copy()
        arr.setflags(write=False)
        object.__setattr__(self, "u", arr)

    def global_norm(self, space: NormedSpace) -> float:
        return dual_norm(DualFunctional(self.u), space)

    def restricted_norm(self, Y: Subspace, space: NormedSpace) -> float:
        return restriction_norm(DualFunctional(self.u), Y, space)


@dataclass(frozen=True)
class DistanceFunctional:
    """f(x) = d(x, W) for a subspace W (subadditive, vanishes at 0)."""

    W: Subspace

    def global_norm(self, space: NormedSpace) -> float:
        return rho0(Subspace(np.eye(space.dim)), self.W, space)

    def restricted_norm(self, Y: Subspace, space: NormedSpace) -> float:
        return rho0(Y, self.W, space)


def subadditive_bound_check(S: SubspaceFamily, f, tol: float = 1e-3) -> Report:
    """Check the necessary condition for subadditive functionals: whenever
    the family has positive criterion constant eps*, any f that vanishes at
    0, is continuous there and subadditive satisfies

        max over members of ||f restricted|| >= eps_hat * ||f||

    with eps_hat = eps*/(1 + tol) (the decomposition constant is 1/eps* in
    finite dimensions, see the representation module). ``f`` is one of
    SeminormFunctional or DistanceFunctional.
    """
    eps = epsilon_star(S, tol)
    if eps <= tol:
        raise NotAnARFS(f"criterion constant {eps} is not above tol = {tol}")
    eps_hat = eps / (1.0 + tol)
    global_norm = f.global_norm(S.space)
    per_member = [f.restricted_norm(sub, S.space) for _, sub in S.members]
    sup_member = max(per_member, default=0.0)
    margin = sup_member - eps_hat * global_norm
    return Report(
        check="subadditive-necessary-condition",
        passed=margin >= -tol,
        margin=float(margin),
        witness={
            "epsilon_star": eps,
            "eps_hat": eps_hat,
            "functional_norm": global_norm,
            "sup_restricted": sup_member,
        },
    )


def pushforward_family(
    S: SubspaceFamily, A: np.ndarray, target: NormedSpace, tol: float = 1e-10
) -> SubspaceFamily:
    """Image family (A X_lambda) under a surjection A onto the target space.

    Mapped bases are reduced back to independent spanning sets. If the
    original family has positive criterion constant, so does the image (the
    map takes decompositions to decompositions).
    """
    A = np.asarray(A, dtype=float)
    if A.shape != (target.dim, S.space.dim):
        raise NotSurjective(
            f"operator shape {A.shape} does not map dim {S.space.dim} onto dim {target.dim}"
        )
    if int(np.linalg.matrix_rank(A, tol=max(tol, RANK_TOL))) < target.dim:
        raise NotSurjective("operator is rank deficient")
    new_members = []
    for label, sub in S.members:
        if sub.is_zero:
            new_members.append((label, Subspace.zero(target.dim)))
            continue
        image = sub.basis @ A.T
        u, s, vt = np.linalg.svd(image, full_matrices=False)
        rank = int(np.sum(s > RANK_TOL * max(s[0], 1e-300)))
        if rank == 0:
            new_members.append((label, Subspace.zero(target.dim)))
        else:
            new_members.append((label, Subspace(vt[:rank])))
    return SubspaceFamily(target, new_members)


def subfamily_delete_check(
    S: SubspaceFamily, deleted_labels: set, tol: float = 1e-6
) -> Report:
    """Delete the labelled members and report whether the rest is still a
    representing family. In finite dimensions that is a spanning test; when
    the remainder spans, its recomputed criterion constant is reported."""
    eps = epsilon_star(S, tol)
    if eps <= tol:
        raise NotAnARFS(f"criterion constant {eps} is not above tol = {tol}")
    remaining = [(l, s) for l, s in S.members if l not in deleted_labels]
    witness: dict = {"deleted": sorted(str(l) for l in deleted_labels)}
    if not remaining:
        witness.update({"spanning": False, "epsilon_star": 0.0})
        return Report("subfamily-deletion", True, 0.0, witness)
    rest = SubspaceFamily(S.space, remaining)
    spanning = rest.spans_ambient()
    eps_rest = epsilon_star(rest, tol) if spanning else 0.0
    witness.update({"spanning": spanning, "epsilon_star": eps_rest})
    consistent = (eps_rest > tol) == spanning
    return Report("subfamily-deletion", consistent, float(eps_rest), witness)


def family_from_vectors(vectors: Sequence, space: NormedSpace) -> SubspaceFamily:
    """Family of one-dimensional spans of the given nonzero vectors; the
    criterion constant of this family is the representing constant of the
    vector system itself (spans forget scaling)."""
    members = []
    for i, v in enumerate(vectors):
        arr = np.asarray(v, dtype=float).reshape(-1)
        if not np.any(arr != 0.0):
            raise ZeroVector(f"vector {i} is zero")
        members.append((f"v{i}", Subspace(arr.reshape(1, -1))))
    return SubspaceFamily(space, members)
