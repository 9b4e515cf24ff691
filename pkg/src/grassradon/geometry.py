"""Frames, planes, flags and quadrature rules.

Linear subspaces are stored as orthonormal bases (columns of an ``n x p``
matrix).  Two bases describe the same subspace when their projectors
``B @ B.T`` agree, which is the comparator used throughout the package.

Measure conventions
-------------------
Compact homogeneous measures (circles of lines, spheres used as averages)
are normalized to total mass one.  Fiber integrals over Euclidean spaces use
plain Lebesgue measure.  Rules tagged ``sphere`` are normalized; callers that
need surface area multiply by the area themselves.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import roots_jacobi
from scipy.stats import special_ortho_group

from .errors import (
    BadDimension,
    DimensionMismatch,
    NotOrthogonal,
    RankDeficient,
    UnsupportedDimension,
)

TOL_ORTHO = 1e-12
TOL_INCIDENCE = 1e-9
TOL_QUADRATURE = 1e-10
RANK_TOL = 1e-10

DEFAULT_SEED = 0x9E3779B97F4A7C15


# ---------------------------------------------------------------------------
# Random streams
# ---------------------------------------------------------------------------

def make_rng(seed: int = DEFAULT_SEED, *stream: int) -> np.random.Generator:
    """Return a reproducible generator for ``(seed, *stream)``.

    The seed and stream labels are mixed by :class:`numpy.random.SeedSequence`
    so that distinct streams derived from one user seed are independent.
    """
    words = [int(seed) & 0xFFFFFFFFFFFFFFFF] + [int(s) & 0xFFFFFFFFFFFFFFFF for s in stream]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(words)))


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Subspace:
    """A ``p``-dimensional linear subspace of R^n held by an orthonormal basis."""

    basis: np.ndarray

    def __post_init__(self):
        b = np.array(self.basis, dtype=float, copy=True)
        if b.ndim == 1:
            b = b[:, None]
        if b.ndim != 2 or b.shape[1] > b.shape[0]:
            raise DimensionMismatch(f"basis must be n x p with p <= n, got shape {b.shape}")
        gram = b.T @ b
        if b.shape[1] and np.max(np.abs(gram - np.eye(b.shape[1]))) > TOL_ORTHO:
            raise NotOrthogonal("basis columns are not orthonormal; use orthonormalize()")
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.T

    def distance(self, other: "Subspace") -> float:
        """Frobenius distance between the projectors of two subspaces."""
        return float(np.linalg.norm(self.projector - other.projector))

    def complement(self) -> "Subspace":
        """Orthogonal complement, with a deterministic basis."""
        return Subspace(complete_frame(self.basis))

    def transformed(self, u: np.ndarray) -> "Subspace":
        """Image under an orthogonal map ``u``."""
        return Subspace(orthonormalize(u @ self.basis).basis)

    def __repr__(self) -> str:
        return f"Subspace(n={self.ambient_dim}, p={self.dim})"


@dataclass(frozen=True, eq=False)
class AffinePlane:
    """The affine plane ``subspace + offset`` with ``offset`` orthogonal to it."""

    subspace: Subspace
    offset: np.ndarray

    def __post_init__(self):
        v = np.array(self.offset, dtype=float, copy=True).reshape(-1)
        if v.shape[0] != self.subspace.ambient_dim:
            raise DimensionMismatch("offset length differs from ambient dimension")
        if self.subspace.dim and np.max(np.abs(self.subspace.basis.T @ v)) > TOL_ORTHO * max(1.0, np.linalg.norm(v)):
            raise NotOrthogonal("offset must be orthogonal to the subspace")
        v.setflags(write=False)
        object.__setattr__(self, "offset", v)

    @property
    def dim(self) -> int:
        return self.subspace.dim

    @property
    def distance(self) -> float:
        """Euclidean distance from the plane to the origin."""
        return float(np.linalg.norm(self.offset))

    @classmethod
    def through(cls, subspace: Subspace, point: np.ndarray) -> "AffinePlane":
        """Plane parallel to ``subspace`` passing through ``point``."""
        return cls(subspace, project_perp(subspace, point))

    def contains_plane(self, other: "AffinePlane", tol: float = TOL_INCIDENCE) -> bool:
        """Incidence test ``other ⊂ self``."""
        if not contains(other.subspace, self.subspace, tol):
            return False
        gap = project_perp(self.subspace, other.offset - self.offset)
        return bool(np.linalg.norm(gap) <= tol)


@dataclass(frozen=True, eq=False)
class FlagPoint:
    """A pair (sigma, omega) with omega a unit vector orthogonal to sigma."""

    subspace: Subspace
    direction: np.ndarray

    def __post_init__(self):
        w = np.array(self.direction, dtype=float, copy=True).reshape(-1)
        if w.shape[0] != self.subspace.ambient_dim:
            raise DimensionMismatch("direction length differs from ambient dimension")
        if abs(np.linalg.norm(w) - 1.0) > TOL_ORTHO:
            raise NotOrthogonal("flag direction must be a unit vector")
        if self.subspace.dim and np.max(np.abs(self.subspace.basis.T @ w)) > TOL_ORTHO:
            raise NotOrthogonal("flag direction must be orthogonal to the subspace")
        w.setflags(write=False)
        object.__setattr__(self, "direction", w)


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Nodes and positive weights for one integration domain.

    ``domain_tag`` is one of ``"fiber_euclidean(d)"``, ``"sphere(d)"``,
    ``"great_circle"`` or ``"sub_grassmannian_circle"``.  Normalized
    domains have weights summing to one; Euclidean fiber rules carry
    Lebesgue weights.
    """

    domain_tag: str
    nodes: np.ndarray
    weights: np.ndarray
    order: int = 0

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if np.any(w <= 0):
            raise ValueError("quadrature weights must be positive")

    def __len__(self) -> int:
        return len(self.weights)

    def integrate(self, values: np.ndarray) -> np.ndarray:
        """Weighted sum along the first axis of ``values``.

        ``np.sum`` uses pairwise summation in a fixed order, so the result
        does not depend on how the values were produced.
        """
        v = np.asarray(values)
        w = self.weights.reshape((-1,) + (1,) * (v.ndim - 1))
        return np.sum(w * v, axis=0)


# ---------------------------------------------------------------------------
# Linear algebra
# ---------------------------------------------------------------------------

def orthonormalize(m: np.ndarray) -> Subspace:
    """Orthonormal basis of the column space of ``m``.

    Raises
    ------
    RankDeficient
        If the smallest singular value is at most ``1e-10``.
    """
    a = np.asarray(m, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    if a.shape[1] == 0:
        return Subspace(np.zeros((a.shape[0], 0)))
    sv = np.linalg.svd(a, compute_uv=False)
    if sv.size < a.shape[1] or sv[-1] <= RANK_TOL:
        raise RankDeficient(f"smallest singular value {sv.min() if sv.size else 0.0:.3e} <= {RANK_TOL}")
    q, r = np.linalg.qr(a)
    q = q * np.sign(np.where(np.diag(r) == 0, 1.0, np.diag(r)))
    # one re-orthogonalization pass keeps the Gram error far below 1e-12
    q, r2 = np.linalg.qr(q)
    q = q * np.sign(np.diag(r2))
    return Subspace(q)


def project_perp(s: Subspace, v: np.ndarray) -> np.ndarray:
    """Component of ``v`` orthogonal to ``s``."""
    v = np.asarray(v, dtype=float)
    if v.shape[-1] != s.ambient_dim:
        raise DimensionMismatch(f"vector length {v.shape[-1]} != ambient dimension {s.ambient_dim}")
    b = s.basis
    return v - (v @ b) @ b.T


def contains(small: Subspace, big: Subspace, tol: float = TOL_INCIDENCE) -> bool:
    """Incidence ``small ⊂ big`` measured by ``‖(I - P_big) B_small‖_F``."""
    if small.ambient_dim != big.ambient_dim:
        raise DimensionMismatch("subspaces live in different ambient spaces")
    if small.dim > big.dim:
        raise DimensionMismatch("small.dim exceeds big.dim")
    resid = small.basis - big.basis @ (big.basis.T @ small.basis)
    return bool(np.linalg.norm(resid) <= tol)


def complete_frame(basis: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the complement of the columns of ``basis``.

    Deterministic Gram–Schmidt against the standard axes: at each step the
    axis with the largest residual is taken, ties going to the lowest index.
    """
    b = np.asarray(basis, dtype=float)
    if b.ndim == 1:
        b = b[:, None]
    n, k = b.shape
    cols = [b[:, j] for j in range(k)]
    out = []
    eye = np.eye(n)
    for _ in range(n - k):
        q = np.array(cols + out).T if cols or out else np.zeros((n, 0))
        resid = eye - q @ (q.T @ eye)
        norms = np.linalg.norm(resid, axis=0)
        j = int(np.argmax(norms))
        v = resid[:, j] / norms[j]
        # second pass against roundoff
        v = v - q @ (q.T @ v)
        out.append(v / np.linalg.norm(v))
    return np.array(out).T if out else np.zeros((n, 0))


def frame_in(space: np.ndarray, first: np.ndarray) -> np.ndarray:
    """Orthonormal frame of ``span(space)`` whose first column is ``first``.

    ``space`` is an ``n x m`` orthonormal basis and ``first`` a unit vector
    inside it.  The remaining columns are built deterministically in the
    coordinates of ``space``, so the output depends only on the inputs.
    """
    space = np.asarray(space, dtype=float)
    c = space.T @ first
    rest = complete_frame(c / np.linalg.norm(c))
    return np.column_stack([first, space @ rest])


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------

@lru_cache(maxsize=64)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss–Legendre nodes and weights on [-1, 1] (cached, read-only)."""
    x, w = leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def sphere_rule(d: int, order: int) -> QuadratureRule:
    """Normalized rule on S^{d-1} exact for polynomials of degree <= ``order``.

    ``d=2`` uses ``order+1`` equispaced angles.  ``d=3`` is the product of
    Gauss–Legendre in the polar cosine with ``order+1`` equispaced azimuths.
    ``d=4`` writes ``ω = (t, sqrt(1-t²) ν)`` with Gauss–Jacobi(1/2,1/2) in
    ``t`` and the ``d=3`` rule in ``ν``.
    """
    if d not in (2, 3, 4):
        raise UnsupportedDimension(f"sphere_rule supports d in {{2,3,4}}, got {d}")
    if order < 2:
        raise ValueError("order must be >= 2")
    if d == 2:
        m = order + 1
        th = 2.0 * np.pi * np.arange(m) / m
        nodes = np.column_stack([np.cos(th), np.sin(th)])
        weights = np.full(m, 1.0 / m)
        return QuadratureRule("sphere(2)", nodes, weights, order)
    npol = order // 2 + 1
    if d == 3:
        c, wc = gauss_legendre(npol)
        m = order + 1
        ph = 2.0 * np.pi * (np.arange(m) + 0.5) / m
        cc, pp = np.meshgrid(c, ph, indexing="ij")
        sn = np.sqrt(1.0 - cc**2)
        nodes = np.column_stack([(sn * np.cos(pp)).ravel(), (sn * np.sin(pp)).ravel(), cc.ravel()])
        weights = (np.outer(wc, np.full(m, 1.0 / m)) / 2.0).ravel()
        return QuadratureRule("sphere(3)", nodes, weights, order)
    t, wt = roots_jacobi(npol, 0.5, 0.5)
    wt = wt / wt.sum()
    inner = sphere_rule(3, order)
    tt = np.repeat(t, len(inner))
    nu = np.tile(inner.nodes, (npol, 1))
    nodes = np.column_stack([tt, np.sqrt(1.0 - tt**2)[:, None] * nu])
    weights = np.outer(wt, inner.weights).ravel()
    return QuadratureRule("sphere(4)", nodes, weights, order)


def fiber_rule(d: int, radius: float, points_per_axis: int) -> QuadratureRule:
    """Tensor Gauss–Legendre rule on ``[-radius, radius]^d`` with Lebesgue weights."""
    if d not in (1, 2, 3):
        raise UnsupportedDimension(f"fiber_rule supports d in {{1,2,3}}, got {d}")
    if radius <= 0:
        raise ValueError("radius must be positive")
    if points_per_axis < 8:
        raise ValueError("points_per_axis must be >= 8")
    x, w = gauss_legendre(points_per_axis)
    x = radius * np.asarray(x)
    w = radius * np.asarray(w)
    grids = np.meshgrid(*([x] * d), indexing="ij")
    wgrids = np.meshgrid(*([w] * d), indexing="ij")
    nodes = np.column_stack([g.ravel() for g in grids])
    weights = np.prod(np.stack([g.ravel() for g in wgrids]), axis=0)
    return QuadratureRule(f"fiber_euclidean({d})", nodes, weights, 2 * points_per_axis - 1)


def sub_grassmannian_circle(eta: Subspace, m: int) -> list[tuple[Subspace, float]]:
    """Equal-weight rule on the circle of lines inside the 2-plane ``eta``.

    Line ``j`` is spanned by ``cos(πj/m) b1 + sin(πj/m) b2``; the angles cover
    ``[0, π)`` because lines are unoriented.
    """
    if eta.dim != 2:
        raise BadDimension(f"eta must be a 2-plane, got dim {eta.dim}")
    if m < 2:
        raise ValueError("m must be >= 2")
    b1, b2 = eta.basis[:, 0], eta.basis[:, 1]
    th = np.pi * np.arange(m) / m
    out = []
    for t in th:
        u = np.cos(t) * b1 + np.sin(t) * b2
        out.append((Subspace(u / np.linalg.norm(u)), 1.0 / m))
    return out


def circle_angles(m: int) -> np.ndarray:
    """The angles ``πj/m`` used by :func:`sub_grassmannian_circle`."""
    return np.pi * np.arange(m) / m


# ---------------------------------------------------------------------------
# Random sampling
# ---------------------------------------------------------------------------

def random_orthogonal(rng: np.random.Generator, n: int, proper: bool = False) -> np.ndarray:
    """Haar-random element of O(n) (or SO(n) when ``proper``)."""
    u = special_ortho_group.rvs(n, random_state=rng) if n > 1 else np.eye(1)
    if not proper and rng.random() < 0.5:
        u = u.copy()
        u[:, 0] = -u[:, 0]
    return u


def random_subspace(rng: np.random.Generator, n: int, p: int) -> Subspace:
    """Uniformly distributed ``p``-dimensional subspace of R^n."""
    return orthonormalize(rng.standard_normal((n, p))) if p else Subspace(np.zeros((n, 0)))


def random_unit_in(rng: np.random.Generator, space: np.ndarray) -> np.ndarray:
    """Uniform unit vector inside the column span of an orthonormal ``space``."""
    c = rng.standard_normal(space.shape[1])
    v = space @ (c / np.linalg.norm(c))
    return v / np.linalg.norm(v)


def random_affine_plane(rng: np.random.Generator, n: int, p: int, distance: float) -> AffinePlane:
    """Random ``p``-plane at the given distance from the origin."""
    s = random_subspace(rng, n, p)
    perp = complete_frame(s.basis)
    v = distance * random_unit_in(rng, perp)
    return AffinePlane(s, project_perp(s, v))


def random_flag(rng: np.random.Generator, n: int, p: int) -> FlagPoint:
    """Random point (sigma, omega) of the flag manifold."""
    s = random_subspace(rng, n, p)
    w = random_unit_in(rng, complete_frame(s.basis))
    return FlagPoint(s, project_perp(s, w) / np.linalg.norm(project_perp(s, w)))
