"""Spherical harmonics on S², Funk multipliers and the reproducing operator.

In the (1,2,4) case, lines through the origin of a 3-space ``ω⊥`` are even
points of S², and the average over lines inside a plane is the Funk
transform.  The Funk transform acts on degree-``l`` harmonics by ``P_l(0)``,
so the composition with its dual acts by ``P_l(0)²``.  The reproducing
operator □ divides by that factor, degree by degree.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import eval_legendre, sph_harm_y

from .errors import NotEven, OddDegree, RuleTooCoarse, UnsupportedCase
from .fields import ScalarField
from .geometry import (
    FlagPoint,
    QuadratureRule,
    complete_frame,
    gauss_legendre,
    sphere_rule,
)

EVEN_TOL = 1e-10


# ---------------------------------------------------------------------------
# Expansions
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SphericalHarmonicExpansion:
    """Coefficients ``c[l, m + lmax]`` of an expansion in orthonormal ``Y_lm``."""

    lmax: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex, copy=True)
        if c.shape != (self.lmax + 1, 2 * self.lmax + 1):
            raise ValueError(f"coeffs must have shape {(self.lmax + 1, 2 * self.lmax + 1)}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def coef(self, l: int, m: int) -> complex:
        return complex(self.coeffs[l, m + self.lmax])

    @classmethod
    def zeros(cls, lmax: int) -> "SphericalHarmonicExpansion":
        return cls(lmax, np.zeros((lmax + 1, 2 * lmax + 1), dtype=complex))

    @classmethod
    def single(cls, lmax: int, l: int, m: int, value: complex = 1.0) -> "SphericalHarmonicExpansion":
        c = np.zeros((lmax + 1, 2 * lmax + 1), dtype=complex)
        c[l, m + lmax] = value
        return cls(lmax, c)

    def max_odd(self) -> float:
        return float(np.max(np.abs(self.coeffs[1::2]), initial=0.0))

    def norm2(self) -> float:
        return float(np.sum(np.abs(self.coeffs) ** 2))


def _angles(omega: np.ndarray):
    w = np.asarray(omega, dtype=float)
    theta = np.arccos(np.clip(w[..., 2], -1.0, 1.0))
    phi = np.arctan2(w[..., 1], w[..., 0])
    return theta, phi


def ylm_matrix(lmax: int, omega: np.ndarray) -> np.ndarray:
    """``Y[l, m + lmax, k] = Y_lm(ω_k)`` (orthonormal, Condon–Shortley phase)."""
    theta, phi = _angles(np.atleast_2d(omega))
    out = np.zeros((lmax + 1, 2 * lmax + 1, theta.size), dtype=complex)
    for l in range(lmax + 1):
        for m in range(-l, l + 1):
            out[l, m + lmax] = sph_harm_y(l, m, theta, phi)
    return out


def analysis_rule(lmax: int) -> QuadratureRule:
    """Sphere rule exact to degree ``2·lmax`` (the minimum for exact analysis)."""
    return sphere_rule(3, max(2 * lmax, 2))


def sh_analysis(F, lmax: int, rule: QuadratureRule | None = None) -> SphericalHarmonicExpansion:
    """``c_lm = ∫_{S²} F(ω) conj(Y_lm(ω)) dω`` with surface measure.

    ``F`` is a ``"sphere"`` field, a callable on ``(N, 3)`` arrays, or an
    array of values at the rule nodes.

    Raises
    ------
    RuleTooCoarse
        The rule is exact below degree ``2·lmax``.
    """
    rule = analysis_rule(lmax) if rule is None else rule
    if rule.order < 2 * lmax:
        raise RuleTooCoarse(f"rule order {rule.order} < 2*lmax = {2 * lmax}")
    if isinstance(F, ScalarField):
        vals = F.evaluate(rule.nodes)
    elif callable(F):
        vals = np.asarray(F(rule.nodes))
    else:
        vals = np.asarray(F)
    Y = ylm_matrix(lmax, rule.nodes)
    c = 4.0 * np.pi * np.sum(Y.conj() * (rule.weights * vals), axis=2)
    for l in range(lmax + 1):  # entries with |m| > l are structurally zero
        c[l, : lmax - l] = 0.0
        c[l, lmax + l + 1:] = 0.0
    return SphericalHarmonicExpansion(lmax, c)


def sh_synthesis(e: SphericalHarmonicExpansion, omega: np.ndarray) -> np.ndarray | complex:
    """``Σ c_lm Y_lm(ω)`` at one point or an ``(N, 3)`` array of points."""
    w = np.asarray(omega, dtype=float)
    Y = ylm_matrix(e.lmax, w)
    vals = np.sum(e.coeffs[:, :, None] * Y, axis=(0, 1))
    return complex(vals[0]) if w.ndim == 1 else vals


# ---------------------------------------------------------------------------
# Funk multipliers and the reproducing operator
# ---------------------------------------------------------------------------

def funk_multiplier(l: int) -> float:
    """``P_l(0)`` from ``P_l(0) = -(l-1)/l · P_{l-2}(0)``.

    Raises
    ------
    OddDegree
        For odd ``l``; odd harmonics are outside the even subspace.
    """
    if l < 0:
        raise ValueError("degree must be non-negative")
    if l % 2:
        raise OddDegree(f"Funk multiplier requested for odd degree {l}")
    val = 1.0
    for k in range(2, l + 1, 2):
        val *= -(k - 1) / k
    return val


@dataclass(frozen=True)
class MultiplierTable:
    lmax: int
    values: np.ndarray  # values[j] is the multiplier of degree 2j

    def __getitem__(self, l: int) -> float:
        if l % 2:
            raise OddDegree(f"no multiplier stored for odd degree {l}")
        return float(self.values[l // 2])

    @property
    def degrees(self) -> np.ndarray:
        return np.arange(0, self.lmax + 1, 2)


def funk_table(lmax: int) -> MultiplierTable:
    return MultiplierTable(lmax, np.array([funk_multiplier(l) for l in range(0, lmax + 1, 2)]))


def great_circle_average(F, axis: np.ndarray, m: int = 256) -> np.ndarray:
    """Average of ``F`` over the great circle orthogonal to ``axis`` (m equispaced nodes).

    ``axis`` may be one unit vector or an ``(N, 3)`` array.
    """
    ax = np.atleast_2d(np.asarray(axis, dtype=float))
    th = 2.0 * np.pi * np.arange(m) / m
    out = np.empty(ax.shape[0], dtype=complex)
    for i, a in enumerate(ax):
        c = complete_frame(a / np.linalg.norm(a))
        pts = np.cos(th)[:, None] * c[:, 0] + np.sin(th)[:, None] * c[:, 1]
        out[i] = np.mean(F(pts))
    return out if np.ndim(axis) == 2 else out[0]


def funk_multiplier_oracle(l: int, m: int = 512) -> float:
    """Funk multiplier measured by great-circle quadrature of a zonal harmonic.

    ``Y_l0`` is averaged over the equator and divided by its value at the
    pole; independent of the recurrence in :func:`funk_multiplier`.
    """
    F = lambda w: eval_legendre(l, w[:, 2])  # noqa: E731
    return float(np.real(great_circle_average(F, np.array([0.0, 0.0, 1.0]), m)))


def reproducing_box(e: SphericalHarmonicExpansion) -> SphericalHarmonicExpansion:
    """Divide each even degree by ``P_l(0)²``.

    Raises
    ------
    NotEven
        Odd-degree coefficients exceed ``1e-10``.
    """
    odd = e.max_odd()
    if odd > EVEN_TOL:
        raise NotEven(f"expansion has odd-degree content {odd:.3e}")
    c = np.zeros_like(e.coeffs)
    for l in range(0, e.lmax + 1, 2):
        c[l] = e.coeffs[l] / funk_multiplier(l) ** 2
    return SphericalHarmonicExpansion(e.lmax, c)


def funk_apply(e: SphericalHarmonicExpansion) -> SphericalHarmonicExpansion:
    """Spectral Funk transform (multiply even degrees by ``P_l(0)``, drop odd)."""
    c = np.zeros_like(e.coeffs)
    for l in range(0, e.lmax + 1, 2):
        c[l] = e.coeffs[l] * funk_multiplier(l)
    return SphericalHarmonicExpansion(e.lmax, c)


def zonal_inverse_funk_kernel(c: np.ndarray, lmax: int) -> np.ndarray:
    """``K(c) = Σ_{even l ≤ lmax} (2l+1)/(4π) P_l(c) / P_l(0)``.

    Band-limited inverse Funk transform as a zonal kernel:
    ``(Funk⁻¹ g)(u) = ∫ K(<u,n>) g(n) dn``.
    """
    c = np.asarray(c, dtype=float)
    out = np.zeros_like(c)
    for l in range(0, lmax + 1, 2):
        out += (2 * l + 1) / (4.0 * np.pi) * eval_legendre(l, c) / funk_multiplier(l)
    return out


# ---------------------------------------------------------------------------
# □ on the flag manifold
# ---------------------------------------------------------------------------

def omega_perp_frame(omega: np.ndarray) -> np.ndarray:
    """Deterministic ``4 x 3`` orthonormal frame of ``ω⊥`` (see :func:`complete_frame`)."""
    return complete_frame(np.asarray(omega, dtype=float)[:, None])


def box_p(V: ScalarField, flag: FlagPoint, r: float, lmax: int = 16) -> complex:
    """``□⁽ᵖ⁾V(σ, ω; r)`` for the (1,2,4) case.

    For fixed ``(ω, r)`` the function ``σ' ↦ V(σ', ω; r)`` on lines of ``ω⊥``
    is an even function on S² (in the frame of :func:`omega_perp_frame`).
    It is analysed, divided degree-wise by ``P_l(0)²``, and resynthesized
    at the direction of ``σ``.
    """
    if (V.p, V.n) != (1, 4) or flag.subspace.dim != 1 or flag.subspace.ambient_dim != 4:
        raise UnsupportedCase("box_p is implemented for (p,q,n) = (1,2,4)")
    W = omega_perp_frame(flag.direction)
    rule = analysis_rule(lmax)
    lines = rule.nodes @ W.T
    K = lines.shape[0]
    vals = V.evaluate(lines[:, :, None], np.broadcast_to(flag.direction, (K, 4)), np.full(K, r))
    e = reproducing_box(sh_analysis(vals, lmax, rule))
    u = W.T @ flag.subspace.basis[:, 0]
    return complex(sh_synthesis(e, u / np.linalg.norm(u)))


@lru_cache(maxsize=16)
def zonal_grid(lmax: int):
    """Folded normal grid about the pole for exact zonal integration.

    Polar cosines are Gauss–Legendre with ``lmax+1`` nodes and azimuths
    ``lmax+2`` (rounded up to even) equispaced angles; a product
    ``K(<u,n>) g(n)`` with ``g`` of degree ``≤ lmax`` is integrated exactly.
    Antipodal nodes are folded (``g(n) = g(-n)`` for plane normals), so only
    one of each pair is kept with doubled weight.

    Returns ``(c, phi, weights)`` with surface-measure weights summing to 4π.
    """
    npol = lmax + 1
    naz = lmax + 2 + (lmax % 2)
    c, wc = (np.asarray(a) for a in gauss_legendre(npol))
    phi = 2.0 * np.pi * np.arange(naz) / naz
    cc, pp = np.meshgrid(c, phi, indexing="ij")
    ww = np.outer(wc, np.full(naz, 2.0 * np.pi / naz))
    keep = (cc > 1e-14) | ((np.abs(cc) <= 1e-14) & (pp < np.pi - 1e-12))
    wts = np.where(np.abs(cc) <= 1e-14, 2.0 * ww, 2.0 * ww)
    out = (cc[keep], pp[keep], wts[keep])
    for a in out:
        a.setflags(write=False)
    return out


@lru_cache(maxsize=16)
def composite_weights(lmax: int, circle_points: int = 16) -> np.ndarray:
    """Weights ``κ_j`` with ``□ S g(u) = Σ_j κ_j g(n_j)`` on the zonal grid.

    Built by running the operations literally: values on the normal grid
    are expanded (``sh_analysis``), the circle rule of ``S`` averages the
    expansion over the great circle of normals orthogonal to each analysis
    node, the result is expanded again, □ divides by ``P_l(0)²``, and the
    expansion is synthesized at the pole ``u``.  Linearity turns this chain
    into one weight per grid node.
    """
    if circle_points < lmax // 2 + 1:
        raise RuleTooCoarse("circle rule too coarse for the requested lmax")
    c, phi, wts = zonal_grid(lmax)
    s = np.sqrt(1.0 - c * c)
    normals = np.column_stack([s * np.cos(phi), s * np.sin(phi), c])
    # analysis of a grid vector: c_lm = Σ_j w_j g_j conj(Y_lm(n_j)); each folded node
    # stands for itself and its antipode, which carries the same value.
    Yn = ylm_matrix(lmax, normals)
    Yn_anti = ylm_matrix(lmax, -normals)
    A1 = 0.5 * wts[None, None, :] * (Yn.conj() + Yn_anti.conj())  # (l, m, j)
    # S: average the expansion over great circles orthogonal to the analysis nodes
    rule = analysis_rule(lmax)
    th = np.pi * np.arange(circle_points) / circle_points
    S_rows = np.zeros((rule.nodes.shape[0], lmax + 1, 2 * lmax + 1), dtype=complex)
    for k, a in enumerate(rule.nodes):
        fr = complete_frame(a)
        pts = np.cos(th)[:, None] * fr[:, 0] + np.sin(th)[:, None] * fr[:, 1]
        S_rows[k] = np.mean(ylm_matrix(lmax, pts), axis=2)
    # Sg at analysis node k = Σ_lm S_rows[k,l,m] * c_lm
    Sg = np.einsum("klm,lmj->kj", S_rows, A1)
    Y2 = ylm_matrix(lmax, rule.nodes)
    A2 = 4.0 * np.pi * np.einsum("lmk,kj->lmj", Y2.conj() * rule.weights, Sg)
    # odd degrees vanish for even inputs; drop them before the multiplier
    for l in range(lmax + 1):
        A2[l] = A2[l] / funk_multiplier(l) ** 2 if l % 2 == 0 else 0.0
    pole = ylm_matrix(lmax, np.array([0.0, 0.0, 1.0]))[:, :, 0]
    kappa = np.einsum("lm,lmj->j", pole, A2)
    out = np.real(kappa).copy()
    out.setflags(write=False)
    return out
