"""Forward Radon transforms, fiber Fourier transforms and their companions.

The transform ``R^(p,q)`` integrates a field over every p-plane inside a
q-plane ``ξ = (η, v)``::

    R f(η, v) = ∫_{σ ⊂ η} ∫_{σ⊥ ∩ η} f(σ, v + x) dx dσ

with the normalized measure on ``{σ ⊂ η}`` and Lebesgue measure on the
fiber.  Supported ``(p, q, n)``: ``(0,1,2)``, ``(0,2,3)``, ``(0,1,3)`` and
``(1,2,4)``.  For ``p = 0`` the outer average is trivial.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import jv

from . import _kernels
from .errors import (
    DimensionMismatch,
    DomainMismatch,
    NotOrthogonal,
    OverflowGuard,
    UnsupportedCase,
)
from .fields import K_BALL, K_GAUSS, ScalarField, shell_profile
from .geometry import (
    TOL_INCIDENCE,
    AffinePlane,
    FlagPoint,
    Subspace,
    complete_frame,
    contains,
    fiber_rule,
    gauss_legendre,
    sphere_rule,
    sub_grassmannian_circle,
)

SUPPORTED_CASES = {(0, 1, 2), (0, 2, 3), (0, 1, 3), (1, 2, 4)}
OVERFLOW_LIMIT = 50.0


@dataclass(frozen=True)
class TransformConfig:
    """Discretization of the measures used by every transform.

    Attributes
    ----------
    fiber_radius : float
        Truncation radius of Euclidean fiber integrals for non-compact fields.
    fiber_points : int
        Gauss–Legendre points per fiber axis.
    circle_points : int
        Equal-weight nodes on circles of lines or planes.
    sphere_order : int
        Polynomial exactness of sphere rules.
    lambda_max, lambda_points : float, int
        Radial frequency cutoff and trapezoid sample count for polar inversion.
    """

    fiber_radius: float = 6.0
    fiber_points: int = 64
    circle_points: int = 8
    sphere_order: int = 32
    lambda_max: float = 10.0
    lambda_points: int = 201

    def __post_init__(self):
        if not (self.fiber_radius > 0 and self.fiber_points > 0 and self.lambda_max > 0):
            raise ValueError("TransformConfig values must be positive")
        if self.circle_points < 8:
            raise ValueError("circle_points must be >= 8")
        if self.sphere_order < 4:
            raise ValueError("sphere_order must be >= 4")
        if self.lambda_points < 3:
            raise ValueError("lambda_points must be >= 3")


DEFAULT_CONFIG = TransformConfig()


def check_case(p: int, q: int, n: int) -> None:
    if (p, q, n) not in SUPPORTED_CASES:
        raise UnsupportedCase(f"(p,q,n)=({p},{q},{n}) is not one of {sorted(SUPPORTED_CASES)}")


def _support(f: ScalarField) -> float:
    """Support radius passed to the compiled loops (-1 for non-compact fields)."""
    return float(f.radius) if f.smoothness == "compact" and f.radius is not None else -1.0


def _integration_radius(f: ScalarField, cfg: TransformConfig) -> float:
    if f.smoothness == "compact" and f.radius is not None:
        return min(cfg.fiber_radius, float(f.radius)) if f.radius > 0 else 0.0
    return cfg.fiber_radius


# ---------------------------------------------------------------------------
# Forward transform
# ---------------------------------------------------------------------------

def radon_many(f: ScalarField, etas: np.ndarray, vs: np.ndarray, cfg: TransformConfig = DEFAULT_CONFIG,
               engine: str = "auto") -> np.ndarray:
    """Vectorized :func:`radon_pq` over planes ``(etas[k], vs[k])``.

    ``etas`` has shape ``(N, n, q)``, ``vs`` shape ``(N, n)``.  ``engine``
    selects ``"compiled"`` loops (catalog fields only), ``"numpy"``, or
    ``"auto"``.
    """
    if f.domain != "affine":
        raise DomainMismatch("radon_pq needs a field on an affine Grassmannian")
    etas = np.ascontiguousarray(etas, dtype=float)
    vs = np.ascontiguousarray(vs, dtype=float)
    N, n, q = etas.shape
    if n != f.n:
        raise DomainMismatch(f"planes live in R^{n} but the field lives in R^{f.n}")
    check_case(f.p, q, n)
    xg, wg = gauss_legendre(cfg.fiber_points)
    use_compiled = f.kernel is not None and engine in ("auto", "compiled")
    if engine == "compiled" and f.kernel is None:
        raise ValueError("compiled engine needs a catalog field")
    if use_compiled:
        codes, coefs, prm = f.kernel
        return _kernels.radon_many(codes, coefs, prm, f.p, q, etas, vs, cfg.circle_points,
                                   np.asarray(xg), np.asarray(wg), cfg.fiber_radius, _support(f))
    return _radon_numpy(f, etas, vs, cfg)


def _chords(f: ScalarField, vs: np.ndarray, cfg: TransformConfig) -> np.ndarray:
    sup = _support(f)
    if sup < 0:
        return np.full(vs.shape[0], cfg.fiber_radius)
    vv = np.sum(vs * vs, axis=1)
    return np.sqrt(np.clip(sup * sup - vv, 0.0, None))


def _radon_numpy(f: ScalarField, etas: np.ndarray, vs: np.ndarray, cfg: TransformConfig,
                 chunk: int = 256) -> np.ndarray:
    N, n, q = etas.shape
    out = np.empty(N)
    xg, wg = (np.asarray(a) for a in gauss_legendre(cfg.fiber_points))
    M = xg.size
    for lo in range(0, N, chunk):
        E = etas[lo:lo + chunk]
        V = vs[lo:lo + chunk]
        K = E.shape[0]
        rho = _chords(f, V, cfg)
        if f.p == 0 and q == 1:
            y = V[:, None, :] + (rho[:, None, None] * xg[None, :, None]) * E[:, None, :, 0]
            vals = f.evaluate(np.zeros((K * M, n, 0)), y.reshape(-1, n)).reshape(K, M)
            out[lo:lo + K] = rho * np.sum(wg * vals, axis=1)
        elif f.p == 0 and q == 2:
            x1 = rho[:, None] * xg[None, :]
            if _support(f) >= 0:
                rho2 = np.sqrt(np.clip(rho[:, None] ** 2 - x1 ** 2, 0.0, None))
            else:
                rho2 = np.broadcast_to(rho[:, None], x1.shape)
            x2 = rho2[:, :, None] * xg[None, None, :]
            y = (V[:, None, None, :] + x1[:, :, None, None] * E[:, None, None, :, 0]
                 + x2[:, :, :, None] * E[:, None, None, :, 1])
            vals = f.evaluate(np.zeros((K * M * M, n, 0)), y.reshape(-1, n)).reshape(K, M, M)
            inner = np.sum(wg * vals, axis=2) * rho2
            out[lo:lo + K] = rho * np.sum(wg * inner, axis=1)
        else:
            C = cfg.circle_points
            th = np.pi * np.arange(C) / C
            b1, b2 = E[:, :, 0], E[:, :, 1]
            u = np.cos(th)[None, :, None] * b1[:, None, :] + np.sin(th)[None, :, None] * b2[:, None, :]
            e = -np.sin(th)[None, :, None] * b1[:, None, :] + np.cos(th)[None, :, None] * b2[:, None, :]
            y = V[:, None, None, :] + (rho[:, None, None, None] * xg[None, None, :, None]) * e[:, :, None, :]
            B = np.broadcast_to(u[:, :, None, :, None], (K, C, M, n, 1)).reshape(-1, n, 1)
            vals = f.evaluate(B, y.reshape(-1, n)).reshape(K, C, M)
            inner = rho[:, None] * np.sum(wg * vals, axis=2)
            out[lo:lo + K] = np.sum(inner, axis=1) / C
    return out


def radon_pq(f: ScalarField, xi: AffinePlane, cfg: TransformConfig = DEFAULT_CONFIG) -> float:
    """Radon transform of ``f`` at the q-plane ``xi``.

    Raises
    ------
    UnsupportedCase
        ``(f.p, xi.dim, n)`` is not a supported case.
    DomainMismatch
        ``f`` is not a field on an affine Grassmannian of matching ``n``.
    """
    if f.domain != "affine" or xi.subspace.ambient_dim != f.n:
        raise DomainMismatch("field and plane do not share an ambient space")
    check_case(f.p, xi.dim, f.n)
    return float(radon_many(f, xi.subspace.basis[None], xi.offset[None], cfg)[0])


def radon_field(f: ScalarField, q: int, cfg: TransformConfig = DEFAULT_CONFIG) -> ScalarField:
    """The image ``R^(p,q) f`` as a field on G(q, n)."""
    check_case(f.p, q, f.n)

    def ev(B, v):
        return radon_many(f, B, v, cfg)

    sm = f.smoothness
    return ScalarField("affine", q, f.n, ev, sm, f.radius if sm == "compact" else None, None,
                       ("radon", f, cfg, None), f"R({f.label})")


# ---------------------------------------------------------------------------
# Fiber Fourier transforms
# ---------------------------------------------------------------------------

def _fiber_nodes(f: ScalarField, sigma: Subspace, cfg: TransformConfig):
    d = f.n - f.p
    rad = _integration_radius(f, cfg)
    Q = complete_frame(sigma.basis)
    if rad <= 0:
        return Q, np.zeros((0, d)), np.zeros(0), np.zeros(0), rad
    rule = fiber_rule(d, rad, cfg.fiber_points)
    x = rule.nodes @ Q.T
    B = np.broadcast_to(sigma.basis, (x.shape[0],) + sigma.basis.shape)
    vals = f.evaluate(B, x)
    keep = vals != 0
    return Q, rule.nodes[keep], rule.weights[keep], vals[keep], rad


def _radial_fourier(f: ScalarField, sigma: Subspace, ys: np.ndarray, cfg: TransformConfig) -> np.ndarray | None:
    """Fiber Fourier transform of a catalog field whose terms are radial in the fiber.

    Such a term is ``g(σ) h(‖x‖)``, and its transform on the d-dimensional
    fiber is the Hankel-type integral ``∫ h(r) k_d(‖y‖ r) r^{d-1} dr`` with
    ``k_3(z) = 4π sin(z)/z`` and ``k_2(z) = 2π J₀(z)``.  Both kernels are even
    entire functions, so complex frequencies use ``‖y‖ = sqrt(y·y)`` on any
    branch.  Returns ``None`` when the field has no such structure.
    """
    if f.kernel is None or f.p > 1:
        return None
    codes, coefs, prm = f.kernel
    if np.any(codes == K_BALL):
        return None
    d = f.n - f.p
    if d not in (2, 3):
        return None
    rad = _integration_radius(f, cfg)
    knorm = np.sqrt(np.sum(ys * ys, axis=1).astype(complex))
    xg, wg = (np.asarray(a) for a in gauss_legendre(cfg.fiber_points))
    u = sigma.basis[:, 0] if f.p == 1 else None
    out = np.zeros(ys.shape[0], dtype=complex)
    for k in range(codes.shape[0]):
        if rad <= 0:
            break
        if codes[k] == K_GAUSS:
            lo, hi = 0.0, rad
        else:
            lo, hi = prm[k, 0], min(prm[k, 1], rad)
            if hi <= lo:
                continue
        r = 0.5 * (hi + lo) + 0.5 * (hi - lo) * xg
        w = 0.5 * (hi - lo) * wg
        if codes[k] == K_GAUSS:
            h = np.exp(-(r / prm[k, 0]) ** 2)
        else:
            h = shell_profile(r, prm[k, 0], prm[k, 1])
        amp = coefs[k]
        if codes[k] == K_GAUSS and prm[k, 1] != 0.0 and u is not None:
            n = f.n
            amp *= float(u @ prm[k, 2:2 + n * n].reshape(n, n) @ u)
        z = np.outer(knorm, r)
        if d == 3:
            kern = 4.0 * np.pi * np.sinc(z / np.pi) * r * r
        else:
            kern = 2.0 * np.pi * jv(0, z) * r
        out += amp * (kern @ (w * h))
    return out


def partial_fourier_many(f: ScalarField, sigma: Subspace, ys: np.ndarray,
                         cfg: TransformConfig = DEFAULT_CONFIG, chunk: int = 8) -> np.ndarray:
    """:func:`partial_fourier` at many (possibly complex) frequencies ``ys``.

    Catalog fields that are radial in the fiber use a one-dimensional radial
    rule; other fields use the tensor fiber rule on the bounding cube.
    """
    if f.domain != "affine":
        raise DomainMismatch("partial_fourier needs a field on an affine Grassmannian")
    if sigma.dim != f.p or sigma.ambient_dim != f.n:
        raise DomainMismatch("sigma does not belong to the field's Grassmannian")
    ys = np.atleast_2d(np.asarray(ys))
    if sigma.dim and np.max(np.abs(ys @ sigma.basis), initial=0.0) > TOL_INCIDENCE * max(1.0, np.max(np.abs(ys))):
        raise NotOrthogonal("frequency must be orthogonal to sigma")
    rad = _integration_radius(f, cfg)
    im = np.max(np.linalg.norm(np.imag(ys), axis=1)) if np.iscomplexobj(ys) else 0.0
    if im * rad > OVERFLOW_LIMIT:
        raise OverflowGuard(f"|Im y| * radius = {im * rad:.3g} exceeds {OVERFLOW_LIMIT}")
    fast = _radial_fourier(f, sigma, ys, cfg)
    if fast is not None:
        return fast
    Q, nodes, weights, vals, rad = _fiber_nodes(f, sigma, cfg)
    out = np.zeros(ys.shape[0], dtype=complex)
    if nodes.shape[0] == 0:
        return out
    yf = ys @ Q  # fiber-frame frequencies
    wv = weights * vals
    for lo in range(0, ys.shape[0], chunk):
        ph = nodes @ yf[lo:lo + chunk].T
        out[lo:lo + chunk] = np.sum(wv[:, None] * np.exp(-1j * ph), axis=0)
    return out


def partial_fourier(f: ScalarField, sigma: Subspace, y: np.ndarray, cfg: TransformConfig = DEFAULT_CONFIG) -> complex:
    """Fourier transform of ``f(σ, ·)`` on the fiber ``σ⊥`` at frequency ``y``.

    ``y`` may be complex (``λω`` with complex ``λ``); this is meaningful for
    compactly supported fields, whose fiber integrals then run over the
    support ball's bounding cube.

    Raises
    ------
    NotOrthogonal
        ``y`` is not orthogonal to ``sigma``.
    OverflowGuard
        ``|Im y| · radius > 50``.
    """
    return complex(partial_fourier_many(f, sigma, np.asarray(y)[None], cfg)[0])


def partial_fourier_field(f: ScalarField, cfg: TransformConfig = DEFAULT_CONFIG) -> ScalarField:
    """``F̃(σ, ω; λ) = F_p f(σ, λω)`` as an even field on the flag manifold times R."""

    def ev(B, omega, lam):
        B = np.asarray(B, dtype=float)
        omega = np.asarray(omega, dtype=float)
        lam = np.asarray(lam)
        out = np.empty(omega.shape[0], dtype=complex)
        keys = np.ascontiguousarray(np.round(B.reshape(B.shape[0], -1), 14))
        uniq, inv = np.unique(keys, axis=0, return_inverse=True)
        inv = inv.reshape(-1)
        for g in range(uniq.shape[0]):
            idx = np.nonzero(inv == g)[0]
            sig = Subspace(B[idx[0]])
            out[idx] = partial_fourier_many(f, sig, lam[idx, None] * omega[idx], cfg)
        return out

    return ScalarField("flag", f.p, f.n, ev, f.smoothness, f.radius, None, ("fourier", f, cfg),
                       f"F({f.label})", even=True)


def partial_fourier_inverse(Ftilde: ScalarField, sigma: Subspace, x: np.ndarray,
                            cfg: TransformConfig = DEFAULT_CONFIG) -> complex:
    """Polar inverse of the fiber Fourier transform at the fiber point ``x``.

    ``f(σ,x) = (2π)^{p-n} ∫_{S_σ} ∫_0^∞ F̃(σ,ω;λ) e^{iλ<x,ω>} λ^{n-p-1} dλ dω``
    with surface measure on the unit sphere ``S_σ`` of ``σ⊥``.  The radial
    integral is the trapezoid rule on ``[0, cfg.lambda_max]``.
    """
    if Ftilde.domain != "flag":
        raise DomainMismatch("partial_fourier_inverse needs a field on the flag manifold times R")
    if sigma.dim != Ftilde.p or sigma.ambient_dim != Ftilde.n:
        raise DomainMismatch("sigma does not match the field")
    x = np.asarray(x, dtype=float)
    d = Ftilde.n - Ftilde.p
    Q = complete_frame(sigma.basis)
    rule = sphere_rule(d, cfg.sphere_order)
    omegas = rule.nodes @ Q.T
    lam = np.linspace(0.0, cfg.lambda_max, cfg.lambda_points)
    tw = np.full(lam.size, lam[1] - lam[0])
    tw[0] *= 0.5
    tw[-1] *= 0.5
    area = 2.0 * np.pi if d == 2 else 4.0 * np.pi
    K, L = omegas.shape[0], lam.size
    W = np.repeat(omegas, L, axis=0)
    Lm = np.tile(lam, K)
    B = np.broadcast_to(sigma.basis, (K * L,) + sigma.basis.shape)
    vals = Ftilde.evaluate(B, W, Lm).reshape(K, L)
    phase = np.exp(1j * np.outer(omegas @ x, lam))
    radial = np.sum(tw * lam ** (d - 1) * vals * phase, axis=1)
    return complex(area * np.sum(rule.weights * radial) / (2.0 * np.pi) ** d)


# ---------------------------------------------------------------------------
# Flag and compact transforms (the (1,2,4) case)
# ---------------------------------------------------------------------------

def planes_between(flag: FlagPoint, m: int) -> np.ndarray:
    """Bases ``(m, 4, 2)`` of the planes ``η`` with ``σ ⊂ η ⊂ ω⊥``.

    The second basis vector sweeps the unit circle of ``ω⊥ ∩ σ⊥`` at angles
    ``πj/m`` (planes are unoriented, so the period is π).
    """
    u = flag.subspace.basis[:, 0]
    c = complete_frame(np.column_stack([u, flag.direction]))
    th = np.pi * np.arange(m) / m
    w = np.cos(th)[:, None] * c[:, 0] + np.sin(th)[:, None] * c[:, 1]
    return np.stack([np.broadcast_to(u, w.shape), w], axis=2)


def dual_flag_S(Phi: ScalarField, flag: FlagPoint, r: float, cfg: TransformConfig = DEFAULT_CONFIG) -> complex:
    """``SΦ(σ, ω; r)``: normalized average of ``Φ(η, ω; r)`` over ``σ ⊂ η ⊂ ω⊥``."""
    if (Phi.p, Phi.n) != (2, 4) or flag.subspace.dim != 1 or flag.subspace.ambient_dim != 4:
        raise UnsupportedCase("dual_flag_S is implemented for (p,q,n) = (1,2,4)")
    m = cfg.circle_points
    etas = planes_between(flag, m)
    om = np.broadcast_to(flag.direction, (m, 4))
    vals = Phi.evaluate(etas, om, np.full(m, r))
    return complex(np.sum(vals) / m)


def compact_fiber_transform(F: ScalarField, eta: Subspace, omega: np.ndarray,
                            cfg: TransformConfig = DEFAULT_CONFIG) -> complex:
    """Normalized average of a line field ``F`` over the lines inside ``eta``.

    ``F`` is a ``"grassmannian"`` field on lines of ``ω⊥`` (evaluated on
    bases of shape ``(N, 4, 1)``).  Under the identification of planes in
    ``ω⊥`` with their unit normals this is the Funk transform on S².
    """
    if F.domain != "grassmannian" or F.p != 1 or F.n != 4 or eta.ambient_dim != 4:
        raise UnsupportedCase("compact_fiber_transform is implemented for lines and planes in R^4")
    omega = np.asarray(omega, dtype=float)
    if eta.dim != 2 or np.max(np.abs(eta.basis.T @ omega)) > TOL_INCIDENCE:
        raise NotOrthogonal("eta must be a 2-plane inside omega-perp")
    lines = sub_grassmannian_circle(eta, cfg.circle_points)
    B = np.stack([s.basis for s, _ in lines])
    w = np.array([wt for _, wt in lines])
    return complex(np.sum(w * F.evaluate(B)))


# ---------------------------------------------------------------------------
# Hyperplane restriction
# ---------------------------------------------------------------------------

def restrict_to_hyperplane(f: ScalarField, L: AffinePlane) -> ScalarField:
    """Restriction of ``f`` to the p-planes inside the hyperplane ``L``.

    The result is a field on G(p, n-1) in the coordinates of ``L``: the
    point ``a`` of L-coordinates is ``offset(L) + basis(L) a``.
    """
    n = f.n
    if L.dim != n - 1 or L.subspace.ambient_dim != n:
        raise DimensionMismatch("L must be a hyperplane of the field's ambient space")
    if f.p >= n - 1:
        raise DimensionMismatch("restriction needs p < n - 1")
    Lb = L.subspace.basis
    c = L.offset
    fa = f.evaluate

    def ev(B, x):
        B = np.asarray(B, dtype=float)
        x = np.asarray(x, dtype=float)
        return fa(np.einsum("ij,njk->nik", Lb, B), c + x @ Lb.T)

    rad = None
    if f.smoothness == "compact":
        rad = float(np.sqrt(max(f.radius ** 2 - float(c @ c), 0.0)))
    return ScalarField("affine", f.p, n - 1, ev, f.smoothness, rad, None, None,
                       f"{f.label}|L", peak=f.peak)


# ---------------------------------------------------------------------------
# Projection-slice identity
# ---------------------------------------------------------------------------

def slice_sides(f: ScalarField, eta: Subspace, y: np.ndarray, cfg: TransformConfig = DEFAULT_CONFIG):
    """Both sides of the projection-slice identity at ``(η, y)``.

    Returns ``(F_q R f(η, y), ∫_{σ⊂η} F_p f(σ, y) dσ)``.
    """
    n, p, q = f.n, f.p, eta.dim
    check_case(p, q, n)
    y = np.asarray(y, dtype=float)
    if np.max(np.abs(eta.basis.T @ y)) > TOL_INCIDENCE * max(1.0, np.linalg.norm(y)):
        raise NotOrthogonal("y must be orthogonal to eta")
    # left side: fiber Fourier transform of the Radon image over η⊥
    d = n - q
    rad = _integration_radius(f, cfg)
    Q = complete_frame(eta.basis)
    if rad > 0:
        rule = fiber_rule(d, rad, cfg.fiber_points)
        vs = rule.nodes @ Q.T
        etas = np.broadcast_to(eta.basis, (vs.shape[0], n, q))
        phi = radon_many(f, etas, vs, cfg)
        lhs = complex(np.sum(rule.weights * phi * np.exp(-1j * (vs @ y))))
    else:
        lhs = 0j
    # right side: average of F_p f(σ, y) over σ ⊂ η
    if p == 0:
        rhs = complex(partial_fourier_many(f, Subspace(np.zeros((n, 0))), y[None], cfg)[0])
    else:
        acc = 0j
        lines = sub_grassmannian_circle(eta, cfg.circle_points)
        for s, w in lines:
            acc += w * partial_fourier_many(f, s, y[None], cfg)[0]
        rhs = complex(acc)
    return lhs, rhs


def projection_slice_residual(f: ScalarField, eta: Subspace, y: np.ndarray,
                              cfg: TransformConfig = DEFAULT_CONFIG) -> float:
    """``|F_q R f(η,y) - ∫_{σ⊂η} F_p f(σ,y) dσ| / (1 + |RHS|)``."""
    lhs, rhs = slice_sides(f, eta, y, cfg)
    return float(abs(lhs - rhs) / (1.0 + abs(rhs)))


def incident(sigma_plane: AffinePlane, xi: AffinePlane) -> bool:
    """``True`` when the p-plane ``sigma_plane`` lies inside ``xi``."""
    return contains(sigma_plane.subspace, xi.subspace) and xi.contains_plane(sigma_plane)
