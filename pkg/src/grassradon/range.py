"""Moment conditions and the constructive equal-rank inversion (case (1,2,4)).

Pipeline
--------
For ``φ`` on G(2,4), a flag ``(σ, ω)`` and a radial frequency ``r``:

1. ``Φ̃(η, ω; r) = F_q φ(η, rω)`` for planes ``η ⊂ ω⊥``;
2. ``F̃ = □⁽ᵖ⁾ S Φ̃``;
3. ``f = F_p⁻¹ F̃`` by polar inversion.

Planes ``η ⊂ ω⊥`` are parametrized by their unit normals ``n`` in ``ω⊥``;
then ``η⊥ = span(ω, n)`` and

    Φ̃(η, ω; λ) = ∫ e^{-iλs} g(η, ω; s) ds,   g(η, ω; s) = ∫ φ(η, sω + t n) dt.

Steps 1–2 commute with the ``s``-Fourier transform, so ``S`` and □ are
applied to the profiles ``g`` directly.  Composed, they are a zonal
linear functional of the values of ``g`` on a grid of normals around the
direction of ``σ``; the weights come from :func:`composite_weights`, which
runs the spectral operations literally.

The radial integral of the polar inversion has a closed form in ``n=4``,
``p=1``: using evenness, ``∫_0^∞ F̃ e^{iλt} λ² dλ = -π D''(t)`` where ``D``
is the processed profile, so

    f(σ, x) = -(1/8π²) ∫_{S_σ} D''(σ, ω; <x, ω>) dω.

This "slice" mode evaluates ``D''`` with a five-point difference and
integrates over ``S_σ`` with a product rule aligned with ``x``, restricted
to the directions where ``|<x, ω>|`` is inside the support of ``φ``.  The
"fourier" mode instead tabulates ``F̃`` and calls
:func:`~grassradon.transforms.partial_fourier_inverse`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement

import numpy as np

from . import _kernels
from .errors import DomainMismatch, NotOrthogonal, UnsupportedCase
from .fields import ScalarField
from .geometry import (
    DEFAULT_SEED,
    TOL_INCIDENCE,
    AffinePlane,
    FlagPoint,
    Subspace,
    complete_frame,
    fiber_rule,
    gauss_legendre,
    make_rng,
    random_subspace,
    random_unit_in,
    sphere_rule,
    sub_grassmannian_circle,
)
from .harmonic import box_p, composite_weights, zonal_grid
from .transforms import (
    DEFAULT_CONFIG,
    TransformConfig,
    check_case,
    dual_flag_S,
    partial_fourier_inverse,
    radon_field,
)

STREAM_DIAGNOSTICS = 11
STREAM_RANGE = 12


@dataclass(frozen=True)
class InversionConfig:
    """Grids of the inversion pipeline beyond those of :class:`TransformConfig`.

    Attributes
    ----------
    profile_points : int
        Gauss–Legendre nodes of the ``t`` integral across each profile chord.
    omega_polar : int
        Gauss–Legendre nodes in ``<x̂, ω>`` on the direction sphere (only the
        positive half is evaluated, by evenness).
    omega_azimuth : int
        Equispaced azimuths around ``x̂``.
    fd_step : float
        Step of the five-point second difference in ``s``.
    mode : str
        ``"slice"`` (closed-form radial integral) or ``"fourier"``.
    s_points : int
        Gauss–Legendre nodes in ``s`` for moments and the fourier mode.
    profile_radius : float or None
        Window for profiles of non-compact ``φ``; defaults to ``fiber_radius``.
    diagnostic_probes : int
        Flags used by the compact-transform consistency diagnostic.
    """

    profile_points: int = 128
    omega_polar: int = 128
    omega_azimuth: int = 6
    fd_step: float = 0.025
    mode: str = "slice"
    s_points: int = 48
    profile_radius: float | None = None
    diagnostic_probes: int = 3

    def __post_init__(self):
        if self.mode not in ("slice", "fourier"):
            raise ValueError("mode must be 'slice' or 'fourier'")
        if self.omega_polar < 2 or self.omega_polar % 2:
            raise ValueError("omega_polar must be a positive even number")
        if self.omega_azimuth < 1 or self.profile_points < 2 or self.s_points < 2:
            raise ValueError("grid sizes must be positive")
        if not self.fd_step > 0:
            raise ValueError("fd_step must be positive")


DEFAULT_INVERSION = InversionConfig()


# ---------------------------------------------------------------------------
# Profiles g(η, ω; s)
# ---------------------------------------------------------------------------

def _check_phi(phi: ScalarField):
    if phi.domain != "affine":
        raise DomainMismatch("expected a field on an affine Grassmannian")
    if (phi.p, phi.n) != (2, 4):
        raise UnsupportedCase("the inversion pipeline is implemented for (p,q,n) = (1,2,4)")


class ProfileEngine:
    """Evaluates plane profiles of ``φ``, fused when ``φ`` is a catalog Radon image."""

    def __init__(self, phi: ScalarField, cfg: TransformConfig, icfg: InversionConfig):
        _check_phi(phi)
        self.phi = phi
        self.cfg = cfg
        self.icfg = icfg
        if phi.smoothness == "compact" and phi.radius is not None:
            self.radius = float(phi.radius)
        else:
            self.radius = float(icfg.profile_radius or cfg.fiber_radius)
        src = phi.source
        self.fused = (src is not None and src[0] == "radon" and src[1].kernel is not None
                      and (src[1].p, src[1].n) == (1, 4))
        if self.fused:
            f, rcfg = src[1], src[2]
            self.f = f
            self.rcfg = rcfg
            self.xg, self.wg = (np.asarray(a) for a in gauss_legendre(rcfg.fiber_points))
            self.f_support = float(f.radius) if f.smoothness == "compact" else -1.0
            self.radial = bool(_kernels.is_fiber_radial(f.kernel[0]))
        self.tg, self.tw = (np.asarray(a) for a in gauss_legendre(icfg.profile_points))

    def profiles(self, etas: np.ndarray, omegas: np.ndarray, normals: np.ndarray, svals: np.ndarray) -> np.ndarray:
        """``g(η_k, ω_k; s)`` for every ``s`` in ``svals[k]``; shape ``(K, S)``."""
        etas = np.ascontiguousarray(etas)
        omegas = np.ascontiguousarray(omegas)
        normals = np.ascontiguousarray(normals)
        svals = np.ascontiguousarray(svals, dtype=float)
        if self.fused and self.radial:
            codes, coefs, prm = self.f.kernel
            amean = _kernels.angular_means_many(codes, coefs, prm, etas, self.rcfg.circle_points)
            rows, inv = np.unique(svals, axis=0, return_inverse=True)
            H = _kernels.radial_profile_terms(codes, prm, np.ascontiguousarray(rows), self.xg, self.wg,
                                              self.rcfg.fiber_radius, self.f_support, self.radius,
                                              self.tg, self.tw)
            return np.einsum("kt,kst->ks", amean, H[inv.reshape(-1)])
        if self.fused:
            codes, coefs, prm = self.f.kernel
            return _kernels.plane_profiles(codes, coefs, prm, etas, omegas, normals, svals,
                                           self.rcfg.circle_points, self.xg, self.wg,
                                           self.rcfg.fiber_radius, self.f_support, self.radius,
                                           self.tg, self.tw)
        return self._profiles_numpy(etas, omegas, normals, svals)

    def _profiles_numpy(self, etas, omegas, normals, svals, chunk: int = 64):
        K, S = svals.shape
        R = self.radius
        T = self.tg.size
        out = np.zeros((K, S))
        for lo in range(0, K, chunk):
            sl = slice(lo, lo + chunk)
            s = svals[sl]
            tau = np.sqrt(np.clip(R * R - s * s, 0.0, None))
            t = tau[:, :, None] * self.tg
            v = s[:, :, None, None] * omegas[sl, None, None, :] + t[..., None] * normals[sl, None, None, :]
            kk = s.shape[0]
            B = np.broadcast_to(etas[sl, None, None], (kk, S, T, 4, 2)).reshape(-1, 4, 2)
            vals = self.phi.evaluate(B, v.reshape(-1, 4)).reshape(kk, S, T)
            out[sl] = np.where(np.abs(s) < R, tau * np.sum(self.tw * vals, axis=2), 0.0)
        return out


def zonal_planes(u: np.ndarray, omega: np.ndarray, lmax: int):
    """Planes of ``ω⊥`` on the folded zonal grid about the line ``u``.

    Returns ``(etas, normals)`` with shapes ``(J, 4, 2)`` and ``(J, 4)``.
    The frame of ``ω⊥ ∩ u⊥`` is :func:`complete_frame` of ``[u, ω]``, which
    depends on ``ω`` only through ``±ω``.
    """
    c, phi, _ = zonal_grid(lmax)
    fr = complete_frame(np.column_stack([u, omega]))
    s = np.sqrt(1.0 - c * c)
    a = np.cos(phi)[:, None] * fr[:, 0] + np.sin(phi)[:, None] * fr[:, 1]
    b = -np.sin(phi)[:, None] * fr[:, 0] + np.cos(phi)[:, None] * fr[:, 1]
    normals = s[:, None] * a + c[:, None] * u
    e1 = c[:, None] * a - s[:, None] * u
    return np.stack([e1, b], axis=2), normals


# ---------------------------------------------------------------------------
# Moments
# ---------------------------------------------------------------------------

def _fiber_radius_of(phi: ScalarField, cfg: TransformConfig) -> float:
    if phi.smoothness == "compact" and phi.radius is not None:
        return min(cfg.fiber_radius, float(phi.radius))
    return cfg.fiber_radius


def moment_functional(phi: ScalarField, eta: Subspace, y: np.ndarray, k: int,
                      cfg: TransformConfig = DEFAULT_CONFIG) -> complex:
    """``∫_{η⊥} φ(η, v) <v, y>^k dv`` by tensor Gauss–Legendre on ``η⊥``."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if phi.domain != "affine" or eta.dim != phi.p or eta.ambient_dim != phi.n:
        raise DomainMismatch("eta does not belong to the field's Grassmannian")
    y = np.asarray(y, dtype=float)
    if np.max(np.abs(eta.basis.T @ y), initial=0.0) > TOL_INCIDENCE * max(1.0, np.linalg.norm(y)):
        raise NotOrthogonal("y must be orthogonal to eta")
    rad = _fiber_radius_of(phi, cfg)
    if rad <= 0:
        return 0j
    Q = complete_frame(eta.basis)
    rule = fiber_rule(phi.n - phi.p, rad, cfg.fiber_points)
    v = rule.nodes @ Q.T
    vals = phi.evaluate(np.broadcast_to(eta.basis, (v.shape[0],) + eta.basis.shape), v)
    return complex(np.sum(rule.weights * vals * (v @ y) ** k))


def moment_polynomial(f: ScalarField, sigma: Subspace, y: np.ndarray, k: int,
                      cfg: TransformConfig = DEFAULT_CONFIG) -> complex:
    """``P_k(σ, y) = ∫_{σ⊥} f(σ, w) <w, y>^k dw``."""
    return moment_functional(f, sigma, y, k, cfg)


def forward_moment_identity_residual(f: ScalarField, eta: Subspace, y: np.ndarray, k: int,
                                     cfg: TransformConfig = DEFAULT_CONFIG) -> float:
    """Relative gap ``|M_k(Rf)(η,y) - ∫_{σ⊂η} P_k(σ,y) dσ| / (1 + |RHS|)``."""
    check_case(f.p, eta.dim, f.n)
    lhs = moment_functional(radon_field(f, eta.dim, cfg), eta, y, k, cfg)
    if f.p == 0:
        rhs = moment_polynomial(f, Subspace(np.zeros((f.n, 0))), y, k, cfg)
    else:
        rhs = sum(w * moment_polynomial(f, s, y, k, cfg) for s, w in
                  sub_grassmannian_circle(eta, cfg.circle_points))
    return float(abs(lhs - rhs) / (1.0 + abs(rhs)))


def candidate_moments(phi: ScalarField, sigma: Subspace, omegas: np.ndarray, kmax: int,
                      cfg: TransformConfig = DEFAULT_CONFIG, lmax: int = 16,
                      icfg: InversionConfig = DEFAULT_INVERSION,
                      engine: ProfileEngine | None = None) -> np.ndarray:
    """``□⁽ᵖ⁾ S`` of the moment functionals at ``(σ, ω_i)`` for ``r = 1``.

    Returns an array ``(len(omegas), kmax+1)``; the value at radius ``r`` is
    ``r^k`` times the entry.
    """
    _check_phi(phi)
    eng = engine or ProfileEngine(phi, cfg, icfg)
    u = sigma.basis[:, 0]
    omegas = np.atleast_2d(np.asarray(omegas, dtype=float))
    kappa = composite_weights(lmax, max(cfg.circle_points, lmax // 2 + 1))
    sg, sw = (np.asarray(a) for a in gauss_legendre(icfg.s_points))
    R = eng.radius
    s = R * sg
    powers = np.stack([s ** k for k in range(kmax + 1)])  # (k, S)
    etas_all, normals_all, om_all = [], [], []
    for w in omegas:
        if abs(w @ u) > TOL_INCIDENCE:
            raise NotOrthogonal("omega must be orthogonal to sigma")
        e, nrm = zonal_planes(u, w, lmax)
        etas_all.append(e)
        normals_all.append(nrm)
        om_all.append(np.broadcast_to(w, nrm.shape))
    J = kappa.size
    etas = np.concatenate(etas_all)
    normals = np.concatenate(normals_all)
    oms = np.concatenate(om_all)
    g = eng.profiles(etas, oms, normals, np.broadcast_to(s, (etas.shape[0], s.size)))
    mom = (R * g * sw) @ powers.T  # (K, k)
    mom = mom.reshape(len(omegas), J, kmax + 1)
    return np.einsum("j,ijk->ik", kappa, mom)


def candidate_moment_polynomial(phi: ScalarField, sigma: Subspace, omega: np.ndarray, r: float, k: int,
                                cfg: TransformConfig = DEFAULT_CONFIG, lmax: int = 16,
                                icfg: InversionConfig = DEFAULT_INVERSION) -> complex:
    """Candidate ``P_k(σ, rω) = □⁽ᵖ⁾ S [ (η, ω) ↦ ∫_{η⊥} φ(η, v) <v, rω>^k dv ](σ)``."""
    vals = candidate_moments(phi, sigma, np.asarray(omega)[None], k, cfg, lmax, icfg)
    return complex(r ** k * vals[0, k])


def candidate_moment_polynomial_direct(phi: ScalarField, sigma: Subspace, omega: np.ndarray, r: float, k: int,
                                       cfg: TransformConfig = DEFAULT_CONFIG, lmax: int = 4) -> complex:
    """Same quantity as :func:`candidate_moment_polynomial`, computed by literal
    composition of :func:`~grassradon.harmonic.box_p`, :func:`~grassradon.transforms.dual_flag_S`
    and :func:`moment_functional`.  Expensive; intended as a cross-check on small grids.
    """
    _check_phi(phi)

    def Phi_ev(B, om, rr):
        return np.array([moment_functional(phi, Subspace(B[i]), rr[i] * om[i], k, cfg)
                         for i in range(B.shape[0])])

    Phi = ScalarField("flag", 2, 4, Phi_ev, label="moment functional")

    def V_ev(B, om, rr):
        return np.array([dual_flag_S(Phi, FlagPoint(Subspace(B[i]), om[i]), rr[i], cfg)
                         for i in range(B.shape[0])])

    V = ScalarField("flag", 1, 4, V_ev, label="S moment functional")
    return box_p(V, FlagPoint(sigma, np.asarray(omega, dtype=float)), r, lmax)


@dataclass
class MomentReport:
    """Fit of candidate moments to one homogeneous polynomial per line ``σ``.

    ``per_probe_residuals`` holds ``((probe, node), residual)`` where the
    residual is the fit error at that direction divided by one plus the
    largest candidate magnitude for the probe.  Agreement of the candidates across
    all directions ``ω`` (each of which reaches ``σ`` through a different
    family of planes) with a single degree-``k`` polynomial is the content of
    the moment condition.
    """

    k: int
    per_probe_residuals: list = field(default_factory=list)
    fitted_coeffs: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    max_residual: float = 0.0
    condition_numbers: list = field(default_factory=list)
    probes: list = field(default_factory=list)


def homogeneous_monomials(k: int, dim: int = 3) -> list[tuple[int, ...]]:
    """Exponent tuples of the monomials of exact degree ``k`` in ``dim`` variables."""
    out = []
    for combo in combinations_with_replacement(range(dim), k):
        e = [0] * dim
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    return out


def range_membership_report(phi: ScalarField, kmax: int, probe_count: int,
                            cfg: TransformConfig = DEFAULT_CONFIG, lmax: int = 16,
                            seed: int = DEFAULT_SEED, icfg: InversionConfig = DEFAULT_INVERSION,
                            direction_order: int | None = None) -> list[MomentReport]:
    """Moment-condition diagnostics for ``φ`` on G(2,4), one report per ``k ≤ kmax``."""
    _check_phi(phi)
    if kmax < 0 or probe_count < 0:
        raise ValueError("kmax and probe_count must be non-negative")
    rng = make_rng(seed, STREAM_RANGE)
    order = direction_order or max(2 * kmax + 1, 5)
    if order % 2 == 0:
        order += 1  # even azimuth count keeps the direction grid antipodally symmetric
    rule = sphere_rule(3, order)
    nu = rule.nodes
    # evaluate one node of each antipodal pair; the other follows from V(σ,-ω) = (-1)^k V(σ,ω)
    key = np.round(nu, 12)
    rep = np.zeros(nu.shape[0], dtype=int)
    sign_src = np.ones(nu.shape[0])
    seen: dict = {}
    for i, row in enumerate(key):
        neg = tuple((-row + 0.0).tolist())
        if neg in seen:
            rep[i] = seen[neg]
            sign_src[i] = -1.0
        else:
            seen[tuple(row.tolist())] = i
            rep[i] = i
    base = np.unique(rep)
    eng = ProfileEngine(phi, cfg, icfg)
    reports = [MomentReport(k) for k in range(kmax + 1)]
    coeffs = [[] for _ in range(kmax + 1)]
    for probe in range(probe_count):
        sigma = random_subspace(rng, 4, 1)
        Q = complete_frame(sigma.basis)
        om = nu @ Q.T
        vals_base = candidate_moments(phi, sigma, om[base], kmax, cfg, lmax, icfg, engine=eng)
        lookup = {b: j for j, b in enumerate(base)}
        for k in range(kmax + 1):
            vals = np.array([vals_base[lookup[rep[i]], k] * (sign_src[i] ** k) for i in range(nu.shape[0])])
            mons = homogeneous_monomials(k)
            A = np.stack([np.prod(nu ** np.array(e), axis=1) for e in mons], axis=1)
            c, *_ = np.linalg.lstsq(A, vals, rcond=None)
            resid = np.abs(A @ c - vals)
            rel = resid / (1.0 + np.max(np.abs(vals)))
            rpt = reports[k]
            rpt.per_probe_residuals.extend(((probe, i), float(rv)) for i, rv in enumerate(rel))
            rpt.condition_numbers.append(float(np.linalg.cond(A)))
            rpt.probes.append(sigma)
            coeffs[k].append(c)
    for k, rpt in enumerate(reports):
        rpt.fitted_coeffs = np.array(coeffs[k]) if coeffs[k] else np.zeros((0, len(homogeneous_monomials(k))))
        rpt.max_residual = max((r for _, r in rpt.per_probe_residuals), default=0.0)
    return reports


# ---------------------------------------------------------------------------
# Inversion
# ---------------------------------------------------------------------------

@dataclass
class InversionResult:
    """Output of :func:`invert_equal_rank`.

    ``reconstructed`` is a field on G(1,4); ``spectral`` is ``F̃`` as an even
    field on the flag manifold times R; ``diagnostics`` records grid sizes,
    ``lmax`` and the largest relative gap between the compact transform of
    the processed profiles and the raw profiles on seeded flags.
    """

    reconstructed: ScalarField
    spectral: ScalarField
    diagnostics: dict
    engine: "_Inverter"

    def evaluate_many(self, B: np.ndarray, X: np.ndarray) -> np.ndarray:
        return self.reconstructed.evaluate(B, X)

    def roundtrip_residual(self, planes: list[AffinePlane], cfg: TransformConfig) -> float:
        """Max ``|R^(1,2) f_rec(ξ) - φ(ξ)| / max|φ|`` over ``planes``.

        Each transform value integrates the reconstruction over
        ``circle_points · fiber_points`` lines, so keep ``cfg`` small.
        """
        from .transforms import radon_many

        etas = np.stack([p.subspace.basis for p in planes])
        vs = np.stack([p.offset for p in planes])
        phi_vals = self.engine.phi.evaluate(etas, vs)
        rec = radon_many(self.reconstructed, etas, vs, cfg, engine="numpy")
        scale = max(np.max(np.abs(phi_vals)), 1e-300)
        return float(np.max(np.abs(rec - phi_vals)) / scale)


class _Inverter:
    def __init__(self, phi: ScalarField, cfg: TransformConfig, lmax: int, icfg: InversionConfig):
        self.phi = phi
        self.cfg = cfg
        self.lmax = lmax
        self.icfg = icfg
        self.engine = ProfileEngine(phi, cfg, icfg)
        self.kappa = composite_weights(lmax, max(cfg.circle_points, lmax // 2 + 1))
        self.J = self.kappa.size

    # -- processed profiles D(σ, ω; s) ------------------------------------
    def processed(self, u: np.ndarray, omegas: np.ndarray, svals: np.ndarray) -> np.ndarray:
        """``D(σ, ω_i; s)`` for the line ``u``, directions ``ω_i`` and rows ``svals[i]``."""
        etas, normals, oms, ss = [], [], [], []
        for w, srow in zip(omegas, svals):
            e, nrm = zonal_planes(u, w, self.lmax)
            etas.append(e)
            normals.append(nrm)
            oms.append(np.broadcast_to(w, nrm.shape))
            ss.append(np.broadcast_to(srow, (self.J, srow.size)))
        g = self.engine.profiles(np.concatenate(etas), np.concatenate(oms), np.concatenate(normals),
                                 np.concatenate(ss))
        g = g.reshape(len(omegas), self.J, -1)
        return np.einsum("j,ijs->is", self.kappa, g)

    # -- slice mode -------------------------------------------------------
    def direction_rule(self, u: np.ndarray, x: np.ndarray):
        """Half-sphere product rule on ``S_σ`` aligned with ``x``.

        Returns ``(omegas, weights, cosines)``; weights already include the
        factor 2 from folding ``ω → -ω``.
        """
        ic = self.icfg
        xr = float(np.linalg.norm(x))
        if xr > 0:
            xh = x / xr
        else:
            xh = complete_frame(u[:, None])[:, 0]
        a = complete_frame(np.column_stack([u, xh]))
        R = self.engine.radius
        cm = min(1.0, R / xr) if xr > 0 else 1.0
        c, w = (np.asarray(v) for v in gauss_legendre(ic.omega_polar))
        pos = c > 0
        c, w = cm * c[pos], cm * w[pos]
        ph = 2.0 * np.pi * (np.arange(ic.omega_azimuth) + 0.5) / ic.omega_azimuth
        cc, pp = np.meshgrid(c, ph, indexing="ij")
        sn = np.sqrt(1.0 - cc ** 2)
        om = (cc[..., None] * xh + sn[..., None] * (np.cos(pp)[..., None] * a[:, 0]
                                                      + np.sin(pp)[..., None] * a[:, 1]))
        wts = 2.0 * np.outer(w, np.full(ic.omega_azimuth, 2.0 * np.pi / ic.omega_azimuth))
        return om.reshape(-1, 4), wts.ravel(), cc.ravel()

    def evaluate_slice(self, u: np.ndarray, x: np.ndarray) -> float:
        h = self.icfg.fd_step
        xr = float(np.linalg.norm(x))
        om, wts, cos = self.direction_rule(u, x)
        s0 = xr * cos
        sv = s0[:, None] + h * np.arange(-2, 3)[None, :]
        D = self.processed(u, om, sv)
        d2 = (-D[:, 0] + 16.0 * D[:, 1] - 30.0 * D[:, 2] + 16.0 * D[:, 3] - D[:, 4]) / (12.0 * h * h)
        return float(-np.sum(wts * d2) / (8.0 * np.pi ** 2))

    # -- fourier mode -----------------------------------------------------
    def spectral_values(self, u: np.ndarray, omegas: np.ndarray, lam: np.ndarray) -> np.ndarray:
        """``F̃(σ, ω_i; λ_i)`` by Gauss–Legendre in ``s`` of the processed profiles."""
        sg, sw = (np.asarray(a) for a in gauss_legendre(self.icfg.s_points))
        R = self.engine.radius
        s = R * sg
        keys = np.round(omegas, 14)
        uniq, inv = np.unique(keys, axis=0, return_inverse=True)
        inv = inv.reshape(-1)
        D = self.processed(u, omegas[[np.nonzero(inv == g)[0][0] for g in range(uniq.shape[0])]],
                           np.broadcast_to(s, (uniq.shape[0], s.size)))
        out = np.empty(omegas.shape[0], dtype=complex)
        for g in range(uniq.shape[0]):
            idx = np.nonzero(inv == g)[0]
            out[idx] = (R * D[g] * sw) @ np.exp(-1j * np.outer(s, lam[idx]))
        return out

    def spectral_field(self) -> ScalarField:
        def ev(B, om, lam):
            B = np.asarray(B, dtype=float)
            om = np.asarray(om, dtype=float)
            lam = np.asarray(lam)
            out = np.empty(om.shape[0], dtype=complex)
            keys = np.round(B.reshape(B.shape[0], -1), 14)
            uniq, inv = np.unique(keys, axis=0, return_inverse=True)
            inv = inv.reshape(-1)
            for g in range(uniq.shape[0]):
                idx = np.nonzero(inv == g)[0]
                out[idx] = self.spectral_values(B[idx[0], :, 0], om[idx], lam[idx])
            return out

        return ScalarField("flag", 1, 4, ev, "generic", None, None, None, "F~ (pipeline)", even=True)

    def evaluate_fourier(self, u: np.ndarray, x: np.ndarray) -> float:
        return float(np.real(partial_fourier_inverse(self.spectral_field(), Subspace(u), x, self.cfg)))

    def evaluate(self, B: np.ndarray, X: np.ndarray) -> np.ndarray:
        B = np.asarray(B, dtype=float)
        X = np.asarray(X, dtype=float)
        out = np.empty(X.shape[0])
        for i in range(X.shape[0]):
            u = B[i, :, 0]
            if self.icfg.mode == "slice":
                out[i] = self.evaluate_slice(u, X[i])
            else:
                out[i] = self.evaluate_fourier(u, X[i])
        return out

    # -- diagnostics ------------------------------------------------------
    def compact_transform_gap(self, probes: int, seed: int) -> float:
        """Max relative gap between ``∫_{σ⊂η} D(σ, ω; s) dσ`` and ``g(η, ω; s)``.

        The compact fiber transform of the processed profile must return the
        raw profile (band-limited up to ``lmax``); for ``φ ≡ 0`` the gap is 0.
        """
        if probes <= 0:
            return 0.0
        rng = make_rng(seed, STREAM_DIAGNOSTICS)
        gaps, scale = [], 0.0
        m = self.cfg.circle_points
        for _ in range(probes):
            w = random_unit_in(rng, np.eye(4))
            perp = complete_frame(w[:, None])
            nrm = random_unit_in(rng, perp)
            eta_b = complete_frame(np.column_stack([w, nrm]))
            s = float(rng.uniform(-0.5, 0.5) * self.engine.radius)
            g = self.engine.profiles(eta_b[None], w[None], nrm[None], np.array([[s]]))[0, 0]
            eta = Subspace(eta_b)
            lines = sub_grassmannian_circle(eta, m)
            avg = sum(wt * self.processed(sl.basis[:, 0], w[None], np.array([[s]]))[0, 0] for sl, wt in lines)
            gaps.append(abs(avg - g))
            scale = max(scale, abs(g))
        return float(max(gaps) / scale) if scale > 0 else float(max(gaps))


def invert_equal_rank(phi: ScalarField, cfg: TransformConfig = DEFAULT_CONFIG, lmax: int = 16,
                      icfg: InversionConfig = DEFAULT_INVERSION, seed: int = DEFAULT_SEED,
                      diagnostics: bool = True) -> InversionResult:
    """Reconstruct ``f`` on G(1,4) from ``φ = R^(1,2) f`` on G(2,4).

    Raises
    ------
    UnsupportedCase
        ``φ`` is not a field on G(2,4).
    RuleTooCoarse
        The grids cannot resolve harmonics up to ``lmax``.
    """
    _check_phi(phi)
    if lmax < 0 or lmax % 2:
        raise ValueError("lmax must be a non-negative even integer")
    inv = _Inverter(phi, cfg, lmax, icfg)
    rec = ScalarField("affine", 1, 4, inv.evaluate, "generic", None, None, None,
                      f"invert({phi.label})")
    diag = {
        "lmax": lmax,
        "mode": icfg.mode,
        "normal_grid": inv.J,
        "direction_grid": (icfg.omega_polar // 2, icfg.omega_azimuth),
        "profile_points": icfg.profile_points,
        "fd_step": icfg.fd_step,
        "profile_radius": inv.engine.radius,
        "fused": inv.engine.fused,
    }
    if diagnostics:
        diag["compact_transform_gap"] = inv.compact_transform_gap(icfg.diagnostic_probes, seed)
    return InversionResult(rec, inv.spectral_field(), diag, inv)
