"""Numerical harnesses for Paley–Wiener conditions and support theorems.

Nothing here proves a support statement.  Each harness evaluates the
quantities a proof manipulates (complex-frequency growth, small-frequency
behaviour of harmonic projections, reconstructions from truncated or
restricted data) and reports them as magnitudes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import sph_harm_y

from .errors import ConditionANotRepresentable, DomainMismatch, NotCompactlySupported, UnsupportedCase
from .fields import FieldSpec, ScalarField, parse_field_spec
from .geometry import (
    DEFAULT_SEED,
    AffinePlane,
    FlagPoint,
    Subspace,
    complete_frame,
    gauss_legendre,
    make_rng,
    random_subspace,
    random_unit_in,
    sphere_rule,
)
from .range import DEFAULT_INVERSION, InversionConfig, invert_equal_rank
from .transforms import (
    DEFAULT_CONFIG,
    TransformConfig,
    partial_fourier_many,
    radon_field,
    radon_many,
    restrict_to_hyperplane,
)

STREAM_PW = 21
STREAM_SUPPORT = 22
STREAM_TRUNCATE = 23
STREAM_HYPERPLANE = 24


@dataclass
class PaleyWienerReport:
    """Magnitudes behind the two Paley–Wiener conditions.

    Attributes
    ----------
    R : float
        Claimed support radius.
    condition_i_sup : dict
        ``N -> max |(1+|λ|)^N F̃ e^{-R|Im λ|}|`` over the probe grid.
    growth_factor : dict
        ``N -> `` (sup on the row of largest ``|Im λ|``) / (sup on the real axis).
    condition_ii_evenness : float
        Largest odd coefficient of the small-``λ`` fits.
    condition_ii_pole : float
        Largest ``|g(λ)|`` at the smallest ``|λ|`` of the grid, in units of
        ``A · max|F̃| · R^k`` (``A`` the sphere area).  Entire ``g`` keep it
        of order one or below; a pole at 0 makes it grow like ``1/|λ|``.
    per_harmonic : list
        ``{"k", "index", "odd", "pole", "g0"}`` per harmonic ``(k, index)``.
    lambda_grid : np.ndarray
        The frequencies used (complex for condition (i), real for (ii)).
    value_at_zero : float
        ``max |F̃(σ, ω; 0)|`` over the probe flags (condition (i) only).
    """

    R: float = 0.0
    condition_i_sup: dict = field(default_factory=dict)
    growth_factor: dict = field(default_factory=dict)
    condition_ii_evenness: float = 0.0
    condition_ii_pole: float = 0.0
    per_harmonic: list = field(default_factory=list)
    lambda_grid: np.ndarray = field(default_factory=lambda: np.zeros(0))
    value_at_zero: float = 0.0


@dataclass
class SupportReport:
    """Exterior magnitude of a field or reconstruction.

    ``claimed_R`` is the radius being tested (``None`` for hyperplane runs),
    ``max_abs_outside`` the largest magnitude seen beyond it and ``extras``
    any harness-specific numbers (peaks, controls, per-probe rows).
    """

    claimed_R: float | None
    max_abs_outside: float
    probe_count: int
    extras: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# Paley–Wiener condition (i)
# ---------------------------------------------------------------------------

def default_complex_grid(re_max: float = 10.0, re_points: int = 41, im_max: float = 5.0,
                         im_points: int = 6) -> np.ndarray:
    """Rectangular grid ``Re λ ∈ [-re_max, re_max]`` by ``Im λ ∈ [0, im_max]``."""
    re = np.linspace(-re_max, re_max, re_points)
    im = np.linspace(0.0, im_max, im_points)
    return (re[None, :] + 1j * im[:, None]).ravel()


def _require_compact(f: ScalarField):
    if f.domain != "affine":
        raise DomainMismatch("expected a field on an affine Grassmannian")
    if f.smoothness != "compact" or f.radius is None:
        raise NotCompactlySupported("complex-frequency checks need a compactly supported field")


def default_probe_flags(f: ScalarField, count: int = 4, seed: int = DEFAULT_SEED) -> list[FlagPoint]:
    rng = make_rng(seed, STREAM_PW)
    out = []
    for _ in range(count):
        if f.p == 0:
            sigma = Subspace(np.zeros((f.n, 0)))
            w = random_unit_in(rng, np.eye(f.n))
        else:
            sigma = random_subspace(rng, f.n, f.p)
            w = random_unit_in(rng, complete_frame(sigma.basis))
        out.append(FlagPoint(sigma, w))
    return out


def pw_condition_i(f: ScalarField, R: float, N_list=(0, 2), lambda_grid=None, probe_flags=None,
                   cfg: TransformConfig = DEFAULT_CONFIG) -> PaleyWienerReport:
    """Weighted complex-frequency sup of ``F̃(σ, ω; λ)`` for a claimed radius ``R``.

    Raises
    ------
    NotCompactlySupported
        ``f`` is not compactly supported.
    OverflowGuard
        ``|Im λ|`` times the fiber radius exceeds 50.
    """
    _require_compact(f)
    lam = default_complex_grid() if lambda_grid is None else np.asarray(lambda_grid, dtype=complex)
    flags = default_probe_flags(f) if probe_flags is None else list(probe_flags)
    mags = np.zeros((len(flags), lam.size))
    for i, fl in enumerate(flags):
        ys = lam[:, None] * fl.direction[None, :]
        mags[i] = np.abs(partial_fourier_many(f, fl.subspace, ys, cfg))
    im = np.abs(lam.imag)
    damp = np.exp(-R * im)
    report = PaleyWienerReport(R=float(R), lambda_grid=lam)
    top = np.isclose(im, im.max()) if lam.size else np.zeros(0, bool)
    real = np.isclose(im, 0.0)
    at_zero = np.abs(lam) == 0
    if at_zero.any():
        report.value_at_zero = float(mags[:, at_zero].max())
    for N in N_list:
        W = (1.0 + np.abs(lam)) ** N * mags * damp
        report.condition_i_sup[int(N)] = float(W.max(initial=0.0))
        if real.any() and top.any() and not np.array_equal(top, real):
            base = W[:, real].max()
            report.growth_factor[int(N)] = float(W[:, top].max() / base) if base > 0 else 0.0
    return report


# ---------------------------------------------------------------------------
# Paley–Wiener condition (ii)
# ---------------------------------------------------------------------------

def default_small_lambda_grid(points: int = 12) -> np.ndarray:
    """Symmetric geometric grid ``±[1e-3, 1e-1]``."""
    g = np.geomspace(1e-3, 1e-1, points)
    return np.concatenate([-g[::-1], g])


def real_harmonics(d: int, kmax: int) -> list[tuple[int, int, callable]]:
    """Orthonormal real harmonics of degree ``k ≤ kmax`` on ``S^{d-1}`` (``d`` = 2 or 3).

    Each entry is ``(k, index, h)`` with ``h`` acting on unit vectors in
    local coordinates.
    """
    out = []
    if d == 2:
        for k in range(kmax + 1):
            if k == 0:
                out.append((0, 0, lambda w: np.full(w.shape[0], 1.0 / math.sqrt(2 * math.pi))))
                continue
            out.append((k, 0, lambda w, k=k: np.cos(k * np.arctan2(w[:, 1], w[:, 0])) / math.sqrt(math.pi)))
            out.append((k, 1, lambda w, k=k: np.sin(k * np.arctan2(w[:, 1], w[:, 0])) / math.sqrt(math.pi)))
        return out
    if d != 3:
        raise UnsupportedCase("harmonics are provided on S^1 and S^2")

    def angles(w):
        return np.arccos(np.clip(w[:, 2], -1.0, 1.0)), np.arctan2(w[:, 1], w[:, 0])

    for k in range(kmax + 1):
        for idx, m in enumerate(range(-k, k + 1)):
            def h(w, k=k, m=m):
                th, ph = angles(w)
                y = sph_harm_y(k, abs(m), th, ph)
                if m == 0:
                    return np.real(y)
                return math.sqrt(2.0) * (-1) ** m * (np.imag(y) if m < 0 else np.real(y))
            out.append((k, idx, h))
    return out


def pw_condition_ii(f: ScalarField, kmax: int = 3, harmonics=None, small_lambda_grid=None,
                    sigma: Subspace | None = None, cfg: TransformConfig = DEFAULT_CONFIG,
                    fit_degree: int = 5) -> PaleyWienerReport:
    """Small-frequency behaviour of ``g(λ) = λ^{-k} ∫_{S_σ} F̃(σ, ω; λ) h(ω) dω``.

    Each ``g`` is least-squares fitted by ``Σ_{j=-1}^{fit_degree} a_j t^j``
    with ``t = λ / max|λ|``.  The odd coefficients (including the pole
    coefficient ``a_{-1}``) measure departures from evenness; the pole proxy
    measures ``|g|`` at the smallest ``|λ|`` against the natural scale
    ``A · max|F̃| · R^k`` of a degree-``k`` moment.
    """
    _require_compact(f)
    d = f.n - f.p
    lam = default_small_lambda_grid() if small_lambda_grid is None else np.asarray(small_lambda_grid, float)
    if sigma is None:
        sigma = Subspace(np.zeros((f.n, 0))) if f.p == 0 else random_subspace(make_rng(DEFAULT_SEED, STREAM_PW), f.n, f.p)
    harm = real_harmonics(d, kmax) if harmonics is None else list(harmonics)
    Q = complete_frame(sigma.basis)
    order = cfg.sphere_order | 1  # odd order: antipodally symmetric nodes
    rule = sphere_rule(d, order)
    area = 2.0 * math.pi if d == 2 else 4.0 * math.pi
    omegas = rule.nodes @ Q.T
    ys = (lam[:, None, None] * omegas[None]).reshape(-1, f.n)
    Ft = partial_fourier_many(f, sigma, ys, cfg).reshape(lam.size, -1)
    t = lam / np.max(np.abs(lam))
    powers = np.arange(-1, fit_degree + 1)
    A = t[:, None] ** powers[None, :]
    odd = powers % 2 != 0
    report = PaleyWienerReport(R=float(f.radius), lambda_grid=lam)
    small = np.abs(lam) == np.min(np.abs(lam))
    base = area * float(np.max(np.abs(Ft), initial=0.0))
    for k, idx, h in harm:
        hv = h(rule.nodes)
        proj = area * (Ft @ (rule.weights * hv))
        scale = base * float(f.radius) ** k
        g = proj / lam ** k / scale if scale > 0 else np.zeros(lam.size)
        coef, *_ = np.linalg.lstsq(A, g, rcond=None)
        report.per_harmonic.append({"k": k, "index": idx, "odd": float(np.max(np.abs(coef[odd]))),
                                    "pole": float(np.max(np.abs(g[small]))),
                                    "g0": complex(coef[powers == 0][0] * scale)})
    report.condition_ii_evenness = max((r["odd"] for r in report.per_harmonic), default=0.0)
    report.condition_ii_pole = max((r["pole"] for r in report.per_harmonic), default=0.0)
    return report


# ---------------------------------------------------------------------------
# Support radius
# ---------------------------------------------------------------------------

def _random_planes_at(rng, n: int, p: int, dist: float, count: int):
    etas, vs = [], []
    for _ in range(count):
        s = random_subspace(rng, n, p) if p else Subspace(np.zeros((n, 0)))
        perp = complete_frame(s.basis) if p else np.eye(n)
        etas.append(s.basis)
        vs.append(dist * random_unit_in(rng, perp))
    return np.stack(etas), np.stack(vs)


def support_radius(f: ScalarField, threshold: float, probe_distances, probes_per_distance: int = 16,
                   seed: int = DEFAULT_SEED) -> SupportReport:
    """Estimate the support radius of ``f`` from random planes at given distances.

    ``claimed_R`` is the largest probed distance with a sample above
    ``threshold`` (0 when none is); ``extras["by_distance"]`` lists
    ``(distance, max |f|)``, from which :func:`max_abs_outside` evaluates
    any other candidate radius.
    """
    if not threshold > 0:
        raise ValueError("threshold must be positive")
    if f.domain != "affine":
        raise DomainMismatch("expected a field on an affine Grassmannian")
    rng = make_rng(seed, STREAM_SUPPORT)
    rows = []
    for d in sorted(float(x) for x in probe_distances):
        B, V = _random_planes_at(rng, f.n, f.p, d, probes_per_distance)
        rows.append((d, float(np.max(np.abs(f.evaluate(B, V)), initial=0.0))))
    above = [d for d, m in rows if m > threshold]
    est = max(above) if above else 0.0
    rep = SupportReport(est, max_abs_outside(rows, est), probes_per_distance * len(rows),
                        {"by_distance": rows, "threshold": threshold})
    return rep


def max_abs_outside(by_distance, R: float) -> float:
    """Largest sampled magnitude at distances strictly beyond ``R``."""
    return max((m for d, m in by_distance if d > R), default=0.0)


# ---------------------------------------------------------------------------
# Support Theorem I: truncated data
# ---------------------------------------------------------------------------

def exterior_probe_planes(R: float, count: int, seed: int, n: int = 4, p: int = 1,
                          width: float = 1.0) -> list[AffinePlane]:
    """Seeded p-planes at fiber distances spread over ``(R, R + width]``."""
    rng = make_rng(seed, STREAM_TRUNCATE)
    out = []
    for j in range(count):
        d = R + width * (j + 1) / count
        B, V = _random_planes_at(rng, n, p, d, 1)
        out.append(AffinePlane(Subspace(B[0]), V[0]))
    return out


def support_theorem_I_harness(f: ScalarField, R: float, cfg: TransformConfig = DEFAULT_CONFIG,
                              lmax: int = 16, icfg: InversionConfig = DEFAULT_INVERSION,
                              probes: int = 12, seed: int = DEFAULT_SEED) -> SupportReport:
    """Reconstruct ``f`` from its transform hard-truncated at ``‖v‖ = R``.

    The report's ``max_abs_outside`` is the largest reconstructed magnitude
    on ``probes`` lines at distances in ``(R, R+1]``; ``extras`` carries the
    peak of ``f`` and the relative exterior magnitude.
    """
    if f.domain != "affine" or (f.p, f.n) != (1, 4):
        raise UnsupportedCase("the truncation harness is implemented for fields on G(1,4)")
    phi = radon_field(f, 2, cfg).truncated(R)
    res = invert_equal_rank(phi, cfg, lmax, icfg, seed=seed, diagnostics=False)
    planes = exterior_probe_planes(R, probes, seed)
    B = np.stack([pl.subspace.basis for pl in planes])
    X = np.stack([pl.offset for pl in planes])
    vals = res.evaluate_many(B, X) if probes else np.zeros(0)
    peak = f.peak if f.peak is not None else 1.0
    mx = float(np.max(np.abs(vals), initial=0.0))
    rows = [(float(np.linalg.norm(x)), float(v)) for x, v in zip(X, vals)]
    return SupportReport(float(R), mx, probes,
                         {"peak": peak, "relative": mx / peak if peak else mx, "rows": rows})


# ---------------------------------------------------------------------------
# Support Theorem II: hyperplane restriction, case (0,1,3)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DomainSpec:
    """An excluded domain ``O`` from the catalog ``ball``, ``band``, ``two_caps``."""

    kind: str
    a: float = 0.0
    b: float = 0.0
    r: float = 0.0

    def render(self) -> str:
        if self.kind == "ball":
            return f"ball(r={self.r!r})"
        if self.kind == "band":
            return f"band(a={self.a!r},b={self.b!r})"
        return f"two_caps(a={self.a!r},b={self.b!r},r={self.r!r})"


def parse_domain(spec: "str | FieldSpec | DomainSpec") -> DomainSpec:
    """Parse ``ball(r=..)``, ``band(a=..,b=..)`` or ``two_caps(a=..,b=..,r=..)``."""
    if isinstance(spec, DomainSpec):
        d = spec
    else:
        fs = parse_field_spec(spec, validate=False) if isinstance(spec, str) else spec
        keys = {k for k, _ in fs.params}
        allowed = {"ball": {"r"}, "band": {"a", "b"}, "two_caps": {"a", "b", "r"}}
        if fs.name not in allowed or not keys <= allowed[fs.name]:
            raise ConditionANotRepresentable(f"domain {fs.render()} is outside the catalog")
        defaults = {"ball": (0.0, 0.0, 2.0), "band": (-1.0, 1.0, 0.0), "two_caps": (-1.0, 1.0, 2.0)}[fs.name]
        d = DomainSpec(fs.name, fs.get("a", defaults[0]), fs.get("b", defaults[1]), fs.get("r", defaults[2]))
    if d.kind not in ("ball", "band", "two_caps"):
        raise ConditionANotRepresentable(f"unknown domain kind {d.kind!r}")
    if d.kind in ("ball", "two_caps") and not d.r > 0:
        raise ConditionANotRepresentable("radius must be positive")
    if d.kind in ("band", "two_caps") and not d.a < d.b:
        raise ConditionANotRepresentable("need a < b")
    return d


def _half_ball_support(nu: np.ndarray, center: float, r: float, side: float) -> np.ndarray:
    """Support function of ``{‖x - c e1‖ ≤ r, side·(x1 - c) ≥ 0}``."""
    s = side * nu[:, 0]
    return center * nu[:, 0] + np.where(s >= 0, r, r * np.sqrt(np.clip(1.0 - nu[:, 0] ** 2, 0.0, None)))


def exterior_hyperplanes(dom: DomainSpec, count: int, seed: int, margin: float = 0.05) -> list[AffinePlane]:
    """Seeded hyperplanes of R³ contained in the complement of ``dom``.

    ``ball``: normals uniform on S², offsets in ``(r + margin, r + margin + 1)``.
    ``band``: the planes ``x1 = c`` with ``c`` evenly spread in ``(a, b)``.
    ``two_caps``: alternately planes ``x1 = c`` and planes beyond both caps
    along random normals (offset above both support functions).
    """
    rng = make_rng(seed, STREAM_HYPERPLANE)
    e1 = np.array([1.0, 0.0, 0.0])
    out = []
    for j in range(count):
        if dom.kind == "band" or (dom.kind == "two_caps" and j % 2 == 0):
            jj = j if dom.kind == "band" else j // 2
            cnt = count if dom.kind == "band" else (count + 1) // 2
            c = dom.a + (dom.b - dom.a) * (jj + 0.5) / cnt
            nu, h = e1, c
        else:
            nu = random_unit_in(rng, np.eye(3))
            if dom.kind == "ball":
                h = dom.r + margin + float(rng.uniform())
            else:
                hs = max(_half_ball_support(nu[None], dom.a, dom.r, -1.0)[0],
                         _half_ball_support(nu[None], dom.b, dom.r, 1.0)[0])
                h = hs + margin + float(rng.uniform())
        out.append(AffinePlane(Subspace(complete_frame(nu[:, None])), h * nu))
    return out


def in_domain(dom: DomainSpec, x: np.ndarray) -> np.ndarray:
    """Membership of points ``x`` (shape ``(N, 3)``) in the closed domain ``O``."""
    x = np.atleast_2d(x)
    if dom.kind == "ball":
        return np.linalg.norm(x, axis=1) <= dom.r
    if dom.kind == "band":
        return (x[:, 0] <= dom.a) | (x[:, 0] >= dom.b)
    y = x.copy()
    y[:, 0] -= dom.a
    z = x.copy()
    z[:, 0] -= dom.b
    return (((np.linalg.norm(y, axis=1) <= dom.r) & (x[:, 0] <= dom.a))
            | ((np.linalg.norm(z, axis=1) <= dom.r) & (x[:, 0] >= dom.b)))


@dataclass(frozen=True)
class ClassicalInversionConfig:
    """Grids of the classical 2D inversion on a hyperplane."""

    directions: int = 128
    offset_points: int = 256
    lambda_max: float = 60.0
    lambda_points: int = 601
    window: float = 4.0


def classical_inverse_2d(fL: ScalarField, points: np.ndarray, ccfg: ClassicalInversionConfig = ClassicalInversionConfig(),
                         cfg: TransformConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Reconstruct a point field on R² from its line transform.

    Line data ``R fL(ω⊥, sω)`` is Fourier transformed in ``s`` (projection
    slice gives ``F_0 fL(λω)``) and inverted in polar coordinates,
    ``fL(x) = (2π)^{-2} ∫_{S¹} ∫_0^Λ F(λω) e^{iλ<x,ω>} λ dλ dω``.
    """
    if (fL.p, fL.n) != (0, 2):
        raise UnsupportedCase("classical inversion needs a point field on R^2")
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    rad = float(fL.radius) if fL.smoothness == "compact" and fL.radius is not None else ccfg.window
    if rad <= 0:
        return np.zeros(pts.shape[0])
    K = ccfg.directions
    th = 2.0 * np.pi * np.arange(K) / K
    om = np.column_stack([np.cos(th), np.sin(th)])
    lines = np.column_stack([-om[:, 1], om[:, 0]])[:, :, None]
    sg, sw = (np.asarray(a) for a in gauss_legendre(ccfg.offset_points))
    s = rad * sg
    etas = np.repeat(lines, s.size, axis=0)
    vs = (om[:, None, :] * s[None, :, None]).reshape(-1, 2)
    Rv = radon_many(fL, etas, vs, cfg, engine="numpy").reshape(K, s.size)
    lg, lw = (np.asarray(a) for a in gauss_legendre(ccfg.lambda_points))
    lam = 0.5 * ccfg.lambda_max * (lg + 1.0)
    tw = 0.5 * ccfg.lambda_max * lw
    F = (rad * Rv * sw) @ np.exp(-1j * np.outer(s, lam))  # (K, Λ)
    proj = pts @ om.T  # (P, K)
    out = np.empty(pts.shape[0])
    for i in range(pts.shape[0]):
        ph = np.exp(1j * proj[i][:, None] * lam[None, :])
        out[i] = np.real(np.sum(F * ph * (tw * lam))) * (2.0 * np.pi / K) / (2.0 * np.pi) ** 2
    return out


def _disk_points(radius: float, rings: int = 4, per_ring: int = 8) -> np.ndarray:
    pts = [np.zeros(2)]
    for i in range(1, rings + 1):
        r = radius * i / rings
        a = 2.0 * np.pi * (np.arange(per_ring * i) + 0.5 * (i % 2)) / (per_ring * i)
        pts.extend(np.column_stack([r * np.cos(a), r * np.sin(a)]))
    return np.vstack(pts)


def support_theorem_II_harness(f: ScalarField, O_spec, hyperplane_count: int = 50,
                               cfg: TransformConfig = DEFAULT_CONFIG, seed: int = DEFAULT_SEED,
                               ccfg: ClassicalInversionConfig = ClassicalInversionConfig(),
                               sample_radius: float = 4.0, control: bool = True) -> SupportReport:
    """Restriction test for a point field ``f`` on R³ and an excluded domain ``O``.

    For each hyperplane ``L ⊂ O^c`` the field is restricted to ``L``, its
    2D line transform is computed and inverted, and the reconstruction is
    sampled on a disk of ``L``.  ``max_abs_outside`` is the largest such
    magnitude.  ``extras`` also reports the peak of ``f``, the worst
    discrepancy between 3D line integrals and 2D integrals of the
    restriction on lines of the first hyperplane, and (``control=True``) the
    relative error of the same pipeline on a plane through the centre of
    the support, where the reconstruction is not zero.
    """
    if f.domain != "affine" or (f.p, f.n) != (0, 3):
        raise UnsupportedCase("the restriction harness is implemented for point fields on R^3")
    dom = parse_domain(O_spec)
    planes = exterior_hyperplanes(dom, hyperplane_count, seed)
    disk = _disk_points(sample_radius)
    peak = f.peak if f.peak is not None else 1.0
    worst = 0.0
    per_plane = []
    for L in planes:
        fL = restrict_to_hyperplane(f, L)
        rec = classical_inverse_2d(fL, disk, ccfg, cfg)
        m = float(np.max(np.abs(rec)))
        per_plane.append((L.offset.tolist(), m))
        worst = max(worst, m)
    extras = {"peak": peak, "relative": worst / peak if peak else worst, "domain": dom.render(),
              "per_plane": per_plane}
    if planes:
        extras["restriction_gap"] = _restriction_gap(f, planes[0], cfg, seed)
    if control:
        extras.update(_control_reconstruction(f, ccfg, cfg))
    return SupportReport(None, worst, len(planes), extras)


def _restriction_gap(f: ScalarField, L: AffinePlane, cfg: TransformConfig, seed: int, count: int = 8) -> float:
    """Max ``|R f(ξ) - R_L f_L(ξ)|`` over seeded lines ``ξ ⊂ L``."""
    rng = make_rng(seed, STREAM_HYPERPLANE, 1)
    fL = restrict_to_hyperplane(f, L)
    Lb = L.subspace.basis
    gap = 0.0
    for _ in range(count):
        th = rng.uniform(0, np.pi)
        d2 = np.array([np.cos(th), np.sin(th)])
        off2 = rng.uniform(-2, 2) * np.array([-d2[1], d2[0]])
        r2 = radon_many(fL, d2[None, :, None], off2[None], cfg, engine="numpy")[0]
        r3 = radon_many(f, (Lb @ d2)[None, :, None], (L.offset + Lb @ off2)[None], cfg)[0]
        gap = max(gap, abs(r2 - r3))
    return float(gap)


def _control_reconstruction(f: ScalarField, ccfg: ClassicalInversionConfig, cfg: TransformConfig) -> dict:
    """Run the classical pipeline on the plane ``x3 = c3`` through the field's centre of mass."""
    g = np.linspace(-3.5, 3.5, 15)
    X = np.stack(np.meshgrid(g, g, g, indexing="ij"), axis=-1).reshape(-1, 3)
    vals = f.evaluate(np.zeros((X.shape[0], 3, 0)), X)
    if not np.any(vals):
        return {"control_relative_error": 0.0}
    c = X[np.argmax(np.abs(vals))]
    L = AffinePlane(Subspace(np.eye(3)[:, :2]), np.array([0.0, 0.0, c[2]]))
    fL = restrict_to_hyperplane(f, L)
    pts = c[:2] + _disk_points(1.0, rings=2)
    rec = classical_inverse_2d(fL, pts, ccfg, cfg)
    true = fL.evaluate(np.zeros((pts.shape[0], 2, 0)), pts)
    scale = max(float(np.max(np.abs(true))), 1e-300)
    return {"control_relative_error": float(np.max(np.abs(rec - true)) / scale)}
